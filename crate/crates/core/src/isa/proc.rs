use super::{
    decode, DecodeError, DecodedInstr, InvalidationBuffer, RegId, StoreBuffer, ThreadCode,
    Timestamp, Value,
};

/// One atomic processor: registers (with WMM-D timestamps), pc, `rts` and
/// the two buffers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcState {
    pub pc: usize,
    pub regs: Vec<Value>,
    pub reg_ts: Vec<Timestamp>,
    pub rts: Timestamp,
    pub sb: StoreBuffer,
    pub ib: InvalidationBuffer,
}

impl ProcState {
    pub fn new(num_regs: usize) -> Self {
        ProcState {
            pc: 0,
            regs: vec![0; num_regs],
            reg_ts: vec![0; num_regs],
            rts: 0,
            sb: StoreBuffer::default(),
            ib: InvalidationBuffer::default(),
        }
    }

    pub fn decode(&self, code: &ThreadCode) -> Result<DecodedInstr, DecodeError> {
        decode(code, self.pc, |r| self.regs[r])
    }

    /// Decode and compute the maximum timestamp of the registers actually
    /// read. The pc never contributes.
    pub fn decode_ts(&self, code: &ThreadCode) -> Result<(DecodedInstr, Timestamp), DecodeError> {
        let mut ts = 0;
        let d = decode(code, self.pc, |r: RegId| {
            ts = ts.max(self.reg_ts[r]);
            self.regs[r]
        })?;
        Ok((d, ts))
    }

    /// Write the destination and advance the pc. `ld_res` is ignored for
    /// everything but loads.
    pub fn execute(&mut self, d: &DecodedInstr, ld_res: Option<Value>) {
        match *d {
            DecodedInstr::Nm { dst, value, jump } => {
                if let Some(r) = dst {
                    self.regs[r] = value;
                }
                self.pc = jump.unwrap_or(self.pc + 1);
            }
            DecodedInstr::Ld { dst, .. } => {
                self.regs[dst] = ld_res.expect("load executed without a result");
                self.pc += 1;
            }
            DecodedInstr::St { .. } | DecodedInstr::Commit | DecodedInstr::Reconcile => {
                self.pc += 1
            }
            DecodedInstr::Halt => {}
        }
    }

    /// `execute`, then stamp the destination register with `ts`.
    pub fn execute_ts(&mut self, d: &DecodedInstr, ld_res: Option<Value>, ts: Option<Timestamp>) {
        self.execute(d, ld_res);
        if let (Some(r), Some(ts)) = (d.dst(), ts) {
            self.reg_ts[r] = ts;
        }
    }

    pub fn is_halted(&self, code: &ThreadCode) -> bool {
        match code.instrs.get(self.pc) {
            None => true,
            Some(i) => matches!(i, super::Instr::Exit),
        }
    }
}
