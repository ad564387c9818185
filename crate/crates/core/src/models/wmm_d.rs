//! WMM-D: WMM with timestamps that let a load observe a stale value only if
//! the value was still in memory when the load's address became known.
//!
//! Every register value carries a timestamp; memory cells remember the
//! creation time (`sts`) and the visibility time (`mts`) of the store that
//! wrote them; ib entries carry the interval `[ts_lo, ts_hi]` during which
//! the stale value was visible.

use crate::isa::{DecodedInstr, IbEntry, Program, SbEntry, Timestamp};
use crate::state::{MachineState, MemCell, Rule, RuleInstance};

use super::ModelError;

/// Timestamp of a load result: the max of the address operand's time, the
/// last Reconcile, and the time the value became visible.
pub fn load_value_timestamp(ats: Timestamp, rts: Timestamp, vts: Timestamp) -> Timestamp {
    ats.max(rts).max(vts)
}

pub(super) fn enabled(
    program: &Program,
    state: &MachineState,
) -> Result<Vec<RuleInstance>, ModelError> {
    let mut out = Vec::new();
    for (i, p) in state.procs.iter().enumerate() {
        let (d, ts) = p.decode_ts(&program.threads[i])?;
        match d {
            DecodedInstr::Halt => {}
            DecodedInstr::Nm { .. } => out.push(RuleInstance::new(i, Rule::Nm)),
            DecodedInstr::Ld { addr, .. } => {
                if p.sb.exist(addr) {
                    out.push(RuleInstance::new(i, Rule::LdSb));
                } else {
                    out.push(RuleInstance::new(i, Rule::LdMem));
                    for (entry, e) in p.ib.entries_for(addr).enumerate() {
                        if ts <= e.ts_hi {
                            out.push(RuleInstance::new(i, Rule::LdIb { entry }));
                        }
                    }
                }
            }
            DecodedInstr::St { .. } => out.push(RuleInstance::new(i, Rule::St)),
            DecodedInstr::Commit => {
                if p.sb.is_empty() {
                    out.push(RuleInstance::new(i, Rule::Com));
                }
            }
            DecodedInstr::Reconcile => out.push(RuleInstance::new(i, Rule::Rec)),
        }
        for addr in p.sb.addrs() {
            out.push(RuleInstance::new(i, Rule::DeqSb { addr }));
        }
    }
    Ok(out)
}

pub(super) fn apply(
    program: &Program,
    state: &MachineState,
    inst: &RuleInstance,
) -> Result<MachineState, ModelError> {
    let i = inst.proc;
    let mut s = state.clone();
    let gts = s.gts;
    let (d, ts) = s.procs[i].decode_ts(&program.threads[i])?;
    let refuse = || Err(ModelError::not_enabled(inst));
    match (inst.rule, d) {
        (Rule::Nm, DecodedInstr::Nm { .. }) => s.procs[i].execute_ts(&d, None, Some(ts)),
        (Rule::LdSb, DecodedInstr::Ld { addr, .. }) => {
            let p = &mut s.procs[i];
            let Some(&e) = p.sb.youngest(addr) else {
                return refuse();
            };
            let t = load_value_timestamp(ts, p.rts, e.sts);
            p.execute_ts(&d, Some(e.value), Some(t));
        }
        (Rule::LdMem, DecodedInstr::Ld { addr, .. }) => {
            let cell = s.cell(addr);
            let p = &mut s.procs[i];
            if p.sb.exist(addr) {
                return refuse();
            }
            let vts = if cell.writer == Some(i) {
                cell.sts
            } else {
                cell.mts
            };
            let t = load_value_timestamp(ts, p.rts, vts);
            p.execute_ts(&d, Some(cell.value), Some(t));
            p.ib.rm_addr(addr);
        }
        (Rule::LdIb { entry }, DecodedInstr::Ld { addr, .. }) => {
            let p = &mut s.procs[i];
            let Some(e) = p.ib.random(addr, entry) else {
                return refuse();
            };
            if p.sb.exist(addr) || ts > e.ts_hi {
                return refuse();
            }
            let t = load_value_timestamp(ts, p.rts, e.ts_lo);
            p.execute_ts(&d, Some(e.value), Some(t));
            p.ib.rm_older(addr, e.ts_hi);
        }
        (Rule::St, DecodedInstr::St { addr, value }) => {
            let p = &mut s.procs[i];
            p.execute_ts(&d, None, None);
            p.sb.enq(SbEntry {
                sts: ts,
                ..SbEntry::new(addr, value)
            });
            p.ib.rm_addr(addr);
        }
        (Rule::Com, DecodedInstr::Commit) => {
            if !s.procs[i].sb.is_empty() {
                return refuse();
            }
            s.procs[i].execute_ts(&d, None, None);
        }
        (Rule::Rec, DecodedInstr::Reconcile) => {
            let p = &mut s.procs[i];
            p.execute_ts(&d, None, None);
            p.ib.clear();
            p.rts = gts;
        }
        (Rule::DeqSb { addr }, _) => {
            let Some(e) = s.procs[i].sb.rm_oldest(addr) else {
                return refuse();
            };
            let old = s.cell(addr);
            s.set_cell(
                addr,
                MemCell {
                    value: e.value,
                    writer: Some(i),
                    sts: e.sts,
                    mts: gts + 1,
                },
            );
            s.gts = gts + 1;
            for (j, p) in s.procs.iter_mut().enumerate() {
                if j != i && !p.sb.exist(addr) {
                    let ts_lo = if old.writer != Some(j) {
                        old.mts
                    } else {
                        old.sts
                    };
                    p.ib.insert(IbEntry {
                        addr,
                        value: old.value,
                        ts_lo,
                        ts_hi: gts,
                    });
                }
            }
        }
        _ => return refuse(),
    }
    Ok(s)
}
