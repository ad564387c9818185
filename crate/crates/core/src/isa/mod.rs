//! The decoded instruction set and the per-processor register machine.
//!
//! `decode` turns the instruction at `pc` into a [`DecodedInstr`] whose
//! fields are fully evaluated against the current registers. Branches decode
//! to `Nm` without a destination, carrying the next pc. Nothing here touches
//! memory or the buffers; the model rules do that.

mod buffers;
mod proc;
mod program;

use std::fmt;

use serde::Serialize;

use crate::litmus::{BranchCond, FenceKind, Sign};

pub use buffers::{IbEntry, InvalidationBuffer, SbEntry, StoreBuffer};
pub use proc::ProcState;
pub use program::{CompileError, Instr, LinearExpr, Operand, Program, ThreadCode};

pub type Value = i64;
pub type Addr = i64;
pub type Timestamp = u64;
pub type RegId = usize;
pub type ProcId = usize;

/// Store identity in WMM-S.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Tag(pub u32);

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodedInstr {
    /// ALU or branch. `jump` is the taken branch target, if any.
    Nm {
        dst: Option<RegId>,
        value: Value,
        jump: Option<usize>,
    },
    Ld {
        addr: Addr,
        dst: RegId,
    },
    St {
        addr: Addr,
        value: Value,
    },
    Commit,
    Reconcile,
    /// Past the end of the thread or at `exit`.
    Halt,
}

impl DecodedInstr {
    pub fn dst(&self) -> Option<RegId> {
        match self {
            DecodedInstr::Nm { dst, .. } => *dst,
            DecodedInstr::Ld { dst, .. } => Some(*dst),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("thread {thread} pc {pc}: computed address {addr} is negative")]
    NegativeAddress {
        thread: String,
        pc: usize,
        addr: Addr,
    },
    #[error("thread {thread} pc {pc}: arithmetic overflow")]
    Overflow { thread: String, pc: usize },
}

fn eval(expr: &LinearExpr, read: &mut impl FnMut(RegId) -> Value) -> Option<Value> {
    expr.terms.iter().try_fold(0i64, |acc, (sign, op)| {
        let v = match op {
            Operand::Reg(r) => read(*r),
            Operand::Const(c) => *c,
        };
        match sign {
            Sign::Plus => acc.checked_add(v),
            Sign::Minus => acc.checked_sub(v),
        }
    })
}

/// Decode the instruction at `pc`, reading registers through `read`.
pub fn decode(
    code: &ThreadCode,
    pc: usize,
    mut read: impl FnMut(RegId) -> Value,
) -> Result<DecodedInstr, DecodeError> {
    let Some(instr) = code.instrs.get(pc) else {
        return Ok(DecodedInstr::Halt);
    };
    let overflow = || DecodeError::Overflow {
        thread: code.name.clone(),
        pc,
    };
    let address = |a: Value| {
        if a < 0 {
            Err(DecodeError::NegativeAddress {
                thread: code.name.clone(),
                pc,
                addr: a,
            })
        } else {
            Ok(a)
        }
    };
    Ok(match instr {
        Instr::Assign { dst, expr } => DecodedInstr::Nm {
            dst: Some(*dst),
            value: eval(expr, &mut read).ok_or_else(overflow)?,
            jump: None,
        },
        Instr::Load { dst, addr } => DecodedInstr::Ld {
            addr: address(eval(addr, &mut read).ok_or_else(overflow)?)?,
            dst: *dst,
        },
        Instr::Store { addr, val } => {
            let a = address(eval(addr, &mut read).ok_or_else(overflow)?)?;
            let v = eval(val, &mut read).ok_or_else(overflow)?;
            DecodedInstr::St { addr: a, value: v }
        }
        Instr::Fence(FenceKind::Commit) => DecodedInstr::Commit,
        Instr::Fence(FenceKind::Reconcile) => DecodedInstr::Reconcile,
        Instr::Branch { cond, reg, target } => {
            let v = read(*reg);
            let taken = match cond {
                BranchCond::Eqz => v == 0,
                BranchCond::Nez => v != 0,
            };
            DecodedInstr::Nm {
                dst: None,
                value: 0,
                jump: taken.then_some(*target),
            }
        }
        Instr::Exit => DecodedInstr::Halt,
    })
}
