//! Litmus threads lowered to register-indexed code with resolved addresses
//! and branch targets.

use crate::litmus::{
    AddressMap, BranchCond, Expr, FenceKind, LitmusTest, Sign, SurfaceInstr, Term, EXIT_LABEL,
};

use super::{Addr, RegId, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    Reg(RegId),
    Const(Value),
}

/// Signed sum of operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearExpr {
    pub terms: Vec<(Sign, Operand)>,
}

impl LinearExpr {
    pub fn registers(&self) -> impl Iterator<Item = RegId> + '_ {
        self.terms.iter().filter_map(|(_, o)| match o {
            Operand::Reg(r) => Some(*r),
            Operand::Const(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instr {
    Assign {
        dst: RegId,
        expr: LinearExpr,
    },
    Load {
        dst: RegId,
        addr: LinearExpr,
    },
    Store {
        addr: LinearExpr,
        val: LinearExpr,
    },
    Fence(FenceKind),
    Branch {
        cond: BranchCond,
        reg: RegId,
        target: usize,
    },
    Exit,
}

impl Instr {
    /// Registers the instruction reads when decoded.
    pub fn sources(&self) -> Vec<RegId> {
        match self {
            Instr::Assign { expr, .. } => expr.registers().collect(),
            Instr::Load { addr, .. } => addr.registers().collect(),
            Instr::Store { addr, val } => addr.registers().chain(val.registers()).collect(),
            Instr::Branch { reg, .. } => vec![*reg],
            Instr::Fence(_) | Instr::Exit => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadCode {
    pub name: String,
    /// Register names; a `RegId` indexes this list.
    pub regs: Vec<String>,
    pub instrs: Vec<Instr>,
}

impl ThreadCode {
    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn reg_id(&self, name: &str) -> Option<RegId> {
        self.regs.iter().position(|r| r == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("location `{0}` has no address binding")]
    UnboundSymbol(String),
    #[error("thread {thread}: unresolved label `{label}`")]
    UnresolvedLabel { thread: String, label: String },
}

/// A test ready to run: per-thread code, initial memory and the named
/// locations reported in outcomes.
#[derive(Clone, Debug)]
pub struct Program {
    pub threads: Vec<ThreadCode>,
    pub init: Vec<(Addr, Value)>,
    pub addrs: AddressMap,
}

impl Program {
    pub fn compile(test: &LitmusTest, addrs: &AddressMap) -> Result<Program, CompileError> {
        let sym = |s: &str| {
            addrs
                .get(s)
                .ok_or_else(|| CompileError::UnboundSymbol(s.to_string()))
        };
        let mut threads = Vec::with_capacity(test.threads.len());
        for t in &test.threads {
            let regs = t.registers();
            let reg = |r: &str| {
                regs.iter()
                    .position(|x| x == r)
                    .expect("register collected")
            };
            let lower = |e: &Expr| -> Result<LinearExpr, CompileError> {
                let terms = e
                    .terms
                    .iter()
                    .map(|(s, term)| {
                        let op = match term {
                            Term::Reg(r) => Operand::Reg(reg(r)),
                            Term::Int(v) => Operand::Const(*v),
                            Term::Sym(n) => Operand::Const(sym(n)?),
                        };
                        Ok((*s, op))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(LinearExpr { terms })
            };

            // Labels point at the next real instruction.
            let mut labels: Vec<(&str, usize)> = Vec::new();
            let mut slot = 0;
            for i in &t.instrs {
                match i {
                    SurfaceInstr::Label(l) => labels.push((l, slot)),
                    _ => slot += 1,
                }
            }
            let end = slot;
            let target = |l: &str| -> Result<usize, CompileError> {
                if l == EXIT_LABEL {
                    return Ok(end);
                }
                labels
                    .iter()
                    .find(|(n, _)| *n == l)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| CompileError::UnresolvedLabel {
                        thread: t.name.clone(),
                        label: l.to_string(),
                    })
            };

            let mut instrs = Vec::with_capacity(end);
            for i in &t.instrs {
                let lowered = match i {
                    SurfaceInstr::Label(_) => continue,
                    SurfaceInstr::Assign { dst, expr } => Instr::Assign {
                        dst: reg(dst),
                        expr: lower(expr)?,
                    },
                    SurfaceInstr::Load { dst, addr } => Instr::Load {
                        dst: reg(dst),
                        addr: lower(addr)?,
                    },
                    SurfaceInstr::Store { addr, val } => Instr::Store {
                        addr: lower(addr)?,
                        val: lower(val)?,
                    },
                    SurfaceInstr::Fence(k) => Instr::Fence(*k),
                    SurfaceInstr::Branch {
                        cond,
                        reg: r,
                        target: l,
                    } => Instr::Branch {
                        cond: *cond,
                        reg: reg(r),
                        target: target(l)?,
                    },
                    SurfaceInstr::Exit => Instr::Exit,
                };
                instrs.push(lowered);
            }
            threads.push(ThreadCode {
                name: t.name.clone(),
                regs,
                instrs,
            });
        }

        let init = test
            .init
            .iter()
            .map(|(name, v)| {
                let a = sym(name)?;
                let v = match v {
                    crate::litmus::Operand::Int(i) => *i,
                    crate::litmus::Operand::Sym(s) => sym(s)?,
                };
                Ok((a, v))
            })
            .collect::<Result<_, CompileError>>()?;

        Ok(Program {
            threads,
            init,
            addrs: addrs.clone(),
        })
    }

    pub fn num_threads(&self) -> usize {
        self.threads.len()
    }
}
