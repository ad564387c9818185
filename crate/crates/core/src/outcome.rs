//! Terminal observations and condition evaluation over them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::isa::Value;
use crate::litmus::{AddressMap, Condition, Location, Operand};

/// Final register values per thread plus final values of named locations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Outcome {
    pub registers: BTreeMap<String, BTreeMap<String, Value>>,
    pub memory: BTreeMap<String, Value>,
}

impl Outcome {
    pub fn register(&self, thread: &str, reg: &str) -> Option<Value> {
        self.registers.get(thread)?.get(reg).copied()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if first {
                first = false;
                Ok(())
            } else {
                f.write_str(" ")
            }
        };
        for (t, regs) in &self.registers {
            for (r, v) in regs {
                sep(f)?;
                write!(f, "{t}:{r}={v}")?;
            }
        }
        for (a, v) in &self.memory {
            sep(f)?;
            write!(f, "m[{a}]={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("outcome has no register `{0}`")]
    MissingRegister(String),
    #[error("register `{0}` is ambiguous across threads")]
    AmbiguousRegister(String),
    #[error("outcome has no location `{0}`")]
    MissingLocation(String),
    #[error("location name `{0}` is not bound to an address")]
    UnboundSymbol(String),
}

fn lookup(loc: &Location, outcome: &Outcome) -> Result<Value, EvalError> {
    match loc {
        Location::Mem(name) => outcome
            .memory
            .get(name)
            .copied()
            .ok_or_else(|| EvalError::MissingLocation(name.clone())),
        Location::Reg {
            thread: Some(t),
            reg,
        } => outcome
            .register(t, reg)
            .ok_or_else(|| EvalError::MissingRegister(format!("{t}:{reg}"))),
        Location::Reg { thread: None, reg } => {
            let mut hits = outcome.registers.values().filter_map(|regs| regs.get(reg));
            match (hits.next(), hits.next()) {
                (Some(v), None) => Ok(*v),
                (None, _) => Err(EvalError::MissingRegister(reg.clone())),
                (Some(_), Some(_)) => Err(EvalError::AmbiguousRegister(reg.clone())),
            }
        }
    }
}

/// Evaluate a condition against a terminal outcome. Symbolic values such as
/// `r1 = a` compare against the bound base address of `a`.
pub fn eval_condition(
    cond: &Condition,
    outcome: &Outcome,
    addrs: &AddressMap,
) -> Result<bool, EvalError> {
    match cond {
        Condition::Atom { loc, value } => {
            let expected = match value {
                Operand::Int(v) => *v,
                Operand::Sym(s) => addrs
                    .get(s)
                    .ok_or_else(|| EvalError::UnboundSymbol(s.clone()))?,
            };
            Ok(lookup(loc, outcome)? == expected)
        }
        Condition::Not(c) => Ok(!eval_condition(c, outcome, addrs)?),
        Condition::And(l, r) => {
            Ok(eval_condition(l, outcome, addrs)? && eval_condition(r, outcome, addrs)?)
        }
        Condition::Or(l, r) => {
            Ok(eval_condition(l, outcome, addrs)? || eval_condition(r, outcome, addrs)?)
        }
    }
}
