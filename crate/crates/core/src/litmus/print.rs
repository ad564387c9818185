//! Pretty-printer producing text that [`parse`](super::parse) reads back to
//! the same AST.

use std::fmt;

use super::ast::*;
use super::parse::{HEADER, VERSION};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Reg(r) => f.write_str(r),
            Term::Int(v) => write!(f, "{v}"),
            Term::Sym(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (sign, term)) in self.terms.iter().enumerate() {
            match (i, sign) {
                (0, Sign::Plus) => write!(f, "{term}")?,
                (0, Sign::Minus) => write!(f, "-{term}")?,
                (_, Sign::Plus) => write!(f, " + {term}")?,
                (_, Sign::Minus) => write!(f, " - {term}")?,
            }
        }
        Ok(())
    }
}

struct StoreOperand<'a>(&'a Expr);

impl fmt::Display for StoreOperand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_atomic() {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

impl fmt::Display for SurfaceInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceInstr::Assign { dst, expr } => write!(f, "{dst} = {expr}"),
            SurfaceInstr::Load { dst, addr } => write!(f, "{dst} = Ld {addr}"),
            SurfaceInstr::Store { addr, val } => {
                write!(f, "St {} {}", StoreOperand(addr), StoreOperand(val))
            }
            SurfaceInstr::Fence(FenceKind::Commit) => f.write_str("Commit"),
            SurfaceInstr::Fence(FenceKind::Reconcile) => f.write_str("Reconcile"),
            SurfaceInstr::Branch { cond, reg, target } => {
                let op = match cond {
                    BranchCond::Eqz => "beqz",
                    BranchCond::Nez => "bnez",
                };
                write!(f, "{op} {reg} {target}")
            }
            SurfaceInstr::Exit => f.write_str("exit"),
            SurfaceInstr::Label(l) => write!(f, "{l}:"),
        }
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Int(v) => write!(f, "{v}"),
            Operand::Sym(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Reg {
                thread: Some(t),
                reg,
            } => write!(f, "{t}:{reg}"),
            Location::Reg { thread: None, reg } => f.write_str(reg),
            Location::Mem(a) => write!(f, "m[{a}]"),
        }
    }
}

fn needs_parens_in_and(c: &Condition, right: bool) -> bool {
    match c {
        Condition::Or(..) => true,
        Condition::And(..) => right,
        _ => false,
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, c: &Condition, parens: bool| {
            if parens {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Condition::Atom { loc, value } => write!(f, "{loc} = {value}"),
            Condition::Not(inner) => {
                f.write_str("!")?;
                wrap(f, inner, !matches!(**inner, Condition::Not(_)))
            }
            Condition::And(l, r) => {
                wrap(f, l, needs_parens_in_and(l, false))?;
                f.write_str(" & ")?;
                wrap(f, r, needs_parens_in_and(r, true))
            }
            Condition::Or(l, r) => {
                wrap(f, l, false)?;
                f.write_str(" | ")?;
                wrap(f, r, matches!(**r, Condition::Or(..)))
            }
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check {}", self.polarity.as_str())?;
        if !self.models.is_empty() {
            let names: Vec<&str> = self.models.iter().map(|m| m.as_str()).collect();
            write!(f, " [{}]", names.join(", "))?;
        }
        write!(f, ": {}", self.cond)
    }
}

impl fmt::Display for LitmusTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER} {VERSION}")?;
        if !self.name.is_empty() {
            writeln!(f, "name: {}", self.name)?;
        }
        if let Some(m) = self.model_hint {
            writeln!(f, "model: {m}")?;
        }
        if !self.init.is_empty() {
            writeln!(f, "init:")?;
            for (loc, v) in &self.init {
                writeln!(f, "  {loc} = {v}")?;
            }
        }
        for t in &self.threads {
            writeln!(f, "thread {}:", t.name)?;
            for i in &t.instrs {
                writeln!(f, "  {i}")?;
            }
        }
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
