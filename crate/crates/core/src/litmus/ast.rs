//! Surface syntax of litmus programs.

use crate::model::Model;

/// Sign of a term in an [`Expr`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// A leaf of an arithmetic expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Reg(String),
    Int(i64),
    /// Symbolic location name; evaluates to its bound base address.
    Sym(String),
}

/// Integer arithmetic over registers, literals and symbolic addresses:
/// a signed sum of terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Expr {
    pub terms: Vec<(Sign, Term)>,
}

impl Expr {
    pub fn term(t: Term) -> Self {
        Expr {
            terms: vec![(Sign::Plus, t)],
        }
    }

    pub fn int(v: i64) -> Self {
        Expr::term(Term::Int(v))
    }

    pub fn reg(name: &str) -> Self {
        Expr::term(Term::Reg(name.to_string()))
    }

    pub fn sym(name: &str) -> Self {
        Expr::term(Term::Sym(name.to_string()))
    }

    /// True when the expression is a single unsigned term.
    pub fn is_atomic(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == Sign::Plus
    }

    pub fn registers(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|(_, t)| match t {
            Term::Reg(r) => Some(r.as_str()),
            _ => None,
        })
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().filter_map(|(_, t)| match t {
            Term::Sym(s) => Some(s.as_str()),
            _ => None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FenceKind {
    Commit,
    Reconcile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchCond {
    /// Taken when the register is zero.
    Eqz,
    /// Taken when the register is nonzero.
    Nez,
}

/// Reserved branch target meaning "end of thread".
pub const EXIT_LABEL: &str = "exit";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceInstr {
    Assign {
        dst: String,
        expr: Expr,
    },
    Load {
        dst: String,
        addr: Expr,
    },
    Store {
        addr: Expr,
        val: Expr,
    },
    Fence(FenceKind),
    Branch {
        cond: BranchCond,
        reg: String,
        target: String,
    },
    Exit,
    Label(String),
}

impl SurfaceInstr {
    /// Labels occupy no instruction slot.
    pub fn is_label(&self) -> bool {
        matches!(self, SurfaceInstr::Label(_))
    }

    /// Registers mentioned by this instruction, destinations first.
    pub fn registers(&self) -> Vec<&str> {
        match self {
            SurfaceInstr::Assign { dst, expr } => std::iter::once(dst.as_str())
                .chain(expr.registers())
                .collect(),
            SurfaceInstr::Load { dst, addr } => std::iter::once(dst.as_str())
                .chain(addr.registers())
                .collect(),
            SurfaceInstr::Store { addr, val } => addr.registers().chain(val.registers()).collect(),
            SurfaceInstr::Branch { reg, .. } => vec![reg.as_str()],
            SurfaceInstr::Fence(_) | SurfaceInstr::Exit | SurfaceInstr::Label(_) => Vec::new(),
        }
    }

    pub fn symbols(&self) -> Vec<&str> {
        match self {
            SurfaceInstr::Assign { expr, .. } => expr.symbols().collect(),
            SurfaceInstr::Load { addr, .. } => addr.symbols().collect(),
            SurfaceInstr::Store { addr, val } => addr.symbols().chain(val.symbols()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    pub name: String,
    pub instrs: Vec<SurfaceInstr>,
}

impl Thread {
    /// Registers of this thread in order of first appearance.
    pub fn registers(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in self.instrs.iter().flat_map(|i| i.registers()) {
            if !out.iter().any(|o| o == r) {
                out.push(r.to_string());
            }
        }
        out
    }

    /// Number of real (non-label) instructions.
    pub fn len(&self) -> usize {
        self.instrs.iter().filter(|i| !i.is_label()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Right-hand side of a condition atom or init entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Int(i64),
    Sym(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    /// `P1:r1`, or bare `r1` when only one thread uses that register.
    Reg { thread: Option<String>, reg: String },
    /// `m[a]`
    Mem(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Atom { loc: Location, value: Operand },
    Not(Box<Condition>),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
}

impl Condition {
    pub fn atom(loc: Location, value: Operand) -> Self {
        Condition::Atom { loc, value }
    }

    pub fn and(self, other: Condition) -> Self {
        Condition::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Condition) -> Self {
        Condition::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Condition::Not(Box::new(self))
    }

    /// Visit every atom.
    pub fn atoms(&self) -> Vec<(&Location, &Operand)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(c) = stack.pop() {
            match c {
                Condition::Atom { loc, value } => out.push((loc, value)),
                Condition::Not(inner) => stack.push(inner),
                Condition::And(l, r) | Condition::Or(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Allowed,
    Forbidden,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Allowed => "allowed",
            Polarity::Forbidden => "forbidden",
        }
    }
}

/// A final-state claim. An empty `models` list means the check applies to
/// every model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub polarity: Polarity,
    pub models: Vec<Model>,
    pub cond: Condition,
}

impl Check {
    pub fn applies_to(&self, model: Model) -> bool {
        self.models.is_empty() || self.models.contains(&model)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LitmusTest {
    pub name: String,
    pub model_hint: Option<Model>,
    pub init: Vec<(String, Operand)>,
    pub threads: Vec<Thread>,
    pub checks: Vec<Check>,
}

impl LitmusTest {
    /// Total number of real instructions over all threads.
    pub fn instruction_count(&self) -> usize {
        self.threads.iter().map(Thread::len).sum()
    }

    /// Symbolic location names used anywhere in the test.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for (name, v) in &self.init {
            out.push(name);
            if let Operand::Sym(s) = v {
                out.push(s);
            }
        }
        for t in &self.threads {
            for i in &t.instrs {
                out.extend(i.symbols());
            }
        }
        for c in &self.checks {
            for (loc, v) in c.cond.atoms() {
                if let Location::Mem(s) = loc {
                    out.push(s);
                }
                if let Operand::Sym(s) = v {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn thread(&self, name: &str) -> Option<&Thread> {
        self.threads.iter().find(|t| t.name == name)
    }

    pub fn checks_for(&self, model: Model) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| c.applies_to(model))
    }
}
