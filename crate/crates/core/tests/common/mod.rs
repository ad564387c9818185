//! Reference interpreters that share no code with the model rules.
//!
//! They run the surface AST directly: SC without buffers, TSO with one FIFO
//! per thread, PSO with FIFO order per address. Every interleaving is
//! enumerated (memoized on the full state only to keep runtimes short).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use i2e::litmus::{
    load_corpus, BranchCond, Condition, Expr, FenceKind, LitmusTest, Location, Operand, Sign,
    SurfaceInstr, Term, EXIT_LABEL,
};
use i2e::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Buffering {
    None,
    Tso,
    Pso,
}

fn expr_syms(e: &Expr, out: &mut BTreeSet<String>) {
    for (_, t) in &e.terms {
        if let Term::Sym(s) = t {
            out.insert(s.clone());
        }
    }
}

fn cond_syms(c: &Condition, out: &mut BTreeSet<String>) {
    match c {
        Condition::Atom { loc, value } => {
            if let Location::Mem(s) = loc {
                out.insert(s.clone());
            }
            if let Operand::Sym(s) = value {
                out.insert(s.clone());
            }
        }
        Condition::And(x, y) | Condition::Or(x, y) => {
            cond_syms(x, out);
            cond_syms(y, out);
        }
        Condition::Not(x) => cond_syms(x, out),
    }
}

/// Sorted names, first base 1024, stride 1024.
pub fn oracle_addresses(test: &LitmusTest) -> BTreeMap<String, i64> {
    let mut names = BTreeSet::new();
    for (n, v) in &test.init {
        names.insert(n.clone());
        if let Operand::Sym(s) = v {
            names.insert(s.clone());
        }
    }
    for i in test.threads.iter().flat_map(|t| &t.instrs) {
        match i {
            SurfaceInstr::Assign { expr, .. } => expr_syms(expr, &mut names),
            SurfaceInstr::Load { addr, .. } => expr_syms(addr, &mut names),
            SurfaceInstr::Store { addr, val } => {
                expr_syms(addr, &mut names);
                expr_syms(val, &mut names);
            }
            _ => {}
        }
    }
    for c in &test.checks {
        cond_syms(&c.cond, &mut names);
    }
    names
        .into_iter()
        .enumerate()
        .map(|(k, n)| (n, 1024 * (k as i64 + 1)))
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct St {
    pcs: Vec<usize>,
    regs: Vec<BTreeMap<String, i64>>,
    mem: BTreeMap<i64, i64>,
    bufs: Vec<Vec<(i64, i64)>>,
}

struct Oracle<'a> {
    test: &'a LitmusTest,
    addrs: BTreeMap<String, i64>,
    mode: Buffering,
    seen: HashSet<St>,
    out: BTreeSet<Outcome>,
}

impl Oracle<'_> {
    fn eval(&self, e: &Expr, regs: &BTreeMap<String, i64>) -> i64 {
        e.terms
            .iter()
            .map(|(s, t)| {
                let v = match t {
                    Term::Int(i) => *i,
                    Term::Reg(r) => regs.get(r).copied().unwrap_or(0),
                    Term::Sym(n) => self.addrs[n],
                };
                if *s == Sign::Minus {
                    -v
                } else {
                    v
                }
            })
            .sum()
    }

    /// Skip labels; `None` once the thread is finished.
    fn fetch(&self, t: usize, mut pc: usize) -> Option<(usize, &SurfaceInstr)> {
        let instrs = &self.test.threads[t].instrs;
        loop {
            match instrs.get(pc)? {
                SurfaceInstr::Label(_) => pc += 1,
                SurfaceInstr::Exit => return None,
                i => return Some((pc, i)),
            }
        }
    }

    fn label_pc(&self, t: usize, label: &str) -> usize {
        let instrs = &self.test.threads[t].instrs;
        if label == EXIT_LABEL {
            return instrs.len();
        }
        instrs
            .iter()
            .position(|i| matches!(i, SurfaceInstr::Label(l) if l == label))
            .expect("label exists")
    }

    fn run(&mut self, s: St) {
        if !self.seen.insert(s.clone()) {
            return;
        }
        let n = self.test.threads.len();
        let mut moved = false;
        for t in 0..n {
            if let Some((pc, instr)) = self.fetch(t, s.pcs[t]) {
                let mut next = s.clone();
                next.pcs[t] = pc + 1;
                let ok = match instr {
                    SurfaceInstr::Assign { dst, expr } => {
                        let v = self.eval(expr, &s.regs[t]);
                        next.regs[t].insert(dst.clone(), v);
                        true
                    }
                    SurfaceInstr::Load { dst, addr } => {
                        let a = self.eval(addr, &s.regs[t]);
                        let buffered = s.bufs[t]
                            .iter()
                            .rev()
                            .find(|(x, _)| *x == a)
                            .map(|(_, v)| *v);
                        let v = buffered.unwrap_or_else(|| s.mem.get(&a).copied().unwrap_or(0));
                        next.regs[t].insert(dst.clone(), v);
                        true
                    }
                    SurfaceInstr::Store { addr, val } => {
                        let a = self.eval(addr, &s.regs[t]);
                        let v = self.eval(val, &s.regs[t]);
                        if self.mode == Buffering::None {
                            next.mem.insert(a, v);
                        } else {
                            next.bufs[t].push((a, v));
                        }
                        true
                    }
                    SurfaceInstr::Fence(FenceKind::Commit) => s.bufs[t].is_empty(),
                    SurfaceInstr::Fence(FenceKind::Reconcile) => true,
                    SurfaceInstr::Branch { cond, reg, target } => {
                        let v = s.regs[t].get(reg).copied().unwrap_or(0);
                        let taken = match cond {
                            BranchCond::Eqz => v == 0,
                            BranchCond::Nez => v != 0,
                        };
                        if taken {
                            next.pcs[t] = self.label_pc(t, target);
                        }
                        true
                    }
                    SurfaceInstr::Label(_) | SurfaceInstr::Exit => unreachable!(),
                };
                if ok {
                    moved = true;
                    self.run(next);
                }
            }
            // Drain a buffered store.
            let mut drains: Vec<usize> = Vec::new();
            match self.mode {
                Buffering::None => {}
                Buffering::Tso => {
                    if !s.bufs[t].is_empty() {
                        drains.push(0);
                    }
                }
                Buffering::Pso => {
                    let mut addrs = BTreeSet::new();
                    for (k, (a, _)) in s.bufs[t].iter().enumerate() {
                        if addrs.insert(*a) {
                            drains.push(k);
                        }
                    }
                }
            }
            for k in drains {
                let mut next = s.clone();
                let (a, v) = next.bufs[t].remove(k);
                next.mem.insert(a, v);
                moved = true;
                self.run(next);
            }
        }
        if !moved {
            let done = (0..n).all(|t| self.fetch(t, s.pcs[t]).is_none() && s.bufs[t].is_empty());
            assert!(done, "oracle deadlock in {}", self.test.name);
            let mut o = Outcome::default();
            for (t, th) in self.test.threads.iter().enumerate() {
                let regs = th
                    .registers()
                    .into_iter()
                    .map(|r| {
                        let v = s.regs[t].get(&r).copied().unwrap_or(0);
                        (r, v)
                    })
                    .collect();
                o.registers.insert(th.name.clone(), regs);
            }
            for (name, a) in &self.addrs {
                o.memory
                    .insert(name.clone(), s.mem.get(a).copied().unwrap_or(0));
            }
            self.out.insert(o);
        }
    }
}

pub fn oracle_outcomes(test: &LitmusTest, mode: Buffering) -> BTreeSet<Outcome> {
    let n = test.threads.len();
    let addrs = oracle_addresses(test);
    let mut mem = BTreeMap::new();
    for (name, v) in &test.init {
        let v = match v {
            Operand::Int(i) => *i,
            Operand::Sym(s) => addrs[s],
        };
        mem.insert(addrs[name], v);
    }
    let mut o = Oracle {
        test,
        addrs,
        mode,
        seen: HashSet::new(),
        out: BTreeSet::new(),
    };
    o.run(St {
        pcs: vec![0; n],
        regs: vec![BTreeMap::new(); n],
        mem,
        bufs: vec![Vec::new(); n],
    });
    o.out
}

pub fn corpus() -> Vec<LitmusTest> {
    load_corpus()
}

pub fn corpus_named(name: &str) -> LitmusTest {
    corpus()
        .into_iter()
        .find(|t| t.name == name)
        .unwrap_or_else(|| panic!("corpus test {name}"))
}

/// Register value of a thread in an outcome.
pub fn reg(o: &Outcome, thread: &str, r: &str) -> i64 {
    o.register(thread, r)
        .unwrap_or_else(|| panic!("outcome lacks {thread}:{r}"))
}
