//! Machine states and rule instances shared by all six models.
//!
//! Fields a model does not use stay at their initial values (no writer or
//! timestamps outside WMM-D, no tags outside WMM-S), so they never split
//! states of the simpler models.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::isa::{Addr, ProcId, ProcState, Program, Tag, Timestamp, Value};
use crate::model::Model;

/// One monolithic memory location. `writer`, `sts` and `mts` are only
/// maintained by WMM-D; `writer = None` is the initial "no processor" value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemCell {
    pub value: Value,
    pub writer: Option<ProcId>,
    pub sts: Timestamp,
    pub mts: Timestamp,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachineState {
    /// Cells equal to `MemCell::default()` are not stored, so equal memories
    /// compare equal.
    memory: BTreeMap<Addr, MemCell>,
    pub procs: Vec<ProcState>,
    pub gts: Timestamp,
    pub next_tag: u32,
}

impl MachineState {
    pub fn cell(&self, a: Addr) -> MemCell {
        self.memory.get(&a).copied().unwrap_or_default()
    }

    pub fn read(&self, a: Addr) -> Value {
        self.cell(a).value
    }

    pub fn set_cell(&mut self, a: Addr, cell: MemCell) {
        if cell == MemCell::default() {
            self.memory.remove(&a);
        } else {
            self.memory.insert(a, cell);
        }
    }

    /// Plain write that leaves WMM-D metadata untouched.
    pub fn write(&mut self, a: Addr, v: Value) {
        let cell = MemCell {
            value: v,
            ..self.cell(a)
        };
        self.set_cell(a, cell);
    }

    pub fn memory(&self) -> impl Iterator<Item = (Addr, &MemCell)> {
        self.memory.iter().map(|(a, c)| (*a, c))
    }

    pub fn alloc_tag(&mut self) -> Tag {
        let t = Tag(self.next_tag);
        self.next_tag += 1;
        t
    }

    /// Same state with tags renumbered in order of first appearance
    /// (processor by processor, oldest entry first) and the tag counter
    /// cleared. Tag numerals carry no meaning beyond identity.
    pub fn canonical(&self) -> MachineState {
        let mut out = self.clone();
        out.next_tag = 0;
        let mut map: HashMap<Tag, Tag> = HashMap::new();
        for p in &mut out.procs {
            for e in p.sb.iter_mut() {
                if let Some(t) = e.tag {
                    let n = map.len() as u32;
                    e.tag = Some(*map.entry(t).or_insert(Tag(n)));
                }
            }
        }
        out
    }
}

/// Initial state: pcs and registers zero, buffers empty, memory from `init`
/// (0 elsewhere), clocks zero.
pub fn initial_state(program: &Program) -> MachineState {
    let mut s = MachineState {
        memory: BTreeMap::new(),
        procs: program
            .threads
            .iter()
            .map(|t| ProcState::new(t.regs.len()))
            .collect(),
        gts: 0,
        next_tag: 0,
    };
    for &(a, v) in &program.init {
        s.write(a, v);
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Nm,
    /// SC/TSO/PSO load.
    Ld,
    LdSb,
    LdMem,
    /// Read the `entry`-th stale value for the load address.
    LdIb {
        entry: usize,
    },
    St,
    Com,
    Rec,
    DeqSb {
        addr: Addr,
    },
    Copy {
        addr: Addr,
        tag: Tag,
        to: ProcId,
    },
}

/// One enabled rule firing. For `Copy`, `proc` is a processor holding the
/// store.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub proc: ProcId,
    pub rule: Rule,
}

impl RuleInstance {
    pub fn new(proc: ProcId, rule: Rule) -> Self {
        RuleInstance { proc, rule }
    }

    /// Rule name as used in the model definitions, e.g. `WMM-D-LdIb`.
    /// WMM-S only redefines St, DeqSb and Copy; its other rules are WMM's.
    pub fn name(&self, model: Model) -> String {
        let base = match self.rule {
            Rule::Nm => "Nm",
            Rule::Ld => "Ld",
            Rule::LdSb => "LdSb",
            Rule::LdMem => "LdMem",
            Rule::LdIb { .. } => "LdIb",
            Rule::St => "St",
            Rule::Com => "Com",
            Rule::Rec => "Rec",
            Rule::DeqSb { .. } => "DeqSb",
            Rule::Copy { .. } => "Copy",
        };
        let prefix = match (model, self.rule) {
            (Model::WmmS, Rule::St | Rule::DeqSb { .. } | Rule::Copy { .. }) => "WMM-S",
            (Model::WmmS, _) => "WMM",
            (m, _) => m.rule_prefix(),
        };
        format!("{prefix}-{base}")
    }

    /// Printable form naming processors by their thread names.
    pub fn display<'a>(&'a self, model: Model, program: &'a Program) -> RuleDisplay<'a> {
        RuleDisplay {
            inst: self,
            model,
            program,
        }
    }
}

pub struct RuleDisplay<'a> {
    inst: &'a RuleInstance,
    model: Model,
    program: &'a Program,
}

impl RuleDisplay<'_> {
    fn proc_name(&self, p: ProcId) -> String {
        match self.program.threads.get(p) {
            Some(t) => t.name.clone(),
            None => format!("#{p}"),
        }
    }

    fn addr_name(&self, a: Addr) -> String {
        match self.program.addrs.name_of(a) {
            Some(n) => n.to_string(),
            None => a.to_string(),
        }
    }
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = self.inst;
        write!(f, "{} {}", self.proc_name(i.proc), i.name(self.model))?;
        match i.rule {
            Rule::LdIb { entry } => write!(f, " entry={entry}"),
            Rule::DeqSb { addr } => write!(f, " addr={}", self.addr_name(addr)),
            Rule::Copy { addr, tag, to } => write!(
                f,
                " addr={} tag={tag} to={}",
                self.addr_name(addr),
                self.proc_name(to)
            ),
            _ => Ok(()),
        }
    }
}
