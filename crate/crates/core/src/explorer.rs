//! Exhaustive search over rule firings.
//!
//! States are deduplicated on their canonical form. Each visited state keeps
//! a pointer to its parent and the rule that produced it, so a witness trace
//! for any outcome is rebuilt by walking back to the root.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::invariants::{check_transition, InvariantViolation};
use crate::isa::{CompileError, Program};
use crate::litmus::{bind_addresses, Check, LitmusTest, Polarity};
use crate::model::Model;
use crate::models::{self, ModelError};
use crate::outcome::{eval_condition, EvalError, Outcome};
use crate::state::{initial_state, MachineState, RuleInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreLimits {
    pub max_states: usize,
    pub max_depth: usize,
    pub timeout: Option<Duration>,
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_states: 5_000_000,
            max_depth: 100_000,
            timeout: Some(Duration::from_secs(60)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    #[default]
    Dfs,
    Bfs,
    /// Expand a uniformly chosen frontier state, seeded for reproducibility.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub limits: ExploreLimits,
    pub order: SearchOrder,
    pub dedup: bool,
    pub check_invariants: bool,
    pub witnesses: bool,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            limits: ExploreLimits::default(),
            order: SearchOrder::Dfs,
            dedup: true,
            check_invariants: false,
            witnesses: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitHit {
    States,
    Depth,
    Time,
}

impl fmt::Display for LimitHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitHit::States => "state limit",
            LimitHit::Depth => "depth limit",
            LimitHit::Time => "time limit",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub dedup_hits: usize,
    pub max_frontier: usize,
    #[serde(serialize_with = "ser_millis", rename = "elapsed_ms")]
    pub elapsed: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

pub type Witness = Vec<RuleInstance>;

/// A non-terminal state with no enabled rule.
#[derive(Clone, Debug)]
pub struct Deadlock {
    pub state: MachineState,
    pub trace: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub model: Model,
    pub program: Program,
    /// Terminal outcomes, each with the trace that first reached it.
    pub outcomes: BTreeMap<Outcome, Option<Witness>>,
    pub deadlocks: Vec<Deadlock>,
    /// `None` when the state space was exhausted; otherwise the outcome set
    /// is partial.
    pub limit_hit: Option<LimitHit>,
    pub stats: Stats,
}

impl Exploration {
    pub fn is_complete(&self) -> bool {
        self.limit_hit.is_none()
    }

    pub fn outcome_set(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.keys()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExploreError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invariant violated after {rule:?}: {violation}")]
    Invariant {
        violation: InvariantViolation,
        rule: RuleInstance,
        trace: Option<Witness>,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("witness step {step} ({rule:?}) is not enabled")]
    ReplayDisabled { step: usize, rule: RuleInstance },
    #[error("witness does not end in a terminal state")]
    ReplayNotTerminal,
}

/// Bind addresses and lower a test.
pub fn prepare(test: &LitmusTest) -> Result<Program, CompileError> {
    Program::compile(test, &bind_addresses(test))
}

/// Every thread halted and every store buffer drained. Stale values left in
/// invalidation buffers do not matter.
pub fn is_terminal(program: &Program, state: &MachineState) -> bool {
    state
        .procs
        .iter()
        .zip(&program.threads)
        .all(|(p, code)| p.is_halted(code) && p.sb.is_empty())
}

/// Final registers of every thread and final values of named locations.
pub fn outcome_of(program: &Program, state: &MachineState) -> Outcome {
    let mut o = Outcome::default();
    for (p, code) in state.procs.iter().zip(&program.threads) {
        let regs = code
            .regs
            .iter()
            .cloned()
            .zip(p.regs.iter().copied())
            .collect();
        o.registers.insert(code.name.clone(), regs);
    }
    for (name, a) in program.addrs.iter() {
        o.memory.insert(name.to_string(), state.read(a));
    }
    o
}

pub fn canonical_key(state: &MachineState) -> MachineState {
    state.canonical()
}

pub fn successors(
    model: Model,
    program: &Program,
    state: &MachineState,
) -> Result<Vec<(RuleInstance, MachineState)>, ModelError> {
    models::enabled(model, program, state)?
        .into_iter()
        .map(|r| Ok((r, models::apply(model, program, state, &r)?)))
        .collect()
}

struct Frontier {
    items: VecDeque<(usize, MachineState, usize)>,
    order: SearchOrder,
    rng: ChaCha8Rng,
}

impl Frontier {
    fn new(order: SearchOrder) -> Self {
        let seed = match order {
            SearchOrder::Random(s) => s,
            _ => 0,
        };
        Frontier {
            items: VecDeque::new(),
            order,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn push(&mut self, item: (usize, MachineState, usize)) {
        self.items.push_back(item);
    }

    fn pop(&mut self) -> Option<(usize, MachineState, usize)> {
        match self.order {
            SearchOrder::Dfs => self.items.pop_back(),
            SearchOrder::Bfs => self.items.pop_front(),
            SearchOrder::Random(_) => {
                if self.items.is_empty() {
                    return None;
                }
                let i = self.rng.gen_range(0..self.items.len());
                self.items.swap_remove_back(i)
            }
        }
    }

    fn len(&self) -> usize {
        self.items.len()
    }
}

/// Parent pointers for witness reconstruction.
struct Traces {
    enabled: bool,
    parents: Vec<Option<(usize, RuleInstance)>>,
}

impl Traces {
    fn add(&mut self, parent: Option<(usize, RuleInstance)>) -> usize {
        if self.enabled {
            self.parents.push(parent);
            self.parents.len() - 1
        } else {
            0
        }
    }

    fn trace(&self, mut node: usize) -> Option<Witness> {
        if !self.enabled {
            return None;
        }
        let mut out = Vec::new();
        while let Some((parent, rule)) = self.parents[node] {
            out.push(rule);
            node = parent;
        }
        out.reverse();
        Some(out)
    }

    fn extend(&self, node: usize, rule: RuleInstance) -> Option<Witness> {
        let mut t = self.trace(node)?;
        t.push(rule);
        Some(t)
    }
}

pub fn explore(
    model: Model,
    program: &Program,
    opts: &ExploreOptions,
) -> Result<Exploration, ExploreError> {
    let start = Instant::now();
    let limits = opts.limits;
    let mut stats = Stats::default();
    let mut outcomes: BTreeMap<Outcome, Option<Witness>> = BTreeMap::new();
    let mut deadlocks = Vec::new();
    let mut limit_hit = None;
    let mut seen: HashSet<MachineState> = HashSet::new();
    let mut traces = Traces {
        enabled: opts.witnesses,
        parents: Vec::new(),
    };
    let mut frontier = Frontier::new(opts.order);

    let init = initial_state(program);
    if opts.dedup {
        seen.insert(canonical_key(&init));
    }
    let root = traces.add(None);
    frontier.push((root, init, 0));
    stats.states = 1;

    while let Some((node, state, depth)) = frontier.pop() {
        if stats.transitions % 1024 == 0 {
            if let Some(t) = limits.timeout {
                if start.elapsed() > t {
                    limit_hit = Some(LimitHit::Time);
                    break;
                }
            }
        }
        if is_terminal(program, &state) {
            outcomes
                .entry(outcome_of(program, &state))
                .or_insert_with(|| traces.trace(node));
            continue;
        }
        let succs = successors(model, program, &state)?;
        if succs.is_empty() {
            deadlocks.push(Deadlock {
                trace: traces.trace(node),
                state,
            });
            continue;
        }
        if depth >= limits.max_depth {
            limit_hit.get_or_insert(LimitHit::Depth);
            continue;
        }
        for (rule, next) in succs {
            stats.transitions += 1;
            if opts.check_invariants {
                if let Err(violation) = check_transition(model, program, &state, &rule, &next) {
                    return Err(ExploreError::Invariant {
                        violation,
                        rule,
                        trace: traces.extend(node, rule),
                    });
                }
            }
            if opts.dedup {
                let key = canonical_key(&next);
                if !seen.insert(key) {
                    stats.dedup_hits += 1;
                    continue;
                }
            }
            if stats.states >= limits.max_states {
                limit_hit = Some(LimitHit::States);
                break;
            }
            stats.states += 1;
            let child = traces.add(Some((node, rule)));
            frontier.push((child, next, depth + 1));
        }
        stats.max_frontier = stats.max_frontier.max(frontier.len());
        if limit_hit == Some(LimitHit::States) {
            break;
        }
    }

    stats.elapsed = start.elapsed();
    Ok(Exploration {
        model,
        program: program.clone(),
        outcomes,
        deadlocks,
        limit_hit,
        stats,
    })
}

/// Re-run a witness from the initial state, checking that every step is
/// enabled, and return the outcome of the final (terminal) state.
pub fn replay(
    model: Model,
    program: &Program,
    witness: &[RuleInstance],
) -> Result<Outcome, ExploreError> {
    let mut state = initial_state(program);
    for (step, rule) in witness.iter().enumerate() {
        if !models::enabled(model, program, &state)?.contains(rule) {
            return Err(ExploreError::ReplayDisabled { step, rule: *rule });
        }
        state = models::apply(model, program, &state, rule)?;
    }
    if !is_terminal(program, &state) {
        return Err(ExploreError::ReplayNotTerminal);
    }
    Ok(outcome_of(program, &state))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub check: Check,
    /// `None` if the search was cut short without finding a satisfying
    /// outcome.
    pub satisfiable: Option<bool>,
    pub status: Status,
    /// A satisfying outcome and the trace reaching it.
    pub witness: Option<(Outcome, Option<Witness>)>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub model: Model,
    pub checks: Vec<CheckResult>,
    pub exploration: Exploration,
}

impl Verdict {
    pub fn status(&self) -> Status {
        let all = self.checks.iter().map(|c| c.status);
        if all.clone().any(|s| s == Status::Fail) {
            Status::Fail
        } else if all.clone().any(|s| s == Status::Inconclusive) || !self.exploration.is_complete()
        {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }
}

/// Judge every check that applies to `model` against an exploration.
pub fn judge(test: &LitmusTest, exploration: Exploration) -> Result<Verdict, ExploreError> {
    let model = exploration.model;
    let mut checks = Vec::new();
    for check in test.checks_for(model) {
        let mut hit = None;
        for (o, w) in &exploration.outcomes {
            if eval_condition(&check.cond, o, &exploration.program.addrs)? {
                hit = Some((o.clone(), w.clone()));
                break;
            }
        }
        let satisfiable = match (&hit, exploration.is_complete()) {
            (Some(_), _) => Some(true),
            (None, true) => Some(false),
            (None, false) => None,
        };
        let status = match (check.polarity, satisfiable) {
            (_, None) => Status::Inconclusive,
            (Polarity::Allowed, Some(true)) | (Polarity::Forbidden, Some(false)) => Status::Pass,
            _ => Status::Fail,
        };
        checks.push(CheckResult {
            check: check.clone(),
            satisfiable,
            status,
            witness: hit,
        });
    }
    Ok(Verdict {
        model,
        checks,
        exploration,
    })
}

/// Explore `test` under `model` and judge its checks.
pub fn check(
    test: &LitmusTest,
    model: Model,
    opts: &ExploreOptions,
) -> Result<Verdict, ExploreError> {
    let program = prepare(test)?;
    let exploration = explore(model, &program, opts)?;
    judge(test, exploration)
}
