//! Structural checks run on every transition when the explorer is asked to.

use crate::isa::{Addr, DecodedInstr, ProcId, Program, Tag, Timestamp};
use crate::model::Model;
use crate::models::CoherenceGraph;
use crate::state::{MachineState, Rule, RuleInstance};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InvariantViolation {
    #[error("processor {proc} has address {addr} in both its sb and its ib")]
    SbIbOverlap { proc: ProcId, addr: Addr },
    #[error("coherence order for address {addr} has a cycle")]
    CoherenceCycle { addr: Addr },
    #[error("processor {proc} holds tag {tag} more than once")]
    DuplicateTag { proc: ProcId, tag: Tag },
    #[error("tag {tag} still buffered after being written to memory")]
    TagSurvivesDeq { tag: Tag },
    #[error("processor {proc}: ib entry for {addr} has ts_lo > ts_hi")]
    IntervalInverted { proc: ProcId, addr: Addr },
    #[error("global clock went from {before} to {after}")]
    ClockStep { before: Timestamp, after: Timestamp },
    #[error("a timestamp exceeds gts + 1")]
    TimestampAhead,
    #[error("processor {proc}: load result timestamp {ts} below {bound}")]
    LoadTimestamp {
        proc: ProcId,
        ts: Timestamp,
        bound: Timestamp,
    },
    #[error("processor {proc}: stale read timestamp {ts} exceeds {ts_hi}")]
    StaleTiming {
        proc: ProcId,
        ts: Timestamp,
        ts_hi: Timestamp,
    },
}

/// Check `after`, reached from `before` by firing `inst`.
pub fn check_transition(
    model: Model,
    program: &Program,
    before: &MachineState,
    inst: &RuleInstance,
    after: &MachineState,
) -> Result<(), InvariantViolation> {
    if model.is_wmm_family() {
        sb_ib_exclusion(after)?;
    }
    match model {
        Model::WmmS => {
            coherence(after)?;
            if let Rule::DeqSb { addr } = inst.rule {
                let t = before.procs[inst.proc]
                    .sb
                    .oldest(addr)
                    .and_then(|e| e.tag)
                    .expect("dequeued a tagged store");
                if after.procs.iter().any(|p| p.sb.has(t)) {
                    return Err(InvariantViolation::TagSurvivesDeq { tag: t });
                }
            }
        }
        Model::WmmD => timestamps(program, before, inst, after)?,
        _ => {}
    }
    Ok(())
}

fn sb_ib_exclusion(s: &MachineState) -> Result<(), InvariantViolation> {
    for (i, p) in s.procs.iter().enumerate() {
        if let Some(e) = p.ib.iter().find(|e| p.sb.exist(e.addr)) {
            return Err(InvariantViolation::SbIbOverlap {
                proc: i,
                addr: e.addr,
            });
        }
    }
    Ok(())
}

fn coherence(s: &MachineState) -> Result<(), InvariantViolation> {
    let mut addrs: Vec<Addr> = Vec::new();
    for (i, p) in s.procs.iter().enumerate() {
        let mut tags: Vec<Tag> = p.sb.iter().filter_map(|e| e.tag).collect();
        tags.sort_unstable();
        if let Some(w) = tags.windows(2).find(|w| w[0] == w[1]) {
            return Err(InvariantViolation::DuplicateTag { proc: i, tag: w[0] });
        }
        addrs.extend(p.sb.addrs());
    }
    addrs.sort_unstable();
    addrs.dedup();
    for a in addrs {
        if !CoherenceGraph::of_state(s, a).is_acyclic() {
            return Err(InvariantViolation::CoherenceCycle { addr: a });
        }
    }
    Ok(())
}

fn timestamps(
    program: &Program,
    before: &MachineState,
    inst: &RuleInstance,
    after: &MachineState,
) -> Result<(), InvariantViolation> {
    let expect = before.gts + u64::from(matches!(inst.rule, Rule::DeqSb { .. }));
    if after.gts != expect {
        return Err(InvariantViolation::ClockStep {
            before: before.gts,
            after: after.gts,
        });
    }
    let limit = after.gts + 1;
    let mut all =
        after
            .memory()
            .flat_map(|(_, c)| [c.sts, c.mts])
            .chain(after.procs.iter().flat_map(|p| {
                p.reg_ts
                    .iter()
                    .copied()
                    .chain([p.rts])
                    .chain(p.sb.iter().map(|e| e.sts))
                    .chain(p.ib.iter().flat_map(|e| [e.ts_lo, e.ts_hi]))
            }));
    if all.any(|t| t > limit) {
        return Err(InvariantViolation::TimestampAhead);
    }
    for (i, p) in after.procs.iter().enumerate() {
        if let Some(e) = p.ib.iter().find(|e| e.ts_lo > e.ts_hi) {
            return Err(InvariantViolation::IntervalInverted {
                proc: i,
                addr: e.addr,
            });
        }
    }

    if matches!(inst.rule, Rule::LdSb | Rule::LdMem | Rule::LdIb { .. }) {
        let i = inst.proc;
        let pb = &before.procs[i];
        let Ok((DecodedInstr::Ld { addr, dst }, ats)) = pb.decode_ts(&program.threads[i]) else {
            return Ok(());
        };
        let ts = after.procs[i].reg_ts[dst];
        for bound in [pb.rts, ats] {
            if ts < bound {
                return Err(InvariantViolation::LoadTimestamp { proc: i, ts, bound });
            }
        }
        if let Rule::LdIb { entry } = inst.rule {
            let e = pb.ib.random(addr, entry).expect("consumed entry exists");
            if ts > e.ts_hi {
                return Err(InvariantViolation::StaleTiming {
                    proc: i,
                    ts,
                    ts_hi: e.ts_hi,
                });
            }
        }
    }
    Ok(())
}
