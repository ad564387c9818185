//! WMM-S: WMM with non-atomic multi-copy stores.
//!
//! Stores are tagged; a background rule copies a buffered store into another
//! processor's buffer as long as the coherence order stays acyclic. A store
//! reaches memory only when every copy of it is the oldest store to its
//! address in its buffer, and then all copies leave at once.

use std::collections::BTreeSet;

use crate::isa::{Addr, DecodedInstr, IbEntry, Program, SbEntry, Tag, Value};
use crate::state::{MachineState, Rule, RuleInstance};

use super::coherence::no_cycle;
use super::wmm::{apply_local, local_rules};
use super::ModelError;

/// Every copy of `t` is the oldest store to `a` in its buffer.
fn deq_allowed(state: &MachineState, a: Addr, t: Tag) -> bool {
    state
        .procs
        .iter()
        .all(|p| !p.sb.has(t) || p.sb.oldest(a).and_then(|e| e.tag) == Some(t))
}

/// Live stores as (address, value, tag, first holder), one per tag.
fn live_stores(state: &MachineState) -> Vec<(Addr, Value, Tag, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, p) in state.procs.iter().enumerate() {
        for e in p.sb.iter() {
            let t = e.tag.expect("WMM-S stores are tagged");
            if seen.insert(t) {
                out.push((e.addr, e.value, t, i));
            }
        }
    }
    out
}

pub(super) fn enabled(
    program: &Program,
    state: &MachineState,
) -> Result<Vec<RuleInstance>, ModelError> {
    let mut out = Vec::new();
    for i in 0..state.procs.len() {
        local_rules(program, state, i, &mut out)?;
    }
    // DeqSb and Copy produce the same successor whichever holder fires them,
    // so each is listed once per tag, attributed to the first holder.
    let stores = live_stores(state);
    for &(a, _, t, holder) in &stores {
        if state.procs[holder].sb.oldest(a).and_then(|e| e.tag) == Some(t)
            && deq_allowed(state, a, t)
        {
            out.push(RuleInstance::new(holder, Rule::DeqSb { addr: a }));
        }
    }
    for &(a, _, t, holder) in &stores {
        for to in 0..state.procs.len() {
            if no_cycle(state, a, t, to) {
                out.push(RuleInstance::new(
                    holder,
                    Rule::Copy {
                        addr: a,
                        tag: t,
                        to,
                    },
                ));
            }
        }
    }
    Ok(out)
}

pub(super) fn apply(
    program: &Program,
    state: &MachineState,
    inst: &RuleInstance,
) -> Result<MachineState, ModelError> {
    let mut s = state.clone();
    if apply_local(program, &mut s, inst)? {
        return Ok(s);
    }
    let i = inst.proc;
    let refuse = || Err(ModelError::not_enabled(inst));
    match inst.rule {
        Rule::St => {
            let d = s.procs[i].decode(&program.threads[i])?;
            let DecodedInstr::St { addr, value } = d else {
                return refuse();
            };
            let tag = s.alloc_tag();
            let p = &mut s.procs[i];
            p.execute(&d, None);
            p.sb.enq(SbEntry {
                tag: Some(tag),
                ..SbEntry::new(addr, value)
            });
            p.ib.rm_addr(addr);
        }
        Rule::DeqSb { addr } => {
            let Some(&e) = s.procs[i].sb.oldest(addr) else {
                return refuse();
            };
            let t = e.tag.expect("WMM-S stores are tagged");
            if !deq_allowed(&s, addr, t) {
                return refuse();
            }
            let old = s.read(addr);
            s.write(addr, e.value);
            for p in &mut s.procs {
                if p.sb.has(t) {
                    p.sb.rm_oldest(addr);
                } else if !p.sb.exist(addr) {
                    p.ib.insert(IbEntry::new(addr, old));
                }
            }
        }
        Rule::Copy { addr, tag, to } => {
            let src = s.procs[i].sb.iter().find(|e| e.tag == Some(tag)).copied();
            let Some(e) = src else { return refuse() };
            if e.addr != addr || to >= s.procs.len() || !no_cycle(&s, addr, tag, to) {
                return refuse();
            }
            let p = &mut s.procs[to];
            p.sb.enq(e);
            p.ib.rm_addr(addr);
        }
        _ => return refuse(),
    }
    Ok(s)
}
