//! WMM: store buffers plus invalidation buffers.
//!
//! A load may read its own buffered store, memory, or a stale value from the
//! ib. Writing memory pushes the overwritten value into the ib of every
//! other processor that has no buffered store to that address.

use crate::isa::{DecodedInstr, IbEntry, ProcId, Program, SbEntry};
use crate::state::{MachineState, Rule, RuleInstance};

use super::ModelError;

/// Instances of the processor-local rules (everything except DeqSb).
pub(super) fn local_rules(
    program: &Program,
    state: &MachineState,
    i: ProcId,
    out: &mut Vec<RuleInstance>,
) -> Result<(), ModelError> {
    let p = &state.procs[i];
    match p.decode(&program.threads[i])? {
        DecodedInstr::Halt => {}
        DecodedInstr::Nm { .. } => out.push(RuleInstance::new(i, Rule::Nm)),
        DecodedInstr::Ld { addr, .. } => {
            if p.sb.exist(addr) {
                out.push(RuleInstance::new(i, Rule::LdSb));
            } else {
                out.push(RuleInstance::new(i, Rule::LdMem));
                for entry in 0..p.ib.entries_for(addr).count() {
                    out.push(RuleInstance::new(i, Rule::LdIb { entry }));
                }
            }
        }
        DecodedInstr::St { .. } => out.push(RuleInstance::new(i, Rule::St)),
        DecodedInstr::Commit => {
            if p.sb.is_empty() {
                out.push(RuleInstance::new(i, Rule::Com));
            }
        }
        DecodedInstr::Reconcile => out.push(RuleInstance::new(i, Rule::Rec)),
    }
    Ok(())
}

/// Fire a processor-local rule other than St. Returns `Ok(false)` if
/// `inst` is not one of them.
pub(super) fn apply_local(
    program: &Program,
    s: &mut MachineState,
    inst: &RuleInstance,
) -> Result<bool, ModelError> {
    let i = inst.proc;
    let d = s.procs[i].decode(&program.threads[i])?;
    let refuse = || Err(ModelError::not_enabled(inst));
    match (inst.rule, d) {
        (Rule::Nm, DecodedInstr::Nm { .. }) => s.procs[i].execute(&d, None),
        (Rule::LdSb, DecodedInstr::Ld { addr, .. }) => {
            let Some(e) = s.procs[i].sb.youngest(addr) else {
                return refuse();
            };
            let v = e.value;
            s.procs[i].execute(&d, Some(v));
        }
        (Rule::LdMem, DecodedInstr::Ld { addr, .. }) => {
            if s.procs[i].sb.exist(addr) {
                return refuse();
            }
            let v = s.read(addr);
            let p = &mut s.procs[i];
            p.execute(&d, Some(v));
            p.ib.rm_addr(addr);
        }
        (Rule::LdIb { entry }, DecodedInstr::Ld { addr, .. }) => {
            let p = &mut s.procs[i];
            if p.sb.exist(addr) {
                return refuse();
            }
            let Some(v) = p.ib.get_random(addr, entry) else {
                return refuse();
            };
            p.execute(&d, Some(v));
        }
        (Rule::Com, DecodedInstr::Commit) => {
            if !s.procs[i].sb.is_empty() {
                return refuse();
            }
            s.procs[i].execute(&d, None);
        }
        (Rule::Rec, DecodedInstr::Reconcile) => {
            let p = &mut s.procs[i];
            p.execute(&d, None);
            p.ib.clear();
        }
        (Rule::Nm | Rule::LdSb | Rule::LdMem | Rule::LdIb { .. } | Rule::Com | Rule::Rec, _) => {
            return refuse()
        }
        _ => return Ok(false),
    }
    Ok(true)
}

pub(super) fn enabled(
    program: &Program,
    state: &MachineState,
) -> Result<Vec<RuleInstance>, ModelError> {
    let mut out = Vec::new();
    for (i, p) in state.procs.iter().enumerate() {
        local_rules(program, state, i, &mut out)?;
        for addr in p.sb.addrs() {
            out.push(RuleInstance::new(i, Rule::DeqSb { addr }));
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
    match inst.rule {
        Rule::St => {
            let d = s.procs[i].decode(&program.threads[i])?;
            let DecodedInstr::St { addr, value } = d else {
                return Err(ModelError::not_enabled(inst));
            };
            let p = &mut s.procs[i];
            p.execute(&d, None);
            p.sb.enq(SbEntry::new(addr, value));
            p.ib.rm_addr(addr);
        }
        Rule::DeqSb { addr } => {
            let Some(e) = s.procs[i].sb.rm_oldest(addr) else {
                return Err(ModelError::not_enabled(inst));
            };
            let old = s.read(addr);
            s.write(addr, e.value);
            for (j, p) in s.procs.iter_mut().enumerate() {
                if j != i && !p.sb.exist(addr) {
                    p.ib.insert(IbEntry::new(addr, old));
                }
            }
        }
        _ => return Err(ModelError::not_enabled(inst)),
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::test_util::{addr, program};
    use super::super::{apply, enabled};
    use crate::isa::IbEntry;
    use crate::model::Model;
    use crate::state::{initial_state, Rule, RuleInstance};

    const W: Model = Model::Wmm;

    #[test]
    fn load_hitting_sb_has_only_ldsb() {
        let p = program("thread P1:\n St a 1\n r1 = Ld a\ncheck allowed: r1 = 1 & m[b] = 0\n");
        let s = initial_state(&p);
        let mut s = apply(W, &p, &s, &RuleInstance::new(0, Rule::St)).unwrap();
        s.procs[0].ib.insert(IbEntry::new(addr(&p, "b"), 0));
        let rules = enabled(W, &p, &s).unwrap();
        let loads: Vec<_> = rules
            .iter()
            .filter(|r| matches!(r.rule, Rule::LdSb | Rule::LdMem | Rule::LdIb { .. }))
            .collect();
        assert_eq!(loads, vec![&RuleInstance::new(0, Rule::LdSb)]);
    }

    #[test]
    fn load_with_stale_value_has_two_choices() {
        let p = program("thread P1:\n r1 = Ld a\ncheck allowed: r1 = 1\n");
        let mut s = initial_state(&p);
        s.procs[0].ib.insert(IbEntry::new(addr(&p, "a"), 0));
        assert_eq!(
            enabled(W, &p, &s).unwrap(),
            vec![
                RuleInstance::new(0, Rule::LdMem),
                RuleInstance::new(0, Rule::LdIb { entry: 0 })
            ]
        );
    }

    #[test]
    fn commit_blocked_by_store() {
        let p = program("thread P1:\n St a 1\n Commit\ncheck allowed: m[a] = 1\n");
        let s = initial_state(&p);
        let s = apply(W, &p, &s, &RuleInstance::new(0, Rule::St)).unwrap();
        let rules = enabled(W, &p, &s).unwrap();
        assert!(!rules.iter().any(|r| r.rule == Rule::Com));
    }

    #[test]
    fn deq_feeds_other_ibs_only() {
        let p = program(
            "thread P1:\n St a 1\nthread P2:\n r1 = Ld a\nthread P3:\n St a 3\ncheck allowed: r1 = 0\n",
        );
        let a = addr(&p, "a");
        let s = initial_state(&p);
        let s = apply(W, &p, &s, &RuleInstance::new(0, Rule::St)).unwrap();
        let s = apply(W, &p, &s, &RuleInstance::new(2, Rule::St)).unwrap();
        let s = apply(W, &p, &s, &RuleInstance::new(0, Rule::DeqSb { addr: a })).unwrap();
        assert_eq!(s.read(a), 1);
        assert!(s.procs[0].ib.is_empty());
        assert_eq!(
            s.procs[1]
                .ib
                .entries_for(a)
                .map(|e| e.value)
                .collect::<Vec<_>>(),
            vec![0]
        );
        assert!(
            s.procs[2].ib.is_empty(),
            "processor with a buffered store to a sees no stale value"
        );

        let ldib = apply(W, &p, &s, &RuleInstance::new(1, Rule::LdIb { entry: 0 })).unwrap();
        assert_eq!(ldib.procs[1].regs[0], 0);
        assert!(ldib.procs[1].ib.is_empty());
        let ldmem = apply(W, &p, &s, &RuleInstance::new(1, Rule::LdMem)).unwrap();
        assert_eq!(ldmem.procs[1].regs[0], 1);
        assert!(ldmem.procs[1].ib.is_empty());
    }

    #[test]
    fn store_and_reconcile_purge_ib() {
        let p = program("thread P1:\n St a 1\n Reconcile\ncheck allowed: m[a] = 1 & m[b] = 0\n");
        let (a, b) = (addr(&p, "a"), addr(&p, "b"));
        let mut s = initial_state(&p);
        s.procs[0].ib.insert(IbEntry::new(a, 0));
        s.procs[0].ib.insert(IbEntry::new(b, 0));
        let s = apply(W, &p, &s, &RuleInstance::new(0, Rule::St)).unwrap();
        assert!(!s.procs[0].ib.exist(a) && s.procs[0].ib.exist(b));
        let s = apply(W, &p, &s, &RuleInstance::new(0, Rule::Rec)).unwrap();
        assert!(s.procs[0].ib.is_empty());
    }

    #[test]
    fn disabled_instance_rejected() {
        let p = program("thread P1:\n r1 = Ld a\ncheck allowed: r1 = 0\n");
        let s = initial_state(&p);
        assert!(apply(W, &p, &s, &RuleInstance::new(0, Rule::LdIb { entry: 0 })).is_err());
        assert!(apply(W, &p, &s, &RuleInstance::new(0, Rule::St)).is_err());
        assert!(apply(W, &p, &s, &RuleInstance::new(0, Rule::DeqSb { addr: 0 })).is_err());
    }
}
