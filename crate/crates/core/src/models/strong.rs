//! SC, TSO and PSO.
//!
//! SC loads and stores go straight to memory. TSO and PSO put stores in the
//! store buffer; loads bypass from the youngest buffered store to the same
//! address. TSO drains the globally oldest store, PSO the oldest store of any
//! address. Reconcile is a no-op in all three, and Commit under SC never
//! waits because the buffer is always empty.

use crate::isa::{DecodedInstr, Program};
use crate::model::Model;
use crate::state::{MachineState, Rule, RuleInstance};

use super::ModelError;

pub(super) fn enabled(
    model: Model,
    program: &Program,
    state: &MachineState,
) -> Result<Vec<RuleInstance>, ModelError> {
    let mut out = Vec::new();
    for (i, p) in state.procs.iter().enumerate() {
        let rule = match p.decode(&program.threads[i])? {
            DecodedInstr::Halt => None,
            DecodedInstr::Nm { .. } => Some(Rule::Nm),
            DecodedInstr::Ld { .. } => Some(Rule::Ld),
            DecodedInstr::St { .. } => Some(Rule::St),
            DecodedInstr::Commit => p.sb.is_empty().then_some(Rule::Com),
            DecodedInstr::Reconcile => Some(Rule::Rec),
        };
        out.extend(rule.map(|r| RuleInstance::new(i, r)));
        match model {
            Model::Tso => {
                if let Some(addr) = p.sb.any_addr() {
                    out.push(RuleInstance::new(i, Rule::DeqSb { addr }));
                }
            }
            Model::Pso => {
                for addr in p.sb.addrs() {
                    out.push(RuleInstance::new(i, Rule::DeqSb { addr }));
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

pub(super) fn apply(
    model: Model,
    program: &Program,
    state: &MachineState,
    inst: &RuleInstance,
) -> Result<MachineState, ModelError> {
    let i = inst.proc;
    let mut s = state.clone();
    let d = s.procs[i].decode(&program.threads[i])?;
    let refuse = || Err(ModelError::not_enabled(inst));
    match (inst.rule, d) {
        (Rule::Nm, DecodedInstr::Nm { .. }) | (Rule::Rec, DecodedInstr::Reconcile) => {
            s.procs[i].execute(&d, None);
        }
        (Rule::Ld, DecodedInstr::Ld { addr, .. }) => {
            let v = match model {
                Model::Sc => s.read(addr),
                _ => match s.procs[i].sb.youngest(addr) {
                    Some(e) => e.value,
                    None => s.read(addr),
                },
            };
            s.procs[i].execute(&d, Some(v));
        }
        (Rule::St, DecodedInstr::St { addr, value }) => {
            if model == Model::Sc {
                s.write(addr, value);
            } else {
                s.procs[i].sb.enq(crate::isa::SbEntry::new(addr, value));
            }
            s.procs[i].execute(&d, None);
        }
        (Rule::Com, DecodedInstr::Commit) => {
            if !s.procs[i].sb.is_empty() {
                return refuse();
            }
            s.procs[i].execute(&d, None);
        }
        (Rule::DeqSb { addr }, _) => {
            let e = match model {
                Model::Tso if s.procs[i].sb.any_addr() == Some(addr) => s.procs[i].sb.deq(),
                Model::Pso => s.procs[i].sb.rm_oldest(addr),
                _ => None,
            };
            let Some(e) = e else { return refuse() };
            s.write(e.addr, e.value);
        }
        _ => return refuse(),
    }
    Ok(s)
}
