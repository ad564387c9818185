//! Rule catalogs of the six models.
//!
//! Every model exposes the same pair: `enabled` lists the rule instances that
//! can fire in a state, with every nondeterministic choice (ib entry, sb
//! address, copy target) spelled out as its own instance; `apply` fires one
//! instance atomically and returns the successor. `apply` re-checks the guard
//! and refuses instances that are not enabled.

pub mod coherence;
mod strong;
mod wmm;
mod wmm_d;
mod wmm_s;

use crate::isa::{DecodeError, ProcId, Program};
use crate::model::Model;
use crate::state::{MachineState, Rule, RuleInstance};

pub use coherence::{no_cycle, CoherenceGraph};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("rule {rule:?} is not enabled on processor {proc}")]
    NotEnabled { proc: ProcId, rule: Rule },
}

impl ModelError {
    pub(crate) fn not_enabled(inst: &RuleInstance) -> Self {
        ModelError::NotEnabled {
            proc: inst.proc,
            rule: inst.rule,
        }
    }
}

pub fn enabled(
    model: Model,
    program: &Program,
    state: &MachineState,
) -> Result<Vec<RuleInstance>, ModelError> {
    match model {
        Model::Sc | Model::Tso | Model::Pso => strong::enabled(model, program, state),
        Model::Wmm => wmm::enabled(program, state),
        Model::WmmD => wmm_d::enabled(program, state),
        Model::WmmS => wmm_s::enabled(program, state),
    }
}

pub fn apply(
    model: Model,
    program: &Program,
    state: &MachineState,
    inst: &RuleInstance,
) -> Result<MachineState, ModelError> {
    if inst.proc >= state.procs.len() {
        return Err(ModelError::not_enabled(inst));
    }
    match model {
        Model::Sc | Model::Tso | Model::Pso => strong::apply(model, program, state, inst),
        Model::Wmm => wmm::apply(program, state, inst),
        Model::WmmD => wmm_d::apply(program, state, inst),
        Model::WmmS => wmm_s::apply(program, state, inst),
    }
}
