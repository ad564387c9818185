//! Executable operational semantics for six memory models in the
//! Instantaneous Instruction Execution style: SC, TSO, PSO, WMM, WMM-D and
//! WMM-S.
//!
//! A litmus test is parsed ([`litmus::parse`]), lowered to a [`isa::Program`],
//! and explored exhaustively under a [`Model`]; the reachable final outcomes
//! decide whether each `allowed`/`forbidden` check holds.
//!
//! ```
//! use i2e::{check, litmus::corpus_test, ExploreOptions, Model, Status};
//!
//! let test = corpus_test("mp-wmm").unwrap();
//! let verdict = check(&test, Model::Wmm, &ExploreOptions::default()).unwrap();
//! assert_eq!(verdict.status(), Status::Pass);
//! ```

pub mod explorer;
pub mod invariants;
pub mod isa;
pub mod litmus;
mod model;
pub mod models;
pub mod outcome;
pub mod state;

pub use explorer::{
    check, explore, judge, prepare, replay, CheckResult, Exploration, ExploreError, ExploreLimits,
    ExploreOptions, LimitHit, SearchOrder, Stats, Status, Verdict, Witness,
};
pub use model::{Model, UnknownModel};
pub use outcome::{eval_condition, EvalError, Outcome};
