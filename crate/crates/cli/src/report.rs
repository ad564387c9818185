//! Report structures shared by the text and JSON renderers.
//!
//! The JSON layout is described by `docs/report-schema.json`; bump
//! [`SCHEMA_VERSION`] on any incompatible change.

use std::fmt::Write as _;

use i2e::{LimitHit, Model, Outcome, Stats, Status};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub order: String,
    pub seed: Option<u64>,
    pub results: Vec<RunResult>,
    pub comparisons: Vec<Comparison>,
    pub errors: Vec<InputError>,
    pub summary: Summary,
}

#[derive(Debug, Serialize)]
pub struct InputError {
    pub input: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct RunResult {
    pub test: String,
    pub source: String,
    pub model: Model,
    pub status: Status,
    pub complete: bool,
    pub limit_hit: Option<LimitHit>,
    pub stats: Stats,
    pub deadlocks: usize,
    pub outcomes: Vec<Outcome>,
    pub checks: Vec<CheckReport>,
    /// Set when exploration itself failed; `status` is then `fail`.
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub condition: String,
    /// Verdict annotated in the test file.
    pub expected: &'static str,
    /// Verdict computed from the outcome set; `unknown` if the search was cut
    /// short before a satisfying outcome turned up.
    pub computed: &'static str,
    pub status: Status,
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Serialize)]
pub struct WitnessReport {
    pub outcome: Outcome,
    /// Rule firings in order, e.g. `P1 WMM-DeqSb addr=a`.
    pub trace: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub test: String,
    pub source: String,
    pub lhs: Model,
    pub rhs: Model,
    /// Whether outcomes(lhs) ⊆ outcomes(rhs); `None` if either side is
    /// partial.
    pub included: Option<bool>,
    pub counterexample: Option<Outcome>,
}

#[derive(Debug, Default, Serialize)]
pub struct Summary {
    pub runs: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub input_errors: usize,
    pub exit_code: u8,
}

impl Summary {
    pub fn tally(results: &[RunResult], input_errors: usize) -> Summary {
        let count = |s| results.iter().filter(|r| r.status == s).count();
        let mut s = Summary {
            runs: results.len(),
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            input_errors,
            exit_code: 0,
        };
        s.exit_code = if s.input_errors > 0 {
            3
        } else if s.fail > 0 {
            1
        } else if s.inconclusive > 0 {
            2
        } else {
            0
        };
        s
    }
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(
            w,
            "report schema v{}, order {}, seed {}",
            self.schema_version,
            self.order,
            opt(&self.seed)
        );
        for e in &self.errors {
            let _ = writeln!(w, "error: {}: {}", e.input, e.message);
        }
        for r in &self.results {
            let _ = writeln!(
                w,
                "\n== {} [{}] {}  ({})",
                r.test, r.model, r.status, r.source
            );
            let s = &r.stats;
            let _ = writeln!(
                w,
                "  search: complete={} limit_hit={} states={} transitions={} dedup_hits={} max_frontier={} elapsed_ms={} deadlocks={}",
                r.complete,
                opt(&r.limit_hit),
                s.states,
                s.transitions,
                s.dedup_hits,
                s.max_frontier,
                s.elapsed.as_millis(),
                r.deadlocks
            );
            if let Some(e) = &r.error {
                let _ = writeln!(w, "  error: {e}");
            }
            for c in &r.checks {
                let _ = writeln!(
                    w,
                    "  {} {}: expected {}, computed {}",
                    c.status, c.condition, c.expected, c.computed
                );
                if let Some(wit) = &c.witness {
                    let _ = writeln!(w, "    witness outcome: {}", wit.outcome);
                    for (k, step) in wit.trace.iter().enumerate() {
                        let _ = writeln!(w, "    {:>4}. {step}", k + 1);
                    }
                }
            }
            let _ = writeln!(w, "  outcomes ({}):", r.outcomes.len());
            for o in &r.outcomes {
                let _ = writeln!(w, "    {o}");
            }
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(w, "\ninclusion:");
            for c in &self.comparisons {
                let verdict = match c.included {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "unknown",
                };
                let _ = write!(
                    w,
                    "  {} ({}): {} ⊆ {}: {verdict}",
                    c.test, c.source, c.lhs, c.rhs
                );
                if let Some(o) = &c.counterexample {
                    let _ = write!(w, "  e.g. {o}");
                }
                let _ = writeln!(w);
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            w,
            "\n{} runs: {} pass, {} fail, {} inconclusive, {} input errors; exit {}",
            s.runs, s.pass, s.fail, s.inconclusive, s.input_errors, s.exit_code
        );
        out
    }
}
