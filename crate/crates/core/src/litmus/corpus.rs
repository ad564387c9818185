//! The embedded litmus corpus. Each file lives under `corpus/` in this crate
//! and carries model-scoped checks recording the expected verdict per model.

use super::ast::LitmusTest;
use super::parse::parse;

/// (name, source) for every embedded test, sorted by name.
pub const CORPUS_SOURCES: &[(&str, &str)] = &[
    ("corr", include_str!("../../corpus/corr.litmus")),
    (
        "dekker-no-commit-p1",
        include_str!("../../corpus/dekker-no-commit-p1.litmus"),
    ),
    (
        "dekker-no-commit-p2",
        include_str!("../../corpus/dekker-no-commit-p2.litmus"),
    ),
    (
        "dekker-no-reconcile-p1",
        include_str!("../../corpus/dekker-no-reconcile-p1.litmus"),
    ),
    (
        "dekker-no-reconcile-p2",
        include_str!("../../corpus/dekker-no-reconcile-p2.litmus"),
    ),
    (
        "dekker-nofence",
        include_str!("../../corpus/dekker-nofence.litmus"),
    ),
    ("dekker-wmm", include_str!("../../corpus/dekker-wmm.litmus")),
    ("iriw", include_str!("../../corpus/iriw.litmus")),
    (
        "iriw-commit",
        include_str!("../../corpus/iriw-commit.litmus"),
    ),
    (
        "load-value-pred",
        include_str!("../../corpus/load-value-pred.litmus"),
    ),
    (
        "mem-dep-pred",
        include_str!("../../corpus/mem-dep-pred.litmus"),
    ),
    (
        "mp-no-commit",
        include_str!("../../corpus/mp-no-commit.litmus"),
    ),
    (
        "mp-no-reconcile",
        include_str!("../../corpus/mp-no-reconcile.litmus"),
    ),
    ("mp-nofence", include_str!("../../corpus/mp-nofence.litmus")),
    ("mp-wmm", include_str!("../../corpus/mp-wmm.litmus")),
    (
        "rmo-spec-commit",
        include_str!("../../corpus/rmo-spec-commit.litmus"),
    ),
    ("rsw", include_str!("../../corpus/rsw.litmus")),
    ("thin-air", include_str!("../../corpus/thin-air.litmus")),
    (
        "transitive-dep",
        include_str!("../../corpus/transitive-dep.litmus"),
    ),
    (
        "transitive-dep-commit",
        include_str!("../../corpus/transitive-dep-commit.litmus"),
    ),
    ("wwc", include_str!("../../corpus/wwc.litmus")),
    ("wwc-commit", include_str!("../../corpus/wwc-commit.litmus")),
];

/// Parse the embedded corpus.
pub fn load_corpus() -> Vec<LitmusTest> {
    CORPUS_SOURCES
        .iter()
        .map(|(name, src)| {
            parse(src).unwrap_or_else(|e| panic!("embedded corpus test {name} does not parse: {e}"))
        })
        .collect()
}

pub fn corpus_test(name: &str) -> Option<LitmusTest> {
    CORPUS_SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse(src).expect("embedded corpus parses"))
}
