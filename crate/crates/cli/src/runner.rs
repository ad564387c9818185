//! Loading inputs and running (test, model) pairs.

use std::path::Path;

use i2e::isa::Program;
use i2e::litmus::{load_corpus, parse, LitmusTest};
use i2e::{explore, judge, prepare, ExploreOptions, Model, Status, Verdict};
use rayon::prelude::*;
use walkdir::WalkDir;

use crate::report::{CheckReport, Comparison, InputError, RunResult, WitnessReport};

pub struct Input {
    pub source: String,
    pub test: LitmusTest,
    pub program: Program,
}

fn load_file(path: &Path, inputs: &mut Vec<Input>, errors: &mut Vec<InputError>) {
    let source = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            errors.push(InputError {
                input: source,
                message: e.to_string(),
            });
            return;
        }
    };
    match parse(&text) {
        Ok(test) => add(source, test, inputs, errors),
        // ParseError renders as `line:col: message`.
        Err(e) => errors.push(InputError {
            message: format!("{source}:{e}"),
            input: source,
        }),
    }
}

fn add(
    source: String,
    mut test: LitmusTest,
    inputs: &mut Vec<Input>,
    errors: &mut Vec<InputError>,
) {
    if test.name.is_empty() {
        test.name = Path::new(&source)
            .file_stem()
            .map_or_else(|| source.clone(), |s| s.to_string_lossy().into_owned());
    }
    match prepare(&test) {
        Ok(program) => inputs.push(Input {
            source,
            test,
            program,
        }),
        Err(e) => errors.push(InputError {
            input: source,
            message: e.to_string(),
        }),
    }
}

/// Files and directories (searched for `*.litmus`), plus the embedded corpus
/// if asked. Bad inputs are collected, never fatal.
pub fn load_inputs(paths: &[String], corpus: bool) -> (Vec<Input>, Vec<InputError>) {
    let mut inputs = Vec::new();
    let mut errors = Vec::new();
    if corpus {
        for test in load_corpus() {
            let source = format!("corpus:{}", test.name);
            add(source, test, &mut inputs, &mut errors);
        }
    }
    for p in paths {
        let path = Path::new(p);
        if path.is_dir() {
            let mut files: Vec<_> = WalkDir::new(path)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| {
                    e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "litmus")
                })
                .map(|e| e.into_path())
                .collect();
            files.sort();
            for f in files {
                load_file(&f, &mut inputs, &mut errors);
            }
        } else {
            load_file(path, &mut inputs, &mut errors);
        }
    }
    (inputs, errors)
}

/// Outcome of one run, kept for the comparison pass.
pub struct Run {
    pub input: usize,
    pub result: RunResult,
    pub verdict: Option<Verdict>,
}

fn run_one(idx: usize, input: &Input, model: Model, opts: &ExploreOptions, witness: bool) -> Run {
    let base = |status, error| RunResult {
        test: input.test.name.clone(),
        source: input.source.clone(),
        model,
        status,
        complete: false,
        limit_hit: None,
        stats: Default::default(),
        deadlocks: 0,
        outcomes: Vec::new(),
        checks: Vec::new(),
        error,
    };
    let verdict = match explore(model, &input.program, opts).and_then(|e| judge(&input.test, e)) {
        Ok(v) => v,
        Err(e) => {
            return Run {
                input: idx,
                result: base(Status::Fail, Some(e.to_string())),
                verdict: None,
            }
        }
    };
    let ex = &verdict.exploration;
    let checks = verdict
        .checks
        .iter()
        .map(|c| CheckReport {
            condition: c.check.to_string(),
            expected: c.check.polarity.as_str(),
            computed: match c.satisfiable {
                Some(true) => "allowed",
                Some(false) => "forbidden",
                None => "unknown",
            },
            status: c.status,
            witness: c
                .witness
                .as_ref()
                .filter(|_| witness)
                .map(|(o, w)| WitnessReport {
                    outcome: o.clone(),
                    trace: w
                        .iter()
                        .flatten()
                        .map(|r| r.display(model, &ex.program).to_string())
                        .collect(),
                }),
        })
        .collect();
    let result = RunResult {
        status: verdict.status(),
        complete: ex.is_complete(),
        limit_hit: ex.limit_hit,
        stats: ex.stats.clone(),
        deadlocks: ex.deadlocks.len(),
        outcomes: ex.outcome_set().cloned().collect(),
        checks,
        ..base(Status::Pass, None)
    };
    Run {
        input: idx,
        result,
        verdict: Some(verdict),
    }
}

/// Run every (input, model) pair in parallel; results come back sorted by
/// test name, source, then model.
pub fn run_all(
    inputs: &[Input],
    models: &[Model],
    opts: &ExploreOptions,
    witness: bool,
) -> Vec<Run> {
    let jobs: Vec<(usize, Model)> = (0..inputs.len())
        .flat_map(|i| models.iter().map(move |&m| (i, m)))
        .collect();
    let mut runs: Vec<Run> = jobs
        .into_par_iter()
        .map(|(i, m)| run_one(i, &inputs[i], m, opts, witness))
        .collect();
    runs.sort_by(|a, b| {
        let ka = (&a.result.test, &a.result.source, a.result.model);
        let kb = (&b.result.test, &b.result.source, b.result.model);
        ka.cmp(&kb)
    });
    runs
}

/// Pairwise inclusion of outcome sets for each input, over ordered pairs of
/// distinct models.
pub fn compare(inputs: &[Input], runs: &[Run]) -> Vec<Comparison> {
    let mut out = Vec::new();
    for (idx, input) in inputs.iter().enumerate() {
        let mine: Vec<&Run> = runs.iter().filter(|r| r.input == idx).collect();
        for lhs in &mine {
            for rhs in &mine {
                if lhs.result.model == rhs.result.model {
                    continue;
                }
                let sets = lhs
                    .verdict
                    .as_ref()
                    .zip(rhs.verdict.as_ref())
                    .filter(|(a, b)| a.exploration.is_complete() && b.exploration.is_complete());
                let (included, counterexample) = match sets {
                    None => (None, None),
                    Some((a, b)) => {
                        let missing = a
                            .exploration
                            .outcome_set()
                            .find(|o| !b.exploration.outcomes.contains_key(*o))
                            .cloned();
                        (Some(missing.is_none()), missing)
                    }
                };
                out.push(Comparison {
                    test: input.test.name.clone(),
                    source: input.source.clone(),
                    lhs: lhs.result.model,
                    rhs: rhs.result.model,
                    included,
                    counterexample,
                });
            }
        }
    }
    out.sort_by(|a, b| (&a.test, &a.source, a.lhs, a.rhs).cmp(&(&b.test, &b.source, b.lhs, b.rhs)));
    out
}
