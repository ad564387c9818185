//! Acceptance run over the embedded corpus: prints one PASS/FAIL line per
//! criterion and exits nonzero if any criterion fails.
//!
//! Expected reachability is written out here by hand as outcome predicates,
//! independent of the `check` lines stored in the corpus files.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Mutex;

use common::{oracle_addresses, oracle_outcomes, reg, Buffering};
use i2e::isa::Program;
use i2e::litmus::{load_corpus, LitmusTest};
use i2e::{explore, prepare, replay, Exploration, ExploreOptions, Model, Outcome, SearchOrder};

type Pred = fn(&Outcome, &BTreeMap<String, i64>) -> bool;
type Criterion = (u8, &'static str, Box<dyn Fn(&Ctx)>);

fn dekker_00(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P1", "r1") == 0 && reg(o, "P2", "r2") == 0
}

fn mp_10(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P2", "r1") == 1 && reg(o, "P2", "r2") == 0
}

fn corr_10(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P1", "r1") == 1 && reg(o, "P1", "r2") == 0
}

fn thin_air(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P1", "r1") == 42 && reg(o, "P2", "r2") == 42
}

fn mem_dep(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P2", "r1") == 1 && reg(o, "P2", "r2") == 0
}

fn load_value(o: &Outcome, m: &BTreeMap<String, i64>) -> bool {
    reg(o, "P2", "r1") == m["a"] && reg(o, "P2", "r2") == 0
}

fn transitive(o: &Outcome, m: &BTreeMap<String, i64>) -> bool {
    reg(o, "P2", "r1") == m["a"] && reg(o, "P2", "r2") == m["a"] && reg(o, "P2", "r3") == 0
}

fn rsw(o: &Outcome, m: &BTreeMap<String, i64>) -> bool {
    let r = |n| reg(o, "P2", n);
    r("r1") == 1
        && r("r2") == m["c"]
        && r("r3") == 0
        && r("r4") == 0
        && r("r5") == m["a"]
        && r("r6") == 0
}

fn rmo(o: &Outcome, m: &BTreeMap<String, i64>) -> bool {
    let r = |n| reg(o, "P2", n);
    r("r1") == 1 && r("r2") == 1 && r("r3") == m["a"] && r("r4") == 0
}

fn wwc(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P2", "r1") == 2 && reg(o, "P3", "r2") == 1 && o.memory["a"] == 2
}

fn iriw(o: &Outcome, _: &BTreeMap<String, i64>) -> bool {
    reg(o, "P3", "r1") == 1
        && reg(o, "P3", "r2") == 0
        && reg(o, "P4", "r3") == 1
        && reg(o, "P4", "r4") == 0
}

/// (criterion, test, model, predicate, reachable)
const TABLE: &[(u8, &str, Model, Pred, bool)] = &[
    (1, "dekker-wmm", Model::Wmm, dekker_00, false),
    (1, "dekker-no-commit-p1", Model::Wmm, dekker_00, true),
    (1, "dekker-no-commit-p2", Model::Wmm, dekker_00, true),
    (1, "dekker-no-reconcile-p1", Model::Wmm, dekker_00, true),
    (1, "dekker-no-reconcile-p2", Model::Wmm, dekker_00, true),
    (2, "mp-wmm", Model::Wmm, mp_10, false),
    (2, "mp-no-commit", Model::Wmm, mp_10, true),
    (2, "mp-no-reconcile", Model::Wmm, mp_10, true),
    (3, "corr", Model::Wmm, corr_10, false),
    (4, "thin-air", Model::Wmm, thin_air, false),
    (5, "mem-dep-pred", Model::Wmm, mem_dep, true),
    (5, "mem-dep-pred", Model::WmmD, mem_dep, true),
    (6, "load-value-pred", Model::Wmm, load_value, true),
    (6, "load-value-pred", Model::WmmD, load_value, false),
    (7, "transitive-dep", Model::WmmD, transitive, false),
    (7, "transitive-dep-commit", Model::WmmD, transitive, true),
    (8, "rsw", Model::WmmD, rsw, true),
    (9, "rmo-spec-commit", Model::WmmD, rmo, true),
    (10, "wwc", Model::Wmm, wwc, false),
    (10, "wwc", Model::WmmS, wwc, true),
    (10, "wwc-commit", Model::WmmS, wwc, false),
    (11, "iriw", Model::Wmm, iriw, false),
    (11, "iriw", Model::WmmS, iriw, true),
    (11, "iriw-commit", Model::WmmS, iriw, false),
];

struct Ctx {
    tests: Vec<LitmusTest>,
    programs: HashMap<String, Program>,
    /// DFS with invariant checking and witnesses; `Err` holds the failure.
    runs: HashMap<(String, Model), Result<Exploration, String>>,
}

impl Ctx {
    fn build() -> Ctx {
        let tests = load_corpus();
        let programs: HashMap<_, _> = tests
            .iter()
            .map(|t| (t.name.clone(), prepare(t).expect("corpus compiles")))
            .collect();
        let opts = ExploreOptions {
            check_invariants: true,
            ..ExploreOptions::default()
        };
        let jobs: Vec<(String, Model)> = tests
            .iter()
            .flat_map(|t| Model::ALL.map(|m| (t.name.clone(), m)))
            .collect();
        let runs = Mutex::new(HashMap::new());
        let next = Mutex::new(0usize);
        let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let k = {
                        let mut n = next.lock().unwrap();
                        *n += 1;
                        *n - 1
                    };
                    let Some((name, m)) = jobs.get(k) else { break };
                    let r = explore(*m, &programs[name], &opts).map_err(|e| e.to_string());
                    runs.lock().unwrap().insert((name.clone(), *m), r);
                });
            }
        });
        Ctx {
            tests,
            programs,
            runs: runs.into_inner().unwrap(),
        }
    }

    fn test(&self, name: &str) -> &LitmusTest {
        self.tests
            .iter()
            .find(|t| t.name == name)
            .unwrap_or_else(|| panic!("no corpus test {name}"))
    }

    fn run(&self, name: &str, m: Model) -> &Exploration {
        match &self.runs[&(name.to_string(), m)] {
            Ok(e) => {
                assert!(e.is_complete(), "{name} under {m}: {:?}", e.limit_hit);
                e
            }
            Err(err) => panic!("{name} under {m}: {err}"),
        }
    }

    fn outcomes(&self, name: &str, m: Model) -> BTreeSet<Outcome> {
        self.run(name, m).outcome_set().cloned().collect()
    }

    fn reachable(&self, name: &str, m: Model, pred: Pred) -> bool {
        let addrs = oracle_addresses(self.test(name));
        self.run(name, m).outcome_set().any(|o| pred(o, &addrs))
    }
}

fn verdict_rows(ctx: &Ctx, n: u8) {
    let rows: Vec<_> = TABLE.iter().filter(|r| r.0 == n).collect();
    assert!(!rows.is_empty());
    for &&(_, name, m, pred, want) in &rows {
        let got = ctx.reachable(name, m, pred);
        assert_eq!(
            got, want,
            "{name} under {m}: reachable = {got}, expected {want}"
        );
    }
}

fn sanity(ctx: &Ctx) {
    let cases: [(&str, Pred, Model, Buffering, bool); 4] = [
        (
            "dekker-nofence",
            dekker_00,
            Model::Tso,
            Buffering::Tso,
            true,
        ),
        (
            "dekker-nofence",
            dekker_00,
            Model::Sc,
            Buffering::None,
            false,
        ),
        ("mp-nofence", mp_10, Model::Pso, Buffering::Pso, true),
        ("mp-nofence", mp_10, Model::Tso, Buffering::Tso, false),
    ];
    for (name, pred, m, mode, want) in cases {
        let test = ctx.test(name);
        let addrs = oracle_addresses(test);
        let oracle = oracle_outcomes(test, mode).iter().any(|o| pred(o, &addrs));
        assert_eq!(
            oracle, want,
            "oracle disagrees with expectation on {name} / {m}"
        );
        assert_eq!(ctx.reachable(name, m, pred), want, "{name} under {m}");
    }
}

fn inclusion(ctx: &Ctx) {
    use Model::*;
    let chain = [(Sc, Tso), (Tso, Pso), (Pso, Wmm), (Wmm, WmmS), (WmmD, Wmm)];
    let mut bad = Vec::new();
    for t in &ctx.tests {
        for (lo, hi) in chain {
            let (a, b) = (ctx.outcomes(&t.name, lo), ctx.outcomes(&t.name, hi));
            if let Some(o) = a.difference(&b).next() {
                bad.push(format!("{}: {lo} has {o} missing from {hi}", t.name));
            }
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("; "));
}

fn per_location_sc(ctx: &Ctx) {
    let single: Vec<_> = ctx
        .tests
        .iter()
        .filter(|t| oracle_addresses(t).len() == 1)
        .collect();
    assert!(!single.is_empty(), "no single-address test in the corpus");
    for t in single {
        assert_eq!(
            ctx.outcomes(&t.name, Model::Wmm),
            ctx.outcomes(&t.name, Model::Sc),
            "{}",
            t.name
        );
    }
}

fn invariants(ctx: &Ctx) {
    for ((name, m), r) in &ctx.runs {
        match r {
            Ok(e) => {
                assert!(e.is_complete(), "{name} under {m} hit {:?}", e.limit_hit);
                assert!(e.deadlocks.is_empty(), "{name} under {m} deadlocked");
            }
            Err(err) => panic!("{name} under {m}: {err}"),
        }
    }
}

fn order_invariance(ctx: &Ctx) {
    let seed = 0x1ee7;
    for t in &ctx.tests {
        for m in Model::ALL {
            let dfs = ctx.outcomes(&t.name, m);
            for order in [SearchOrder::Bfs, SearchOrder::Random(seed)] {
                let opts = ExploreOptions {
                    order,
                    witnesses: false,
                    ..ExploreOptions::default()
                };
                let e = explore(m, &ctx.programs[&t.name], &opts).expect("explores");
                assert!(e.is_complete());
                let other: BTreeSet<_> = e.outcome_set().cloned().collect();
                assert_eq!(dfs, other, "{} under {m} with {order:?}", t.name);
            }
        }
    }
}

fn witness_replay(ctx: &Ctx) {
    let mut n = 0;
    for ((name, m), r) in &ctx.runs {
        let e = r.as_ref().expect("explored");
        for (o, w) in &e.outcomes {
            let w = w
                .as_ref()
                .unwrap_or_else(|| panic!("{name} under {m}: outcome without witness"));
            let got = replay(*m, &ctx.programs[name], w)
                .unwrap_or_else(|err| panic!("{name} under {m}: {err}"));
            assert_eq!(
                &got, o,
                "{name} under {m}: witness replays to another outcome"
            );
            n += 1;
        }
    }
    assert!(n > 0);
}

fn sc_oracle(ctx: &Ctx) {
    let mut checked = 0;
    for t in &ctx.tests {
        let size: usize = t
            .threads
            .iter()
            .flat_map(|th| &th.instrs)
            .filter(|i| !matches!(i, i2e::litmus::SurfaceInstr::Label(_)))
            .count();
        if size > 8 {
            continue;
        }
        let lib: BTreeMap<String, i64> = ctx.programs[&t.name]
            .addrs
            .iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(lib, oracle_addresses(t), "{}: address binding", t.name);
        assert_eq!(
            ctx.outcomes(&t.name, Model::Sc),
            oracle_outcomes(t, Buffering::None),
            "{}",
            t.name
        );
        checked += 1;
    }
    assert!(checked > 0);
}

fn main() -> ExitCode {
    let ctx = Ctx::build();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "Dekker fences under WMM",
            Box::new(|c| verdict_rows(c, 1)),
        ),
        (
            2,
            "message passing fences under WMM",
            Box::new(|c| verdict_rows(c, 2)),
        ),
        (
            3,
            "CoRR forbidden under WMM",
            Box::new(|c| verdict_rows(c, 3)),
        ),
        (
            4,
            "no out-of-thin-air values under WMM",
            Box::new(|c| verdict_rows(c, 4)),
        ),
        (
            5,
            "memory dependency prediction under WMM and WMM-D",
            Box::new(|c| verdict_rows(c, 5)),
        ),
        (
            6,
            "load value prediction: WMM allows, WMM-D forbids",
            Box::new(|c| verdict_rows(c, 6)),
        ),
        (
            7,
            "transitive data dependency under WMM-D",
            Box::new(|c| verdict_rows(c, 7)),
        ),
        (
            8,
            "RSW allowed under WMM-D",
            Box::new(|c| verdict_rows(c, 8)),
        ),
        (
            9,
            "control speculation allowed under WMM-D",
            Box::new(|c| verdict_rows(c, 9)),
        ),
        (
            10,
            "WWC under WMM and WMM-S",
            Box::new(|c| verdict_rows(c, 10)),
        ),
        (
            11,
            "IRIW under WMM and WMM-S",
            Box::new(|c| verdict_rows(c, 11)),
        ),
        (
            12,
            "TSO and PSO sanity against the buffered oracle",
            Box::new(sanity),
        ),
        (13, "cross-model outcome inclusion", Box::new(inclusion)),
        (
            14,
            "single-address tests: WMM equals SC",
            Box::new(per_location_sc),
        ),
        (
            15,
            "structural invariants on every transition",
            Box::new(invariants),
        ),
        (
            16,
            "exploration order invariance",
            Box::new(order_invariance),
        ),
        (17, "witness replay", Box::new(witness_replay)),
        (18, "SC equals the interleaving oracle", Box::new(sc_oracle)),
    ];

    let default_hook = panic::take_hook();
    let failure = std::sync::Arc::new(Mutex::new(String::new()));
    let sink = failure.clone();
    panic::set_hook(Box::new(move |info| {
        let msg = match info.payload().downcast_ref::<String>() {
            Some(s) => s.clone(),
            None => info
                .payload()
                .downcast_ref::<&str>()
                .map_or("panic", |s| s)
                .to_string(),
        };
        *sink.lock().unwrap() = msg;
    }));

    let mut failed = 0;
    for (n, desc, f) in &criteria {
        match panic::catch_unwind(AssertUnwindSafe(|| f(&ctx))) {
            Ok(()) => println!("criterion {n:2}: PASS - {desc}"),
            Err(_) => {
                failed += 1;
                println!(
                    "criterion {n:2}: FAIL - {desc}: {}",
                    failure.lock().unwrap()
                );
            }
        }
    }
    panic::set_hook(default_hook);

    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
