//! `i2e-litmus`: run litmus tests against the I2E memory models.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 some result is
//! inconclusive (resource limit), 3 usage or input error.

mod report;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use i2e::litmus::{load_corpus, CORPUS_SOURCES};
use i2e::{ExploreLimits, ExploreOptions, Model, SearchOrder};

use report::{Report, Summary, SCHEMA_VERSION};

const SEED_VAR: &str = "I2E_LITMUS_SEED";
const USAGE_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "i2e-litmus",
    version,
    about = "Explore litmus tests under the I2E memory models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Explore tests and judge their checks.
    Run(RunArgs),
    /// List the embedded corpus with the verdict annotated for each model.
    List,
    /// Write the embedded corpus as .litmus files into DIR.
    ExportCorpus { dir: PathBuf },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Litmus files or directories containing them.
    paths: Vec<String>,
    /// Include the embedded corpus.
    #[arg(long)]
    corpus: bool,
    /// Comma-separated models (sc, tso, pso, wmm, wmm-d, wmm-s).
    #[arg(long, value_delimiter = ',', default_values_t = Model::ALL.to_vec())]
    models: Vec<Model>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print a witness trace for every satisfiable check.
    #[arg(long)]
    witness: bool,
    #[arg(long, default_value_t = ExploreLimits::default().max_states)]
    max_states: usize,
    #[arg(long, default_value_t = ExploreLimits::default().max_depth)]
    max_depth: usize,
    /// Per (test, model) time budget in seconds; 0 disables it.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Report outcome-set inclusion between every pair of selected models.
    #[arg(long)]
    compare: bool,
    /// Frontier order. `random` takes its seed from $I2E_LITMUS_SEED.
    #[arg(long, value_enum, default_value_t = Order::Dfs)]
    order: Order,
    /// Check structural invariants after every transition.
    #[arg(long)]
    check_invariants: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Dfs,
    Bfs,
    Random,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("i2e-litmus: {msg}");
    ExitCode::from(USAGE_ERROR)
}

fn seed() -> Result<u64, String> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_VAR} must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(rand::random()),
    }
}

fn run(args: RunArgs) -> ExitCode {
    if args.paths.is_empty() && !args.corpus {
        return usage("nothing to run: give litmus paths or --corpus");
    }
    let mut models = args.models.clone();
    models.sort();
    models.dedup();
    if args.compare && models.len() < 2 {
        return usage("--compare needs at least two models");
    }
    let (order, seed) = match args.order {
        Order::Dfs => (SearchOrder::Dfs, None),
        Order::Bfs => (SearchOrder::Bfs, None),
        Order::Random => match seed() {
            Ok(s) => (SearchOrder::Random(s), Some(s)),
            Err(e) => return usage(e),
        },
    };
    let opts = ExploreOptions {
        limits: ExploreLimits {
            max_states: args.max_states,
            max_depth: args.max_depth,
            timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
        },
        order,
        dedup: true,
        check_invariants: args.check_invariants,
        witnesses: args.witness,
    };

    let (inputs, errors) = runner::load_inputs(&args.paths, args.corpus);
    let runs = runner::run_all(&inputs, &models, &opts, args.witness);
    let comparisons = if args.compare {
        runner::compare(&inputs, &runs)
    } else {
        Vec::new()
    };
    let results: Vec<_> = runs.into_iter().map(|r| r.result).collect();
    let summary = Summary::tally(&results, errors.len());
    let report = Report {
        schema_version: SCHEMA_VERSION,
        order: format!("{:?}", args.order).to_lowercase(),
        seed,
        results,
        comparisons,
        errors,
        summary,
    };
    match args.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => match serde_json::to_string_pretty(&report) {
            Ok(s) => println!("{s}"),
            Err(e) => return usage(e),
        },
    }
    for e in &report.errors {
        eprintln!("i2e-litmus: {}", e.message);
    }
    ExitCode::from(report.summary.exit_code)
}

fn list() -> ExitCode {
    for t in load_corpus() {
        let verdicts: Vec<String> = Model::ALL
            .iter()
            .flat_map(|&m| {
                t.checks_for(m)
                    .map(move |c| format!("{m}:{}", c.polarity.as_str()))
            })
            .collect();
        println!("{:<24} {}", t.name, verdicts.join(" "));
    }
    ExitCode::SUCCESS
}

fn export(dir: PathBuf) -> ExitCode {
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return usage(format!("{}: {e}", dir.display()));
    }
    for (name, src) in CORPUS_SOURCES {
        let path = dir.join(format!("{name}.litmus"));
        if let Err(e) = std::fs::write(&path, src) {
            return usage(format!("{}: {e}", path.display()));
        }
    }
    println!("wrote {} tests to {}", CORPUS_SOURCES.len(), dir.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
        Command::List => list(),
        Command::ExportCorpus { dir } => export(dir),
    }
}
