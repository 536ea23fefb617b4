//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when `validate` finds the
//! schedule infeasible.

use crate::exact::{solve_exact, SolveMode, DEFAULT_NODE_BUDGET};
use crate::experiments::{run_sweep_with_budget, tenant_usage_report, SweepSpec};
use crate::heuristics::{dra, sra};
use crate::model::{validate, welfare, Instance, ModelError, Schedule};
use crate::workload::{generate, GenConfig, RNG_ALGORITHM};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const NODE_BUDGET_ENV: &str = "SLICE_CAL_NODE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "slice-cal", version, about = "Slice-aware radio-resource calendaring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random instance.
    Generate(GenerateArgs),
    /// Schedule an instance.
    Solve(SolveArgs),
    /// Check a schedule against an instance.
    Validate(ValidateArgs),
    /// Run a multi-seed sweep and write CSV.
    Sweep(SweepArgs),
    /// Per-tenant mean usage under both heuristics, as CSV.
    UsageReport(UsageArgs),
}

#[derive(Debug, Args)]
struct GenOverrides {
    /// Generator config (JSON); defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    horizon: Option<u32>,
    #[arg(long)]
    capacity: Option<u32>,
    #[arg(long)]
    requests: Option<u32>,
    /// Comma-separated tenant shares, e.g. 0.2,0.2,0.6
    #[arg(long, value_delimiter = ',')]
    shares: Option<Vec<f64>>,
    #[arg(long)]
    embb_fraction: Option<f64>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenOverrides,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Dra,
    Sra,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Shared,
    Dedicated,
}

impl From<Mode> for SolveMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Shared => SolveMode::Shared,
            Mode::Dedicated => SolveMode::Dedicated,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Required for `exact`; `dra` is dedicated and `sra` is shared.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// `dedicated` also enforces per-tenant reservation caps.
    #[arg(long, value_enum, default_value = "shared")]
    mode: Mode,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    seeds_per_point: Option<u32>,
}

#[derive(Debug, Args)]
struct UsageArgs {
    #[command(flatten)]
    gen: GenOverrides,
    #[arg(long, default_value_t = 100)]
    seeds: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Infeasible,
}

impl From<ModelError> for Failure {
    fn from(err: ModelError) -> Self {
        Failure::Input(err.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse<T>(path: &Path, parser: impl FnOnce(&str) -> Result<T, ModelError>) -> Result<T, Failure> {
    parser(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let fail = |e: std::io::Error| Failure::Input(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    file.write_all(contents.as_bytes()).map_err(fail)?;
    file.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn node_budget() -> Result<u64, Failure> {
    match std::env::var(NODE_BUDGET_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{NODE_BUDGET_ENV}: `{text}` is not a node count"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn gen_config(args: &GenOverrides) -> Result<GenConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => parse(path, GenConfig::from_json)?,
        None => GenConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(horizon) = args.horizon {
        config.horizon = horizon;
    }
    if let Some(capacity) = args.capacity {
        config.capacity = capacity;
    }
    if let Some(requests) = args.requests {
        config.num_requests = requests;
    }
    if let Some(shares) = &args.shares {
        config.tenant_shares.clone_from(shares);
    }
    if let Some(p) = args.embb_fraction {
        config.embb_fraction = p;
    }
    config.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(config)
}

fn cmd_generate(args: GenerateArgs) -> Outcome {
    let config = gen_config(&args.gen)?;
    let instance = generate(&config).map_err(|e| Failure::Input(e.to_string()))?;
    write_atomic(&args.out, &(instance.to_json() + "\n"))?;
    println!(
        "{}",
        json!({
            "requests": instance.requests.len(),
            "tenants": instance.tenants.len(),
            "seed": config.seed,
            "rng": RNG_ALGORITHM,
        })
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Outcome {
    let instance = parse(&args.instance, Instance::from_json)?;
    let mode = match (args.algo, args.mode) {
        (Algo::Exact, None) => {
            return Err(Failure::Input(
                "`--algo exact` requires `--mode shared` or `--mode dedicated`".into(),
            ))
        }
        (Algo::Exact, Some(m)) => SolveMode::from(m),
        (Algo::Dra, None | Some(Mode::Dedicated)) => SolveMode::Dedicated,
        (Algo::Sra, None | Some(Mode::Shared)) => SolveMode::Shared,
        (algo, Some(m)) => {
            return Err(Failure::Input(format!(
                "`--algo {}` does not run in `--mode {}`",
                algo.to_possible_value().unwrap().get_name(),
                m.to_possible_value().unwrap().get_name()
            )))
        }
    };

    let mut summary = json!({
        "algorithm": args.algo.to_possible_value().unwrap().get_name(),
        "mode": mode.to_string(),
    });
    let schedule = match args.algo {
        Algo::Dra => dra(&instance),
        Algo::Sra => sra(&instance),
        Algo::Exact => {
            let result = solve_exact(&instance, mode, Some(node_budget()?));
            if !result.proven_optimal {
                eprintln!(
                    "warning: node budget exhausted after {} nodes; schedule is the best found",
                    result.nodes_explored
                );
            }
            summary["nodes_explored"] = json!(result.nodes_explored);
            summary["proven_optimal"] = json!(result.proven_optimal);
            result.schedule
        }
    };

    let report = validate(&instance, &schedule, mode.tenant_caps_enforced());
    summary["requests"] = json!(instance.requests.len());
    summary["accepted"] = json!(schedule.accepted_count());
    summary["welfare"] = json!(welfare(&instance, &schedule));
    summary["feasible"] = json!(report.feasible);
    write_atomic(&args.out, &(schedule.to_json() + "\n"))?;
    println!("{summary}");
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Outcome {
    let instance = parse(&args.instance, Instance::from_json)?;
    let schedule = parse(&args.schedule, Schedule::from_json)?;
    let report = validate(&instance, &schedule, SolveMode::from(args.mode).tenant_caps_enforced());
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(out) = &args.out {
        write_atomic(out, &(text.clone() + "\n"))?;
    }
    println!("{text}");
    if report.feasible {
        Ok(())
    } else {
        Err(Failure::Infeasible)
    }
}

fn cmd_sweep(args: SweepArgs) -> Outcome {
    let mut spec = parse(&args.spec, SweepSpec::from_json)?;
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    if let Some(n) = args.seeds_per_point {
        spec.seeds_per_point = n;
    }
    let result = run_sweep_with_budget(&spec, node_budget()?).map_err(|e| Failure::Input(e.to_string()))?;
    write_atomic(&args.out, &result.to_csv())?;
    println!(
        "{}",
        json!({
            "sweep": spec.varied.to_string(),
            "rows": result.rows.len(),
            "seed": spec.base.seed,
            "rng": RNG_ALGORITHM,
        })
    );
    Ok(())
}

fn cmd_usage(args: UsageArgs) -> Outcome {
    let config = gen_config(&args.gen)?;
    let report = tenant_usage_report(&config, config.num_requests, config.capacity, args.seeds)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let csv = report.to_csv();
    match &args.out {
        Some(path) => write_atomic(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::UsageReport(args) => cmd_usage(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            1
        }
        Err(Failure::Infeasible) => 2,
    }
}
