mod config;
mod experiments;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::*;
use experiments::Table;

const CATALOGUE: [(&str, &str); 9] = [
    ("orbit", "orbits of rotations, skew products and their products against the closed-form iterate"),
    ("wwavg", "one double-recurrence average W_N(t) with a polynomial phase"),
    ("trace", "W_N(t) at a fixed frequency along a schedule of N"),
    ("sup-trace", "sup over t of |W_N(t)| along a schedule of N, with a certified error"),
    ("vdc", "both sides of the van der Corput inequality on seeded random sequences"),
    ("ghk", "Gowers-Host-Kra seminorm estimates of an observable along orbits"),
    ("identity", "phase reduction on base x skew: literal average against the reduced base average"),
    ("estimate-bound", "mean of sup_t |W_N|^2 against squared seminorms of f1 and f2"),
    ("weyl", "polynomial Weyl sums (1/N) sum e^{2 pi i p(n) t} along a schedule of N"),
];

#[derive(Parser)]
#[command(
    name = "wwlab",
    version,
    about = "Experiments on polynomial Wiener-Wintner averages of double recurrence",
    after_help = "Run `wwlab` with no arguments to list the experiments."
)]
struct Cli {
    #[command(subcommand)]
    verb: Option<Verb>,
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// JSON config document; without it the config is `{}`
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for <experiment>.csv and <experiment>.meta.json
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the config's seed (default 0)
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Overrides the config's worker count (default: available cores)
    #[arg(long, value_name = "INT")]
    workers: Option<usize>,
}

fn average_schema(tail: &str) -> String {
    format!("Config keys (JSON):\n{AVERAGE_KEYS}\n{tail}")
}

#[derive(Subcommand)]
enum Verb {
    /// Orbits against the closed-form iterate
    #[command(after_help = ORBIT_SCHEMA)]
    Orbit(RunArgs),
    /// One average W_N(t)
    #[command(after_help = average_schema(WWAVG_TAIL))]
    Wwavg(RunArgs),
    /// W_N(t) along a schedule of N
    #[command(after_help = average_schema(TRACE_TAIL))]
    Trace(RunArgs),
    /// sup_t |W_N(t)| along a schedule of N
    #[command(name = "sup-trace", after_help = average_schema(SUP_TRACE_TAIL))]
    SupTrace(RunArgs),
    /// van der Corput fuzzing
    #[command(after_help = VDC_SCHEMA)]
    Vdc(RunArgs),
    /// Seminorm estimates
    #[command(after_help = GHK_SCHEMA)]
    Ghk(RunArgs),
    /// Phase reduction identity
    #[command(after_help = IDENTITY_SCHEMA)]
    Identity(RunArgs),
    /// sup_t |W_N|^2 against seminorms
    #[command(name = "estimate-bound", after_help = average_schema(BOUND_TAIL))]
    EstimateBound(RunArgs),
    /// Polynomial Weyl sums
    #[command(after_help = WEYL_SCHEMA)]
    Weyl(RunArgs),
    /// Print the experiment catalogue
    List,
}

fn print_catalogue() {
    for (name, what) in CATALOGUE {
        println!("{name:<15} {what}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.verb {
        None | Some(Verb::List) => {
            print_catalogue();
            return ExitCode::SUCCESS;
        }
        Some(Verb::Orbit(args)) => execute("orbit", &args, |_: &mut OrbitConfig| Ok(()), |c, _| experiments::run_orbit(c)),
        Some(Verb::Wwavg(args)) => average("wwavg", &args, |c, _| experiments::run_wwavg(c)),
        Some(Verb::Trace(args)) => average("trace", &args, |c, _| experiments::run_trace(c)),
        Some(Verb::SupTrace(args)) => average("sup-trace", &args, |c, _| experiments::run_sup_trace(c)),
        Some(Verb::EstimateBound(args)) => average("estimate-bound", &args, experiments::run_estimate_bound),
        Some(Verb::Vdc(args)) => execute("vdc", &args, |_: &mut VdcConfig| Ok(()), experiments::run_vdc),
        Some(Verb::Ghk(args)) => execute("ghk", &args, |_: &mut GhkConfig| Ok(()), experiments::run_ghk),
        Some(Verb::Identity(args)) => execute(
            "identity",
            &args,
            |c: &mut IdentityConfig| {
                experiments::resolve_identity(c);
                Ok(())
            },
            experiments::run_identity,
        ),
        Some(Verb::Weyl(args)) => execute("weyl", &args, |_: &mut WeylConfig| Ok(()), |c, _| experiments::run_weyl(c)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn average(
    verb: &'static str,
    args: &RunArgs,
    run: impl FnOnce(&AverageConfig, u64) -> Result<Table> + Send,
) -> Result<ExitCode> {
    execute(
        verb,
        args,
        |c: &mut AverageConfig| {
            experiments::check_average_keys(verb, c)?;
            experiments::resolve_average(verb, c);
            Ok(())
        },
        run,
    )
}

fn read_config<C: DeserializeOwned>(path: Option<&Path>) -> Result<C> {
    let (text, origin) = match path {
        Some(p) => (
            fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))?,
            p.display().to_string(),
        ),
        None => ("{}".to_string(), "<empty config>".to_string()),
    };
    serde_json::from_str(&text).with_context(|| format!("invalid config {origin}"))
}

fn execute<C>(
    verb: &str,
    args: &RunArgs,
    resolve: impl FnOnce(&mut C) -> Result<()>,
    run: impl FnOnce(&C, u64) -> Result<Table> + Send,
) -> Result<ExitCode>
where
    C: DeserializeOwned + Serialize + Common + Sync,
{
    let mut cfg: C = read_config(args.config.as_deref())?;
    if let Some(name) = cfg.experiment() {
        if name != verb {
            bail!("config names experiment `{name}` but the verb is `{verb}`");
        }
    }
    let seed = args.seed.or(cfg.seed()).unwrap_or(0);
    let workers = match args.workers.or(cfg.workers()) {
        Some(0) => bail!("workers must be at least 1"),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.output().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    resolve(&mut cfg)?;
    cfg.set_resolved(verb, seed, workers, out_dir.display().to_string());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("cannot start the worker pool")?;
    let clock = Instant::now();
    let table = pool.install(|| run(&cfg, seed))?;
    let wall = clock.elapsed().as_secs_f64();

    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let csv_path = out_dir.join(format!("{verb}.csv"));
    let mut writer = csv::Writer::from_path(&csv_path).with_context(|| format!("cannot write {}", csv_path.display()))?;
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()?;

    let meta = serde_json::json!({
        "experiment": verb,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "workers": workers,
        "wall_time_seconds": wall,
        "rows": table.rows.len(),
        "violations": table.violations,
        "csv": csv_path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "config": cfg,
    });
    let meta_path = out_dir.join(format!("{verb}.meta.json"));
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("cannot write {}", meta_path.display()))?;

    println!("{verb}: {} rows -> {}", table.rows.len(), csv_path.display());
    if table.violations > 0 {
        eprintln!("{verb}: {} rows violate the checked property", table.violations);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
