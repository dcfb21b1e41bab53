//! `gsup`: run bound-versus-Monte-Carlo experiments from TOML configs.
//!
//! Exit status: 0 when every assertion passes, 1 when one fails, 2 on a
//! usage, config or computation error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gsup_core::harness::{
    calibrate, render, resolve_seed, run_experiment, write_outputs, ExperimentConfig, Format, ResultRecord, KINDS,
    SEED_ENV,
};

#[derive(Parser)]
#[command(name = "gsup", version, about = "Gaussian supremum bounds checked against Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deviation bounds for Gaussian maxima: kinds equicorrelated, block,
    /// szego (stationary two-sided) and moderate-trig (trigonometric sup).
    Bound(RunArgs),
    /// Print only the Monte Carlo estimates of any experiment.
    Simulate(RunArgs),
    /// Decoupling inequalities: kind decoupling (vector boxes or cyclic
    /// lattice deviation).
    Decouple(RunArgs),
    /// Transfer from real to rational frequencies: kind cyclic-transfer.
    Cyclic(RunArgs),
    /// Simultaneous approximation: kinds kronecker-search, limsup,
    /// divergence, lattice-correlation.
    Kronecker(RunArgs),
    /// Run one experiment kind and fail unless the config has that kind.
    Verify {
        /// One of the ten experiment kinds.
        kind: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Report the largest free constant for which all given configs pass.
    /// Nothing is written back into the configs.
    Calibrate {
        #[arg(long = "config", required = true, num_args = 1..)]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Format printed to stdout.
    #[arg(long, value_enum, default_value = "summary")]
    print: PrintFormat,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    plotdata: Option<PathBuf>,
}

#[derive(Args)]
struct Overrides {
    /// Seed; takes precedence over GSUP_SEED and the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PrintFormat {
    Summary,
    Json,
    Csv,
}

fn load(path: &Path, o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    let env = std::env::var(SEED_ENV).ok();
    cfg.run.seed = Some(resolve_seed(o.seed, env.as_deref(), cfg.run.seed)?);
    if let Some(r) = o.reps {
        cfg.run.reps = r;
    }
    if let Some(w) = o.workers {
        cfg.run.workers = w;
    }
    Ok(cfg)
}

fn summary(r: &ResultRecord, mc_only: bool) -> String {
    let mut out = format!("kind={} seed={} reps={} config={}\n", r.kind, r.seed, r.reps, r.config_hash);
    for p in &r.points {
        match (&p.mc, mc_only) {
            (Some(m), _) => {
                out += &format!("  {:<24} x={:<10} mc={:.6} [{:.6}, {:.6}]", p.series, p.x, m.estimate, m.lo, m.hi);
            }
            (None, true) => continue,
            (None, false) => out += &format!("  {:<24} x={:<10}", p.series, p.x),
        }
        if let (Some(v), false) = (p.value, mc_only) {
            out += &format!(" value={v:.6}");
        }
        if let (Some(b), false) = (p.bound, mc_only) {
            out += &format!(" bound={b:.6}");
        }
        out.push('\n');
    }
    if !mc_only {
        for (k, v) in &r.values {
            out += &format!("  {k} = {v}\n");
        }
        for a in &r.assertions {
            out += &format!("  [{}] {}: {} <= {}\n", if a.passed { "PASS" } else { "FAIL" }, a.name, a.lhs, a.rhs);
        }
        out += &format!("{} ({} ms)\n", if r.passed() { "all assertions pass" } else { "ASSERTION FAILURE" }, r.wall_time_ms);
    }
    out
}

fn run(args: &RunArgs, allowed: &[&str], mc_only: bool) -> Result<bool> {
    let mut cfg = load(&args.config, &args.overrides)?;
    let kind = cfg.experiment.kind();
    if !allowed.contains(&kind) {
        bail!("config kind {kind:?} does not belong to this subcommand (expected one of {allowed:?})");
    }
    if args.csv.is_some() {
        cfg.output.csv = args.csv.clone();
    }
    if args.json.is_some() {
        cfg.output.json = args.json.clone();
    }
    if args.plotdata.is_some() {
        cfg.output.plotdata = args.plotdata.clone();
    }
    let record = run_experiment(&cfg)?;
    let records = [record];
    write_outputs(&cfg, &records)?;
    match args.print {
        PrintFormat::Summary => print!("{}", summary(&records[0], mc_only)),
        PrintFormat::Json => println!("{}", render(&records, Format::Json)?),
        PrintFormat::Csv => print!("{}", render(&records, Format::Csv)?),
    }
    Ok(mc_only || records[0].passed())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bound(a) => run(&a, &["equicorrelated", "block", "szego", "moderate-trig"], false),
        Command::Simulate(a) => run(&a, &KINDS, true),
        Command::Decouple(a) => run(&a, &["decoupling"], false),
        Command::Cyclic(a) => run(&a, &["cyclic-transfer"], false),
        Command::Kronecker(a) => run(&a, &["kronecker-search", "limsup", "divergence", "lattice-correlation"], false),
        Command::Verify { kind, run: a } => {
            if !KINDS.contains(&kind.as_str()) {
                bail!("unknown kind {kind:?}; expected one of {KINDS:?}");
            }
            run(&a, &[kind.as_str()], false)
        }
        Command::Calibrate { configs, overrides } => {
            let mut records = Vec::new();
            for path in &configs {
                let cfg = load(path, &overrides)?;
                records.push(run_experiment(&cfg).with_context(|| path.display().to_string())?);
            }
            for c in calibrate(&records)? {
                println!("{} = {} (over {} cases)", c.constant, c.value, c.cases.len());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
