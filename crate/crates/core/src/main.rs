use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gibbs_coupling::error::Error;
use gibbs_coupling::harness::{exit_code, run, Experiment, ExperimentConfig, Format};

#[derive(Parser)]
#[command(version, about = "Run Gibbs sampler coupling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectra and gaps of the base, edge and comparison kernels.
    Gap(Flags),
    /// Dirichlet-form and measure comparison against the base walk.
    Compare(Flags),
    /// One-step expectation of the S-vector against its closed form.
    SRecursion(Flags),
    /// L2 contraction of the simplex chain.
    ContractSimplex(Flags),
    /// Per-step contraction of the two-column matrix chain.
    ContractMatrix(Flags),
    /// Exact contraction identity for the matrix chain.
    IdentityMatrix(Flags),
    /// Non-Markovian coupling of the simplex chain.
    CoupleSimplex(Flags),
    /// Non-Markovian coupling of the matrix chain.
    CoupleMatrix(Flags),
    /// Connection time of the partition process.
    Connect(Flags),
    /// Monotone domination and entry-size windows.
    Largeness(Flags),
    /// Eigenvector lower bound for the simplex chain.
    LowerboundSimplex(Flags),
    /// Coupon-collector lower bound for the matrix chain.
    LowerboundMatrix(Flags),
    /// Brute-force oracle values.
    Oracle(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Problem size for experiments that take `n` instead of a group.
    #[arg(long)]
    n: Option<usize>,
    /// Oracle suite name.
    #[arg(long)]
    suite: Option<String>,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        use Command::*;
        match self {
            Gap(f) => (Experiment::Gap, f),
            Compare(f) => (Experiment::Compare, f),
            SRecursion(f) => (Experiment::SRecursion, f),
            ContractSimplex(f) => (Experiment::ContractSimplex, f),
            ContractMatrix(f) => (Experiment::ContractMatrix, f),
            IdentityMatrix(f) => (Experiment::IdentityMatrix, f),
            CoupleSimplex(f) => (Experiment::CoupleSimplex, f),
            CoupleMatrix(f) => (Experiment::CoupleMatrix, f),
            Connect(f) => (Experiment::Connect, f),
            Largeness(f) => (Experiment::Largeness, f),
            LowerboundSimplex(f) => (Experiment::LowerboundSimplex, f),
            LowerboundMatrix(f) => (Experiment::LowerboundMatrix, f),
            Oracle(f) => (Experiment::Oracle, f),
        }
    }
}

fn build_config(experiment: Experiment, flags: &Flags) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(experiment),
    };
    if cfg.experiment != experiment {
        return Err(Error::Config(format!(
            "config is for {}, not {}",
            cfg.experiment.name(),
            experiment.name()
        )));
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(r) = flags.replicas {
        cfg.replicas = r;
    }
    if let Some(n) = flags.n {
        cfg.n = Some(n);
    }
    if let Some(s) = &flags.suite {
        cfg.suite = Some(s.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let (experiment, flags) = Cli::parse().command.split();
    let cfg = match build_config(experiment, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = flags
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| o.path.clone()))
        .unwrap_or_else(|| PathBuf::from("runs").join(experiment.name()));
    let format = flags
        .format
        .or_else(|| cfg.output.as_ref().map(|o| o.format))
        .unwrap_or(Format::Csv);

    let result = run(&cfg, &out, format);
    match &result {
        Ok(summary) => {
            for line in &summary.output.stdout {
                println!("{line}");
            }
            for a in &summary.output.assertions {
                let mark = if a.passed { "ok" } else { "FAILED" };
                eprintln!("{mark}: {} {}", a.name, a.detail);
            }
            eprintln!("wrote {}", out.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
