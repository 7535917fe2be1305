use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use cosub_cli::{run, Command, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "cosub", version, about = "Certificates for composition operators on Gaussian-type weighted L2 spaces")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Boundedness classification plus the certificate report for the configured side
    Report(Opts),
    /// Subnormality evidence in L2(mu_gamma)
    CertifySubnormal(Opts),
    /// Cosubnormality evidence in L2(mu_1/gamma)
    CertifyCosubnormal(Opts),
    /// Boundedness classification and operator norm
    Norm(Opts),
    /// Norms of the test functions along the truncation tower
    Tower(Opts),
    /// Simple-function approximation in the graph norm
    Density(Opts),
    /// Search for a negative Bram form
    Falsify(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// PSD tolerance relative to the trace
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    hankel_order: Option<usize>,
}

fn execute(command: Command, opts: &Opts) -> Result<i32> {
    let text = std::fs::read_to_string(&opts.config).with_context(|| format!("reading {}", opts.config.display()))?;
    let cfg = RunConfig::parse(&text)?.resolve(Overrides {
        seed: opts.seed,
        tol: opts.tol,
        hankel_order: opts.hankel_order,
    })?;
    let report = run(command, &cfg)?;
    let json = report.to_json()?;
    match &opts.out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    // usage errors exit 1; clap's default of 2 is reserved for VIOLATION
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let (command, opts) = match &cli.command {
        Sub::Report(o) => (Command::Report, o),
        Sub::CertifySubnormal(o) => (Command::CertifySubnormal, o),
        Sub::CertifyCosubnormal(o) => (Command::CertifyCosubnormal, o),
        Sub::Norm(o) => (Command::Norm, o),
        Sub::Tower(o) => (Command::Tower, o),
        Sub::Density(o) => (Command::Density, o),
        Sub::Falsify(o) => (Command::Falsify, o),
    };
    match execute(command, opts) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
