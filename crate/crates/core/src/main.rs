use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cone_smetric::run::{run, Command, RunOptions};
use cone_smetric::spec::{digest, parse_space_spec};

/// Verify cone S-metric spaces described by a JSON spec.
///
/// Exit status: 0 when every check passes, 1 when a violation is found,
/// 2 on a usage or spec error.
#[derive(Parser)]
#[command(name = "cone-smetric", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the cone's order properties on seeded random samples.
    ValidateCone(Common),
    /// Check the cone S-metric axioms on every tuple of points.
    CheckAxioms(Common),
    /// Check the scalarization's properties on seeded random samples.
    Scalarize(Common),
    /// Check the axioms of the scalarized real S-metric.
    DeriveSmetric(Common),
    /// Build the chain-infimum metric S* and check its axioms.
    StarMetric(Common),
    /// Check that S* and the cone S-metric balls refine each other.
    TopologyCheck(Common),
    /// Solve the spec's contraction problem by Picard iteration.
    FixedPoint(Common),
}

#[derive(Args)]
struct Common {
    /// Path to the space spec (JSON).
    spec: PathBuf,
    /// Seed for all random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comparison tolerance (default depends on the command).
    #[arg(long)]
    tol: Option<f64>,
    /// Quantization base a in (0, 1); overrides the spec's theta block.
    #[arg(long)]
    a: Option<f64>,
    /// Residual threshold; overrides the spec's contraction block.
    #[arg(long)]
    eps: Option<f64>,
    /// Iteration cap; overrides the spec's contraction block.
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::ValidateCone(c) => (Command::ValidateCone, c),
        Cmd::CheckAxioms(c) => (Command::CheckAxioms, c),
        Cmd::Scalarize(c) => (Command::Scalarize, c),
        Cmd::DeriveSmetric(c) => (Command::DeriveSmetric, c),
        Cmd::StarMetric(c) => (Command::StarMetric, c),
        Cmd::TopologyCheck(c) => (Command::TopologyCheck, c),
        Cmd::FixedPoint(c) => (Command::FixedPoint, c),
    };

    let bytes = match std::fs::read(&common.spec) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.spec.display());
            return ExitCode::from(2);
        }
    };
    let spec = match parse_space_spec(&bytes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid spec {}: {e}", common.spec.display());
            return ExitCode::from(2);
        }
    };
    let options = RunOptions {
        seed: common.seed,
        tol: common.tol,
        a: common.a,
        eps: common.eps,
        max_iter: common.max_iter,
    };
    match run(command, &spec, &digest(&bytes), &options) {
        Ok(report) => {
            match common.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", report.to_json()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
