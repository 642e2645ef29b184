use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod overrides;

#[derive(Parser, Debug)]
#[command(
    name = "sphereflow",
    version,
    about = "Curvature flow runs, dual runs, audits and identity suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve a radial profile until convergence, the time limit or breakdown.
    Run(FlowArgs),
    /// Evolve the Euclidean support function of the same initial data.
    DualRun(FlowArgs),
    /// Quermassintegral inequality report for a checkpoint.
    Audit(AuditArgs),
    /// Randomized checks of the symmetric-function inequalities.
    IdentitySuite(SuiteArgs),
    /// Discretization errors and observed orders across grid levels.
    ConvergenceStudy(StudyArgs),
}

/// Flags mirroring the run configuration; each overrides `--config`.
#[derive(Args, Debug, Clone, Default)]
pub struct FlowArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Latitude nodes, poles included.
    #[arg(long = "N")]
    nodes: Option<usize>,
    /// `sphere:r`, `perturbed:r0,eps,mode` or `custom:path`.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    dt_max: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    conv_tol: Option<f64>,
    #[arg(long)]
    checkpoint_every: Option<f64>,
    /// JSON array of configurations, run concurrently into `run-NNN` subdirectories.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// Recorded in every output header.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Quotient order used for the cone check; defaults to the checkpoint's.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "perturbed:0.8,0.05,2")]
    shape: String,
    /// Comma-separated grid sizes, coarse to fine.
    #[arg(long, default_value = "65,129,257", value_delimiter = ',')]
    levels: Vec<usize>,
    /// Time step as a multiple of `h²`.
    #[arg(long, default_value_t = 0.05)]
    dt_ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => commands::run(&args, false),
        Command::DualRun(args) => commands::run(&args, true),
        Command::Audit(args) => commands::audit(&args),
        Command::IdentitySuite(args) => commands::identity_suite(&args),
        Command::ConvergenceStudy(args) => commands::convergence_study(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
