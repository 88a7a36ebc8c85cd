use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracwalk_cli::commands::{cmd_convergence, cmd_kernel, cmd_mass, cmd_pdf_compare, cmd_solve};
use fracwalk_cli::config::{ExperimentKind, RunConfig, FINE_H};
use fracwalk_cli::CliError;

#[derive(Parser)]
#[command(name = "fracwalk", version, about = "Solver and oracles for fractional material-derivative transport")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--override p=0.05`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use h = 2^-11 instead of the configured mesh size.
    #[arg(long, global = true)]
    fine: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve and write solution snapshots.
    Solve,
    /// Compare the numeric PDF with the similarity profile.
    PdfCompare,
    /// Run an h-sweep and fit convergence orders.
    Convergence,
    /// Mass traces of both scheme variants.
    Mass,
    /// Duhamel kernel profile and mass identity.
    Kernel,
}

impl Command {
    fn experiment(self) -> ExperimentKind {
        match self {
            Command::Solve => ExperimentKind::Solve,
            Command::PdfCompare => ExperimentKind::PdfCompare,
            Command::Convergence => ExperimentKind::ConvergenceSweep,
            Command::Mass => ExperimentKind::MassTrace,
            Command::Kernel => ExperimentKind::KernelCheck,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&cli.overrides)?;
    if cli.fine {
        cfg.h = FINE_H;
    }
    cfg.experiment = cli.command.experiment();
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let cfg = load(cli)?;
    match cli.command {
        Command::Solve => cmd_solve(&cfg),
        Command::PdfCompare => cmd_pdf_compare(&cfg),
        Command::Convergence => cmd_convergence(&cfg),
        Command::Mass => cmd_mass(&cfg),
        Command::Kernel => cmd_kernel(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
