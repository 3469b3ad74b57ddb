use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use isospec_cli::config::ExperimentConfig;
use isospec_cli::run::{run, write_outputs};

/// Verification workbench for isospectral metric families: certifies the
/// built-in families through algebraic invariants and Laplacian blocks, and
/// distinguishes them through curvature and heat invariants.
#[derive(Parser, Debug)]
#[command(name = "isospec", version, about)]
struct Cli {
    /// Pipeline to run; must match the "command" field of the config.
    #[arg(value_enum)]
    command: CommandArg,
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override for all sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Max worker threads for independent checks.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CommandArg {
    VerifyFamily,
    Witness,
    Curvature,
    Heat,
    Flow,
    Sphere,
    Spectra,
    Conformal,
}

impl CommandArg {
    fn key(&self) -> &'static str {
        match self {
            CommandArg::VerifyFamily => "verify-family",
            CommandArg::Witness => "witness",
            CommandArg::Curvature => "curvature",
            CommandArg::Heat => "heat",
            CommandArg::Flow => "flow",
            CommandArg::Sphere => "sphere",
            CommandArg::Spectra => "spectra",
            CommandArg::Conformal => "conformal",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let raw = match std::fs::read_to_string(&cli.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match ExperimentConfig::parse(&raw) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.command.key() != cli.command.key() {
        eprintln!(
            "error: configuration command {:?} does not match subcommand {:?}",
            cfg.command.key(),
            cli.command.key()
        );
        return ExitCode::from(2);
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_dir = cli
        .out
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = match run(&cfg, &raw, cli.jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&outcome, &out_dir) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut failed = 0usize;
    for c in &outcome.report.checks {
        let status = match c.status {
            isospec_cli::report::Status::Pass => "PASS",
            isospec_cli::report::Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "[{status}] {}: measured {:.3e} vs {:.3e}",
            c.name, c.measured, c.tolerance
        );
    }
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
