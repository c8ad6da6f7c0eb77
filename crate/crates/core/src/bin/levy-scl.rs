use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use levy_scl::experiments::{self, emit_report, parse_config, ExperimentConfig, RunOptions};
use levy_scl::Result;

/// Monte Carlo experiments for scalar conservation laws with jump noise.
#[derive(Debug, Parser)]
#[command(name = "levy-scl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write its CSV report.
    Run {
        config: PathBuf,
        /// Output directory (default: `levy-scl-out/<kind>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override `ensemble.paths`.
        #[arg(long)]
        paths: Option<usize>,
        /// Override `ensemble.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and validate a config without running it.
    Validate { config: PathBuf },
    /// List the available presets and shipped experiment configs.
    Presets,
}

const EXIT_VERDICT_FAILED: u8 = 2;
const EXIT_ERROR: u8 = 1;

fn run(
    config: PathBuf,
    out: Option<PathBuf>,
    paths: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<bool> {
    let mut cfg: ExperimentConfig = parse_config(&config)?;
    if let Some(p) = paths {
        cfg.paths = p;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let mut opts = RunOptions::default();
    if let Some(t) = threads {
        opts.threads = t;
    }
    let report = experiments::run_experiment(&cfg, &opts)?;
    let out = out.unwrap_or_else(|| PathBuf::from("levy-scl-out").join(cfg.kind.name()));
    emit_report(&report, &out)?;
    print!("{}", report.summary());
    println!("report written to {}", out.display());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            paths,
            seed,
            threads,
        } => run(config, out, paths, seed, threads),
        Command::Validate { config } => parse_config(&config).map(|cfg| {
            println!(
                "ok: {} ({} cells, {} paths)",
                cfg.kind,
                cfg.grid.n_cells(),
                cfg.paths
            );
            true
        }),
        Command::Presets => {
            print!("{}", experiments::catalogue());
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERDICT_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
