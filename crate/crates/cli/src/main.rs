use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use string_pendulum_cli::{load_config, run, Integrator};

#[derive(Parser)]
#[command(
    name = "string-pendulum",
    about = "Simulate a rigid body hanging from an elastic string"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation and write series, snapshots and (with both) compare.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Choice::Lgvi)]
        integrator: Choice,
        /// Suppress the summary.
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and validate a configuration without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    Version,
}

#[derive(Clone, Copy, ValueEnum)]
enum Choice {
    Lgvi,
    Reference,
    Both,
}

impl From<Choice> for Integrator {
    fn from(c: Choice) -> Self {
        match c {
            Choice::Lgvi => Integrator::Lgvi,
            Choice::Reference => Integrator::Reference,
            Choice::Both => Integrator::Both,
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            integrator,
            quiet,
        } => {
            let mut cfg = load_config(&config)?;
            cfg.out_dir = out;
            cfg.integrator = integrator.into();
            let summaries = run(&cfg)?;
            if !quiet {
                for s in summaries {
                    println!(
                        "{:<9} steps {:>8}  energy drift {:+.3e}  max orth err {:.3e}  max fp iters {:>2}  wall {:.2?}",
                        s.integrator,
                        s.steps,
                        s.energy_drift,
                        s.max_orthogonality,
                        s.max_fixed_point_iters,
                        s.wall_time
                    );
                }
            }
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!(
                "ok: N = {}, h = {}, T = {} ({} steps)",
                cfg.n_elements,
                cfg.h,
                cfg.duration,
                cfg.steps()
            );
        }
        Command::Version => println!("string-pendulum {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
