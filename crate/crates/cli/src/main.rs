#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::UsageError;

/// Wavepacket dynamics on coupled diabatic surfaces: circuit simulation,
/// rate analysis and variational state preparation.
#[derive(Parser, Debug)]
#[command(name = "nadyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run population dynamics and write `t,P0,norm` CSVs with JSON sidecars.
    Evolve {
        /// Config file, or `preset:NAME`.
        #[arg(long)]
        config: String,
        /// Also run the exact propagator with the reference Gaussian coupling.
        #[arg(long)]
        exact_reference: bool,
        /// Write a gnuplot script next to the data.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Fit rates to every run in a directory and write `rates.csv`.
    Rates {
        #[arg(long)]
        dir: PathBuf,
        /// Number of leading points in the linear fit.
        #[arg(long, default_value_t = 10)]
        window: usize,
        /// Inverse temperature of the Marcus overlay.
        #[arg(long, default_value_t = nadyn::analysis::MARCUS_BETA)]
        beta: f64,
        #[arg(long)]
        gnuplot: bool,
    },
    /// Optimize the state-preparation ansatz with SPSA, or replay fixed angles.
    Vqe {
        #[arg(long)]
        config: String,
        /// Run seeds 0..k instead of the configured list.
        #[arg(long)]
        seeds: Option<u64>,
        /// Override the iteration count.
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Check circuits against their matrix oracles and report gate counts.
    Validate {
        #[arg(long, default_value_t = 5)]
        max_qubits: usize,
    },
    /// List the built-in presets.
    Presets,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve {
            config,
            exact_reference,
            gnuplot,
        } => commands::evolve(&config, exact_reference, gnuplot),
        Command::Rates {
            dir,
            window,
            beta,
            gnuplot,
        } => commands::rates(&dir, window, beta, gnuplot),
        Command::Vqe {
            config,
            seeds,
            iterations,
        } => commands::vqe(&config, seeds, iterations),
        Command::Validate { max_qubits } => commands::validate(max_qubits),
        Command::Presets => {
            for name in config::preset_names() {
                println!("{name}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
