//! Command-line front end for condensation-measure quantization analyses.
//!
//! Subcommands wire the `condensation` crate into reproducible runs: every
//! command writes a `manifest.json` describing its configuration next to
//! its CSV/JSON outputs, all randomness flows from an explicit `--seed`,
//! and re-running a command with the same manifest reproduces the output
//! bytes exactly.

pub mod commands;
pub mod format;
pub mod outputs;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{default_out, parse_order, CliError};
use condensation::partition::NODE_BUDGET;

#[derive(Parser)]
#[command(
    name = "condq",
    version,
    about = "Quantization analysis of in-homogeneous self-similar measures on the line"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check the coupled open-set conditions of a system file.
    Validate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the branch dimension equations at an order r.
    Dims {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        r: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Also scan for the branch crossover order.
        #[arg(long)]
        scan_crossover: bool,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the stopping-time partitions for one or more levels.
    Partition {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        r: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long, default_value_t = NODE_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute distortion bounds, separation and energy bands per level.
    Bounds {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        r: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long, default_value_t = NODE_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw seeded samples of the invariant measure.
    Sample {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate quantization errors over an n grid with Lloyd search.
    Estimate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        r: String,
        /// Geometric grid START:END:FACTOR, e.g. 16:4096:2.
        #[arg(long)]
        n_grid: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        restarts: u32,
        #[arg(long, default_value_t = NODE_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the error decay and compare against the analytic dimension.
    Fit {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        r: String,
        #[arg(long)]
        n_grid: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        restarts: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline on the built-in demo system.
    Demo315 {
        #[arg(long, default_value = "2")]
        r: String,
        #[arg(long, default_value_t = 315)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { system, out } => commands::run_validate(&system, &default_out(&out)),
        Command::Dims {
            system,
            r,
            tol,
            scan_crossover,
            r_max,
            out,
        } => {
            let order = parse_order(&r)?;
            commands::run_dims(
                &system,
                &order,
                tol,
                scan_crossover,
                r_max,
                &default_out(&out),
            )
        }
        Command::Partition {
            system,
            r,
            k,
            k_max,
            budget,
            out,
        } => {
            let order = parse_order(&r)?;
            commands::run_partition(&system, &order, k, k_max, budget, &default_out(&out))
        }
        Command::Bounds {
            system,
            r,
            k,
            k_max,
            budget,
            out,
        } => {
            let order = parse_order(&r)?;
            commands::run_bounds(&system, &order, k, k_max, budget, &default_out(&out))
        }
        Command::Sample {
            system,
            seed,
            count,
            out,
        } => commands::run_sample(&system, seed, count, &default_out(&out)),
        Command::Estimate {
            system,
            r,
            n_grid,
            seed,
            samples,
            restarts,
            budget,
            out,
        } => {
            let order = parse_order(&r)?;
            commands::run_estimate(
                &system,
                &order,
                &n_grid,
                seed,
                samples,
                restarts,
                budget,
                &default_out(&out),
            )
        }
        Command::Fit {
            system,
            r,
            n_grid,
            seed,
            samples,
            restarts,
            out,
        } => {
            let order = parse_order(&r)?;
            commands::run_fit(
                &system,
                &order,
                &n_grid,
                seed,
                samples,
                restarts,
                &default_out(&out),
            )
        }
        Command::Demo315 { r, seed, out } => {
            let order = parse_order(&r)?;
            commands::run_demo(&order, seed, &default_out(&out))
        }
    }
}

/// Parses the argument list and runs it; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not errors.
            if err.use_stderr() {
                let wrapped = serde_json::json!({
                    "error": { "kind": "usage", "message": err.to_string() }
                });
                eprintln!("{wrapped}");
                return 2;
            }
            print!("{err}");
            return 0;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            let wrapped = serde_json::json!({ "error": err });
            eprintln!("{wrapped}");
            1
        }
    }
}
