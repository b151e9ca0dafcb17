//! Command-line front end for the scenario runner.
//!
//! `coarselab list` prints the registry; `coarselab run <scenario>` runs
//! one scenario and writes `report.json` plus CSV artifacts into its own
//! subdirectory of the output directory. Exit codes: 0 when every judged
//! check passes, 1 when any check fails, 2 on usage or configuration
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coarselab::scenario::{list_scenarios, run_scenario, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "coarselab",
    version,
    about = "Experiments on geodesics, boundaries, and isometry dynamics in coarse hyperbolic spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the registered scenarios.
    List,
    /// Run one scenario and write its report.
    Run {
        /// Scenario name, as printed by `coarselab list`.
        scenario: String,
        /// Output directory; the run replaces `<DIR>/<scenario>/`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// TOML config file overriding scenario defaults key by key.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Seed for every sampled quantity.
        #[arg(long, value_name = "N")]
        seed: Option<u64>,
        /// Lattice spacing for grid-backed scenarios.
        #[arg(long, value_name = "H")]
        spacing: Option<f64>,
        /// Horizon for rays, profiles, and axes.
        #[arg(long, value_name = "T")]
        horizon: Option<f64>,
        /// Write only report.json, no CSV artifacts.
        #[arg(long)]
        no_csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> coarselab::Result<ExitCode> {
    match cli.command {
        Command::List => {
            for s in list_scenarios() {
                println!("{:<17} {}", s.name, s.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            scenario,
            out,
            config,
            seed,
            spacing,
            horizon,
            no_csv,
        } => {
            let mut cfg = ScenarioConfig::new(&scenario)?;
            if let Some(path) = config {
                cfg.apply_file(&path)?;
            }
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            if let Some(n) = seed {
                cfg.seed = n;
            }
            if let Some(h) = spacing {
                cfg.spacing = h;
            }
            if let Some(t) = horizon {
                cfg.horizon = t;
            }
            if no_csv {
                cfg.write_csv = false;
            }

            let report = run_scenario(&cfg)?;
            for c in &report.checks {
                let values = c
                    .measured
                    .iter()
                    .map(|(k, v)| format!("{k}={v:.6}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("[{:<11}] {:<24} {}", c.verdict.name(), c.name, values);
                if let Some(note) = &c.note {
                    println!("{:14}{note}", "");
                }
            }
            println!("report: {}", report.report_path.display());
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}
