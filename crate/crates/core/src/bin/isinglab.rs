use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isinglab::harness::{oracle_regen, run_experiment, verify, ExperimentConfig};
use isinglab::Error;

const PASS: u8 = 0;
const RUNTIME_ERROR: u8 = 1;
const VERDICT_FAILED: u8 = 2;
const CONFIG_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "isinglab", version, about = "Heat-bath Ising experiments on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config (ISINGLAB_SEED overrides master_seed).
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Enumerate exact Gibbs expectations and merge them into a pin file.
    OracleRegen {
        #[arg(long = "n")]
        side: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "oracles.json")]
        out: PathBuf,
    },
    /// Recompute the verdicts of a finished run from its CSVs.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config)
            .and_then(|c| run_experiment(&c))
            .map(|report| {
                print!("{}", report.summary());
                println!("report: {}", report.metadata.config.output_dir.join("report.json").display());
                if report.all_passed() {
                    PASS
                } else {
                    VERDICT_FAILED
                }
            }),
        Command::OracleRegen { side, beta, out } => oracle_regen(side, beta, &out).map(|(entries, generator)| {
            for e in &entries {
                println!("N={} beta={} {} = {:.17}", e.side, e.beta, e.observable, e.value);
            }
            if let Some(g) = generator {
                println!(
                    "generator: stationarity {:e}, detailed balance {:e}",
                    g.stationarity_residual, g.detailed_balance_residual
                );
            }
            println!("wrote {}", out.display());
            PASS
        }),
        Command::Verify { report } => verify(&report).map(|v| {
            for r in &v.recomputed {
                println!("{}", r.line());
            }
            for id in &v.mismatches {
                println!("MISMATCH {id}: stored verdict differs from the CSVs");
            }
            if v.passed() {
                PASS
            } else {
                VERDICT_FAILED
            }
        }),
    };
    ExitCode::from(code.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        match e {
            Error::Config { .. }
            | Error::EnumerationTooLarge { .. }
            | Error::InvalidBeta(_) => CONFIG_ERROR,
            _ => RUNTIME_ERROR,
        }
    }))
}
