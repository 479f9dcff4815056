//! Run a shipped experiment config into a scratch directory and verify it.
//!
//! `cargo run --example run_config -- sign_symmetry` (default `coupling`).

use std::path::Path;

use isinglab::harness::{run_experiment, verify, ExperimentConfig};

fn main() -> isinglab::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "coupling".into());
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.json"));
    let mut config = ExperimentConfig::load(&path)?;
    let scratch = std::env::temp_dir().join(format!("isinglab-{name}-{}", std::process::id()));
    config.output_dir = scratch.clone();

    let report = run_experiment(&config)?;
    print!("{}", report.summary());
    for (key, value) in &report.diagnostics {
        println!("{key}: {value}");
    }
    let check = verify(&scratch)?;
    println!("verify: {} (tables: {})", if check.passed() { "ok" } else { "failed" }, report.tables.join(", "));
    std::fs::remove_dir_all(&scratch)?;
    Ok(())
}
