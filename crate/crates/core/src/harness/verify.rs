use std::path::Path;

use super::report::Report;
use super::tables::Tables;
use super::verdicts::{evaluate, Verdict};
use crate::error::Result;

/// Verdicts recomputed from the CSVs of a finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub report: Report,
    pub recomputed: Vec<Verdict>,
    /// Ids whose stored verdict is missing or differs from the recomputed one.
    pub mismatches: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.recomputed.iter().all(|v| v.passed)
    }
}

/// Re-reads `report.json` and the experiment's CSVs in `dir` and recomputes
/// every verdict without simulating.
pub fn verify(dir: &Path) -> Result<Verification> {
    let report = Report::read(dir)?;
    let config = &report.metadata.config;
    let tables = Tables::read(config.experiment, dir)?;
    let (recomputed, _) = evaluate(config, &tables)?;
    let mut mismatches: Vec<String> = recomputed
        .iter()
        .filter(|v| report.verdict(&v.id) != Some(v))
        .map(|v| v.id.clone())
        .collect();
    mismatches.extend(
        report
            .verdicts
            .iter()
            .filter(|v| !recomputed.iter().any(|r| r.id == v.id))
            .map(|v| v.id.clone()),
    );
    Ok(Verification {
        report,
        recomputed,
        mismatches,
    })
}
