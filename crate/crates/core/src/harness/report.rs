use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::replicas::AbortRecord;
use super::verdicts::{Diagnostics, Verdict};
use crate::error::Result;

pub const REPORT_FILE: &str = "report.json";

pub const TORUS_NOTE: &str = "finite periodic torus: the stationary law is flip-symmetric, so pure-phase \
quantities are approximated by metastable all-plus runs and reported rather than assumed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config: ExperimentConfig,
    pub fingerprint: String,
    pub version: String,
    pub wall_time_seconds: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    /// CSV files written next to the report.
    pub tables: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Diagnostics,
    pub aborts: Vec<AbortRecord>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, id: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.id == id)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(dir.join(REPORT_FILE), text)?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join(REPORT_FILE))?)?)
    }

    /// One line per verdict.
    pub fn summary(&self) -> String {
        self.verdicts.iter().map(|v| v.line() + "\n").collect()
    }
}
