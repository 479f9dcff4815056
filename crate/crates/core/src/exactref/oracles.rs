use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::gibbs::{ExactGibbsTable, Observable};
use crate::error::Result;

/// Tolerance stored with every enumerated value.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEntry {
    #[serde(rename = "N")]
    pub side: usize,
    pub beta: f64,
    pub observable: Observable,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleFile {
    pub entries: Vec<OracleEntry>,
}

impl OracleFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn lookup(&self, side: usize, beta: f64, observable: &Observable) -> Option<&OracleEntry> {
        self.entries
            .iter()
            .find(|e| e.side == side && e.beta == beta && &e.observable == observable)
    }

    /// Replaces entries with the same key and keeps the file sorted.
    pub fn merge(&mut self, fresh: Vec<OracleEntry>) {
        for entry in fresh {
            self.entries
                .retain(|e| !(e.side == entry.side && e.beta == entry.beta && e.observable == entry.observable));
            self.entries.push(entry);
        }
        self.entries.sort_by(|a, b| {
            (a.side, a.observable.name())
                .cmp(&(b.side, b.observable.name()))
                .then(a.beta.total_cmp(&b.beta))
        });
    }
}

/// Enumerates the standard observables at one `(side, beta)`.
pub fn regenerate(side: usize, beta: f64) -> Result<Vec<OracleEntry>> {
    let table = ExactGibbsTable::new(side, beta)?;
    Ok(Observable::standard_set()
        .into_iter()
        .map(|observable| OracleEntry {
            side,
            beta,
            value: table.expectation(&observable),
            observable,
            tolerance: ORACLE_TOLERANCE,
        })
        .collect())
}
