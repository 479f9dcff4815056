use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::Experiment;
use crate::error::Result;

/// A CSV row type with a fixed header, written even for empty tables.
pub trait Table: Serialize + DeserializeOwned {
    const FILE: &'static str;
    const HEADER: &'static [&'static str];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationRow {
    pub replica: u64,
    pub time: f64,
    /// Block label: a radius or `full`.
    pub n: String,
    #[serde(rename = "M")]
    pub m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetMeanRow {
    pub t: f64,
    pub coset_rep_x: i64,
    pub coset_rep_y: i64,
    pub c_hat: f64,
    pub se: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetPairRow {
    pub t: f64,
    pub rep_x: i64,
    pub rep_y: i64,
    pub partner_x: i64,
    pub partner_y: i64,
    pub sum: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRow {
    pub replica: u64,
    pub delta: f64,
    pub k: usize,
    pub ring_fraction: f64,
    pub max_deviation: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshBlockRow {
    pub replica: u64,
    pub delta: f64,
    pub n: usize,
    pub k: usize,
    pub ring_fraction: f64,
    pub max_deviation: f64,
    pub bound: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointRow {
    pub x: i64,
    pub y: i64,
    pub estimate: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroExactRow {
    #[serde(rename = "N")]
    pub side: usize,
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub batches: usize,
    pub x: i64,
    pub y: i64,
    pub estimate: f64,
    pub se: f64,
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointProxyRow {
    pub source: String,
    pub x: i64,
    pub y: i64,
    pub estimate: f64,
    pub se: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub replica: u64,
    pub identity: String,
    pub events_compared: usize,
    pub states_compared: usize,
    pub identical: bool,
    pub first_mismatch: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureContrastRow {
    pub replica: u64,
    /// `antisym`, `all_plus` or `pilot`.
    pub initial: String,
    pub time_average: f64,
    pub sup_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorRow {
    #[serde(rename = "N")]
    pub side: usize,
    pub beta: f64,
    pub states: usize,
    pub stationarity_residual: f64,
    pub detailed_balance_residual: f64,
    pub rate_ratio_error: f64,
}

macro_rules! table {
    ($ty:ty, $file:literal, [$($col:literal),* $(,)?]) => {
        impl Table for $ty {
            const FILE: &'static str = $file;
            const HEADER: &'static [&'static str] = &[$($col),*];
        }
    };
}

table!(MagnetizationRow, "magnetization.csv", ["replica", "time", "n", "M"]);
table!(CosetMeanRow, "coset_means.csv", ["t", "coset_rep_x", "coset_rep_y", "c_hat", "se", "count"]);
table!(CosetPairRow, "coset_pairs.csv", ["t", "rep_x", "rep_y", "partner_x", "partner_y", "sum", "se"]);
table!(MeshRow, "mesh_audit.csv", ["replica", "delta", "k", "ring_fraction", "max_deviation", "bound", "violated"]);
table!(
    MeshBlockRow,
    "mesh_audit_blocks.csv",
    ["replica", "delta", "n", "k", "ring_fraction", "max_deviation", "bound", "violated"]
);
table!(TwoPointRow, "two_point.csv", ["x", "y", "estimate", "se"]);
table!(CesaroExactRow, "cesaro_exact.csv", ["N", "beta", "T", "batches", "x", "y", "estimate", "se", "exact"]);
table!(TwoPointProxyRow, "two_point_proxy.csv", ["source", "x", "y", "estimate", "se"]);
table!(
    CouplingRow,
    "coupling.csv",
    ["replica", "identity", "events_compared", "states_compared", "identical", "first_mismatch"]
);
table!(PureContrastRow, "pure_contrast.csv", ["replica", "initial", "time_average", "sup_abs"]);
table!(
    GeneratorRow,
    "generator.csv",
    ["N", "beta", "states", "stationarity_residual", "detailed_balance_residual", "rate_ratio_error"]
);

pub fn write_table<T: Table>(dir: &Path, rows: &[T]) -> Result<()> {
    let file = BufWriter::new(File::create(dir.join(T::FILE))?);
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(T::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<T: Table>(dir: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(dir.join(T::FILE))?;
    let header = r.headers()?.clone();
    if header.iter().ne(T::HEADER.iter().copied()) {
        return Err(crate::Error::Parse(format!(
            "{}: unexpected header {:?}",
            T::FILE,
            header.iter().collect::<Vec<_>>()
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Everything an experiment writes, in memory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tables {
    pub magnetization: Vec<MagnetizationRow>,
    pub coset_means: Vec<CosetMeanRow>,
    pub coset_pairs: Vec<CosetPairRow>,
    pub mesh: Vec<MeshRow>,
    pub mesh_blocks: Vec<MeshBlockRow>,
    pub two_point: Vec<TwoPointRow>,
    pub cesaro_exact: Vec<CesaroExactRow>,
    pub two_point_proxy: Vec<TwoPointProxyRow>,
    pub coupling: Vec<CouplingRow>,
    pub pure_contrast: Vec<PureContrastRow>,
    pub generator: Vec<GeneratorRow>,
}

macro_rules! per_experiment {
    ($experiment:expr, $dir:expr, $tables:expr, $op:ident) => {{
        let mut files: Vec<&'static str> = Vec::new();
        match $experiment {
            Experiment::Coupling => {
                $op(&mut files, $dir, &mut $tables.coupling)?;
            }
            Experiment::Centering => {
                $op(&mut files, $dir, &mut $tables.magnetization)?;
                $op(&mut files, $dir, &mut $tables.coset_means)?;
                $op(&mut files, $dir, &mut $tables.coset_pairs)?;
            }
            Experiment::Mesh => {
                $op(&mut files, $dir, &mut $tables.mesh)?;
                $op(&mut files, $dir, &mut $tables.mesh_blocks)?;
            }
            Experiment::Cesaro => {
                $op(&mut files, $dir, &mut $tables.magnetization)?;
                $op(&mut files, $dir, &mut $tables.two_point)?;
                $op(&mut files, $dir, &mut $tables.cesaro_exact)?;
                $op(&mut files, $dir, &mut $tables.two_point_proxy)?;
            }
            Experiment::PureContrast => {
                $op(&mut files, $dir, &mut $tables.magnetization)?;
                $op(&mut files, $dir, &mut $tables.pure_contrast)?;
            }
            Experiment::OracleRegen => {
                $op(&mut files, $dir, &mut $tables.generator)?;
            }
        }
        files
    }};
}

fn write_one<T: Table>(files: &mut Vec<&'static str>, dir: &Path, rows: &mut [T]) -> Result<()> {
    write_table(dir, rows)?;
    files.push(T::FILE);
    Ok(())
}

fn read_one<T: Table>(files: &mut Vec<&'static str>, dir: &Path, rows: &mut Vec<T>) -> Result<()> {
    *rows = read_table(dir)?;
    files.push(T::FILE);
    Ok(())
}

impl Tables {
    /// Writes the tables belonging to `experiment` and returns their file names.
    pub fn write(&self, experiment: Experiment, dir: &Path) -> Result<Vec<&'static str>> {
        let mut copy = self.clone();
        Ok(per_experiment!(experiment, dir, copy, write_one))
    }

    pub fn read(experiment: Experiment, dir: &Path) -> Result<Tables> {
        let mut tables = Tables::default();
        per_experiment!(experiment, dir, tables, read_one);
        Ok(tables)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_nan_and_empty() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            CosetMeanRow {
                t: 0.5,
                coset_rep_x: 1,
                coset_rep_y: 0,
                c_hat: -0.1 / 3.0,
                se: f64::NAN,
                count: 512,
            },
            CosetMeanRow {
                t: 2.0,
                coset_rep_x: 0,
                coset_rep_y: 0,
                c_hat: 1e-300,
                se: 0.0,
                count: 1,
            },
        ];
        write_table(dir.path(), &rows).unwrap();
        let back: Vec<CosetMeanRow> = read_table(dir.path()).unwrap();
        assert!(back[0].se.is_nan());
        assert_eq!(back[0].c_hat.to_bits(), rows[0].c_hat.to_bits());
        assert_eq!(back[1], rows[1]);

        write_table::<MagnetizationRow>(dir.path(), &[]).unwrap();
        let text = std::fs::read_to_string(dir.path().join("magnetization.csv")).unwrap();
        assert_eq!(text, "replica,time,n,M\n");
        assert!(read_table::<MagnetizationRow>(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn optional_column() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![CouplingRow {
            replica: 0,
            identity: "flip".into(),
            events_compared: 10,
            states_compared: 11,
            identical: true,
            first_mismatch: None,
        }];
        write_table(dir.path(), &rows).unwrap();
        assert_eq!(read_table::<CouplingRow>(dir.path()).unwrap(), rows);
    }

    #[test]
    fn header_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("two_point.csv"), "x,y,value,se\n1,0,0.5,0.1\n").unwrap();
        assert!(read_table::<TwoPointRow>(dir.path()).is_err());
    }
}
