//! Experiment orchestration: configs, seeded replica fan-out, the canned
//! experiments, reports and offline verification.
//!
//! Replica `r` draws its clocks from counter-based stream `r` under
//! `master_seed`, so results do not depend on scheduling. A replica whose
//! clocks hit a tie or a mark equal to an update probability is re-run once
//! on stream `r + ALT_OFFSET` and the abort is recorded in the report.

mod config;
mod experiments;
mod replicas;
mod report;
mod tables;
mod verdicts;
mod verify;

pub use config::{CesaroTier, Experiment, ExperimentConfig, InitialCondition, SEED_ENV};
pub use experiments::{oracle_regen, run_experiment, EVENT_LOG_FILE, ORACLE_FILE};
pub use replicas::{
    aggregate_replicas, fan_out, initial_state, simulate, with_retry, AbortRecord, EnsembleTables, ReplicaRun,
    ReplicaSnapshots, ALT_OFFSET, ORACLE_STREAM, PILOT_STREAMS, PROXY_STREAMS,
};
pub use report::{Metadata, Report, REPORT_FILE, TORUS_NOTE};
pub use tables::{
    read_table, write_table, CesaroExactRow, CosetMeanRow, CosetPairRow, CouplingRow, GeneratorRow, MagnetizationRow,
    MeshBlockRow, MeshRow, PureContrastRow, Table, Tables, TwoPointProxyRow, TwoPointRow,
};
pub use verdicts::{
    evaluate, Diagnostics, Relation, Verdict, CENTERED_BAND, CENTERING_Z, CESARO_SE, DETAILED_BALANCE_LIMIT,
    PLUS_TOLERANCE, STATIONARITY_LIMIT, SYMMETRY_LEVEL,
};
pub use verify::{verify, Verification};
