//! Exact references: the Onsager magnetization and full enumeration of tiny
//! tori.

mod generator;
mod gibbs;
mod onsager;
mod oracles;

pub use generator::{generator_check, generator_matrix, rate_ratio_error, GeneratorReport, MAX_GENERATOR_SIDE};
pub use gibbs::{
    energy, exact_gibbs_expectation, state_config, ExactGibbsTable, KahanSum, Observable,
    MAX_ENUMERATION_SIDE, MIN_ENUMERATION_SIDE,
};
pub use onsager::{onsager_magnetization, BETA_C};
pub use oracles::{regenerate, OracleEntry, OracleFile, ORACLE_TOLERANCE};
