//! Measurements on trajectories and replica ensembles.
//!
//! Standard errors are always computed at replica (or batch) granularity:
//! a spatial average inside one replica counts as a single observation.

mod coset;
mod mesh;
mod series;
mod stats;

use serde::{Deserialize, Serialize};

pub use coset::{coset_means, CosetMean, CosetMeanEstimate, CosetPair};
pub use mesh::{binomial_interval_99, mesh_audit, pooled_ring_fraction, MeshAuditRecord, PooledRings};
pub use series::{
    batch_means, cesaro_time_average, integrate, magnetization_series, two_point_series,
    MagnetizationSeries, PiecewiseConstant, StepFunction,
};
pub use stats::{
    sector_proxy, sign_symmetry_test, sign_symmetry_test_with, two_point_config, two_point_ensemble,
    two_point_time_average, Sector, SymmetryTest, SYMMETRY_RESAMPLES, SYMMETRY_SEED,
};

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// `|value - target| / se`, with `0/0` read as agreement.
    pub fn z_against(&self, target: f64) -> f64 {
        studentize(self.value - target, self.se)
    }
}

pub(crate) fn studentize(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        (diff / se).abs()
    }
}

/// Sample mean and standard error of the mean. The error is `NaN` for a
/// single observation.
pub fn mean_and_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Estimate {
            value: mean,
            se: f64::NAN,
        };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: mean,
        se: (var / n).sqrt(),
    }
}
