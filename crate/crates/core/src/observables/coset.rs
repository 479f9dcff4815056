use serde::{Deserialize, Serialize};

use super::{mean_and_se, studentize, Estimate};
use crate::error::{Error, Result};
use crate::lattice::{SpinConfig, SublatticeSpec, Vector2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetMean {
    pub rep: Vector2,
    /// Mean spin over replicas and over the sites of the coset.
    pub estimate: f64,
    /// Replica-level standard error; `NaN` for a single replica.
    pub se: f64,
    /// `replicas * coset size`.
    pub count: u64,
    /// Exact sum of all spins that entered `estimate`.
    pub spin_total: i64,
}

/// The statistic `c_a + c_{a+u}`, which vanishes in expectation for
/// antisymmetric initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetPair {
    pub rep: Vector2,
    pub partner: Vector2,
    pub sum: f64,
    /// Standard error of the per-replica sums.
    pub se: f64,
}

impl CosetPair {
    pub fn z(&self) -> f64 {
        studentize(self.sum, self.se)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetMeanEstimate {
    pub side: usize,
    pub replicas: usize,
    pub u: Vector2,
    pub cosets: Vec<CosetMean>,
    pub pairs: Vec<CosetPair>,
    /// Ensemble mean of the full-torus magnetization.
    pub total: Estimate,
}

impl CosetMeanEstimate {
    pub fn max_abs_pair_z(&self) -> f64 {
        self.pairs.iter().map(CosetPair::z).fold(0.0, f64::max)
    }

    /// `sum_a c_a |coset a| / N^2`, computed from the exact spin totals. Equals
    /// the ensemble-mean full magnetization.
    pub fn weighted_total(&self) -> f64 {
        let spins: i64 = self.cosets.iter().map(|c| c.spin_total).sum();
        spins as f64 / (self.replicas * self.side * self.side) as f64
    }

    pub fn coset(&self, rep: Vector2) -> Option<&CosetMean> {
        self.cosets.iter().find(|c| c.rep == rep)
    }
}

pub fn coset_means(ensemble: &[SpinConfig], lattice: &SublatticeSpec, u: Vector2) -> Result<CosetMeanEstimate> {
    let first = ensemble.first().ok_or(Error::EmptyEnsemble)?;
    let side = first.side();
    if let Some(bad) = ensemble.iter().find(|c| c.side() != side) {
        return Err(Error::ShapeMismatch {
            side,
            expected: side * side,
            got: bad.len(),
        });
    }
    let partition = lattice.enumerate_cosets(side)?;
    let q = partition.len();

    // per-replica coset spin sums, replica-major
    let mut sums = vec![0i64; ensemble.len() * q];
    for (r, config) in ensemble.iter().enumerate() {
        let row = &mut sums[r * q..(r + 1) * q];
        for (k, coset) in partition.cosets().iter().enumerate() {
            row[k] = coset.sites.iter().map(|&s| config.get_index(s) as i64).sum();
        }
    }

    let replicas = ensemble.len();
    let per_replica_mean = |k: usize| -> Vec<f64> {
        let size = partition.cosets()[k].sites.len() as f64;
        (0..replicas).map(|r| sums[r * q + k] as f64 / size).collect()
    };

    let cosets: Vec<CosetMean> = partition
        .cosets()
        .iter()
        .enumerate()
        .map(|(k, coset)| {
            let est = mean_and_se(&per_replica_mean(k));
            let spin_total = (0..replicas).map(|r| sums[r * q + k]).sum();
            CosetMean {
                rep: coset.rep,
                estimate: est.value,
                se: est.se,
                count: (replicas * coset.sites.len()) as u64,
                spin_total,
            }
        })
        .collect();

    let pairs = partition
        .cosets()
        .iter()
        .enumerate()
        .map(|(k, coset)| {
            let partner = lattice.coset_rep(coset.rep + u);
            let j = lattice.rep_ordinal(partner);
            let a = per_replica_mean(k);
            let b = per_replica_mean(j);
            let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let est = mean_and_se(&d);
            CosetPair {
                rep: coset.rep,
                partner,
                sum: cosets[k].estimate + cosets[j].estimate,
                se: est.se,
            }
        })
        .collect();

    let n2 = (side * side) as f64;
    let full: Vec<f64> = ensemble.iter().map(|c| c.total() as f64 / n2).collect();
    Ok(CosetMeanEstimate {
        side,
        replicas,
        u,
        cosets,
        pairs,
        total: mean_and_se(&full),
    })
}
