use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::series::{batch_means, two_point_series};
use super::{mean_and_se, Estimate};
use crate::error::{Error, Result};
use crate::exactref::{onsager_magnetization, BETA_C};
use crate::harris::Trajectory;
use crate::lattice::{SpinConfig, Vector2};

/// Finite-volume stand-ins for the magnetization sectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Plus,
    Minus,
    Centered,
    Other,
}

impl Sector {
    pub fn label(&self) -> &'static str {
        match self {
            Sector::Plus => "plus",
            Sector::Minus => "minus",
            Sector::Centered => "centered",
            Sector::Other => "other",
        }
    }
}

/// Band membership of a magnetization value around `{+m, -m, 0}` where `m`
/// is the spontaneous magnetization at `beta`. Requires `0 < epsilon < m/2`,
/// so the three bands are disjoint.
pub fn sector_proxy(m: f64, beta: f64, epsilon: f64) -> Result<Sector> {
    if !(beta > BETA_C) {
        return Err(Error::NotOrdered(beta));
    }
    let m_beta = onsager_magnetization(beta)?;
    if !(epsilon > 0.0 && epsilon < m_beta / 2.0) {
        return Err(Error::InvalidBand {
            epsilon,
            limit: m_beta / 2.0,
        });
    }
    Ok(if (m - m_beta).abs() <= epsilon {
        Sector::Plus
    } else if (m + m_beta).abs() <= epsilon {
        Sector::Minus
    } else if m.abs() <= epsilon {
        Sector::Centered
    } else {
        Sector::Other
    })
}

pub const SYMMETRY_RESAMPLES: usize = 1000;
pub const SYMMETRY_SEED: u64 = 0x5157_5EED;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTest {
    /// Kolmogorov distance between the samples and their negatives.
    pub statistic: f64,
    pub p_value: f64,
    pub resamples: usize,
}

/// Tests whether the sample law is symmetric under `m -> -m`.
///
/// The statistic is the two-sample Kolmogorov distance between `{x_i}` and
/// `{-x_i}`. It is calibrated by resampling independent sign flips
/// `x_i -> s_i x_i`, which swap the labels inside each pair `(x_i, -x_i)`
/// and leave the law invariant under the null.
pub fn sign_symmetry_test(samples: &[f64]) -> Result<SymmetryTest> {
    sign_symmetry_test_with(samples, SYMMETRY_RESAMPLES, SYMMETRY_SEED)
}

pub fn sign_symmetry_test_with(samples: &[f64], resamples: usize, seed: u64) -> Result<SymmetryTest> {
    const MIN: usize = 20;
    if samples.len() < MIN {
        return Err(Error::TooFewSamples {
            needed: MIN,
            got: samples.len(),
        });
    }
    let observed = mirror_distance(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flipped = samples.to_vec();
    let mut at_least = 0usize;
    for _ in 0..resamples {
        for (f, &x) in flipped.iter_mut().zip(samples) {
            *f = if rng.random::<bool>() { x } else { -x };
        }
        if mirror_distance(&flipped) >= observed {
            at_least += 1;
        }
    }
    Ok(SymmetryTest {
        statistic: observed as f64 / samples.len() as f64,
        p_value: (1 + at_least) as f64 / (1 + resamples) as f64,
        resamples,
    })
}

/// `n * sup_t |F_x(t) - F_{-x}(t)|`, as an integer.
fn mirror_distance(xs: &[f64]) -> usize {
    let mut a: Vec<f64> = xs.to_vec();
    a.sort_by(f64::total_cmp);
    // -x sorted ascending is the reverse of x sorted ascending, negated
    let b: Vec<f64> = a.iter().rev().map(|x| -x).collect();
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0usize;
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        best = best.max(i.abs_diff(j));
    }
    best
}

pub(crate) fn two_point_sum(config: &SpinConfig, x: Vector2) -> i64 {
    let n = config.side();
    let v = x.reduce(n);
    let (vx, vy) = (v.x as usize, v.y as usize);
    let mut sum = 0i64;
    for y in 0..n {
        let yy = (y + vy) % n;
        for xx in 0..n {
            sum += config.get(xx, y) as i64 * config.get((xx + vx) % n, yy) as i64;
        }
    }
    sum
}

/// `<sigma_0 sigma_x>` averaged over all base points of one configuration.
pub fn two_point_config(config: &SpinConfig, x: Vector2) -> f64 {
    let n = config.side();
    two_point_sum(config, x) as f64 / (n * n) as f64
}

/// Ensemble estimate with a replica-level standard error.
pub fn two_point_ensemble(ensemble: &[SpinConfig], x: Vector2) -> Result<Estimate> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let values: Vec<f64> = ensemble.iter().map(|c| two_point_config(c, x)).collect();
    Ok(mean_and_se(&values))
}

/// Time average over the whole trajectory with a batch-means standard error.
pub fn two_point_time_average(traj: &Trajectory, x: Vector2, batches: usize) -> Result<Estimate> {
    batch_means(&two_point_series(traj, x), traj.horizon(), batches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn sector_examples() {
        let m = onsager_magnetization(0.6).unwrap();
        assert_eq!(sector_proxy(m, 0.6, 0.05).unwrap(), Sector::Plus);
        assert_eq!(sector_proxy(-m, 0.6, 0.05).unwrap(), Sector::Minus);
        assert_eq!(sector_proxy(0.0, 0.6, 0.05).unwrap(), Sector::Centered);
        assert_eq!(sector_proxy(0.5, 0.6, 0.05).unwrap(), Sector::Other);
        assert!(matches!(sector_proxy(0.0, 0.4, 0.05), Err(Error::NotOrdered(_))));
        assert!(matches!(sector_proxy(0.0, BETA_C, 0.05), Err(Error::NotOrdered(_))));
        assert!(matches!(sector_proxy(0.0, 0.6, 0.0), Err(Error::InvalidBand { .. })));
        assert!(matches!(sector_proxy(0.0, 0.6, 0.49), Err(Error::InvalidBand { .. })));
    }

    #[test]
    fn symmetric_inputs_give_p_one() {
        let zeros = vec![0.0; 30];
        assert_eq!(sign_symmetry_test(&zeros).unwrap().p_value, 1.0);
        let paired: Vec<f64> = (0..25).flat_map(|k| [k as f64 * 0.01, -(k as f64) * 0.01]).collect();
        let t = sign_symmetry_test(&paired).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.p_value, 1.0);
    }

    #[test]
    fn shifted_law_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let law = Normal::new(0.3, 0.1).unwrap();
        let xs: Vec<f64> = (0..500).map(|_| law.sample(&mut rng)).collect();
        let t = sign_symmetry_test(&xs).unwrap();
        assert!(t.p_value < 0.001, "{t:?}");
        assert!(t.statistic > 0.9);
    }

    #[test]
    fn centered_law_is_accepted_mostly() {
        let law = Normal::new(0.0, 0.2).unwrap();
        let mut passes = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs: Vec<f64> = (0..200).map(|_| law.sample(&mut rng)).collect();
            if sign_symmetry_test_with(&xs, 200, seed).unwrap().p_value >= 0.01 {
                passes += 1;
            }
        }
        assert!(passes >= 18, "{passes}/20");
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(sign_symmetry_test(&[0.1; 19]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn mirror_distance_brute_force() {
        let xs = [0.3, -0.1, 0.3, 0.0, 0.7, -0.3, 0.1, 0.2];
        let n = xs.len();
        let cdf = |sample: &[f64], t: f64| sample.iter().filter(|&&v| v <= t).count();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let brute = xs
            .iter()
            .chain(&neg)
            .map(|&t| cdf(&xs, t).abs_diff(cdf(&neg, t)))
            .max()
            .unwrap();
        assert_eq!(mirror_distance(&xs), brute);
        assert!(brute <= n);
    }

    #[test]
    fn two_point_examples() {
        let plus = SpinConfig::all_plus(5).unwrap();
        for x in [Vector2::new(1, 0), Vector2::new(2, 3)] {
            assert_eq!(two_point_config(&plus, x), 1.0);
        }
        let cb = SpinConfig::checkerboard(6).unwrap();
        assert_eq!(two_point_config(&cb, Vector2::new(1, 0)), -1.0);
        assert_eq!(two_point_config(&cb, Vector2::new(1, 1)), 1.0);
        let est = two_point_ensemble(&[plus.clone(), plus], Vector2::new(1, 0)).unwrap();
        assert_eq!((est.value, est.se), (1.0, 0.0));
        assert!(two_point_ensemble(&[], Vector2::new(1, 0)).is_err());
    }
}
