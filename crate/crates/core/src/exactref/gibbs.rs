use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SpinConfig, Vector2};

pub const MIN_ENUMERATION_SIDE: usize = 2;
pub const MAX_ENUMERATION_SIDE: usize = 4;

/// Named observables with exact Gibbs expectations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    /// Full-torus mean spin.
    Magnetization,
    AbsMagnetization,
    MagnetizationSquared,
    /// `H / N^2`.
    EnergyPerSite,
    /// `sigma_0 sigma_x` at the origin.
    TwoPoint(Vector2),
}

impl Observable {
    pub fn name(&self) -> String {
        match self {
            Observable::Magnetization => "magnetization".into(),
            Observable::AbsMagnetization => "abs_magnetization".into(),
            Observable::MagnetizationSquared => "magnetization_sq".into(),
            Observable::EnergyPerSite => "energy_per_site".into(),
            Observable::TwoPoint(v) => format!("two_point:{},{}", v.x, v.y),
        }
    }

    pub fn is_flip_odd(&self) -> bool {
        matches!(self, Observable::Magnetization)
    }

    pub fn evaluate(&self, config: &SpinConfig) -> f64 {
        let n2 = config.len() as f64;
        match *self {
            Observable::Magnetization => config.total() as f64 / n2,
            Observable::AbsMagnetization => (config.total() as f64 / n2).abs(),
            Observable::MagnetizationSquared => {
                let m = config.total() as f64 / n2;
                m * m
            }
            Observable::EnergyPerSite => energy(config) as f64 / n2,
            Observable::TwoPoint(v) => (config.get(0, 0) * config.get_wrapped(v)) as f64,
        }
    }

    /// The observables pinned by default in an oracle file.
    pub fn standard_set() -> Vec<Observable> {
        vec![
            Observable::Magnetization,
            Observable::AbsMagnetization,
            Observable::MagnetizationSquared,
            Observable::EnergyPerSite,
            Observable::TwoPoint(Vector2::new(1, 0)),
            Observable::TwoPoint(Vector2::new(1, 1)),
        ]
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "magnetization" => Observable::Magnetization,
            "abs_magnetization" => Observable::AbsMagnetization,
            "magnetization_sq" => Observable::MagnetizationSquared,
            "energy_per_site" => Observable::EnergyPerSite,
            _ => {
                let rest = s
                    .strip_prefix("two_point:")
                    .ok_or_else(|| Error::UnknownObservable(s.into()))?;
                let (x, y) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::UnknownObservable(s.into()))?;
                let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| Error::UnknownObservable(s.into()));
                Observable::TwoPoint(Vector2::new(parse(x)?, parse(y)?))
            }
        })
    }
}

impl Serialize for Observable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Observable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `H = -sum over torus bonds of sigma_i sigma_j`, one term per site and
/// direction. On `N = 2` each pair of sites is therefore bonded twice, the
/// same multiplicity the dynamics sees through its neighbor sums.
pub fn energy(config: &SpinConfig) -> i64 {
    let n = config.side();
    let mut e = 0i64;
    for y in 0..n {
        for x in 0..n {
            let s = config.get(x, y) as i64;
            e -= s * config.get((x + 1) % n, y) as i64;
            e -= s * config.get(x, (y + 1) % n) as i64;
        }
    }
    e
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// State `bits` has spin `+1` at site `i` iff bit `i` is set.
pub fn state_config(side: usize, bits: u32) -> SpinConfig {
    let spins = (0..side * side)
        .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
        .collect();
    SpinConfig::from_spins(side, spins).expect("valid by construction")
}

/// The finite-volume Gibbs measure on a tiny torus, by full enumeration.
#[derive(Clone, Debug)]
pub struct ExactGibbsTable {
    side: usize,
    beta: f64,
    /// `exp(-beta (H - H_min))` per state.
    weights: Vec<f64>,
    partition: f64,
}

const CHUNK: usize = 1024;

impl ExactGibbsTable {
    pub fn new(side: usize, beta: f64) -> Result<Self> {
        if !(MIN_ENUMERATION_SIDE..=MAX_ENUMERATION_SIDE).contains(&side) {
            return Err(Error::EnumerationTooLarge {
                min: MIN_ENUMERATION_SIDE,
                max: MAX_ENUMERATION_SIDE,
                got: side,
            });
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidBeta(beta));
        }
        let states = 1u32 << (side * side);
        let energies: Vec<i64> = (0..states)
            .into_par_iter()
            .map(|b| energy(&state_config(side, b)))
            .collect();
        let min_energy = *energies.iter().min().expect("nonempty");
        let weights: Vec<f64> = energies
            .iter()
            .map(|&e| (-beta * (e - min_energy) as f64).exp())
            .collect();
        let partition = chunked_sum(&weights, |_, w| w);
        Ok(ExactGibbsTable {
            side,
            beta,
            weights,
            partition,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn states(&self) -> usize {
        self.weights.len()
    }

    /// Normalized probability of state `bits`.
    pub fn probability(&self, bits: u32) -> f64 {
        self.weights[bits as usize] / self.partition
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.partition).collect()
    }

    pub fn expectation(&self, observable: &Observable) -> f64 {
        self.expectation_with(|c| observable.evaluate(c))
    }

    pub fn expectation_with(&self, f: impl Fn(&SpinConfig) -> f64 + Sync) -> f64 {
        let side = self.side;
        chunked_sum(&self.weights, |i, w| w * f(&state_config(side, i as u32))) / self.partition
    }
}

/// Kahan sums over fixed chunks in parallel, reduced in chunk order.
fn chunked_sum(weights: &[f64], term: impl Fn(usize, f64) -> f64 + Sync) -> f64 {
    let partials: Vec<f64> = weights
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = KahanSum::default();
            for (j, &w) in chunk.iter().enumerate() {
                acc.add(term(c * CHUNK + j, w));
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::default();
    for p in partials {
        total.add(p);
    }
    total.value()
}

pub fn exact_gibbs_expectation(side: usize, beta: f64, observable: &Observable) -> Result<f64> {
    Ok(ExactGibbsTable::new(side, beta)?.expectation(observable))
}
