use serde::{Deserialize, Serialize};

use super::gibbs::{state_config, ExactGibbsTable, KahanSum};
use crate::error::{Error, Result};
use crate::harris::UpdateRule;

pub const MAX_GENERATOR_SIDE: usize = 3;

/// Residuals of the heat-bath generator against the exact Gibbs weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub side: usize,
    pub beta: f64,
    pub states: usize,
    /// `max_j |(pi Q)_j|`.
    pub stationarity_residual: f64,
    /// `max_{i,j} |pi_i Q_ij - pi_j Q_ji|`.
    pub detailed_balance_residual: f64,
    /// `max_h |p(h) / (1 - p(h)) - exp(2 beta h)|`, relative.
    pub rate_ratio_error: f64,
}

/// Rates of the generator: each site refreshes at rate 1, so a flip of site
/// `i` occurs at the probability of the opposite value.
fn flip_probabilities(beta: f64) -> Result<[f64; 5]> {
    if beta == 0.0 {
        return Ok([0.5; 5]);
    }
    let rule = UpdateRule::new(beta)?;
    Ok([-4, -2, 0, 2, 4].map(|h| rule.prob(h)))
}

/// Dense generator `Q` in row-major order, rows summing to zero.
pub fn generator_matrix(side: usize, beta: f64) -> Result<Vec<f64>> {
    check_side(side)?;
    let p = flip_probabilities(beta)?;
    let sites = side * side;
    let states = 1usize << sites;
    let mut q = vec![0.0; states * states];
    for from in 0..states {
        let config = state_config(side, from as u32);
        let mut out = KahanSum::default();
        for i in 0..sites {
            let s = config.get_index(i) as i32;
            let h = config.neighbor_sum(i);
            // probability that the refreshed spin equals -s
            let rate = p[((-s * h + 4) / 2) as usize];
            let to = from ^ (1 << i);
            q[from * states + to] += rate;
            out.add(rate);
        }
        q[from * states + from] = -out.value();
    }
    Ok(q)
}

pub fn generator_check(side: usize, beta: f64) -> Result<GeneratorReport> {
    check_side(side)?;
    let table = ExactGibbsTable::new(side, beta)?;
    let pi = table.probabilities();
    let q = generator_matrix(side, beta)?;
    let states = pi.len();

    let mut stationarity: f64 = 0.0;
    for j in 0..states {
        let mut acc = KahanSum::default();
        for i in 0..states {
            let rate = q[i * states + j];
            if rate != 0.0 {
                acc.add(pi[i] * rate);
            }
        }
        stationarity = stationarity.max(acc.value().abs());
    }

    let mut balance: f64 = 0.0;
    for i in 0..states {
        for j in (i + 1)..states {
            let a = pi[i] * q[i * states + j];
            let b = pi[j] * q[j * states + i];
            balance = balance.max((a - b).abs());
        }
    }

    Ok(GeneratorReport {
        side,
        beta,
        states,
        stationarity_residual: stationarity,
        detailed_balance_residual: balance,
        rate_ratio_error: rate_ratio_error(beta)?,
    })
}

/// Relative error of `p(h) / p(-h) = exp(2 beta h)` over all fields.
pub fn rate_ratio_error(beta: f64) -> Result<f64> {
    let p = flip_probabilities(beta)?;
    let mut worst: f64 = 0.0;
    for (k, h) in [-4i32, -2, 0, 2, 4].into_iter().enumerate() {
        let ratio = p[k] / p[4 - k];
        let exact = (2.0 * beta * h as f64).exp();
        worst = worst.max((ratio - exact).abs() / exact);
    }
    Ok(worst)
}

fn check_side(side: usize) -> Result<()> {
    if !(2..=MAX_GENERATOR_SIDE).contains(&side) {
        return Err(Error::EnumerationTooLarge {
            min: 2,
            max: MAX_GENERATOR_SIDE,
            got: side,
        });
    }
    Ok(())
}
