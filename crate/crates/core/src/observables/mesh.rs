use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::harris::Trajectory;
use crate::lattice::{block_magnetization, Block};

/// One mesh interval `[k delta, (k+1) delta]`.
///
/// Between mesh times a spin can only change at a site whose clock rang, so
/// `|M(sigma_t) - M(sigma_{k delta})| <= 2 * (rung sites in the block) / |block|`
/// holds for every path. `violated` records that check in exact integer
/// arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshAuditRecord {
    pub k: usize,
    pub delta: f64,
    /// Sites of the observation block.
    pub sites: u64,
    /// Block sites whose clock rang in the interval.
    pub rung: u64,
    pub ring_fraction: f64,
    pub max_deviation: f64,
    pub bound: f64,
    pub violated: bool,
    /// False for a trailing interval cut short by the horizon.
    pub complete: bool,
}

/// Audits `traj` on the mesh of width `delta` for the given block.
///
/// An event is attributed to interval `k` when `k delta <= t < (k+1) delta`
/// (the last interval is closed). The reference state of an interval is the
/// state just before its first event.
pub fn mesh_audit(traj: &Trajectory, delta: f64, block: Block) -> Result<Vec<MeshAuditRecord>> {
    let horizon = traj.horizon();
    if !(delta > 0.0 && delta.is_finite()) || delta > horizon {
        return Err(Error::InvalidMesh(delta));
    }
    let side = traj.side();
    let mask = block.mask(side)?;
    let sites = block.site_count(side)? as u64;

    let mut intervals = (horizon / delta).ceil().max(1.0) as usize;
    while intervals > 1 && (intervals - 1) as f64 * delta >= horizon {
        intervals -= 1;
    }
    let interval_of = |t: f64| -> usize {
        let mut k = ((t / delta).floor().max(0.0) as usize).min(intervals - 1);
        while k > 0 && t < k as f64 * delta {
            k -= 1;
        }
        while k + 1 < intervals && t >= (k + 1) as f64 * delta {
            k += 1;
        }
        k
    };

    let mut sum = block_magnetization(traj.initial(), block)?.sum;
    let mut stamp = vec![usize::MAX; side * side];
    let events = traj.events();
    let mut next = 0;
    let mut records = Vec::with_capacity(intervals);
    for k in 0..intervals {
        let start_sum = sum;
        let mut rung = 0u64;
        let mut max_dev = 0i64;
        while let Some(e) = events.get(next) {
            if interval_of(e.time) != k {
                break;
            }
            if mask[e.site] {
                if stamp[e.site] != k {
                    stamp[e.site] = k;
                    rung += 1;
                }
                if e.changed() {
                    sum += 2 * e.new as i64;
                    max_dev = max_dev.max((sum - start_sum).abs());
                }
            }
            next += 1;
        }
        let d = sites as f64;
        records.push(MeshAuditRecord {
            k,
            delta,
            sites,
            rung,
            ring_fraction: rung as f64 / d,
            max_deviation: max_dev as f64 / d,
            bound: 2.0 * rung as f64 / d,
            violated: max_dev > 2 * rung as i64,
            complete: (k + 1) as f64 * delta <= horizon * (1.0 + 1e-12),
        });
    }
    debug_assert_eq!(next, events.len());
    Ok(records)
}

/// Rung-site and trial counts pooled over complete intervals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PooledRings {
    pub rung: u64,
    pub trials: u64,
}

impl PooledRings {
    pub fn fraction(&self) -> f64 {
        self.rung as f64 / self.trials as f64
    }

    pub fn add(&mut self, other: PooledRings) {
        self.rung += other.rung;
        self.trials += other.trials;
    }
}

pub fn pooled_ring_fraction<'a>(records: impl IntoIterator<Item = &'a MeshAuditRecord>) -> PooledRings {
    records
        .into_iter()
        .filter(|r| r.complete)
        .fold(PooledRings::default(), |acc, r| PooledRings {
            rung: acc.rung + r.rung,
            trials: acc.trials + r.sites,
        })
}

/// Two-sided 99% acceptance interval for the fraction of successes in
/// `trials` Bernoulli(`p`) draws (normal approximation).
pub fn binomial_interval_99(p: f64, trials: u64) -> (f64, f64) {
    let z = Normal::standard().inverse_cdf(0.995);
    let half = z * (p * (1.0 - p) / trials as f64).sqrt();
    (p - half, p + half)
}
