use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, InitialCondition};
use super::tables::{CosetMeanRow, CosetPairRow, MagnetizationRow};
use crate::error::{Error, Result};
use crate::harris::{evolve, generate_noise, Trajectory, UpdateRule};
use crate::lattice::{block_magnetization, SpinConfig};
use crate::observables::{coset_means, CosetMeanEstimate};

/// Stream families. Main replicas use streams `0..replicas`.
pub const PROXY_STREAMS: u64 = 1 << 60;
pub const PILOT_STREAMS: u64 = 1 << 61;
pub const ORACLE_STREAM: u64 = 1 << 62;
/// Added to a stream id for the single re-run after an abort.
pub const ALT_OFFSET: u64 = 1 << 63;

const INITIAL_SALT: u64 = 0x1A17_1A15_EED5_0000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortRecord {
    pub stream: u64,
    pub reason: String,
    pub rerun_stream: u64,
}

/// One simulated trajectory and where its noise came from.
#[derive(Clone, Debug)]
pub struct ReplicaRun {
    pub stream: u64,
    pub noise_stream: u64,
    pub trajectory: Trajectory,
    pub abort: Option<AbortRecord>,
}

/// The initial state for one stream. Only `uniform_random` consumes
/// randomness, from a generator keyed apart from the clocks.
pub fn initial_state(initial: &InitialCondition, side: usize, master_seed: u64, stream: u64) -> Result<SpinConfig> {
    match initial {
        InitialCondition::AllPlus => SpinConfig::all_plus(side),
        InitialCondition::AllMinus => SpinConfig::all_minus(side),
        InitialCondition::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ INITIAL_SALT);
            rng.set_stream(stream);
            SpinConfig::from_fn(side, |_, _| if rng.random::<bool>() { 1 } else { -1 })
        }
        InitialCondition::Antisym(spec) => spec.instantiate_on_torus(side),
    }
}

fn is_noise_abort(e: &Error) -> bool {
    matches!(e, Error::TieDetected { .. } | Error::MarkBoundary { .. })
}

/// Runs `attempt(noise_stream)`, and once more on `stream + ALT_OFFSET` if
/// the first attempt hits a clock tie or a mark on an update boundary.
pub fn with_retry<T>(stream: u64, mut attempt: impl FnMut(u64) -> Result<T>) -> Result<(T, Option<AbortRecord>)> {
    match attempt(stream) {
        Ok(v) => Ok((v, None)),
        Err(e) if is_noise_abort(&e) => {
            let rerun_stream = stream.wrapping_add(ALT_OFFSET);
            let v = attempt(rerun_stream)?;
            Ok((
                v,
                Some(AbortRecord {
                    stream,
                    reason: e.to_string(),
                    rerun_stream,
                }),
            ))
        }
        Err(e) => Err(e),
    }
}

pub fn simulate(
    initial: &InitialCondition,
    side: usize,
    beta: f64,
    horizon: f64,
    master_seed: u64,
    stream: u64,
) -> Result<ReplicaRun> {
    let start = initial_state(initial, side, master_seed, stream)?;
    let rule = UpdateRule::new(beta)?;
    let ((trajectory, noise_stream), abort) = with_retry(stream, |s| {
        let noise = generate_noise(master_seed, s, side, horizon)?;
        Ok((evolve(&start, &noise, &rule)?, s))
    })?;
    Ok(ReplicaRun {
        stream,
        noise_stream,
        trajectory,
        abort,
    })
}

/// Maps `work` over the streams in parallel. Output order follows `streams`.
pub fn fan_out<T: Send>(
    streams: impl IntoParallelIterator<Item = u64>,
    work: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    streams.into_par_iter().map(work).collect()
}

/// Configurations of one replica at the sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaSnapshots {
    pub replica_id: u64,
    pub fingerprint: String,
    pub times: Vec<f64>,
    pub states: Vec<SpinConfig>,
}

impl ReplicaSnapshots {
    /// States of `traj` at each of `times` (any order), each including all
    /// events at or before that time.
    pub fn take(replica_id: u64, fingerprint: String, traj: &Trajectory, times: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let mut states = vec![None; times.len()];
        let mut replay = traj.replay();
        for k in order {
            states[k] = Some(replay.advance_to(times[k]).clone());
        }
        ReplicaSnapshots {
            replica_id,
            fingerprint,
            times: times.to_vec(),
            states: states.into_iter().map(|s| s.expect("filled")).collect(),
        }
    }
}

/// Ensemble tables merged in replica-id order.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleTables {
    pub magnetization: Vec<MagnetizationRow>,
    pub coset_means: Vec<CosetMeanRow>,
    pub coset_pairs: Vec<CosetPairRow>,
    pub estimates: Vec<(f64, CosetMeanEstimate)>,
}

/// Merges per-replica snapshots. Rejects partials from another config,
/// duplicated replica ids, or mismatched sample times. Coset tables are
/// produced only for antisymmetric initial conditions.
pub fn aggregate_replicas(config: &ExperimentConfig, mut partials: Vec<ReplicaSnapshots>) -> Result<EnsembleTables> {
    if partials.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let fingerprint = config.fingerprint();
    if partials
        .iter()
        .any(|p| p.fingerprint != fingerprint || p.times != config.sample_times)
    {
        return Err(Error::MixedConfigs);
    }
    partials.sort_by_key(|p| p.replica_id);
    let ids: BTreeSet<u64> = partials.iter().map(|p| p.replica_id).collect();
    if ids.len() != partials.len() {
        return Err(Error::MixedConfigs);
    }

    let blocks = config.blocks();
    let mut magnetization = Vec::new();
    for p in &partials {
        for (&t, state) in p.times.iter().zip(&p.states) {
            for &block in &blocks {
                magnetization.push(MagnetizationRow {
                    replica: p.replica_id,
                    time: t,
                    n: block.label(),
                    m: block_magnetization(state, block)?.value(),
                });
            }
        }
    }

    let (mut coset_rows, mut pair_rows, mut estimates) = (Vec::new(), Vec::new(), Vec::new());
    if let Some(spec) = config.initial.antisym() {
        for (k, &t) in config.sample_times.iter().enumerate() {
            let ensemble: Vec<SpinConfig> = partials.iter().map(|p| p.states[k].clone()).collect();
            let est = coset_means(&ensemble, spec.lattice(), spec.u())?;
            coset_rows.extend(est.cosets.iter().map(|c| CosetMeanRow {
                t,
                coset_rep_x: c.rep.x,
                coset_rep_y: c.rep.y,
                c_hat: c.estimate,
                se: c.se,
                count: c.count,
            }));
            pair_rows.extend(est.pairs.iter().map(|p| CosetPairRow {
                t,
                rep_x: p.rep.x,
                rep_y: p.rep.y,
                partner_x: p.partner.x,
                partner_y: p.partner.y,
                sum: p.sum,
                se: p.se,
            }));
            estimates.push((t, est));
        }
    }
    Ok(EnsembleTables {
        magnetization,
        coset_means: coset_rows,
        coset_pairs: pair_rows,
        estimates,
    })
}
