use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use super::config::{CesaroTier, Experiment, ExperimentConfig, InitialCondition};
use super::replicas::{
    aggregate_replicas, fan_out, simulate, with_retry, AbortRecord, ReplicaSnapshots, ORACLE_STREAM, PILOT_STREAMS,
    PROXY_STREAMS,
};
use super::report::{Metadata, Report, TORUS_NOTE};
use super::tables::{
    CesaroExactRow, CouplingRow, MeshBlockRow, MeshRow, PureContrastRow, Tables, TwoPointProxyRow, TwoPointRow,
};
use super::verdicts::{evaluate, Diagnostics};
use crate::error::Result;
use crate::exactref::{
    exact_gibbs_expectation, generator_check, regenerate, GeneratorReport, Observable, OracleEntry, OracleFile,
    MAX_GENERATOR_SIDE,
};
use crate::harris::{check_antisymmetric_coupling, check_covariance, generate_noise, UpdateRule};
use crate::lattice::{Block, Vector2};
use crate::observables::{
    cesaro_time_average, magnetization_series, mean_and_se, mesh_audit, two_point_series, two_point_time_average,
};

pub const EVENT_LOG_FILE: &str = "events_replica0.csv";
pub const ORACLE_FILE: &str = "oracles.json";

struct Outcome {
    tables: Tables,
    extra_files: Vec<&'static str>,
    diagnostics: Diagnostics,
    aborts: Vec<AbortRecord>,
}

impl Outcome {
    fn new(tables: Tables) -> Self {
        Outcome {
            tables,
            extra_files: Vec::new(),
            diagnostics: Diagnostics::new(),
            aborts: Vec::new(),
        }
    }
}

/// Runs the configured experiment, writes its CSVs and `report.json` into
/// `config.output_dir`, and returns the report.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir)?;

    let mut outcome = match config.experiment {
        Experiment::Coupling => coupling(config, dir)?,
        Experiment::Centering => centering(config)?,
        Experiment::Mesh => mesh(config)?,
        Experiment::Cesaro => cesaro(config)?,
        Experiment::PureContrast => pure_contrast(config)?,
        Experiment::OracleRegen => oracle(config, dir)?,
    };

    let mut files: Vec<String> = outcome
        .tables
        .write(config.experiment, dir)?
        .into_iter()
        .map(String::from)
        .collect();
    files.extend(outcome.extra_files.iter().map(|f| f.to_string()));
    let (verdicts, mut diagnostics) = evaluate(config, &outcome.tables)?;
    diagnostics.append(&mut outcome.diagnostics);
    diagnostics.insert("aborts".into(), json!(outcome.aborts.len()));

    let report = Report {
        metadata: Metadata {
            config: config.clone(),
            fingerprint: config.fingerprint(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds: started.elapsed().as_secs_f64(),
            note: TORUS_NOTE.into(),
        },
        tables: files,
        verdicts,
        diagnostics,
        aborts: outcome.aborts,
    };
    report.write(dir)?;
    Ok(report)
}

fn coupling(config: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    let spec = config.initial.antisym().expect("validated");
    let initial = spec.instantiate_on_torus(config.side)?;
    let rule = UpdateRule::new(config.beta)?;
    let per_replica = fan_out(0..config.replicas as u64, |r| {
        with_retry(r, |stream| {
            let noise = generate_noise(config.master_seed, stream, config.side, config.horizon)?;
            Ok([
                check_covariance(&initial, &noise, &rule, config.translation, false)?,
                check_covariance(&initial, &noise, &rule, Vector2::ZERO, true)?,
                check_antisymmetric_coupling(&initial, &noise, &rule, spec.u())?,
            ])
        })
    })?;

    let mut out = Outcome::new(Tables::default());
    for (r, (reports, abort)) in per_replica.into_iter().enumerate() {
        out.aborts.extend(abort);
        out.tables.coupling.extend(reports.into_iter().map(|rep| CouplingRow {
            replica: r as u64,
            identity: rep.identity.name().into(),
            events_compared: rep.events_compared,
            states_compared: rep.states_compared,
            identical: rep.identical,
            first_mismatch: rep.first_mismatch,
        }));
    }

    let run = simulate(&config.initial, config.side, config.beta, config.horizon, config.master_seed, 0)?;
    run.trajectory
        .write_event_log(BufWriter::new(File::create(dir.join(EVENT_LOG_FILE))?))?;
    out.extra_files.push(EVENT_LOG_FILE);
    out.diagnostics.insert("coupling.translation_vector".into(), json!(config.translation));
    out.diagnostics.insert("coupling.u".into(), json!(spec.u()));
    Ok(out)
}

fn snapshots_of(config: &ExperimentConfig) -> Result<(Vec<ReplicaSnapshots>, Vec<AbortRecord>, Vec<crate::harris::Trajectory>)> {
    let fingerprint = config.fingerprint();
    let runs = fan_out(0..config.replicas as u64, |r| {
        simulate(&config.initial, config.side, config.beta, config.horizon, config.master_seed, r)
    })?;
    let mut snaps = Vec::with_capacity(runs.len());
    let mut aborts = Vec::new();
    let mut trajectories = Vec::with_capacity(runs.len());
    for run in runs {
        snaps.push(ReplicaSnapshots::take(
            run.stream,
            fingerprint.clone(),
            &run.trajectory,
            &config.sample_times,
        ));
        aborts.extend(run.abort);
        trajectories.push(run.trajectory);
    }
    Ok((snaps, aborts, trajectories))
}

fn centering(config: &ExperimentConfig) -> Result<Outcome> {
    let (snaps, aborts, _) = snapshots_of(config)?;
    let ens = aggregate_replicas(config, snaps)?;
    let mut out = Outcome::new(Tables {
        magnetization: ens.magnetization,
        coset_means: ens.coset_means,
        coset_pairs: ens.coset_pairs,
        ..Tables::default()
    });
    out.aborts = aborts;
    let weighted: Vec<_> = ens
        .estimates
        .iter()
        .map(|(t, e)| json!({"t": t, "weighted_total": e.weighted_total(), "cosets": e.cosets.len()}))
        .collect();
    out.diagnostics.insert("centering.coset_decomposition".into(), json!(weighted));
    Ok(out)
}

fn mesh(config: &ExperimentConfig) -> Result<Outcome> {
    let per_replica = fan_out(0..config.replicas as u64, |r| {
        let run = simulate(&config.initial, config.side, config.beta, config.horizon, config.master_seed, r)?;
        let mut full = Vec::new();
        let mut blocks = Vec::new();
        for &delta in &config.deltas {
            for rec in mesh_audit(&run.trajectory, delta, Block::Full)? {
                full.push(MeshRow {
                    replica: r,
                    delta,
                    k: rec.k,
                    ring_fraction: rec.ring_fraction,
                    max_deviation: rec.max_deviation,
                    bound: rec.bound,
                    violated: rec.violated,
                });
            }
            for &n in &config.block_sizes {
                for rec in mesh_audit(&run.trajectory, delta, Block::Centered(n))? {
                    blocks.push(MeshBlockRow {
                        replica: r,
                        delta,
                        n,
                        k: rec.k,
                        ring_fraction: rec.ring_fraction,
                        max_deviation: rec.max_deviation,
                        bound: rec.bound,
                        violated: rec.violated,
                    });
                }
            }
        }
        Ok((full, blocks, run.abort))
    })?;
    let mut out = Outcome::new(Tables::default());
    for (full, blocks, abort) in per_replica {
        out.tables.mesh.extend(full);
        out.tables.mesh_blocks.extend(blocks);
        out.aborts.extend(abort);
    }
    Ok(out)
}

fn cesaro(config: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::new(Tables::default());
    let x = config.two_point_x;

    if config.tiers.contains(&CesaroTier::Exact) {
        let side = config.oracle_side;
        let horizon = config.oracle_events / (side * side) as f64;
        let run = simulate(
            &InitialCondition::AllPlus,
            side,
            config.oracle_beta,
            horizon,
            config.master_seed,
            ORACLE_STREAM,
        )?;
        out.aborts.extend(run.abort);
        let est = two_point_time_average(&run.trajectory, x, config.batches)?;
        let exact = exact_gibbs_expectation(side, config.oracle_beta, &Observable::TwoPoint(x))?;
        out.tables.two_point.push(TwoPointRow {
            x: x.x,
            y: x.y,
            estimate: est.value,
            se: est.se,
        });
        out.tables.cesaro_exact.push(CesaroExactRow {
            side,
            beta: config.oracle_beta,
            horizon,
            batches: config.batches,
            x: x.x,
            y: x.y,
            estimate: est.value,
            se: est.se,
            exact,
        });
        out.diagnostics
            .insert("cesaro.exact.events".into(), json!(run.trajectory.events().len()));
    }

    if config.tiers.contains(&CesaroTier::Symmetry) {
        let (snaps, aborts, trajectories) = snapshots_of(config)?;
        out.aborts.extend(aborts);
        out.tables.magnetization = aggregate_replicas(config, snaps)?.magnetization;

        let time_average = |traj: &crate::harris::Trajectory| cesaro_time_average(&two_point_series(traj, x), config.horizon);
        let antisym: Vec<f64> = trajectories.iter().map(time_average).collect::<Result<_>>()?;
        let cesaro_m: Vec<f64> = trajectories
            .iter()
            .map(|t| cesaro_time_average(&magnetization_series(t, Block::Full)?, config.horizon))
            .collect::<Result<_>>()?;
        drop(trajectories);
        let proxy = fan_out(0..config.proxy_replicas as u64, |r| {
            let run = simulate(
                &InitialCondition::AllPlus,
                config.side,
                config.beta,
                config.horizon,
                config.master_seed,
                PROXY_STREAMS + r,
            )?;
            Ok((time_average(&run.trajectory)?, run.abort))
        })?;
        let mut plus = Vec::new();
        for (v, abort) in proxy {
            plus.push(v);
            out.aborts.extend(abort);
        }
        for (source, values) in [("antisym", &antisym), ("all_plus", &plus)] {
            if values.is_empty() {
                continue;
            }
            let est = mean_and_se(values);
            out.tables.two_point_proxy.push(TwoPointProxyRow {
                source: source.into(),
                x: x.x,
                y: x.y,
                estimate: est.value,
                se: est.se,
            });
        }
        let m = mean_and_se(&cesaro_m);
        out.diagnostics
            .insert("cesaro.time_averaged_magnetization".into(), json!({"mean": m.value, "se": m.se}));
    }
    Ok(out)
}

fn pure_contrast(config: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::new(Tables::default());
    let (snaps, aborts, trajectories) = snapshots_of(config)?;
    out.aborts.extend(aborts);
    out.tables.magnetization = aggregate_replicas(config, snaps)?.magnetization;

    let summarize = |traj: &crate::harris::Trajectory| -> Result<(f64, f64)> {
        let series = magnetization_series(traj, Block::Full)?;
        Ok((cesaro_time_average(&series, config.horizon)?, series.sup_abs()))
    };
    for (r, traj) in trajectories.iter().enumerate() {
        let (time_average, sup_abs) = summarize(traj)?;
        out.tables.pure_contrast.push(PureContrastRow {
            replica: r as u64,
            initial: "antisym".into(),
            time_average,
            sup_abs,
        });
    }
    drop(trajectories);

    let families = [
        ("all_plus", &InitialCondition::AllPlus, PROXY_STREAMS, config.proxy_replicas),
        ("pilot", &config.initial, PILOT_STREAMS, config.pilot_replicas),
    ];
    for (label, initial, base, count) in families {
        let rows = fan_out(0..count as u64, |r| {
            let run = simulate(initial, config.side, config.beta, config.horizon, config.master_seed, base + r)?;
            Ok((summarize(&run.trajectory)?, run.abort))
        })?;
        for (r, ((time_average, sup_abs), abort)) in rows.into_iter().enumerate() {
            out.aborts.extend(abort);
            out.tables.pure_contrast.push(PureContrastRow {
                replica: r as u64,
                initial: label.into(),
                time_average,
                sup_abs,
            });
        }
    }
    Ok(out)
}

fn oracle(config: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    let (entries, generator) = oracle_regen(config.side, config.beta, &dir.join(ORACLE_FILE))?;
    let mut out = Outcome::new(Tables::default());
    if let Some(g) = generator {
        out.tables.generator.push(super::tables::GeneratorRow {
            side: g.side,
            beta: g.beta,
            states: g.states,
            stationarity_residual: g.stationarity_residual,
            detailed_balance_residual: g.detailed_balance_residual,
            rate_ratio_error: g.rate_ratio_error,
        });
    }
    out.extra_files.push(ORACLE_FILE);
    out.diagnostics.insert("oracle.entries".into(), json!(entries));
    Ok(out)
}

/// Enumerates the standard observables at `(side, beta)` and merges them
/// into the pin file at `path`, creating it if needed. For sides small
/// enough, also checks the generator against the enumerated weights.
pub fn oracle_regen(side: usize, beta: f64, path: &Path) -> Result<(Vec<OracleEntry>, Option<GeneratorReport>)> {
    let fresh = regenerate(side, beta)?;
    let mut file = if path.exists() {
        OracleFile::load(path)?
    } else {
        OracleFile::default()
    };
    file.merge(fresh.clone());
    file.save(path)?;
    let generator = if side <= MAX_GENERATOR_SIDE {
        Some(generator_check(side, beta)?)
    } else {
        None
    };
    Ok((fresh, generator))
}
