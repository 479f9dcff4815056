use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::config::{CesaroTier, Experiment, ExperimentConfig};
use super::tables::{MagnetizationRow, Tables};
use crate::error::{Error, Result};
use crate::exactref::{exact_gibbs_expectation, onsager_magnetization, Observable};
use crate::lattice::Vector2;
use crate::observables::{binomial_interval_99, mean_and_se, sector_proxy, sign_symmetry_test, studentize, Sector};

pub const CENTERING_Z: f64 = 4.0;
pub const CESARO_SE: f64 = 3.0;
pub const SYMMETRY_LEVEL: f64 = 0.01;
pub const PLUS_TOLERANCE: f64 = 0.05;
pub const CENTERED_BAND: f64 = 0.1;
pub const STATIONARITY_LIMIT: f64 = 1e-10;
pub const DETAILED_BALANCE_LIMIT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub passed: bool,
    /// `null` in JSON when not finite.
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub statistic: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl PartialEq for Verdict {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.passed == other.passed
            && (self.statistic == other.statistic || (self.statistic.is_nan() && other.statistic.is_nan()))
            && self.threshold == other.threshold
            && self.relation == other.relation
    }
}

impl Verdict {
    /// Passes iff `statistic <= threshold`; `NaN` fails.
    pub fn at_most(id: &str, statistic: f64, threshold: f64) -> Self {
        Verdict {
            id: id.into(),
            passed: statistic <= threshold,
            statistic,
            threshold,
            relation: Relation::AtMost,
        }
    }

    pub fn at_least(id: &str, statistic: f64, threshold: f64) -> Self {
        Verdict {
            id: id.into(),
            passed: statistic >= threshold,
            statistic,
            threshold,
            relation: Relation::AtLeast,
        }
    }

    /// `PASS id: statistic <= threshold`.
    pub fn line(&self) -> String {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        format!(
            "{} {}: {} {op} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            short(self.statistic),
            short(self.threshold)
        )
    }

    fn and(mut self, extra: bool) -> Self {
        self.passed &= extra;
        self
    }
}

fn short(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-3..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn nan_as_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn null_as_nan<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Maximum that propagates `NaN`; `0` when empty.
fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

/// Full-torus magnetizations grouped by sample time, in time order.
fn full_by_time(rows: &[MagnetizationRow]) -> BTreeMap<u64, (f64, Vec<f64>)> {
    let mut groups: BTreeMap<u64, (f64, Vec<f64>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.n == "full") {
        groups.entry(r.time.to_bits()).or_insert((r.time, Vec::new())).1.push(r.m);
    }
    groups
}

pub type Diagnostics = BTreeMap<String, Value>;

/// Verdicts and recomputable diagnostics of an experiment, from its tables
/// alone. `run` and `verify` both go through here.
pub fn evaluate(config: &ExperimentConfig, tables: &Tables) -> Result<(Vec<Verdict>, Diagnostics)> {
    let mut verdicts = Vec::new();
    let mut diag = Diagnostics::new();
    match config.experiment {
        Experiment::Coupling => {
            let broken = tables.coupling.iter().filter(|r| !r.identical).count();
            for id in ["translation", "flip", "antisymmetric"] {
                let rows: Vec<_> = tables.coupling.iter().filter(|r| r.identity == id).collect();
                diag.insert(
                    format!("coupling.{id}"),
                    json!({
                        "replicas": rows.len(),
                        "identical": rows.iter().filter(|r| r.identical).count(),
                        "events_compared": rows.iter().map(|r| r.events_compared).sum::<usize>(),
                    }),
                );
            }
            verdicts.push(
                Verdict::at_most("coupling_identities", broken as f64, 0.0).and(
                    tables.coupling.len() == 3 * config.replicas,
                ),
            );
        }
        Experiment::Centering => {
            let pair_z = tables.coset_pairs.iter().map(|p| studentize(p.sum, p.se));
            let mut total_z = Vec::new();
            let mut totals = Vec::new();
            for (t, ms) in full_by_time(&tables.magnetization).into_values() {
                let est = mean_and_se(&ms);
                total_z.push(est.z_against(0.0));
                totals.push(json!({"t": t, "mean": est.value, "se": est.se}));
            }
            diag.insert("centering.total".into(), Value::Array(totals));
            diag.insert("centering.max_pair_z".into(), json!(worst(pair_z.clone())));
            let stat = worst(pair_z.chain(total_z.iter().copied()));
            let complete = total_z.len() == config.sample_times.len() && !tables.coset_pairs.is_empty();
            verdicts.push(Verdict::at_most("fixed_time_centering", stat, CENTERING_Z).and(complete));
        }
        Experiment::Mesh => {
            let violations = tables.mesh.iter().filter(|r| r.violated || r.max_deviation > r.bound).count()
                + tables
                    .mesh_blocks
                    .iter()
                    .filter(|r| r.violated || r.max_deviation > r.bound)
                    .count();
            verdicts.push(Verdict::at_most("mesh_violations", violations as f64, 0.0).and(!tables.mesh.is_empty()));

            let sites = (config.side * config.side) as f64;
            let mut worst_dev: f64 = 0.0;
            let mut pooled = Vec::new();
            for &delta in &config.deltas {
                let (mut rung, mut trials) = (0u64, 0u64);
                for r in tables.mesh.iter().filter(|r| r.delta == delta) {
                    if (r.k + 1) as f64 * delta <= config.horizon * (1.0 + 1e-12) {
                        rung += (r.ring_fraction * sites).round() as u64;
                        trials += sites as u64;
                    }
                }
                let p = -(-delta).exp_m1();
                let (lo, hi) = binomial_interval_99(p, trials);
                let frac = rung as f64 / trials as f64;
                let dev = (frac - p).abs() / (hi - p);
                worst_dev = worst([worst_dev, dev]);
                pooled.push(json!({"delta": delta, "pooled": frac, "expected": p, "ci99": [lo, hi], "trials": trials}));
            }
            diag.insert("mesh.ring_fraction".into(), Value::Array(pooled));
            verdicts.push(Verdict::at_most("mesh_ring_fraction", worst_dev, 1.0));
        }
        Experiment::Cesaro => {
            if config.tiers.contains(&CesaroTier::Exact) {
                let x = config.two_point_x;
                let exact = exact_gibbs_expectation(config.oracle_side, config.oracle_beta, &Observable::TwoPoint(x))?;
                let row = tables
                    .cesaro_exact
                    .iter()
                    .find(|r| Vector2::new(r.x, r.y) == x)
                    .ok_or_else(|| Error::Parse("cesaro_exact.csv has no row for two_point_x".into()))?;
                let z = studentize(row.estimate - exact, row.se);
                diag.insert(
                    "cesaro.exact".into(),
                    json!({"N": row.side, "beta": row.beta, "T": row.horizon, "estimate": row.estimate, "se": row.se, "exact": exact}),
                );
                verdicts.push(Verdict::at_most("cesaro_exact", z, CESARO_SE).and(row.exact == exact));
            }
            if config.tiers.contains(&CesaroTier::Symmetry) {
                let mut ps = Vec::new();
                let mut per_time = Vec::new();
                for (t, ms) in full_by_time(&tables.magnetization).into_values() {
                    let test = sign_symmetry_test(&ms)?;
                    ps.push(test.p_value);
                    per_time.push(json!({"t": t, "statistic": test.statistic, "p_value": test.p_value, "samples": ms.len()}));
                }
                diag.insert("cesaro.sign_symmetry".into(), Value::Array(per_time));
                let find = |s: &str| tables.two_point_proxy.iter().find(|r| r.source == s);
                if let (Some(a), Some(p)) = (find("antisym"), find("all_plus")) {
                    let se = a.se.hypot(p.se);
                    diag.insert(
                        "cesaro.flip_even_proxy".into(),
                        json!({"x": [a.x, a.y], "antisym": a.estimate, "all_plus": p.estimate, "z": studentize(a.estimate - p.estimate, se)}),
                    );
                }
                let stat = ps.iter().copied().fold(f64::INFINITY, f64::min);
                verdicts.push(
                    Verdict::at_least("sign_symmetry", stat, SYMMETRY_LEVEL).and(ps.len() == config.sample_times.len()),
                );
            }
        }
        Experiment::PureContrast => {
            let m_beta = onsager_magnetization(config.beta)?;
            let rows = |kind: &'static str| tables.pure_contrast.iter().filter(move |r| r.initial == kind);
            let plus: Vec<f64> = rows("all_plus").map(|r| r.time_average).collect();
            let plus_est = mean_and_se(&plus);
            diag.insert(
                "pure_contrast.all_plus".into(),
                json!({"mean_time_average": plus_est.value, "se": plus_est.se, "m_beta": m_beta,
                       "all_in_unit_interval": plus.iter().all(|&m| m > 0.0 && m <= 1.0)}),
            );
            verdicts.push(
                Verdict::at_most("pure_contrast_plus", (plus_est.value - m_beta).abs(), PLUS_TOLERANCE)
                    .and(!plus.is_empty()),
            );

            let eps = CENTERED_BAND * m_beta;
            let mut stat: f64 = 0.0;
            let mut all_centered = true;
            let mut per_time = Vec::new();
            for (t, ms) in full_by_time(&tables.magnetization).into_values() {
                let est = mean_and_se(&ms);
                let sector = sector_proxy(est.value, config.beta, eps)?;
                all_centered &= sector == Sector::Centered;
                stat = stat.max(est.value.abs());
                per_time.push(json!({"t": t, "mean": est.value, "se": est.se, "sector": sector.label()}));
            }
            diag.insert("pure_contrast.antisym".into(), Value::Array(per_time.clone()));
            verdicts.push(
                Verdict::at_most("pure_contrast_centered", stat, eps)
                    .and(all_centered && per_time.len() == config.sample_times.len()),
            );

            let band = rows("pilot").map(|r| r.sup_abs).fold(0.0, f64::max);
            let antisym: Vec<f64> = rows("antisym").map(|r| r.sup_abs).collect();
            let confined = antisym.iter().filter(|&&s| s <= band).count();
            diag.insert(
                "pure_contrast.confinement".into(),
                json!({"band": band, "band_rule": "max sup|M| over pilot replicas",
                       "fraction": confined as f64 / antisym.len() as f64, "replicas": antisym.len()}),
            );
        }
        Experiment::OracleRegen => {
            if !tables.generator.is_empty() {
                let s = worst(tables.generator.iter().map(|r| r.stationarity_residual));
                let d = worst(tables.generator.iter().map(|r| r.detailed_balance_residual));
                verdicts.push(Verdict::at_most("generator_stationarity", s, STATIONARITY_LIMIT));
                verdicts.push(Verdict::at_most("generator_detailed_balance", d, DETAILED_BALANCE_LIMIT));
            }
        }
    }
    Ok((verdicts, diag))
}
