use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::antisym::{build_from_cylinder, AntisymSpec};
use crate::error::{Error, Result};
use crate::exactref::{BETA_C, MAX_ENUMERATION_SIDE, MIN_ENUMERATION_SIDE};
use crate::harris::MAX_SIDE;
use crate::lattice::{Block, Spin, Vector2};

pub const SEED_ENV: &str = "ISINGLAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Coupling,
    Centering,
    Mesh,
    Cesaro,
    PureContrast,
    OracleRegen,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Coupling => "coupling",
            Experiment::Centering => "centering",
            Experiment::Mesh => "mesh",
            Experiment::Cesaro => "cesaro",
            Experiment::PureContrast => "pure_contrast",
            Experiment::OracleRegen => "oracle_regen",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    AllPlus,
    AllMinus,
    /// Independent fair spins, drawn per replica.
    UniformRandom,
    Antisym(AntisymSpec),
}

impl InitialCondition {
    pub fn antisym(&self) -> Option<&AntisymSpec> {
        match self {
            InitialCondition::Antisym(spec) => Some(spec),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CesaroTier {
    /// Tiny torus against exact enumeration.
    Exact,
    /// Sign symmetry of the law and flip-even proxy comparison.
    Symmetry,
}

/// A validated experiment description. Field names in the JSON form follow
/// the serialized names below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "N")]
    pub side: usize,
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub replicas: usize,
    pub master_seed: u64,
    pub initial: InitialCondition,
    pub deltas: Vec<f64>,
    pub block_sizes: Vec<usize>,
    pub sample_times: Vec<f64>,
    pub output_dir: PathBuf,
    pub translation: Vector2,
    pub tiers: Vec<CesaroTier>,
    pub oracle_side: usize,
    pub oracle_beta: f64,
    pub oracle_events: f64,
    pub batches: usize,
    pub two_point_x: Vector2,
    pub proxy_replicas: usize,
    pub pilot_replicas: usize,
}

const FIELDS: &[&str] = &[
    "experiment",
    "N",
    "beta",
    "T",
    "replicas",
    "master_seed",
    "initial",
    "deltas",
    "block_sizes",
    "sample_times",
    "output_dir",
    "translation",
    "tiers",
    "oracle_side",
    "oracle_beta",
    "oracle_events",
    "batches",
    "two_point_x",
    "proxy_replicas",
    "pilot_replicas",
];

struct Fields {
    map: Map<String, Value>,
}

impl Fields {
    fn take<T: DeserializeOwned>(&mut self, key: &str) -> Result<Option<T>> {
        match self.map.remove(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v)
                .map(Some)
                .map_err(|e| Error::config(key, e.to_string())),
        }
    }

    fn require<T: DeserializeOwned>(&mut self, key: &str) -> Result<T> {
        self.take(key)?.ok_or_else(|| Error::config(key, "missing"))
    }
}

impl ExperimentConfig {
    /// Reads a JSON config and applies the `ISINGLAB_SEED` override.
    /// Relative `antisym_file` paths resolve against the config's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut config = Self::from_json(&text, base)?;
        config.apply_seed_override(std::env::var(SEED_ENV).ok().as_deref())?;
        Ok(config)
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(Error::config("config", "expected a JSON object"));
        };
        if let Some(unknown) = map.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(Error::config(unknown.clone(), "unknown field"));
        }
        let mut f = Fields { map };

        let experiment: Experiment = f.require("experiment")?;
        let initial = match f.map.remove("initial") {
            None | Some(Value::Null) => InitialCondition::AllPlus,
            Some(v) => parse_initial(v, base_dir)?,
        };
        let beta: f64 = f.require("beta")?;
        let config = ExperimentConfig {
            experiment,
            side: f.require("N")?,
            beta,
            horizon: f.take("T")?.unwrap_or(0.0),
            replicas: f.take("replicas")?.unwrap_or(1),
            master_seed: f.require("master_seed")?,
            initial,
            deltas: f.take("deltas")?.unwrap_or_default(),
            block_sizes: f.take("block_sizes")?.unwrap_or_default(),
            sample_times: f.take("sample_times")?.unwrap_or_default(),
            output_dir: f.take("output_dir")?.unwrap_or_else(|| PathBuf::from("out")),
            translation: f.take("translation")?.unwrap_or(Vector2::new(1, 2)),
            tiers: f
                .take("tiers")?
                .unwrap_or_else(|| vec![CesaroTier::Exact, CesaroTier::Symmetry]),
            oracle_side: f.take("oracle_side")?.unwrap_or(3),
            oracle_beta: f.take("oracle_beta")?.unwrap_or(beta),
            oracle_events: f.take("oracle_events")?.unwrap_or(2e5),
            batches: f.take("batches")?.unwrap_or(50),
            two_point_x: f.take("two_point_x")?.unwrap_or(Vector2::new(1, 0)),
            proxy_replicas: f.take("proxy_replicas")?.unwrap_or(50),
            pilot_replicas: f.take("pilot_replicas")?.unwrap_or(20),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn apply_seed_override(&mut self, value: Option<&str>) -> Result<()> {
        if let Some(raw) = value {
            self.master_seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::config(SEED_ENV, format!("not an unsigned integer: {raw:?}")))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.beta) {
            return Err(Error::config("beta", "must be positive and finite"));
        }

        if self.experiment == Experiment::OracleRegen {
            if !(MIN_ENUMERATION_SIDE..=MAX_ENUMERATION_SIDE).contains(&self.side) {
                return Err(Error::config(
                    "N",
                    format!("enumeration needs {MIN_ENUMERATION_SIDE} <= N <= {MAX_ENUMERATION_SIDE}"),
                ));
            }
            return Ok(());
        }

        if self.side == 0 || self.side > MAX_SIDE {
            return Err(Error::config("N", format!("must lie in 1..={MAX_SIDE}")));
        }
        if !positive(self.horizon) {
            return Err(Error::config("T", "must be positive and finite"));
        }
        if self.replicas == 0 {
            return Err(Error::config("replicas", "must be at least 1"));
        }
        if let Some(spec) = self.initial.antisym() {
            if !spec.lattice().torus_compatible(self.side) {
                return Err(Error::config(
                    "N",
                    format!(
                        "not a multiple of the initial sublattice's minimal torus side {}",
                        spec.minimal_torus_side()
                    ),
                ));
            }
        }
        if let Some(t) = self.sample_times.iter().find(|&&t| !(t >= 0.0 && t <= self.horizon)) {
            return Err(Error::config("sample_times", format!("{t} is outside [0, T]")));
        }
        if let Some(d) = self.deltas.iter().find(|&&d| !(d > 0.0 && d <= self.horizon)) {
            return Err(Error::config("deltas", format!("{d} is outside (0, T]")));
        }
        for &n in &self.block_sizes {
            Block::Centered(n)
                .site_count(self.side)
                .map_err(|e| Error::config("block_sizes", e.to_string()))?;
        }

        let needs_antisym = |what: &str| -> Result<()> {
            if self.initial.antisym().is_none() {
                return Err(Error::config("initial", format!("{what} needs an antisymmetric initial condition")));
            }
            Ok(())
        };
        let needs_samples = || -> Result<()> {
            if self.sample_times.is_empty() {
                return Err(Error::config("sample_times", "must not be empty"));
            }
            Ok(())
        };
        match self.experiment {
            Experiment::Coupling => needs_antisym("coupling")?,
            Experiment::Centering => {
                needs_antisym("centering")?;
                needs_samples()?;
            }
            Experiment::Mesh => {
                if self.deltas.is_empty() {
                    return Err(Error::config("deltas", "must not be empty"));
                }
            }
            Experiment::Cesaro => {
                if self.tiers.is_empty() {
                    return Err(Error::config("tiers", "must not be empty"));
                }
                if self.tiers.contains(&CesaroTier::Exact) {
                    if !(MIN_ENUMERATION_SIDE..=MAX_ENUMERATION_SIDE).contains(&self.oracle_side) {
                        return Err(Error::config("oracle_side", "outside the enumerable range"));
                    }
                    if !positive(self.oracle_beta) {
                        return Err(Error::config("oracle_beta", "must be positive and finite"));
                    }
                    if !positive(self.oracle_events) {
                        return Err(Error::config("oracle_events", "must be positive and finite"));
                    }
                    if self.batches < 2 {
                        return Err(Error::config("batches", "must be at least 2"));
                    }
                }
                if self.tiers.contains(&CesaroTier::Symmetry) {
                    needs_antisym("the symmetry tier")?;
                    needs_samples()?;
                    if self.replicas < 20 {
                        return Err(Error::config("replicas", "the symmetry tier needs at least 20"));
                    }
                }
            }
            Experiment::PureContrast => {
                needs_antisym("pure_contrast")?;
                needs_samples()?;
                if !(self.beta > BETA_C) {
                    return Err(Error::config("beta", "pure_contrast needs beta above the critical point"));
                }
                if self.pilot_replicas == 0 {
                    return Err(Error::config("pilot_replicas", "must be at least 1"));
                }
            }
            Experiment::OracleRegen => unreachable!(),
        }
        Ok(())
    }

    /// The canonical JSON form, without the output location.
    pub fn fingerprint(&self) -> String {
        let mut echo = self.clone();
        echo.output_dir = PathBuf::new();
        let text = serde_json::to_string(&echo).expect("config serializes");
        // FNV-1a
        let hash = text
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        format!("{hash:016x}")
    }

    pub fn blocks(&self) -> Vec<Block> {
        let mut blocks: Vec<Block> = self.block_sizes.iter().map(|&n| Block::Centered(n)).collect();
        blocks.push(Block::Full);
        blocks
    }
}

fn parse_initial(value: Value, base_dir: &Path) -> Result<InitialCondition> {
    let err = |m: String| Error::config("initial", m);
    match value {
        Value::String(s) => match s.as_str() {
            "all_plus" => Ok(InitialCondition::AllPlus),
            "all_minus" => Ok(InitialCondition::AllMinus),
            "uniform_random" => Ok(InitialCondition::UniformRandom),
            "stripes" => Ok(InitialCondition::Antisym(AntisymSpec::stripes())),
            "checkerboard" => Ok(InitialCondition::Antisym(AntisymSpec::checkerboard())),
            other => Err(err(format!("unknown initial condition {other:?}"))),
        },
        Value::Object(map) if map.len() == 1 => {
            let (key, inner) = map.into_iter().next().expect("one entry");
            let spec = match key.as_str() {
                "antisym" => serde_json::from_value(inner).map_err(|e| err(e.to_string()))?,
                "antisym_preset" => match inner.as_str() {
                    Some("stripes") => AntisymSpec::stripes(),
                    Some("checkerboard") => AntisymSpec::checkerboard(),
                    _ => return Err(err(format!("unknown preset {inner}"))),
                },
                "antisym_file" => {
                    let rel = inner.as_str().ok_or_else(|| err("antisym_file must be a path".into()))?;
                    let path = base_dir.join(rel);
                    let text = fs::read_to_string(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text).map_err(|e| err(e.to_string()))?
                }
                "cylinder" => {
                    #[derive(Deserialize)]
                    #[serde(deny_unknown_fields)]
                    struct Cylinder {
                        pattern: Vec<([i64; 2], Spin)>,
                        #[serde(default)]
                        fill_seed: u64,
                    }
                    let c: Cylinder = serde_json::from_value(inner).map_err(|e| err(e.to_string()))?;
                    let pattern: BTreeMap<Vector2, Spin> =
                        c.pattern.into_iter().map(|(p, s)| (p.into(), s)).collect();
                    build_from_cylinder(&pattern, c.fill_seed).map_err(|e| err(e.to_string()))?
                }
                other => return Err(err(format!("unknown initial form {other:?}"))),
            };
            Ok(InitialCondition::Antisym(spec))
        }
        other => Err(err(format!("cannot interpret {other}"))),
    }
}
