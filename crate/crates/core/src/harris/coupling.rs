use serde::{Deserialize, Serialize};

use super::evolve::{evolve, Trajectory};
use super::noise::{transform_noise, NoiseStream};
use super::rule::UpdateRule;
use crate::error::{Error, Result};
use crate::lattice::{SpinConfig, Vector2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingIdentity {
    Translation,
    Flip,
    Antisymmetric,
}

impl CouplingIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            CouplingIdentity::Translation => "translation",
            CouplingIdentity::Flip => "flip",
            CouplingIdentity::Antisymmetric => "antisymmetric",
        }
    }
}

/// Outcome of comparing a coupled pair of trajectories event by event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub identity: CouplingIdentity,
    pub events_compared: usize,
    pub states_compared: usize,
    pub identical: bool,
    /// Index of the first event at which the pair disagrees.
    pub first_mismatch: Option<usize>,
}

/// `evolve(g eta, g H)` against `g evolve(eta, H)` where `g` is translation
/// by `v` composed with the flip when `flip` is set. On the noise, the flip
/// acts by reflecting marks.
pub fn check_covariance(
    initial: &SpinConfig,
    noise: &NoiseStream,
    rule: &UpdateRule,
    translation: Vector2,
    flip: bool,
) -> Result<CouplingReport> {
    let identity = if flip {
        CouplingIdentity::Flip
    } else {
        CouplingIdentity::Translation
    };
    let base = evolve(initial, noise, rule)?;
    let moved_initial = initial.apply_symmetry(translation, flip);
    let moved = evolve(&moved_initial, &transform_noise(noise, translation, flip), rule)?;
    Ok(compare(identity, &base, &moved, translation, flip))
}

/// For `eta` with `tau_u eta = Theta eta`: the path driven by the
/// translated, mark-reflected noise from the *same* initial state is the
/// flip-translate of the original path, `Phi(eta, tau_u R H) = Theta tau_u Phi(eta, H)`.
/// Since `tau_u R H` has the law of `H`, this couples `tau_u sigma_t` with
/// `Theta sigma_t` in law.
pub fn check_antisymmetric_coupling(
    initial: &SpinConfig,
    noise: &NoiseStream,
    rule: &UpdateRule,
    u: Vector2,
) -> Result<CouplingReport> {
    if initial.translated(u) != initial.flipped() {
        return Err(Error::InvalidAntisym(format!(
            "initial configuration is not flipped by translation {u}"
        )));
    }
    let base = evolve(initial, noise, rule)?;
    let coupled = evolve(initial, &transform_noise(noise, u, true), rule)?;
    Ok(compare(CouplingIdentity::Antisymmetric, &base, &coupled, u, true))
}

fn compare(
    identity: CouplingIdentity,
    base: &Trajectory,
    moved: &Trajectory,
    translation: Vector2,
    flip: bool,
) -> CouplingReport {
    let n = base.side();
    let v = translation.reduce(n);
    let sign: i8 = if flip { -1 } else { 1 };
    let map_site = |s: usize| {
        let (x, y) = (s % n, s / n);
        ((y + v.y as usize) % n) * n + (x + v.x as usize) % n
    };

    let mut report = CouplingReport {
        identity,
        events_compared: 0,
        states_compared: 0,
        identical: true,
        first_mismatch: None,
    };
    let mismatch = |report: &mut CouplingReport, k: usize| {
        report.identical = false;
        report.first_mismatch = Some(k);
    };

    if moved.initial() != &base.initial().apply_symmetry(translation, flip) {
        mismatch(&mut report, 0);
        return report;
    }
    report.states_compared = 1;
    if base.events().len() != moved.events().len() {
        report.identical = false;
    }

    let mut a = base.replay();
    let mut b = moved.replay();
    let mut k = 0;
    while let Some((e, s)) = a.step() {
        let (ea, sa) = (*e, s.apply_symmetry(translation, flip));
        let Some((eb, sb)) = b.step() else {
            mismatch(&mut report, k);
            break;
        };
        let expected_mark = if flip { 1.0 - ea.mark } else { ea.mark };
        let same_event = ea.time.to_bits() == eb.time.to_bits()
            && map_site(ea.site) == eb.site
            && sign * ea.old == eb.old
            && sign * ea.new == eb.new
            && sign * ea.field == eb.field
            && expected_mark.to_bits() == eb.mark.to_bits();
        report.events_compared += 1;
        report.states_compared += 1;
        if !same_event || &sa != sb {
            mismatch(&mut report, k);
            break;
        }
        k += 1;
    }
    if report.identical && report.events_compared != moved.events().len() {
        mismatch(&mut report, k);
    }
    report
}
