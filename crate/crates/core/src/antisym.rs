//! Periodic antisymmetric configurations: `L`-periodic spin fields whose
//! translate by a flip vector `u` equals their global spin flip.
//!
//! [`build_from_cylinder`] realizes any finite pattern inside such a
//! configuration, which is what makes this family dense among all
//! configurations.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Spin, SpinConfig, SublatticeSpec, Vector2};

/// Sublattice, flip vector and one spin per coset of `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAntisym", into = "RawAntisym")]
pub struct AntisymSpec {
    lattice: SublatticeSpec,
    u: Vector2,
    /// Keyed by canonical coset representative.
    cells: BTreeMap<Vector2, Spin>,
}

#[derive(Serialize, Deserialize)]
struct RawAntisym {
    basis: [[i64; 2]; 2],
    u: [i64; 2],
    cell_values: Vec<([i64; 2], Spin)>,
}

impl TryFrom<RawAntisym> for AntisymSpec {
    type Error = Error;
    fn try_from(raw: RawAntisym) -> Result<Self> {
        let lattice = SublatticeSpec::new(raw.basis)?;
        AntisymSpec::new(
            lattice,
            raw.u.into(),
            raw.cell_values.into_iter().map(|(r, s)| (r.into(), s)),
        )
    }
}

impl From<AntisymSpec> for RawAntisym {
    fn from(spec: AntisymSpec) -> Self {
        RawAntisym {
            basis: spec.lattice.basis(),
            u: spec.u.into(),
            cell_values: spec.cells.iter().map(|(&r, &s)| (r.into(), s)).collect(),
        }
    }
}

impl AntisymSpec {
    /// Validates the cell assignment: every coset valued exactly once,
    /// `u` outside `L`, `2u` inside, and opposite values on paired cosets.
    pub fn new(
        lattice: SublatticeSpec,
        u: Vector2,
        cell_values: impl IntoIterator<Item = (Vector2, Spin)>,
    ) -> Result<Self> {
        if lattice.contains(u) {
            return Err(Error::InvalidAntisym(format!("u = {u} lies in L")));
        }
        if !lattice.contains(2 * u) {
            return Err(Error::InvalidAntisym(format!("2u = {} is not in L", 2 * u)));
        }
        let mut cells = BTreeMap::new();
        for (point, spin) in cell_values {
            if spin != 1 && spin != -1 {
                return Err(Error::InvalidSpin(spin as i64));
            }
            let rep = lattice.coset_rep(point);
            if let Some(prev) = cells.insert(rep, spin) {
                if prev != spin {
                    return Err(Error::InvalidAntisym(format!(
                        "conflicting values for coset {rep}"
                    )));
                }
            }
        }
        if cells.len() != lattice.index() {
            return Err(Error::InvalidAntisym(format!(
                "{} of {} cosets assigned",
                cells.len(),
                lattice.index()
            )));
        }
        for (&rep, &spin) in &cells {
            let partner = lattice.coset_rep(rep + u);
            if cells[&partner] != -spin {
                return Err(Error::InvalidAntisym(format!(
                    "cosets {rep} and {partner} are not opposite"
                )));
            }
        }
        Ok(AntisymSpec { lattice, u, cells })
    }

    /// Vertical stripes: `L = 2Z x Z`, `u = (1, 0)`, `+1` on even columns.
    pub fn stripes() -> Self {
        let lattice = SublatticeSpec::rectangular(2, 1).expect("nonsingular");
        AntisymSpec::new(
            lattice,
            Vector2::new(1, 0),
            [(Vector2::new(0, 0), 1), (Vector2::new(1, 0), -1)],
        )
        .expect("valid preset")
    }

    /// Checkerboard: `L = {x + y even}`, `u = (1, 0)`, `+1` at the origin.
    pub fn checkerboard() -> Self {
        let lattice = SublatticeSpec::new([[1, 1], [-1, 1]]).expect("nonsingular");
        AntisymSpec::new(
            lattice,
            Vector2::new(1, 0),
            [(Vector2::new(0, 0), 1), (Vector2::new(1, 0), -1)],
        )
        .expect("valid preset")
    }

    pub fn lattice(&self) -> &SublatticeSpec {
        &self.lattice
    }

    pub fn u(&self) -> Vector2 {
        self.u
    }

    pub fn cell_values(&self) -> impl Iterator<Item = (Vector2, Spin)> + '_ {
        self.cells.iter().map(|(&r, &s)| (r, s))
    }

    pub fn value_at(&self, point: Vector2) -> Spin {
        self.cells[&self.lattice.coset_rep(point)]
    }

    /// Sum of the cell values over one fundamental domain; always zero.
    pub fn fundamental_domain_sum(&self) -> i64 {
        self.cells.values().map(|&s| s as i64).sum()
    }

    pub fn minimal_torus_side(&self) -> usize {
        self.lattice.minimal_torus_side()
    }

    pub fn instantiate_on_torus(&self, side: usize) -> Result<SpinConfig> {
        self.lattice.check_torus(side)?;
        SpinConfig::from_fn(side, |x, y| self.value_at(Vector2::new(x as i64, y as i64)))
    }

    /// The spec of the globally flipped configuration.
    pub fn flipped(&self) -> AntisymSpec {
        AntisymSpec {
            lattice: self.lattice.clone(),
            u: self.u,
            cells: self.cells.iter().map(|(&r, &s)| (r, -s)).collect(),
        }
    }
}

pub fn instantiate_on_torus(spec: &AntisymSpec, side: usize) -> Result<SpinConfig> {
    spec.instantiate_on_torus(side)
}

/// True iff `config` is invariant under both basis translations of `L` and
/// its `u`-translate equals its flip. Accepts any `u`, including `2u ∉ L`.
pub fn verify_antisymmetric(config: &SpinConfig, lattice: &SublatticeSpec, u: Vector2) -> Result<bool> {
    lattice.check_torus(config.side())?;
    for l in lattice.columns() {
        if &config.translated(l) != config {
            return Ok(false);
        }
    }
    Ok(config.translated(u) == config.flipped())
}

/// Coset fills drawn from a seeded stream, one draw per free pair in
/// representative order.
pub fn seeded_fill(seed: u64) -> impl FnMut(Vector2) -> Spin {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    move |_| if rng.random::<bool>() { 1 } else { -1 }
}

/// Builds an antisymmetric periodic spec agreeing with `pattern` on its
/// support. Free coset pairs are filled pseudorandomly from `fill_seed`.
pub fn build_from_cylinder(pattern: &BTreeMap<Vector2, Spin>, fill_seed: u64) -> Result<AntisymSpec> {
    build_from_cylinder_with(pattern, seeded_fill(fill_seed))
}

/// As [`build_from_cylinder`], with an explicit fill rule. `fill` is called
/// once per free pair `{a, a + u}`, with whichever of the two comes first in
/// [`SublatticeSpec::representatives`] order.
pub fn build_from_cylinder_with(
    pattern: &BTreeMap<Vector2, Spin>,
    mut fill: impl FnMut(Vector2) -> Spin,
) -> Result<AntisymSpec> {
    if pattern.is_empty() {
        return Err(Error::EmptyCylinder);
    }
    if let Some(&bad) = pattern.values().find(|&&s| s != 1 && s != -1) {
        return Err(Error::InvalidSpin(bad as i64));
    }
    let support: Vec<Vector2> = pattern.keys().copied().collect();
    let diffs: BTreeSet<Vector2> = support
        .iter()
        .flat_map(|&a| support.iter().map(move |&b| a - b))
        .collect();

    // u = (k, 0) with no nonzero horizontal difference divisible by k. This
    // keeps every multiple of u, hence every element of L and u + L on the
    // x-axis, out of F - F.
    let horizontal: Vec<i64> = diffs
        .iter()
        .filter(|d| d.y == 0 && d.x != 0)
        .map(|d| d.x.abs())
        .collect();
    let k = (1..)
        .find(|&k| horizontal.iter().all(|&dx| dx % k != 0))
        .expect("k larger than every difference works");
    let u = Vector2::new(k, 0);

    // v = (0, m), smallest m keeping L \ {0} and u + L away from F - F.
    let mut m = 1;
    let lattice = loop {
        let lattice = SublatticeSpec::rectangular(2 * k, m)?;
        let clash = diffs
            .iter()
            .any(|&d| (d != Vector2::ZERO && lattice.contains(d)) || lattice.contains(d - u));
        if !clash {
            break lattice;
        }
        m += 1;
    };

    let mut cells: BTreeMap<Vector2, Spin> = BTreeMap::new();
    for (&point, &spin) in pattern {
        let a = lattice.coset_rep(point);
        let b = lattice.coset_rep(point + u);
        for (rep, value) in [(a, spin), (b, -spin)] {
            let prev = cells.insert(rep, value);
            debug_assert!(prev.is_none() || prev == Some(value));
        }
    }
    for rep in lattice.representatives() {
        if cells.contains_key(&rep) {
            continue;
        }
        let partner = lattice.coset_rep(rep + u);
        let s = fill(rep);
        let s = if s < 0 { -1 } else { 1 };
        cells.insert(rep, s);
        cells.insert(partner, -s);
    }
    AntisymSpec::new(lattice, u, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pattern(points: &[((i64, i64), Spin)]) -> BTreeMap<Vector2, Spin> {
        points.iter().map(|&(p, s)| (p.into(), s)).collect()
    }

    #[test]
    fn verify_examples() {
        let stripes = SpinConfig::stripes(8).unwrap();
        let l = SublatticeSpec::rectangular(2, 1).unwrap();
        assert!(verify_antisymmetric(&stripes, &l, Vector2::new(1, 0)).unwrap());

        let plus = SpinConfig::all_plus(8).unwrap();
        assert!(!verify_antisymmetric(&plus, &l, Vector2::new(1, 0)).unwrap());
        assert!(!verify_antisymmetric(&plus, &l, Vector2::new(0, 0)).unwrap());

        let cb = SpinConfig::checkerboard(6).unwrap();
        let lcb = SublatticeSpec::new([[1, 1], [-1, 1]]).unwrap();
        assert!(verify_antisymmetric(&cb, &lcb, Vector2::new(1, 0)).unwrap());
        assert!(verify_antisymmetric(&cb, &lcb, Vector2::new(0, 1)).unwrap());
        assert!(!verify_antisymmetric(&cb, &lcb, Vector2::new(1, 1)).unwrap());

        let l46 = SublatticeSpec::rectangular(4, 6).unwrap();
        assert!(verify_antisymmetric(&SpinConfig::stripes(8).unwrap(), &l46, Vector2::new(1, 0)).is_err());
    }

    #[test]
    fn verifier_accepts_odd_cycles() {
        // L = 3Z x Z with u = (1, 0): tau_u has a 3-cycle, so only the zero
        // configuration could satisfy it; no spin field does.
        let l = SublatticeSpec::rectangular(3, 1).unwrap();
        let c = SpinConfig::from_fn(6, |x, _| if x % 3 == 0 { 1 } else { -1 }).unwrap();
        assert!(!verify_antisymmetric(&c, &l, Vector2::new(1, 0)).unwrap());
        // With u in a 2-cycle of the larger quotient 6Z x Z it works again.
        let l6 = SublatticeSpec::rectangular(6, 1).unwrap();
        let c6 = SpinConfig::from_fn(6, |x, _| if x % 6 < 3 { 1 } else { -1 }).unwrap();
        assert!(verify_antisymmetric(&c6, &l6, Vector2::new(3, 0)).unwrap());
    }

    #[test]
    fn presets_instantiate() {
        let s = AntisymSpec::stripes().instantiate_on_torus(8).unwrap();
        assert_eq!(s, SpinConfig::stripes(8).unwrap());
        assert_eq!(s.total(), 0);
        let c = AntisymSpec::checkerboard().instantiate_on_torus(6).unwrap();
        assert_eq!(c, SpinConfig::checkerboard(6).unwrap());
        assert_eq!(c.total(), 0);
        assert!(AntisymSpec::stripes().instantiate_on_torus(5).is_err());
    }

    #[test]
    fn constructor_rejects_bad_specs() {
        let l = SublatticeSpec::rectangular(2, 1).unwrap();
        let same = [(Vector2::new(0, 0), 1), (Vector2::new(1, 0), 1)];
        assert!(AntisymSpec::new(l.clone(), Vector2::new(1, 0), same).is_err());
        let ok = [(Vector2::new(0, 0), 1), (Vector2::new(1, 0), -1)];
        assert!(AntisymSpec::new(l.clone(), Vector2::new(2, 0), ok).is_err());
        assert!(AntisymSpec::new(l.clone(), Vector2::new(1, 0), [(Vector2::new(0, 0), 1)]).is_err());
        let l3 = SublatticeSpec::rectangular(3, 1).unwrap();
        assert!(AntisymSpec::new(l3, Vector2::new(1, 0), ok).is_err());
    }

    #[test]
    fn singleton_builds_stripes() {
        let spec = build_from_cylinder(&pattern(&[((0, 0), 1)]), 7).unwrap();
        assert_eq!(spec.u(), Vector2::new(1, 0));
        assert_eq!(spec.lattice(), &SublatticeSpec::rectangular(2, 1).unwrap());
        let c = spec.instantiate_on_torus(4).unwrap();
        assert_eq!(c, SpinConfig::stripes(4).unwrap());
    }

    #[test]
    fn adjacent_pair() {
        let p = pattern(&[((0, 0), 1), ((1, 0), 1)]);
        let spec = build_from_cylinder(&p, 3).unwrap();
        assert_eq!(spec.u(), Vector2::new(2, 0));
        let side = 2 * spec.minimal_torus_side();
        let c = spec.instantiate_on_torus(side).unwrap();
        assert!(verify_antisymmetric(&c, spec.lattice(), spec.u()).unwrap());
        assert_eq!((c.get(0, 0), c.get(1, 0)), (1, 1));
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn horizontal_multiples_do_not_stall() {
        let p = pattern(&[((0, 0), 1), ((2, 0), -1), ((6, 0), 1)]);
        let spec = build_from_cylinder(&p, 0).unwrap();
        assert_eq!(spec.u(), Vector2::new(5, 0));
        let c = spec.instantiate_on_torus(spec.minimal_torus_side()).unwrap();
        for (&pt, &s) in &p {
            assert_eq!(c.get_wrapped(pt), s);
        }
    }

    #[test]
    fn empty_cylinder() {
        assert!(matches!(build_from_cylinder(&BTreeMap::new(), 0), Err(Error::EmptyCylinder)));
    }

    #[test]
    fn serde_record() {
        let spec = AntisymSpec::stripes();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"basis":[[2,0],[0,1]],"u":[1,0],"cell_values":[[[0,0],1],[[1,0],-1]]}"#);
        let back: AntisymSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let broken = r#"{"basis":[[2,0],[0,1]],"u":[1,0],"cell_values":[[[0,0],1],[[1,0],1]]}"#;
        assert!(serde_json::from_str::<AntisymSpec>(broken).is_err());
    }

    fn arb_pattern() -> impl Strategy<Value = BTreeMap<Vector2, Spin>> {
        prop::collection::btree_map(
            (-5i64..=5, -5i64..=5).prop_map(Vector2::from),
            prop::bool::ANY.prop_map(|b| if b { 1 } else { -1 }),
            1..=6,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn built_specs_are_antisymmetric(p in arb_pattern(), seed: u64) {
            let spec = build_from_cylinder(&p, seed).unwrap();
            prop_assert_eq!(spec.fundamental_domain_sum(), 0);
            let m = spec.minimal_torus_side();
            for side in [m, 2 * m, 3 * m] {
                let c = spec.instantiate_on_torus(side).unwrap();
                prop_assert!(verify_antisymmetric(&c, spec.lattice(), spec.u()).unwrap());
                prop_assert_eq!(c.total(), 0);
                for (&pt, &s) in &p {
                    prop_assert_eq!(c.get_wrapped(pt), s);
                }
            }
            // L-periodicity: every fundamental-domain translate repeats.
            let c = spec.instantiate_on_torus(2 * m).unwrap();
            for l in spec.lattice().columns() {
                for y in 0..2 * m as i64 {
                    for x in 0..2 * m as i64 {
                        let v = Vector2::new(x, y);
                        prop_assert_eq!(c.get_wrapped(v), c.get_wrapped(v + l));
                    }
                }
            }
        }

        #[test]
        fn construction_is_flip_equivariant(p in arb_pattern(), seed: u64) {
            let spec = build_from_cylinder(&p, seed).unwrap();
            let negated: BTreeMap<_, _> = p.iter().map(|(&k, &s)| (k, -s)).collect();
            let mut fill = seeded_fill(seed);
            let flipped = build_from_cylinder_with(&negated, |r| -fill(r)).unwrap();
            prop_assert_eq!(&flipped, &spec.flipped());
            let side = spec.minimal_torus_side();
            prop_assert_eq!(
                flipped.instantiate_on_torus(side).unwrap(),
                spec.instantiate_on_torus(side).unwrap().flipped()
            );
        }
    }
}
