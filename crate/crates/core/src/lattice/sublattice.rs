use serde::{Deserialize, Serialize};

use super::config::Vector2;
use crate::error::{Error, Result};

/// A full-rank sublattice `L` of Z^2, generated by the columns of `basis`.
///
/// `basis` is stored row-major: column `k` is `(basis[0][k], basis[1][k])`.
/// Alongside the basis we keep a triangular (Hermite) basis
/// `{(a, 0), (c, d)}` with `a, d > 0` and `0 <= c < a`, which gives every
/// coset of Z^2 / L a canonical representative in `[0, a) x [0, d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSublattice", into = "RawSublattice")]
pub struct SublatticeSpec {
    basis: [[i64; 2]; 2],
    hnf_a: i64,
    hnf_c: i64,
    hnf_d: i64,
}

#[derive(Serialize, Deserialize)]
struct RawSublattice {
    basis: [[i64; 2]; 2],
}

impl TryFrom<RawSublattice> for SublatticeSpec {
    type Error = Error;
    fn try_from(raw: RawSublattice) -> Result<Self> {
        SublatticeSpec::new(raw.basis)
    }
}

impl From<SublatticeSpec> for RawSublattice {
    fn from(s: SublatticeSpec) -> Self {
        RawSublattice { basis: s.basis }
    }
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = extended_gcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    extended_gcd(a, b).0
}

impl SublatticeSpec {
    pub fn new(basis: [[i64; 2]; 2]) -> Result<Self> {
        let det = basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0];
        if det == 0 {
            return Err(Error::SingularBasis);
        }
        let (p1, q1) = (basis[0][0], basis[1][0]);
        let (p2, q2) = (basis[0][1], basis[1][1]);
        // Combine the columns so the second has y-component gcd(q1, q2) and the
        // first lies on the x-axis.
        let (g, s, t) = extended_gcd(q1, q2);
        let (c, d) = if g == 0 {
            unreachable!("nonzero determinant implies a nonzero y-component")
        } else {
            (s * p1 + t * p2, g)
        };
        let a = ((q2 / g) * p1 - (q1 / g) * p2).abs();
        debug_assert_eq!(a * d, det.abs());
        Ok(SublatticeSpec {
            basis,
            hnf_a: a,
            hnf_c: c.rem_euclid(a),
            hnf_d: d,
        })
    }

    /// `a Z x b Z`.
    pub fn rectangular(a: i64, b: i64) -> Result<Self> {
        Self::new([[a, 0], [0, b]])
    }

    pub fn basis(&self) -> [[i64; 2]; 2] {
        self.basis
    }

    pub fn columns(&self) -> [Vector2; 2] {
        [
            Vector2::new(self.basis[0][0], self.basis[1][0]),
            Vector2::new(self.basis[0][1], self.basis[1][1]),
        ]
    }

    pub fn det(&self) -> i64 {
        self.basis[0][0] * self.basis[1][1] - self.basis[0][1] * self.basis[1][0]
    }

    /// Number of cosets, `|det B|`.
    pub fn index(&self) -> usize {
        self.det().unsigned_abs() as usize
    }

    /// Membership by Cramer's rule: `v in L` iff `adj(B) v = 0 (mod det B)`.
    pub fn contains(&self, v: Vector2) -> bool {
        let det = self.det();
        let [[b00, b01], [b10, b11]] = self.basis;
        let k0 = b11 * v.x - b01 * v.y;
        let k1 = -b10 * v.x + b00 * v.y;
        k0 % det == 0 && k1 % det == 0
    }

    /// Canonical coset representative of `v + L`.
    pub fn coset_rep(&self, v: Vector2) -> Vector2 {
        let j = v.y.rem_euclid(self.hnf_d);
        let q = (v.y - j) / self.hnf_d;
        let i = (v.x - q * self.hnf_c).rem_euclid(self.hnf_a);
        Vector2::new(i, j)
    }

    /// All canonical representatives, in lexicographic `(y, x)` order.
    pub fn representatives(&self) -> Vec<Vector2> {
        let mut reps = Vec::with_capacity(self.index());
        for j in 0..self.hnf_d {
            for i in 0..self.hnf_a {
                reps.push(Vector2::new(i, j));
            }
        }
        reps
    }

    /// Position of a canonical representative in [`representatives`](Self::representatives).
    pub fn rep_ordinal(&self, rep: Vector2) -> usize {
        (rep.y * self.hnf_a + rep.x) as usize
    }

    /// Smallest `N` with `N e_1, N e_2 in L`. Exactly the multiples of this
    /// value are torus-compatible.
    pub fn minimal_torus_side(&self) -> usize {
        let det = self.det().abs();
        let [[b00, b01], [b10, b11]] = self.basis;
        let g = [b11, b01, b10, b00].iter().fold(det, |acc, &e| gcd(acc, e));
        (det / g) as usize
    }

    pub fn torus_compatible(&self, side: usize) -> bool {
        side > 0 && side.is_multiple_of(self.minimal_torus_side())
    }

    pub fn check_torus(&self, side: usize) -> Result<()> {
        if self.torus_compatible(side) {
            Ok(())
        } else {
            Err(Error::IncompatibleTorus {
                side,
                minimal: self.minimal_torus_side(),
            })
        }
    }

    pub fn enumerate_cosets(&self, side: usize) -> Result<CosetPartition> {
        self.check_torus(side)?;
        let reps = self.representatives();
        let mut cosets: Vec<Coset> = reps
            .iter()
            .map(|&rep| Coset {
                rep,
                sites: Vec::new(),
            })
            .collect();
        let mut site_coset = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                let rep = self.coset_rep(Vector2::new(x as i64, y as i64));
                let k = self.rep_ordinal(rep);
                cosets[k].sites.push(y * side + x);
                site_coset.push(k);
            }
        }
        Ok(CosetPartition {
            side,
            cosets,
            site_coset,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coset {
    pub rep: Vector2,
    /// Site indices `y * N + x`, increasing.
    pub sites: Vec<usize>,
}

/// The cosets of `L` restricted to a compatible torus.
#[derive(Clone, Debug)]
pub struct CosetPartition {
    side: usize,
    cosets: Vec<Coset>,
    site_coset: Vec<usize>,
}

impl CosetPartition {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    /// Ordinal of the coset containing a site index.
    pub fn coset_of(&self, site: usize) -> usize {
        self.site_coset[site]
    }
}

pub fn enumerate_cosets(lattice: &SublatticeSpec, side: usize) -> Result<CosetPartition> {
    lattice.enumerate_cosets(side)
}

pub fn minimal_torus_side(lattice: &SublatticeSpec) -> usize {
    lattice.minimal_torus_side()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force membership: search integer coefficients directly.
    fn in_lattice_brute(l: &SublatticeSpec, v: Vector2, bound: i64) -> bool {
        let [c0, c1] = l.columns();
        (-bound..=bound).any(|k0| (-bound..=bound).any(|k1| k0 * c0 + k1 * c1 == v))
    }

    #[test]
    fn coset_examples() {
        let l = SublatticeSpec::new([[2, 0], [0, 1]]).unwrap();
        let p = l.enumerate_cosets(4).unwrap();
        assert_eq!(p.len(), 2);
        for c in p.cosets() {
            assert_eq!(c.sites.len(), 8);
            let parity = c.sites[0] % 4 % 2;
            assert!(c.sites.iter().all(|s| s % 4 % 2 == parity));
        }

        let cb = SublatticeSpec::new([[1, 1], [-1, 1]]).unwrap();
        let p = cb.enumerate_cosets(4).unwrap();
        assert_eq!(p.len(), 2);
        for c in p.cosets() {
            let parity = |s: usize| (s % 4 + s / 4) % 2;
            let first = parity(c.sites[0]);
            assert!(c.sites.iter().all(|&s| parity(s) == first));
        }

        let sq = SublatticeSpec::rectangular(2, 2).unwrap();
        let p = sq.enumerate_cosets(4).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.cosets().iter().all(|c| c.sites.len() == 4));
    }

    #[test]
    fn minimal_side_examples() {
        assert_eq!(SublatticeSpec::new([[2, 0], [0, 1]]).unwrap().minimal_torus_side(), 2);
        assert_eq!(SublatticeSpec::new([[1, 1], [-1, 1]]).unwrap().minimal_torus_side(), 2);
        assert_eq!(SublatticeSpec::new([[4, 0], [0, 6]]).unwrap().minimal_torus_side(), 12);
    }

    #[test]
    fn incompatible_and_singular() {
        let l = SublatticeSpec::rectangular(4, 6).unwrap();
        assert!(matches!(
            l.enumerate_cosets(6),
            Err(Error::IncompatibleTorus { side: 6, minimal: 12 })
        ));
        assert!(matches!(
            SublatticeSpec::new([[1, 2], [2, 4]]),
            Err(Error::SingularBasis)
        ));
    }

    #[test]
    fn serde_shape() {
        let l = SublatticeSpec::new([[1, 1], [-1, 1]]).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"basis":[[1,1],[-1,1]]}"#);
        let back: SublatticeSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        assert!(serde_json::from_str::<SublatticeSpec>(r#"{"basis":[[0,0],[0,0]]}"#).is_err());
    }

    /// Every basis with small entries and |det| <= 8, every compatible N <= 16.
    #[test]
    fn exhaustive_partition() {
        let mut checked = 0;
        let r = -3..=3i64;
        for b00 in r.clone() {
            for b01 in r.clone() {
                for b10 in r.clone() {
                    for b11 in r.clone() {
                        let det = b00 * b11 - b01 * b10;
                        if det == 0 || det.abs() > 8 {
                            continue;
                        }
                        let l = SublatticeSpec::new([[b00, b01], [b10, b11]]).unwrap();
                        let m = l.minimal_torus_side();
                        // the minimal side really is minimal
                        for smaller in 1..m {
                            assert!(
                                !(l.contains(Vector2::new(smaller as i64, 0))
                                    && l.contains(Vector2::new(0, smaller as i64)))
                            );
                        }
                        for side in (m..=16).step_by(m) {
                            let p = l.enumerate_cosets(side).unwrap();
                            assert_eq!(p.len(), det.unsigned_abs() as usize);
                            let mut seen = vec![false; side * side];
                            for c in p.cosets() {
                                for &s in &c.sites {
                                    assert!(!seen[s]);
                                    seen[s] = true;
                                }
                            }
                            assert!(seen.iter().all(|&b| b));
                            // same coset iff difference in L
                            let n = side as i64;
                            for i in (0..side * side).step_by(3) {
                                for j in (0..side * side).step_by(5) {
                                    let d = Vector2::new(
                                        (i % side) as i64 - (j % side) as i64,
                                        (i / side) as i64 - (j / side) as i64,
                                    );
                                    let same = p.coset_of(i) == p.coset_of(j);
                                    assert_eq!(same, l.contains(d), "{l:?} N={n} {i} {j}");
                                }
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    proptest! {
        #[test]
        fn membership_matches_brute_force(
            b in prop::array::uniform4(-4i64..=4),
            x in -12i64..=12, y in -12i64..=12,
        ) {
            let basis = [[b[0], b[1]], [b[2], b[3]]];
            prop_assume!(b[0] * b[3] - b[1] * b[2] != 0);
            let l = SublatticeSpec::new(basis).unwrap();
            let v = Vector2::new(x, y);
            // coefficients are bounded by |adj| * |v| / |det| <= 4 * 24
            prop_assert_eq!(l.contains(v), in_lattice_brute(&l, v, 100));
            prop_assert_eq!(l.coset_rep(v) == Vector2::ZERO, l.contains(v));
            let w = Vector2::new(y - 3, x + 7);
            prop_assert_eq!(l.coset_rep(v) == l.coset_rep(w), l.contains(v - w));
        }
    }
}
