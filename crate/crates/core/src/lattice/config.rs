use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spin value, always `-1` or `+1`.
pub type Spin = i8;

/// Integer vector in Z^2, used for translations and torus displacements.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Vector2 {
    pub x: i64,
    pub y: i64,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Vector2 { x, y }
    }

    /// Representative in `[0, side)^2`.
    pub fn reduce(self, side: usize) -> Vector2 {
        let n = side as i64;
        Vector2::new(self.x.rem_euclid(n), self.y.rem_euclid(n))
    }
}

impl From<[i64; 2]> for Vector2 {
    fn from(v: [i64; 2]) -> Self {
        Vector2::new(v[0], v[1])
    }
}

impl From<Vector2> for [i64; 2] {
    fn from(v: Vector2) -> Self {
        [v.x, v.y]
    }
}

impl From<(i64, i64)> for Vector2 {
    fn from((x, y): (i64, i64)) -> Self {
        Vector2::new(x, y)
    }
}

impl Add for Vector2 {
    type Output = Vector2;
    fn add(self, o: Vector2) -> Vector2 {
        Vector2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vector2 {
    type Output = Vector2;
    fn sub(self, o: Vector2) -> Vector2 {
        Vector2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vector2 {
    type Output = Vector2;
    fn neg(self) -> Vector2 {
        Vector2::new(-self.x, -self.y)
    }
}

impl Mul<Vector2> for i64 {
    type Output = Vector2;
    fn mul(self, v: Vector2) -> Vector2 {
        Vector2::new(self * v.x, self * v.y)
    }
}

impl fmt::Display for Vector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Spins on the side-`N` torus. Site `(x, y)` lives at index `y * N + x`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    side: usize,
    spins: Vec<Spin>,
}

impl SpinConfig {
    pub fn uniform(side: usize, spin: Spin) -> Result<Self> {
        check_spin(spin)?;
        if side == 0 {
            return Err(Error::EmptyTorus);
        }
        Ok(SpinConfig {
            side,
            spins: vec![spin; side * side],
        })
    }

    pub fn all_plus(side: usize) -> Result<Self> {
        Self::uniform(side, 1)
    }

    pub fn all_minus(side: usize) -> Result<Self> {
        Self::uniform(side, -1)
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> Spin) -> Result<Self> {
        if side == 0 {
            return Err(Error::EmptyTorus);
        }
        let mut spins = Vec::with_capacity(side * side);
        for y in 0..side {
            for x in 0..side {
                let s = f(x, y);
                check_spin(s)?;
                spins.push(s);
            }
        }
        Ok(SpinConfig { side, spins })
    }

    pub fn from_spins(side: usize, spins: Vec<Spin>) -> Result<Self> {
        if side == 0 {
            return Err(Error::EmptyTorus);
        }
        if spins.len() != side * side {
            return Err(Error::ShapeMismatch {
                side,
                expected: side * side,
                got: spins.len(),
            });
        }
        for &s in &spins {
            check_spin(s)?;
        }
        Ok(SpinConfig { side, spins })
    }

    /// Vertical stripes: `+1` on even columns.
    pub fn stripes(side: usize) -> Result<Self> {
        Self::from_fn(side, |x, _| if x % 2 == 0 { 1 } else { -1 })
    }

    /// `(-1)^(x+y)`, `+1` at the origin.
    pub fn checkerboard(side: usize) -> Result<Self> {
        Self::from_fn(side, |x, y| if (x + y) % 2 == 0 { 1 } else { -1 })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.side + x
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.side, index / self.side)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Spin {
        self.spins[self.index(x, y)]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> Spin {
        self.spins[index]
    }

    /// Spin at an arbitrary point of Z^2, wrapped onto the torus.
    pub fn get_wrapped(&self, v: Vector2) -> Spin {
        let r = v.reduce(self.side);
        self.get(r.x as usize, r.y as usize)
    }

    #[inline]
    pub fn set_index(&mut self, index: usize, spin: Spin) {
        debug_assert!(spin == 1 || spin == -1);
        self.spins[index] = spin;
    }

    /// Sum of the four torus neighbors of `index`, with multiplicity on small tori.
    #[inline]
    pub fn neighbor_sum(&self, index: usize) -> i32 {
        let n = self.side;
        let (x, y) = (index % n, index / n);
        let xp = if x + 1 == n { 0 } else { x + 1 };
        let xm = if x == 0 { n - 1 } else { x - 1 };
        let yp = if y + 1 == n { 0 } else { y + 1 };
        let ym = if y == 0 { n - 1 } else { y - 1 };
        self.spins[y * n + xp] as i32
            + self.spins[y * n + xm] as i32
            + self.spins[yp * n + x] as i32
            + self.spins[ym * n + x] as i32
    }

    pub fn total(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    /// Global spin flip.
    pub fn flipped(&self) -> SpinConfig {
        SpinConfig {
            side: self.side,
            spins: self.spins.iter().map(|&s| -s).collect(),
        }
    }

    /// `(tau_v sigma)_i = sigma_{i - v}`.
    pub fn translated(&self, v: Vector2) -> SpinConfig {
        self.apply_symmetry(v, false)
    }

    /// Translation by `v` followed (optionally) by the global flip.
    pub fn apply_symmetry(&self, translation: Vector2, flip: bool) -> SpinConfig {
        let n = self.side;
        let t = translation.reduce(n);
        let (tx, ty) = (t.x as usize, t.y as usize);
        let sign: Spin = if flip { -1 } else { 1 };
        let mut spins = vec![0; n * n];
        for y in 0..n {
            let sy = (y + n - ty) % n;
            for x in 0..n {
                let sx = (x + n - tx) % n;
                spins[y * n + x] = sign * self.spins[sy * n + sx];
            }
        }
        SpinConfig { side: n, spins }
    }

    /// Text form: first line `N`, then `N` rows of `+`/`-`, row `y = 0` first.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.side);
        for y in 0..self.side {
            for x in 0..self.side {
                out.push(if self.get(x, y) > 0 { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Accepts ASCII `-` or U+2212 for down spins.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing side line".into()))?;
        let side: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad side line {header:?}")))?;
        let mut spins = Vec::with_capacity(side * side);
        for (row, line) in lines.by_ref().take(side).enumerate() {
            let before = spins.len();
            for ch in line.chars() {
                match ch {
                    '+' => spins.push(1),
                    '-' | '\u{2212}' => spins.push(-1),
                    c => return Err(Error::Parse(format!("unexpected {c:?} in row {row}"))),
                }
            }
            if spins.len() - before != side {
                return Err(Error::Parse(format!(
                    "row {row} has {} spins, expected {side}",
                    spins.len() - before
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows".into()));
        }
        Self::from_spins(side, spins)
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig\n{}", self.to_text())
    }
}

fn check_spin(s: Spin) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::InvalidSpin(s as i64))
    }
}

/// Observation window for block magnetization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// `[-n, n]^2` around the torus origin, wrapped.
    Centered(usize),
    /// The whole torus.
    Full,
}

impl Block {
    pub fn site_count(&self, side: usize) -> Result<usize> {
        match *self {
            Block::Full => Ok(side * side),
            Block::Centered(n) => {
                if 2 * n + 1 > side {
                    Err(Error::BlockTooLarge { n, side })
                } else {
                    Ok((2 * n + 1) * (2 * n + 1))
                }
            }
        }
    }

    /// Site indices covered by the block, each exactly once.
    pub fn sites(&self, side: usize) -> Result<Vec<usize>> {
        match *self {
            Block::Full => Ok((0..side * side).collect()),
            Block::Centered(n) => {
                self.site_count(side)?;
                let r = n as i64;
                let mut out = Vec::with_capacity((2 * n + 1) * (2 * n + 1));
                for dy in -r..=r {
                    for dx in -r..=r {
                        let v = Vector2::new(dx, dy).reduce(side);
                        out.push(v.y as usize * side + v.x as usize);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Membership mask over all torus sites.
    pub fn mask(&self, side: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; side * side];
        for i in self.sites(side)? {
            mask[i] = true;
        }
        Ok(mask)
    }

    /// Label used in CSV output: the radius, or `full`.
    pub fn label(&self) -> String {
        match self {
            Block::Full => "full".to_string(),
            Block::Centered(n) => n.to_string(),
        }
    }

    pub fn parse_label(s: &str) -> Result<Block> {
        if s == "full" {
            Ok(Block::Full)
        } else {
            s.parse()
                .map(Block::Centered)
                .map_err(|_| Error::Parse(format!("bad block label {s:?}")))
        }
    }
}

/// Exact block magnetization `sum / sites`.
#[derive(Clone, Copy, Debug, Eq)]
pub struct Magnetization {
    pub sum: i64,
    pub sites: u64,
}

impl Magnetization {
    pub fn value(&self) -> f64 {
        self.sum as f64 / self.sites as f64
    }

    pub fn negated(self) -> Magnetization {
        Magnetization {
            sum: -self.sum,
            sites: self.sites,
        }
    }
}

impl PartialEq for Magnetization {
    fn eq(&self, other: &Self) -> bool {
        self.sum as i128 * other.sites as i128 == other.sum as i128 * self.sites as i128
    }
}

pub fn block_magnetization(config: &SpinConfig, block: Block) -> Result<Magnetization> {
    let sites = block.sites(config.side())?;
    let sum = sites.iter().map(|&i| config.get_index(i) as i64).sum();
    Ok(Magnetization {
        sum,
        sites: sites.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetry_examples() {
        let plus = SpinConfig::all_plus(5).unwrap();
        assert_eq!(plus.apply_symmetry(Vector2::new(3, 1), false), plus);
        assert_eq!(
            plus.apply_symmetry(Vector2::ZERO, true),
            SpinConfig::all_minus(5).unwrap()
        );

        let stripes = SpinConfig::stripes(4).unwrap();
        let shifted = stripes.apply_symmetry(Vector2::new(1, 0), false);
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(shifted.get(x, y), if x % 2 == 1 { 1 } else { -1 });
            }
        }
        assert_eq!(shifted, stripes.flipped());
    }

    #[test]
    fn translation_convention() {
        let mut c = SpinConfig::all_plus(5).unwrap();
        c.set_index(c.index(1, 2), -1);
        let t = c.translated(Vector2::new(2, -1));
        // (tau_v sigma)_i = sigma_{i - v}: the minus spin moves from (1,2) to (3,1).
        assert_eq!(t.get(3, 1), -1);
        assert_eq!(t.total(), c.total());
    }

    #[test]
    fn block_examples() {
        let plus = SpinConfig::all_plus(7).unwrap();
        for n in 0..=3 {
            assert_eq!(block_magnetization(&plus, Block::Centered(n)).unwrap().value(), 1.0);
        }

        let cb = SpinConfig::checkerboard(6).unwrap();
        let m = block_magnetization(&cb, Block::Centered(1)).unwrap();
        assert_eq!((m.sum, m.sites), (1, 9));

        let mut c = SpinConfig::all_plus(6).unwrap();
        c.set_index(0, -1);
        let m = block_magnetization(&c, Block::Centered(1)).unwrap();
        assert_eq!((m.sum, m.sites), (7, 9));

        let odd = SpinConfig::checkerboard(5).unwrap();
        assert_eq!(
            block_magnetization(&odd, Block::Centered(2)).unwrap(),
            block_magnetization(&odd, Block::Full).unwrap()
        );
    }

    #[test]
    fn block_too_large() {
        let c = SpinConfig::all_plus(4).unwrap();
        assert!(matches!(
            block_magnetization(&c, Block::Centered(2)),
            Err(Error::BlockTooLarge { n: 2, side: 4 })
        ));
        assert!(block_magnetization(&c, Block::Centered(1)).is_ok());
    }

    #[test]
    fn rejects_bad_spins() {
        assert!(SpinConfig::from_spins(2, vec![1, -1, 0, 1]).is_err());
        assert!(SpinConfig::from_spins(2, vec![1, -1, 1]).is_err());
        assert!(SpinConfig::all_plus(0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = SpinConfig::checkerboard(4).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("4\n+-+-\n-+-+\n"));
        assert_eq!(SpinConfig::parse_text(&text).unwrap(), c);
        let unicode = "2\n+\u{2212}\n\u{2212}+\n";
        assert_eq!(SpinConfig::parse_text(unicode).unwrap(), SpinConfig::checkerboard(2).unwrap());
        assert!(SpinConfig::parse_text("3\n+++\n++\n+++\n").is_err());
        assert!(SpinConfig::parse_text("2\n++\n++\n++\n").is_err());
    }

    #[test]
    fn small_torus_neighbor_multiplicity() {
        let c = SpinConfig::from_spins(2, vec![1, -1, -1, -1]).unwrap();
        // On N=2 both horizontal neighbors of (0,0) are (1,0).
        assert_eq!(c.neighbor_sum(0), -4);
        assert_eq!(c.neighbor_sum(1), 0);
        assert_eq!(c.neighbor_sum(3), -4);
    }
}
