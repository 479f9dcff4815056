use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::lattice::Vector2;

/// Each site owns a disjoint block of `2^SITE_WORD_BITS` keystream words.
const SITE_WORD_BITS: u32 = 36;
/// Largest torus side addressable by the site label `(x << 16) | y`.
pub const MAX_SIDE: usize = 1 << 16;

/// One clock ring: time in `(0, T]` and a mark in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ring {
    pub time: f64,
    pub mark: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub master_seed: u64,
    pub replica_id: u64,
}

/// Marked Poisson clocks for every site of a torus, over `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseStream {
    side: usize,
    horizon: f64,
    provenance: Option<Provenance>,
    sites: Vec<Vec<Ring>>,
}

/// The ring sequence of a single site: rate-1 Poisson times with uniform
/// marks, a pure function of `(master_seed, replica_id, x, y, horizon)`.
///
/// The generator is ChaCha8 keyed by `master_seed`, on stream `replica_id`,
/// positioned at a word offset derived from the site label. Streams for
/// different horizons agree on their common prefix.
pub fn site_stream(master_seed: u64, replica_id: u64, x: usize, y: usize, horizon: f64) -> Vec<Ring> {
    assert!(x < MAX_SIDE && y < MAX_SIDE, "site label out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica_id);
    let label = ((x as u128) << 16) | y as u128;
    rng.set_word_pos(label << SITE_WORD_BITS);

    let mut rings = Vec::new();
    let mut t = 0.0f64;
    loop {
        let gap: f64 = Exp1.sample(&mut rng);
        let next = t + gap;
        if next <= t {
            continue;
        }
        if next > horizon {
            break;
        }
        let mark = loop {
            let m: f64 = rng.random();
            if m > 0.0 {
                break m;
            }
        };
        t = next;
        rings.push(Ring { time: t, mark });
    }
    rings
}

pub fn generate_noise(master_seed: u64, replica_id: u64, side: usize, horizon: f64) -> Result<NoiseStream> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidHorizon(horizon));
    }
    if side == 0 || side > MAX_SIDE {
        return Err(Error::EmptyTorus);
    }
    let mut sites = Vec::with_capacity(side * side);
    for y in 0..side {
        for x in 0..side {
            sites.push(site_stream(master_seed, replica_id, x, y, horizon));
        }
    }
    Ok(NoiseStream {
        side,
        horizon,
        provenance: Some(Provenance {
            master_seed,
            replica_id,
        }),
        sites,
    })
}

/// Relabels sites `s -> s + v` and optionally reflects marks `U -> 1 - U`.
pub fn transform_noise(noise: &NoiseStream, translation: Vector2, reflect_marks: bool) -> NoiseStream {
    let n = noise.side;
    let v = translation.reduce(n);
    let mut sites = vec![Vec::new(); n * n];
    for y in 0..n {
        for x in 0..n {
            let tx = (x + v.x as usize) % n;
            let ty = (y + v.y as usize) % n;
            let src = &noise.sites[y * n + x];
            sites[ty * n + tx] = if reflect_marks {
                src.iter()
                    .map(|r| Ring {
                        time: r.time,
                        mark: 1.0 - r.mark,
                    })
                    .collect()
            } else {
                src.clone()
            };
        }
    }
    let identity = v == Vector2::ZERO && !reflect_marks;
    NoiseStream {
        side: n,
        horizon: noise.horizon,
        provenance: if identity { noise.provenance } else { None },
        sites,
    }
}

impl NoiseStream {
    /// Hand-built noise, validated: per-site times strictly increasing in
    /// `(0, horizon]` and marks in `(0, 1)`.
    pub fn from_rings(side: usize, horizon: f64, rings: impl IntoIterator<Item = (usize, Ring)>) -> Result<Self> {
        if side == 0 || side > MAX_SIDE {
            return Err(Error::EmptyTorus);
        }
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidHorizon(horizon));
        }
        let mut sites = vec![Vec::new(); side * side];
        for (site, ring) in rings {
            let list: &mut Vec<Ring> = sites
                .get_mut(site)
                .ok_or_else(|| Error::InvalidNoise(format!("site {site} outside the torus")))?;
            if !(ring.time > 0.0 && ring.time <= horizon) {
                return Err(Error::InvalidNoise(format!("ring time {} outside (0, {horizon}]", ring.time)));
            }
            if !(ring.mark > 0.0 && ring.mark < 1.0) {
                return Err(Error::InvalidNoise(format!("mark {} outside (0, 1)", ring.mark)));
            }
            if let Some(last) = list.last() {
                if last.time >= ring.time {
                    return Err(Error::InvalidNoise(format!("times at site {site} not increasing")));
                }
            }
            list.push(ring);
        }
        Ok(NoiseStream {
            side,
            horizon,
            provenance: None,
            sites,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn site(&self, index: usize) -> &[Ring] {
        &self.sites[index]
    }

    pub fn sites(&self) -> &[Vec<Ring>] {
        &self.sites
    }

    pub fn event_count(&self) -> usize {
        self.sites.iter().map(Vec::len).sum()
    }

    /// Equality of every time and mark bit pattern.
    pub fn bitwise_eq(&self, other: &NoiseStream) -> bool {
        self.side == other.side
            && self.horizon.to_bits() == other.horizon.to_bits()
            && self.sites.iter().zip(&other.sites).all(|(a, b)| {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(p, q)| {
                        p.time.to_bits() == q.time.to_bits() && p.mark.to_bits() == q.mark.to_bits()
                    })
            })
    }

    /// All rings as `(time, site, mark)` in global time order.
    pub fn merged(&self) -> Vec<(f64, usize, f64)> {
        let mut all: Vec<(f64, usize, f64)> = self
            .sites
            .iter()
            .enumerate()
            .flat_map(|(site, rings)| rings.iter().map(move |r| (r.time, site, r.mark)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all
    }
}
