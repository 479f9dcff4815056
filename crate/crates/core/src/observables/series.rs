use crate::error::{Error, Result};
use crate::harris::Trajectory;
use crate::lattice::{block_magnetization, Block, Magnetization, Vector2};

use super::{mean_and_se, Estimate};

/// A right-continuous, piecewise-constant path on `[0, horizon]`.
pub trait PiecewiseConstant {
    fn initial_value(&self) -> f64;
    /// `(time, new value)` pairs in increasing time order.
    fn jumps(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_>;
    fn horizon(&self) -> f64;
}

/// Plain step function, mostly for hand-built paths and derived observables.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    initial: f64,
    jumps: Vec<(f64, f64)>,
    horizon: f64,
}

impl StepFunction {
    pub fn new(initial: f64, jumps: Vec<(f64, f64)>, horizon: f64) -> Result<Self> {
        if !(horizon >= 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidHorizon(horizon));
        }
        let mut last = 0.0;
        for &(t, _) in &jumps {
            if !(t > last || (t == 0.0 && last == 0.0)) || t > horizon {
                return Err(Error::InvalidHorizon(t));
            }
            last = t;
        }
        Ok(StepFunction {
            initial,
            jumps,
            horizon,
        })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(value, Vec::new(), horizon)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|&(s, _)| s <= t);
        if k == 0 {
            self.initial
        } else {
            self.jumps[k - 1].1
        }
    }
}

impl PiecewiseConstant for StepFunction {
    fn initial_value(&self) -> f64 {
        self.initial
    }
    fn jumps(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        Box::new(self.jumps.iter().copied())
    }
    fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Exact block magnetization along a trajectory. `sums[k]` holds on
/// `[breakpoints[k-1], breakpoints[k])`, with `sums[0]` the initial value.
#[derive(Clone, Debug, PartialEq)]
pub struct MagnetizationSeries {
    block: Block,
    sites: u64,
    breakpoints: Vec<f64>,
    sums: Vec<i64>,
    horizon: f64,
}

impl MagnetizationSeries {
    pub fn block(&self) -> Block {
        self.block
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> impl Iterator<Item = Magnetization> + '_ {
        self.sums.iter().map(|&sum| Magnetization {
            sum,
            sites: self.sites,
        })
    }

    pub fn value_at(&self, t: f64) -> Magnetization {
        let k = self.breakpoints.partition_point(|&s| s <= t);
        Magnetization {
            sum: self.sums[k],
            sites: self.sites,
        }
    }

    /// Largest `|M|` over the whole path.
    pub fn sup_abs(&self) -> f64 {
        let max = self.sums.iter().map(|s| s.abs()).max().unwrap_or(0);
        max as f64 / self.sites as f64
    }
}

impl PiecewiseConstant for MagnetizationSeries {
    fn initial_value(&self) -> f64 {
        self.sums[0] as f64 / self.sites as f64
    }
    fn jumps(&self) -> Box<dyn Iterator<Item = (f64, f64)> + '_> {
        let d = self.sites as f64;
        Box::new(
            self.breakpoints
                .iter()
                .zip(&self.sums[1..])
                .map(move |(&t, &s)| (t, s as f64 / d)),
        )
    }
    fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Incrementally maintained `M_n` (or the full-torus mean) along `traj`.
pub fn magnetization_series(traj: &Trajectory, block: Block) -> Result<MagnetizationSeries> {
    let side = traj.side();
    let mask = block.mask(side)?;
    let start = block_magnetization(traj.initial(), block)?;
    let mut sum = start.sum;
    let mut breakpoints = Vec::new();
    let mut sums = vec![sum];
    for e in traj.events() {
        if e.changed() && mask[e.site] {
            sum += 2 * e.new as i64;
            breakpoints.push(e.time);
            sums.push(sum);
        }
    }
    Ok(MagnetizationSeries {
        block,
        sites: start.sites,
        breakpoints,
        sums,
        horizon: traj.horizon(),
    })
}

/// Integral of a step path over `[a, b]`.
pub fn integrate(path: &(impl PiecewiseConstant + ?Sized), a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    let mut value = path.initial_value();
    let mut left = a;
    for (t, v) in path.jumps() {
        if t >= b {
            break;
        }
        if t > left {
            total += value * (t - left);
            left = t;
        }
        value = v;
    }
    if b > left {
        total += value * (b - left);
    }
    total
}

/// `(1/T) * integral_0^T` of the path.
pub fn cesaro_time_average(path: &(impl PiecewiseConstant + ?Sized), t: f64) -> Result<f64> {
    if !(t > 0.0) || t > path.horizon() {
        return Err(Error::InvalidHorizon(t));
    }
    Ok(integrate(path, 0.0, t) / t)
}

/// Time average over `[0, t]` with a batch-means standard error from
/// `batches` equal sub-intervals.
pub fn batch_means(path: &(impl PiecewiseConstant + ?Sized), t: f64, batches: usize) -> Result<Estimate> {
    if !(t > 0.0) || t > path.horizon() {
        return Err(Error::InvalidHorizon(t));
    }
    if batches < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: batches,
        });
    }
    let width = t / batches as f64;
    let means: Vec<f64> = (0..batches)
        .map(|k| {
            let a = k as f64 * width;
            let b = if k + 1 == batches { t } else { (k + 1) as f64 * width };
            integrate(path, a, b) / (b - a)
        })
        .collect();
    let mut est = mean_and_se(&means);
    // report the exact overall average, not the mean of batch means
    est.value = integrate(path, 0.0, t) / t;
    Ok(est)
}

/// Translation-averaged `<sigma_0 sigma_x>` along a trajectory.
pub fn two_point_series(traj: &Trajectory, x: Vector2) -> StepFunction {
    let side = traj.side();
    let n2 = (side * side) as f64;
    let v = x.reduce(side);
    let mut state = traj.initial().clone();
    let mut sum = super::stats::two_point_sum(&state, v);
    let initial = sum as f64 / n2;
    let mut jumps = Vec::new();
    let forward = |i: usize, sign: i64| -> usize {
        let (cx, cy) = (i % side, i / side);
        let dx = (side as i64 + sign * v.x) as usize % side;
        let dy = (side as i64 + sign * v.y) as usize % side;
        ((cy + dy) % side) * side + (cx + dx) % side
    };
    for e in traj.events() {
        if !e.changed() {
            continue;
        }
        if v != Vector2::ZERO {
            let neighbours = state.get_index(forward(e.site, 1)) as i64
                + state.get_index(forward(e.site, -1)) as i64;
            sum += (e.new - e.old) as i64 * neighbours;
        }
        state.set_index(e.site, e.new);
        jumps.push((e.time, sum as f64 / n2));
    }
    StepFunction {
        initial,
        jumps,
        horizon: traj.horizon(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harris::{evolve, generate_noise, NoiseStream, Ring, UpdateRule};
    use crate::lattice::SpinConfig;

    #[test]
    fn constant_series() {
        let c = SpinConfig::stripes(6).unwrap();
        let traj = evolve(&c, &NoiseStream::from_rings(6, 4.0, []).unwrap(), &UpdateRule::new(0.6).unwrap()).unwrap();
        let s = magnetization_series(&traj, Block::Full).unwrap();
        assert!(s.breakpoints().is_empty());
        assert_eq!(cesaro_time_average(&s, 4.0).unwrap(), 0.0);
        assert_eq!(cesaro_time_average(&StepFunction::constant(0.25, 9.0).unwrap(), 3.0).unwrap(), 0.25);
    }

    #[test]
    fn one_flip_inside_block() {
        let plus = SpinConfig::all_plus(5).unwrap();
        let noise = NoiseStream::from_rings(5, 2.0, [(0, Ring { time: 1.0, mark: 0.999 })]).unwrap();
        let traj = evolve(&plus, &noise, &UpdateRule::new(0.6).unwrap()).unwrap();
        let s = magnetization_series(&traj, Block::Centered(1)).unwrap();
        let vals: Vec<_> = s.values().map(|m| (m.sum, m.sites)).collect();
        assert_eq!(vals, vec![(9, 9), (7, 9)]);
        assert_eq!(s.breakpoints(), &[1.0]);
        assert_eq!(s.value_at(0.99).sum, 9);
        assert_eq!(s.value_at(1.0).sum, 7);
        // (1 * 1 + 7/9 * 1) / 2
        let avg = cesaro_time_average(&s, 2.0).unwrap();
        assert!((avg - (1.0 + 7.0 / 9.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn outside_block_is_ignored() {
        let plus = SpinConfig::all_plus(7).unwrap();
        let far = plus.index(3, 3);
        let noise = NoiseStream::from_rings(7, 2.0, [(far, Ring { time: 1.0, mark: 0.999 })]).unwrap();
        let traj = evolve(&plus, &noise, &UpdateRule::new(0.6).unwrap()).unwrap();
        assert!(magnetization_series(&traj, Block::Centered(1)).unwrap().breakpoints().is_empty());
        assert_eq!(magnetization_series(&traj, Block::Full).unwrap().breakpoints().len(), 1);
    }

    #[test]
    fn cesaro_examples() {
        let sym = StepFunction::new(1.0, vec![(1.0, -1.0)], 2.0).unwrap();
        assert_eq!(cesaro_time_average(&sym, 2.0).unwrap(), 0.0);
        let third = StepFunction::new(1.0, vec![(1.0, 0.0)], 3.0).unwrap();
        assert!((cesaro_time_average(&third, 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!(cesaro_time_average(&third, 0.0).is_err());
        assert!(cesaro_time_average(&third, -1.0).is_err());
        assert!(cesaro_time_average(&third, 3.5).is_err());
    }

    #[test]
    fn incremental_matches_recomputation() {
        let rule = UpdateRule::new(0.5).unwrap();
        let traj = evolve(&SpinConfig::stripes(10).unwrap(), &generate_noise(4, 0, 10, 6.0).unwrap(), &rule).unwrap();
        for block in [Block::Centered(0), Block::Centered(2), Block::Centered(4), Block::Full] {
            let s = magnetization_series(&traj, block).unwrap();
            for k in 0..50 {
                let t = 6.0 * (k as f64 + 0.37) / 50.0;
                let direct = block_magnetization(&traj.state_at(t), block).unwrap();
                assert_eq!(s.value_at(t), direct);
            }
        }
        for x in [Vector2::new(1, 0), Vector2::new(0, 3), Vector2::new(2, 5), Vector2::new(5, 0), Vector2::ZERO] {
            let path = two_point_series(&traj, x);
            for k in 0..50 {
                let t = 6.0 * (k as f64 + 0.61) / 50.0;
                let direct = crate::observables::two_point_config(&traj.state_at(t), x);
                assert_eq!(path.value_at(t), direct, "x={x} t={t}");
            }
        }
    }

    #[test]
    fn cesaro_is_linear_and_bounded() {
        let a = StepFunction::new(0.2, vec![(0.5, -0.4), (1.7, 0.9)], 3.0).unwrap();
        let b = StepFunction::new(-1.0, vec![(0.3, 0.5), (2.0, 0.1)], 3.0).unwrap();
        let times = [0.3, 0.5, 1.7, 2.0];
        let sum = StepFunction::new(
            0.2 + 2.0 * -1.0,
            times.iter().map(|&t| (t, a.value_at(t) + 2.0 * b.value_at(t))).collect(),
            3.0,
        )
        .unwrap();
        let lhs = cesaro_time_average(&sum, 3.0).unwrap();
        let rhs = cesaro_time_average(&a, 3.0).unwrap() + 2.0 * cesaro_time_average(&b, 3.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-14);
        assert!(cesaro_time_average(&a, 3.0).unwrap().abs() <= 0.9);
    }

    #[test]
    fn batch_means_shape() {
        let path = StepFunction::new(1.0, vec![(1.0, -1.0)], 2.0).unwrap();
        let est = batch_means(&path, 2.0, 2).unwrap();
        assert_eq!(est.value, 0.0);
        assert!((est.se - 1.0).abs() < 1e-15);
        assert!(batch_means(&path, 2.0, 1).is_err());
    }
}
