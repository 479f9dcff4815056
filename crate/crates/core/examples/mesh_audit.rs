//! Audit a trajectory on a time mesh: ring fractions and state deviations.

use isinglab::harris::{evolve, generate_noise, UpdateRule};
use isinglab::lattice::{Block, SpinConfig};
use isinglab::observables::{binomial_interval_99, mesh_audit, pooled_ring_fraction};

fn main() -> isinglab::Result<()> {
    let side = 32;
    let initial = SpinConfig::checkerboard(side)?;
    let noise = generate_noise(3, 0, side, 10.0)?;
    let traj = evolve(&initial, &noise, &UpdateRule::new(0.6)?)?;

    for delta in [0.05, 0.2, 1.0] {
        for block in [Block::Centered(4), Block::Full] {
            let records = mesh_audit(&traj, delta, block)?;
            let pooled = pooled_ring_fraction(records.iter().filter(|r| r.complete));
            let expected = 1.0 - (-delta).exp();
            let (lo, hi) = binomial_interval_99(expected, pooled.trials);
            let violations = records.iter().filter(|r| r.violated).count();
            println!(
                "delta={delta:<4} block={:<4} intervals={:<4} ring fraction {:.4} (99% band {lo:.4}..{hi:.4}) violations {violations}",
                block.label(),
                records.len(),
                pooled.fraction(),
            );
        }
    }
    Ok(())
}
