//! Long-time averages on a tiny torus against exact enumeration.

use isinglab::exactref::{exact_gibbs_expectation, Observable};
use isinglab::harris::{evolve, generate_noise, UpdateRule};
use isinglab::lattice::{Block, SpinConfig, Vector2};
use isinglab::observables::{batch_means, magnetization_series, two_point_series};

fn main() -> isinglab::Result<()> {
    let (side, beta, horizon) = (3, 0.6, 20_000.0);
    let noise = generate_noise(11, 0, side, horizon)?;
    let traj = evolve(&SpinConfig::all_plus(side)?, &noise, &UpdateRule::new(beta)?)?;
    println!("{} updates up to T={horizon}", traj.events().len());

    for x in [Vector2::new(1, 0), Vector2::new(1, 1)] {
        let est = batch_means(&two_point_series(&traj, x), horizon, 50)?;
        let exact = exact_gibbs_expectation(side, beta, &Observable::TwoPoint(x))?;
        println!(
            "two-point {x}: {:.5} ± {:.5}, exact {exact:.5}, z = {:+.2}",
            est.value,
            est.se,
            est.z_against(exact)
        );
    }
    let m = batch_means(&magnetization_series(&traj, Block::Full)?, horizon, 50)?;
    let exact = exact_gibbs_expectation(side, beta, &Observable::Magnetization)?;
    println!("magnetization {:.5} ± {:.5}, exact {exact}", m.value, m.se);
    Ok(())
}
