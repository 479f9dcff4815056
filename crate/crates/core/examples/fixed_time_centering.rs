//! Coset means at fixed times for an antisymmetric ensemble.

use isinglab::antisym::AntisymSpec;
use isinglab::harris::{evolve, generate_noise, UpdateRule};
use isinglab::lattice::SpinConfig;
use isinglab::observables::coset_means;

fn main() -> isinglab::Result<()> {
    let spec = AntisymSpec::checkerboard();
    let (side, replicas, t) = (16, 200, 2.0);
    let initial = spec.instantiate_on_torus(side)?;
    let rule = UpdateRule::new(0.6)?;

    let ensemble = (0..replicas)
        .map(|r| {
            let noise = generate_noise(7, r, side, t)?;
            Ok(evolve(&initial, &noise, &rule)?.final_state())
        })
        .collect::<isinglab::Result<Vec<SpinConfig>>>()?;

    let est = coset_means(&ensemble, spec.lattice(), spec.u())?;
    for c in &est.cosets {
        println!("coset {}: c = {:+.4} ± {:.4}", c.rep, c.estimate, c.se);
    }
    for p in &est.pairs {
        println!("pair {} + {}: {:+.4} (z = {:+.2})", p.rep, p.partner, p.sum, p.z());
    }
    println!("ensemble magnetization {:+.4} ± {:.4}", est.total.value, est.total.se);
    Ok(())
}
