//! Translation, flip and antisymmetric couplings of the graphical construction.

use isinglab::antisym::AntisymSpec;
use isinglab::harris::{check_antisymmetric_coupling, check_covariance, generate_noise, UpdateRule};
use isinglab::lattice::Vector2;

fn main() -> isinglab::Result<()> {
    let spec = AntisymSpec::stripes();
    let initial = spec.instantiate_on_torus(12)?;
    let noise = generate_noise(20240611, 0, 12, 5.0)?;
    let rule = UpdateRule::new(0.6)?;
    println!("{} clock rings on N=12 up to T=5", noise.event_count());

    let reports = [
        check_covariance(&initial, &noise, &rule, Vector2::new(3, -2), false)?,
        check_covariance(&initial, &noise, &rule, Vector2::ZERO, true)?,
        check_antisymmetric_coupling(&initial, &noise, &rule, spec.u())?,
    ];
    for r in &reports {
        println!(
            "{:<14} identical={} events={} states={}",
            r.identity.name(),
            r.identical,
            r.events_compared,
            r.states_compared
        );
    }
    Ok(())
}
