//! Extend a finite spin pattern to an antisymmetric periodic initial state.

use std::collections::BTreeMap;

use isinglab::antisym::{build_from_cylinder, verify_antisymmetric};
use isinglab::lattice::Vector2;

fn main() -> isinglab::Result<()> {
    let pattern: BTreeMap<Vector2, i8> = [((0, 0), 1), ((1, 0), 1), ((0, 1), -1), ((2, 2), -1)]
        .into_iter()
        .map(|(v, s)| (Vector2::from(v), s))
        .collect();
    let spec = build_from_cylinder(&pattern, 42)?;
    println!("sublattice basis {:?}, u = {}", spec.lattice().basis(), spec.u());
    println!("fundamental domain sum {}", spec.fundamental_domain_sum());

    let side = spec.minimal_torus_side() * 2;
    let config = spec.instantiate_on_torus(side)?;
    for (&v, &s) in &pattern {
        assert_eq!(config.get_wrapped(v), s);
    }
    println!("antisymmetric on N={side}: {}", verify_antisymmetric(&config, spec.lattice(), spec.u())?);
    println!("total magnetization {}", config.total());
    print!("{}", config.to_text());
    Ok(())
}
