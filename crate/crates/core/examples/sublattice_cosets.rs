//! Coset structure of a sublattice and its restriction to a torus.

use isinglab::lattice::{enumerate_cosets, SublatticeSpec, Vector2};

fn main() -> isinglab::Result<()> {
    let lattice = SublatticeSpec::new([[2, 1], [0, 2]])?;
    println!("basis {:?}, index {}", lattice.basis(), lattice.index());
    let reps: Vec<String> = lattice.representatives().iter().map(|r| r.to_string()).collect();
    println!("representatives: {}", reps.join(" "));
    println!("minimal torus side: {}", lattice.minimal_torus_side());

    let v = Vector2::new(5, -3);
    println!("{v} reduces to coset {}", lattice.coset_rep(v));

    for side in [4, 6, 8] {
        if !lattice.torus_compatible(side) {
            println!("N={side}: not compatible");
            continue;
        }
        let partition = enumerate_cosets(&lattice, side)?;
        let sizes: Vec<usize> = partition.cosets().iter().map(|c| c.sites.len()).collect();
        println!("N={side}: {} cosets of sizes {sizes:?}", partition.len());
    }
    Ok(())
}
