//! Antisymmetric start against a metastable all-plus proxy for the plus phase.

use isinglab::antisym::AntisymSpec;
use isinglab::exactref::onsager_magnetization;
use isinglab::harris::{evolve, generate_noise, UpdateRule};
use isinglab::lattice::{Block, SpinConfig};
use isinglab::observables::{cesaro_time_average, magnetization_series, sector_proxy};

fn main() -> isinglab::Result<()> {
    let (side, beta, horizon) = (32, 0.6, 10.0);
    let m_beta = onsager_magnetization(beta)?;
    let rule = UpdateRule::new(beta)?;
    println!("spontaneous magnetization {m_beta:.6}");

    let starts = [
        ("antisym", AntisymSpec::stripes().instantiate_on_torus(side)?),
        ("all_plus", SpinConfig::all_plus(side)?),
    ];
    for (name, initial) in &starts {
        for replica in 0..3 {
            let noise = generate_noise(5, replica, side, horizon)?;
            let series = magnetization_series(&evolve(initial, &noise, &rule)?, Block::Full)?;
            let avg = cesaro_time_average(&series, horizon)?;
            let sector = sector_proxy(avg, beta, 0.1 * m_beta)?;
            println!(
                "{name:<8} replica {replica}: time average {avg:+.4}, sup|M| {:.4}, sector {}",
                series.sup_abs(),
                sector.label()
            );
        }
    }
    Ok(())
}
