//! Exact Gibbs expectations and generator residuals on small tori.

use isinglab::exactref::{generator_check, onsager_magnetization, ExactGibbsTable, Observable};

fn main() -> isinglab::Result<()> {
    for side in [2, 3] {
        for beta in [0.3, 0.6] {
            let table = ExactGibbsTable::new(side, beta)?;
            let g = generator_check(side, beta)?;
            println!(
                "N={side} beta={beta}: {} states, stationarity {:.1e}, detailed balance {:.1e}",
                table.states(),
                g.stationarity_residual,
                g.detailed_balance_residual
            );
            for obs in Observable::standard_set() {
                println!("  {:<18} {:.12}", obs.to_string(), table.expectation(&obs));
            }
        }
    }
    println!("infinite-volume m(0.6) = {:.12}", onsager_magnetization(0.6)?);
    Ok(())
}
