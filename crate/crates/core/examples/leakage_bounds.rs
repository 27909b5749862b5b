//! Leakage out of a projector and the effective-evolution error for random
//! perturbations, next to the bound `delta`.

use dyncool::certify::random_instance;
use dyncool::cooling::evolution_time;
use dyncool::dyson::{effective_error, leakage};

fn main() -> dyncool::Result<()> {
    println!("dim  delta   t        leakage     effective error");
    for dim in [2, 4, 8] {
        for delta in [0.25, 0.04, 0.01] {
            let (a, pi) = random_instance(dim, 100 + dim as u64);
            println!(
                "{dim:3}  {delta:.2}   {:6.3}   {:.3e}   {:.3e}",
                evolution_time(delta),
                leakage(&a, &pi, delta)?,
                effective_error(&a, &pi, delta)?
            );
        }
    }
    Ok(())
}
