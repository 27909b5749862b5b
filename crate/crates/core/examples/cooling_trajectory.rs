//! One cooling trajectory on a transverse-field Ising chain.

use dyncool::cooling::{run, CoolingConfig};
use dyncool::experiment::tfim;
use dyncool::operator::eig;
use dyncool::random::{random_state, rng_for, unit_norm_gue};

fn main() -> dyncool::Result<()> {
    let h = tfim(4, 1.0, 0.8, true)?;
    let mut rng = rng_for(3, 1);
    let a = unit_norm_gue(h.dim(), &mut rng);
    let psi = random_state(h.dim(), &mut rng);
    let ground = eig(&h).eigenvalues[0];

    let config = CoolingConfig::new(h, a, psi, 0.1, 16);
    let t = run(&config)?;
    println!("ground energy {ground:+.4}");
    println!("start: energy {:+.4}, ground overlap {:.4}", t.initial_energy, t.initial_ground_overlap);
    println!("step  estimate   energy   overlap  leakage   eiH-queries  UA-queries");
    for (k, s) in t.steps.iter().enumerate() {
        println!(
            "{:4}  {:+.4}   {:+.4}   {:.4}   {:.1e}   {:9}   {:9}{}",
            k + 1,
            s.energy_estimate,
            s.true_energy,
            s.ground_overlap,
            s.leakage_weight,
            s.queries_eih,
            s.queries_ua,
            if s.leaked { "  leaked" } else { "" }
        );
    }
    println!("termination {:?}, leakage events {}", t.termination, t.leakage_events());
    Ok(())
}
