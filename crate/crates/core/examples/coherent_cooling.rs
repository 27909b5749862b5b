//! Coherent variant: energies written to a phase register, then each register
//! branch evolves under its own controlled perturbation. The register is only
//! a control, so its distribution is unchanged; the system energy in each
//! branch is what moves.

use dyncool::cooling::{coherent_qpe_encode, coherent_step, register_branch, register_distribution, CoolingPlan, Mode};
use dyncool::random::{random_hermitian, random_state, rng_for, unit_norm_gue};
use dyncool::shift::register_shift;

fn main() -> dyncool::Result<()> {
    let bits = 4;
    let h = random_hermitian(4, 5);
    let mut rng = rng_for(5, 2);
    let a = unit_norm_gue(4, &mut rng);
    let psi = random_state(4, &mut rng);
    let plan = CoolingPlan::new(0.4, 0.1, Mode::ExactSpectral)?;

    let joint = coherent_qpe_encode(&h, &psi, bits)?;
    let after = coherent_step(&plan, &h, &a, &joint, bits)?;
    println!("register  shift    weight   <H> before   <H> after");
    for (j, w) in register_distribution(&joint, bits).iter().enumerate() {
        if let (Some(b), Some(f)) = (register_branch(&joint, bits, j), register_branch(&after, bits, j)) {
            println!(
                "{j:8}  {:.4}   {w:.4}   {:+.6}    {:+.6}",
                register_shift(j, bits),
                h.expectation(&b)?,
                h.expectation(&f)?
            );
        }
    }
    Ok(())
}
