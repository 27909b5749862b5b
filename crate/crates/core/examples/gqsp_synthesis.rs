//! Complete a Laurent polynomial, compute its rotation angles, and check the
//! assembled circuit against the polynomial evaluated on a random unitary.

use dyncool::certify::random_laurent;
use dyncool::gqsp::{assemble_block, complete, compute_angles, polynomial_of_unitary};
use dyncool::operator::{spectral_norm, UnitaryOperator};
use dyncool::random::{haar_unitary, rng_for};

fn main() -> dyncool::Result<()> {
    let mut rng = rng_for(42, 0);
    let (k, m, margin) = (3, 5, 1e-4);
    let p = random_laurent(k, m, 0.9, &mut rng)?;

    let pair = complete(&p, margin)?;
    println!("|P|^2 + |Q|^2 - 1 on the circle: {:.2e}", pair.identity_defect(10_000));

    let angles = compute_angles(&pair)?;
    println!("lambda = {:+.6}", angles.lambda);
    for (j, (t, f)) in angles.theta.iter().zip(&angles.phi).enumerate() {
        println!("  step {j:2}: theta {t:+.6}  phi {f:+.6}");
    }

    let u = UnitaryOperator::new(haar_unitary(6, &mut rng))?;
    let (top, _, count) = assemble_block(&angles, &u)?;
    let err = spectral_norm(&(top - polynomial_of_unitary(&p, &u)));
    println!("||<0|W|0> - P(U)|| = {err:.2e}");
    println!("queries: {} controlled-U, {} controlled-U^dagger (k = {k}, m = {m})", count.controlled_u, count.controlled_u_dagger);
    Ok(())
}
