//! The same cooling step with `H_sign` realized exactly and through the
//! synthesized circuit.

use dyncool::cooling::{build_hsign, Mode};
use dyncool::operator::max_abs_diff;
use dyncool::random::random_hermitian;

fn main() -> dyncool::Result<()> {
    let h = random_hermitian(4, 11);
    let (eps, delta, energy) = (0.3, 0.1, 0.05);
    let exact = build_hsign(&h, energy, eps, delta, Mode::ExactSpectral)?;
    let circuit = build_hsign(&h, energy, eps, delta, Mode::GqspCircuit)?;
    println!("max |H_sign(exact) - H_sign(circuit)| = {:.2e}", max_abs_diff(exact.matrix(), circuit.matrix()));
    Ok(())
}
