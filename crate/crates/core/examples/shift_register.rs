//! `exp(i SHIFT_n(H))` from a single `exp(iH)` and `n` phase gates, compared
//! with exponentiating the register operator directly.

use dyncool::operator::{evolve, max_abs_diff};
use dyncool::random::random_hermitian;
use dyncool::shift::{register_shift, shift_evolution_factored, shift_operator};

fn main() -> dyncool::Result<()> {
    let h = random_hermitian(3, 7);
    for bits in 1..=4 {
        let s = shift_operator(&h, bits)?;
        let direct = evolve(s.operator(), -1.0);
        let factored = shift_evolution_factored(&h, bits)?;
        println!(
            "n = {bits}: register size {:2}, largest shift {:.4}, max |direct - factored| = {:.2e}",
            s.register_size(),
            register_shift(s.register_size() - 1, bits),
            max_abs_diff(direct.matrix(), factored.matrix())
        );
    }
    Ok(())
}
