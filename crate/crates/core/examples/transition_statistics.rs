//! First-order transition matrix, its cubic remainder, and the Monte-Carlo
//! cooling probability under GUE perturbations.

use dyncool::certify::transition_slope;
use dyncool::dyson::{cooling_probability, sample_gue, transition_matrix};
use dyncool::operator::eig;
use dyncool::random::{random_hermitian, rng_for};

fn main() -> dyncool::Result<()> {
    let n = 8;
    let s = eig(&random_hermitian(n, 4));
    let mut rng = rng_for(4, 1);
    let a = sample_gue(n, &mut rng)?.scaled(0.2);
    let t = transition_matrix(&s, &a, 0.0)?;
    println!("column sums: {:.4?}", t.column_sums());
    println!("max |exact - first order| = {:.2e}", t.first_order_error());
    println!("remainder slope in s: {:.3}", transition_slope(n, &[0.4, 0.2, 0.1, 0.05], 4)?);

    for j in [0, n / 2, n - 1] {
        let p = cooling_probability(&s, j, 10_000, &mut rng)?;
        println!("level {j}: empirical {:.5} +- {:.5}, predicted {:.5}", p.empirical, p.std_error, p.predicted);
    }
    Ok(())
}
