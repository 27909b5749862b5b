//! Dyson-series terms by quadrature: norms and leakage blocks against their
//! bounds, path weights, and convergence of the truncated series.

use std::f64::consts::PI;

use dyncool::certify::random_instance;
use dyncool::dyson::{dyson_series, path_weight, per_term_leakage, term_norm_check, QuadratureGrid};
use dyncool::operator::{evolve, reflection, spectral_norm};

fn main() -> dyncool::Result<()> {
    let (a, pi) = random_instance(4, 9);
    let (delta, t) = (0.04, 2.0 * PI);
    let grid = QuadratureGrid::default();
    println!("k   ||U_k||     bound       ||(1-P)U_k P||  bound");
    for k in 1..=4 {
        let n = term_norm_check(&a, &pi, delta, k, t, grid)?;
        let l = per_term_leakage(&a, &pi, delta, k, t, grid)?;
        println!("{k}   {:.3e}   {:.3e}   {:.3e}       {:.3e}", n.value, n.bound, l.value, l.bound);
    }

    for j in [vec![false], vec![false, true], vec![true, false, true]] {
        let w = path_weight(&j, 5.0, grid)?;
        println!("path {j:?}: |Phi| = {:.4}, bound {:.4}", w.value.norm(), w.bound(5.0));
    }

    let h = reflection(&pi).add(&a.scaled(delta.sqrt() / 2.0))?;
    for order in [1, 2, 4, 6] {
        let series = dyson_series(&a, &pi, delta, order, 5.0, QuadratureGrid::new(1024)?)?;
        println!("K = {order}: ||exact - series|| = {:.2e}", spectral_norm(&(evolve(&h, 5.0).matrix() - series)));
    }
    Ok(())
}
