//! Build the smooth sign approximation, certify it, and evaluate a few points.
//!
//! cargo run --example sign_polynomial -- 0.1 0.01

use dyncool::signfun::{build_sign_fourier, build_sign_poly, certify_fourier, certify_poly, degree_bound, CERT_GRID};

fn main() -> dyncool::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let eps = args.first().copied().unwrap_or(0.1);
    let delta = args.get(1).copied().unwrap_or(0.01);

    let p = build_sign_poly(eps, delta)?;
    let cert = certify_poly(&p, CERT_GRID)?;
    println!("polynomial: degree {} (envelope {:.1})", p.degree(), degree_bound(eps, delta));
    println!("  max |P| = {:.12}, max |P - sign| outside (-eps/2, eps/2) = {:.3e}", cert.max_modulus, cert.max_sign_error);

    let s = build_sign_fourier(eps, delta)?;
    let cert = certify_fourier(&s, CERT_GRID)?;
    println!("fourier: modes -{}..{}", s.neg_degree(), s.pos_degree());
    println!("  max |S| = {:.12}, band error = {:.3e}, odd defect = {:.1e}", cert.max_modulus, cert.max_sign_error, cert.max_odd_defect);

    for x in [-0.9, -eps, -eps / 4.0, 0.0, eps / 4.0, eps, 0.9] {
        println!("  P({x:+.4}) = {:+.6}   S(e^i{x:+.4}) = {:+.6}", p.eval(x), s.eval(x).re);
    }
    Ok(())
}
