use proptest::prelude::*;

use dyncool::certify::random_laurent;
use dyncool::format::{float, parse_matrix, write_matrix};
use dyncool::gqsp::{assemble_block, polynomial_of_unitary, rotation_matrix, synthesize};
use dyncool::operator::{spectral_norm, CMatrix, UnitaryOperator, C64};
use dyncool::random::{haar_unitary, rng_for};
use dyncool::signfun::RealOddPolynomial;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rotations_are_unitary(theta in -7.0..7.0f64, phi in -7.0..7.0f64, lambda in -7.0..7.0f64) {
        prop_assert!(rotation_matrix(theta, phi, lambda).unitarity_defect() < 1e-14);
    }

    #[test]
    fn synthesized_circuits_reconstruct(k in 0usize..6, m in 0usize..6, dim in 1usize..5, seed in 0u64..1000) {
        let mut rng = rng_for(seed, 0);
        let p = random_laurent(k, m, 0.95, &mut rng).unwrap();
        let angles = synthesize(&p, 1e-6).unwrap();
        let u = UnitaryOperator::new(haar_unitary(dim, &mut rng)).unwrap();
        let (top, _, count) = assemble_block(&angles, &u).unwrap();
        let err = spectral_norm(&(top - polynomial_of_unitary(&p.scaled(1.0 - 1e-6), &u)));
        prop_assert!(err < 1e-7, "{err:e}");
        prop_assert_eq!((count.controlled_u, count.controlled_u_dagger), (m, k));
    }

    #[test]
    fn odd_polynomials_are_odd(coef in prop::collection::vec(-1.0..1.0f64, 1..8), x in -1.0..1.0f64) {
        let p = RealOddPolynomial::from_odd_chebyshev(coef, None);
        prop_assert!((p.eval(-x) + p.eval(x)).abs() < 1e-13);
    }

    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(float(x).parse::<f64>().unwrap(), x + 0.0);
    }

    #[test]
    fn matrices_round_trip(entries in prop::collection::vec((any::<f64>(), any::<f64>()), 9)) {
        prop_assume!(entries.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        let m = CMatrix::from_iterator(3, 3, entries.iter().map(|&(a, b)| C64::new(a, b) + C64::new(0.0, 0.0)));
        prop_assert_eq!(parse_matrix(&write_matrix(&m), "prop").unwrap(), m);
    }
}
