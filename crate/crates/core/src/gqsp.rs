//! Generalized quantum signal processing: complementary polynomials, phase
//! angle synthesis and circuit assembly.
//!
//! The circuit acting on `ancilla (x) system` is
//!
//! ```text
//! W = R_{m+k} A'  ...  R_{m+1} A'  R_m A  ...  R_1 A  R_0(lambda)
//! ```
//!
//! with `A = |0><0| (x) U + |1><1| (x) I` and `A' = |0><0| (x) I + |1><1| (x) U^dagger`.
//! On an eigenvector of `U` with eigenvalue `z` the first column of `W` is
//! `(P(z), Q(z))`, so the top-left block of `W` is `P(U)`.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{c, ensure_square, CMatrix, UnitaryOperator, C64};
use crate::signfun::FourierPolynomial;

/// Default margin `eta` applied before completion.
pub const DEFAULT_MARGIN: f64 = 1e-4;
/// Grid used for the margin precondition and the completion identity.
pub const COMPLETION_GRID: usize = 10_000;
/// Allowed deviation of `|P|^2 + |Q|^2` from 1 on the grid.
pub const COMPLETION_TOL: f64 = 1e-8;
/// Allowed size of a coefficient discarded while peeling.
pub const SYNTHESIS_TOL: f64 = 1e-8;

/// `R(theta, phi, lambda)` as a 2x2 matrix.
pub fn rotation_matrix(theta: f64, phi: f64, lambda: f64) -> UnitaryOperator {
    let (s, co) = theta.sin_cos();
    let mut r = CMatrix::zeros(2, 2);
    r[(0, 0)] = C64::from_polar(co, lambda + phi);
    r[(0, 1)] = C64::from_polar(s, phi);
    r[(1, 0)] = C64::from_polar(s, lambda);
    r[(1, 1)] = c(-co, 0.0);
    UnitaryOperator::new_unchecked(r)
}

/// A polynomial `P` together with `Q` such that `|P|^2 + |Q|^2 = 1` on the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletionPair {
    pub p: FourierPolynomial,
    pub q: FourierPolynomial,
}

impl CompletionPair {
    /// Max of `||P|^2 + |Q|^2 - 1|` on a uniform grid of `[-pi, pi]`.
    pub fn identity_defect(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = -PI + 2.0 * PI * i as f64 / points as f64;
                (self.p.eval(x).norm_sqr() + self.q.eval(x).norm_sqr() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Rotation angles `theta_j, phi_j` for `j = 0..=k+m` plus `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSequence {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: f64,
    pub k: usize,
    pub m: usize,
}

impl AngleSequence {
    pub fn new(theta: Vec<f64>, phi: Vec<f64>, lambda: f64, k: usize, m: usize) -> Result<Self> {
        for len in [theta.len(), phi.len()] {
            if len != k + m + 1 {
                return Err(Error::DimensionMismatch {
                    expected: k + m + 1,
                    actual: len,
                });
            }
        }
        Ok(Self {
            theta,
            phi,
            lambda,
            k,
            m,
        })
    }

    /// All angles zero.
    pub fn zeros(k: usize, m: usize) -> Self {
        Self {
            theta: vec![0.0; k + m + 1],
            phi: vec![0.0; k + m + 1],
            lambda: 0.0,
            k,
            m,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Dense coefficients of `p` over the degree range `[lo, hi]`.
fn coefficients_in_range(p: &FourierPolynomial, lo: i64, hi: i64) -> Vec<C64> {
    (lo..=hi).map(|n| p.coefficient(n)).collect()
}

fn max_modulus_on_grid(p: &FourierPolynomial, points: usize) -> f64 {
    (0..points)
        .map(|i| p.eval(-PI + 2.0 * PI * i as f64 / points as f64).norm())
        .fold(0.0, f64::max)
}

/// Evaluate an ordinary polynomial (ascending coefficients) and its derivative.
fn horner_with_derivative(coef: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for a in coef.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton ratio `p(z) / p'(z)`; evaluates the reversed polynomial outside
/// the unit disk to avoid overflow.
fn newton_ratio(coef: &[C64], rev: &[C64], z: C64) -> C64 {
    if z.norm() <= 1.0 {
        let (p, dp) = horner_with_derivative(coef, z);
        p / dp
    } else {
        let w = z.inv();
        let (q, dq) = horner_with_derivative(rev, w);
        z * q / (q * (coef.len() - 1) as f64 - w * dq)
    }
}

/// All roots of an ordinary polynomial with nonzero leading and constant
/// coefficients (Aberth-Ehrlich iteration).
fn polynomial_roots(coef: &[C64]) -> Result<Vec<C64>> {
    let deg = coef.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let rev: Vec<C64> = coef.iter().rev().copied().collect();
    let radius = (coef[0].norm() / coef[deg].norm()).powf(1.0 / deg as f64);
    let mut roots: Vec<C64> = (0..deg)
        .map(|j| C64::from_polar(radius, 2.0 * PI * j as f64 / deg as f64 + 0.4))
        .collect();
    let mut converged = vec![false; deg];
    for _ in 0..1000 {
        for i in 0..deg {
            if converged[i] {
                continue;
            }
            let zi = roots[i];
            let ratio = newton_ratio(coef, &rev, zi);
            let repulsion: C64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, zj)| (zi - zj).inv())
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                roots[i] = zi - step;
            }
            converged[i] = !step.is_finite() || step.norm() <= 4.0 * f64::EPSILON * roots[i].norm().max(1e-300);
        }
        if converged.iter().all(|&done| done) {
            return Ok(roots);
        }
    }
    let residual = roots
        .iter()
        .map(|&z| newton_ratio(coef, &rev, z).norm() / z.norm().max(1.0))
        .fold(0.0, f64::max);
    if residual <= 1e-10 {
        Ok(roots)
    } else {
        Err(Error::Numeric {
            stage: "polynomial root finding",
            residual,
        })
    }
}

/// Complementary polynomial by Fejer-Riesz factorization of `1 - |P|^2`.
///
/// Requires `max |P| <= 1 - margin` on the certification grid.
pub fn complete(p: &FourierPolynomial, margin: f64) -> Result<CompletionPair> {
    if !(margin >= 1e-6 && margin < 1.0) {
        return Err(Error::InvalidParameter {
            name: "margin",
            reason: format!("{margin} not in [1e-6, 1)"),
        });
    }
    let max_modulus = max_modulus_on_grid(p, COMPLETION_GRID);
    if max_modulus > 1.0 - margin + 1e-12 {
        return Err(Error::Margin { max_modulus, margin });
    }
    let (k, m) = (p.neg_degree(), p.pos_degree());
    let n = k + m;
    let a = coefficients_in_range(p, -(k as i64), m as i64);

    // D(z) = 1 - P(z) conj(P)(1/z); d[i] is the coefficient of z^(i - n).
    let mut d = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for j in -(n as i64)..=(n as i64) {
        let mut s = C64::new(0.0, 0.0);
        for (i, ai) in a.iter().enumerate() {
            let other = i as i64 - j;
            if other >= 0 && (other as usize) < a.len() {
                s += ai * a[other as usize].conj();
            }
        }
        d[(j + n as i64) as usize] = -s;
    }
    d[n] += 1.0;
    let d0 = d[n].re;

    // Strip symmetric zero roots (and the matching roots at infinity).
    let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut zeros = 0;
    while zeros < n && d[zeros].norm() <= 1e-14 * scale && d[2 * n - zeros].norm() <= 1e-14 * scale {
        zeros += 1;
    }
    let reduced = &d[zeros..=2 * n - zeros];
    let mut roots = polynomial_roots(reduced)?;
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    roots.truncate(n - zeros);
    roots.extend(std::iter::repeat_n(C64::new(0.0, 0.0), zeros));

    // Q~(z) = prod (z - r) on an FFT grid; normalize by the constant mode.
    let points = (4 * (n + 1)).next_power_of_two();
    let mut values: Vec<C64> = (0..points)
        .map(|i| {
            let z = C64::from_polar(1.0, 2.0 * PI * i as f64 / points as f64);
            roots.iter().map(|r| z - r).product()
        })
        .collect();
    let mean_sq = values.iter().map(|v| v.norm_sqr()).sum::<f64>() / points as f64;
    if !(d0 >= 0.0 && mean_sq > 0.0) {
        return Err(Error::Numeric {
            stage: "completion normalization",
            residual: d0,
        });
    }
    let norm = (d0 / mean_sq).sqrt();
    FftPlanner::new().plan_fft_forward(points).process(&mut values);
    let q_coef: Vec<C64> = values[..=n].iter().map(|v| v * (norm / points as f64)).collect();
    let q = FourierPolynomial::new(k, m, q_coef)?;

    let pair = CompletionPair { p: p.clone(), q };
    let residual = pair.identity_defect(COMPLETION_GRID);
    if residual > COMPLETION_TOL {
        return Err(Error::Numeric {
            stage: "completion identity |P|^2 + |Q|^2 = 1",
            residual,
        });
    }
    Ok(pair)
}

/// `(theta, phi)` that zero out the step's discarded modes.
fn step_angles(hi: (C64, C64), lo: (C64, C64)) -> (f64, f64) {
    let (a, b) = hi;
    let (cl, dl) = lo;
    let tiny = 1e-14;
    if a.norm_sqr() + b.norm_sqr() >= cl.norm_sqr() + dl.norm_sqr() && a.norm() + b.norm() > tiny {
        (b.norm().atan2(a.norm()), a.arg() - b.arg())
    } else if cl.norm() + dl.norm() > tiny {
        (cl.norm().atan2(dl.norm()), cl.arg() - dl.arg() - PI)
    } else {
        (0.0, 0.0)
    }
}

/// Apply `R(theta, phi, 0)^dagger` coefficient-wise.
fn rotate_back(p: &[C64], q: &[C64], theta: f64, phi: f64) -> (Vec<C64>, Vec<C64>) {
    let (s, co) = theta.sin_cos();
    let e = C64::from_polar(1.0, -phi);
    let new_p = p.iter().zip(q).map(|(a, b)| e * co * a + b * s).collect();
    let new_q = p.iter().zip(q).map(|(a, b)| e * s * a - b * co).collect();
    (new_p, new_q)
}

/// Peel a completion pair into GQSP angles.
pub fn compute_angles(pair: &CompletionPair) -> Result<AngleSequence> {
    let k = pair.p.neg_degree().max(pair.q.neg_degree());
    let m = pair.p.pos_degree().max(pair.q.pos_degree());
    let mut p = coefficients_in_range(&pair.p, -(k as i64), m as i64);
    let mut q = coefficients_in_range(&pair.q, -(k as i64), m as i64);
    let mut theta = vec![0.0; k + m + 1];
    let mut phi = vec![0.0; k + m + 1];

    // Steps are undone from the outside in: the k inverse steps, then the m forward ones.
    for step in (1..=k + m).rev() {
        let last = p.len() - 1;
        let (t, f) = step_angles((p[last], q[last]), (p[0], q[0]));
        let (np, nq) = rotate_back(&p, &q, t, f);
        // Inverse steps: P drops its lowest mode, Q its highest and gains a
        // factor z. Forward steps: P drops its constant mode and loses a
        // factor z, Q drops its highest. Either way the coefficient vectors
        // lose their first and last entries respectively.
        let residual = np[0].norm().max(nq[last].norm());
        if residual > SYNTHESIS_TOL {
            return Err(Error::Synthesis { step, residual });
        }
        theta[step] = t;
        phi[step] = f;
        p = np[1..].to_vec();
        q = nq[..last].to_vec();
    }
    let (a, b) = (p[0], q[0]);
    let lambda = if b.norm() > 1e-14 { b.arg() } else { 0.0 };
    theta[0] = b.norm().atan2(a.norm());
    phi[0] = if a.norm() > 1e-14 { a.arg() - lambda } else { 0.0 };
    AngleSequence::new(theta, phi, lambda, k, m)
}

/// Number of controlled-`U` and controlled-`U^dagger` applications.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCount {
    pub controlled_u: usize,
    pub controlled_u_dagger: usize,
}

fn rotation_entries(theta: f64, phi: f64, lambda: f64) -> [[C64; 2]; 2] {
    let r = rotation_matrix(theta, phi, lambda).into_matrix();
    [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]]
}

/// First block column `(P(U), Q(U))` of the circuit plus its query count.
pub fn assemble_block(angles: &AngleSequence, u: &UnitaryOperator) -> Result<(CMatrix, CMatrix, QueryCount)> {
    let n = u.dim();
    let r = rotation_entries(angles.theta[0], angles.phi[0], angles.lambda);
    let id = CMatrix::identity(n, n);
    let mut top = &id * r[0][0];
    let mut bottom = &id * r[1][0];
    let mut count = QueryCount::default();
    let u_dag = u.adjoint();
    for j in 1..angles.len() {
        if j <= angles.m {
            top = u.matrix() * top;
            count.controlled_u += 1;
        } else {
            bottom = u_dag.matrix() * bottom;
            count.controlled_u_dagger += 1;
        }
        let r = rotation_entries(angles.theta[j], angles.phi[j], 0.0);
        let new_top = &top * r[0][0] + &bottom * r[0][1];
        bottom = &top * r[1][0] + &bottom * r[1][1];
        top = new_top;
    }
    Ok((top, bottom, count))
}

/// Top-left `dim(U) x dim(U)` block of the assembled circuit.
pub fn assemble_and_extract(angles: &AngleSequence, u: &UnitaryOperator) -> Result<CMatrix> {
    Ok(assemble_block(angles, u)?.0)
}

/// The whole `2 dim(U)` square circuit, built from explicit direct sums.
pub fn assemble_full(angles: &AngleSequence, u: &UnitaryOperator) -> Result<(UnitaryOperator, QueryCount)> {
    let n = ensure_square(u.matrix())?;
    let id = CMatrix::identity(n, n);
    let direct_sum = |a: &CMatrix, b: &CMatrix| {
        let mut out = CMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, n)).copy_from(a);
        out.view_mut((n, n), (n, n)).copy_from(b);
        out
    };
    let forward = direct_sum(u.matrix(), &id);
    let inverse = direct_sum(&id, u.adjoint().matrix());
    let rot = |j: usize, lambda: f64| rotation_matrix(angles.theta[j], angles.phi[j], lambda).into_matrix().kronecker(&id);
    let mut w = rot(0, angles.lambda);
    let mut count = QueryCount::default();
    for j in 1..angles.len() {
        if j <= angles.m {
            w = &forward * w;
            count.controlled_u += 1;
        } else {
            w = &inverse * w;
            count.controlled_u_dagger += 1;
        }
        w = rot(j, 0.0) * w;
    }
    Ok((UnitaryOperator::new_unchecked(w), count))
}

/// Angles for `(1 - margin) S`.
pub fn synthesize(s: &FourierPolynomial, margin: f64) -> Result<AngleSequence> {
    compute_angles(&complete(&s.scaled(1.0 - margin), margin)?)
}

/// `sum_n a_n U^n` by direct powers; reference for the circuit.
pub fn polynomial_of_unitary(s: &FourierPolynomial, u: &UnitaryOperator) -> CMatrix {
    let n = u.dim();
    let mut out = CMatrix::zeros(n, n);
    let mut power = CMatrix::identity(n, n);
    for j in 0..=s.pos_degree() as i64 {
        out += &power * s.coefficient(j);
        power = u.matrix() * power;
    }
    let mut power = u.adjoint().into_matrix();
    for j in 1..=s.neg_degree() as i64 {
        out += &power * s.coefficient(-j);
        power = u.adjoint().matrix() * power;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{evolve, max_abs_diff, spectral_norm};
    use crate::random::{haar_unitary, random_hermitian, rng_for};
    use crate::signfun::{apply_spectral, build_sign_fourier};
    use rand::Rng;

    fn random_poly(k: usize, m: usize, max_modulus: f64, seed: u64) -> FourierPolynomial {
        let mut rng = rng_for(seed, 0);
        let coef = (0..=k + m)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let p = FourierPolynomial::new(k, m, coef).unwrap();
        let scale = max_modulus / max_modulus_on_grid(&p, 20_000);
        p.scaled(scale)
    }

    fn unitary(dim: usize, seed: u64) -> UnitaryOperator {
        UnitaryOperator::new(haar_unitary(dim, &mut rng_for(seed, 3))).unwrap()
    }

    #[test]
    fn rotation_examples() {
        let r = rotation_matrix(0.0, 0.0, 0.0);
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(max_abs_diff(r.matrix(), &expected) < 1e-15);
        let r = rotation_matrix(PI / 2.0, 0.0, 0.0);
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(r.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn rotations_are_unitary() {
        let mut rng = rng_for(2, 0);
        for _ in 0..100 {
            let r = rotation_matrix(rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let prod = r.matrix() * r.matrix().adjoint();
            assert!(max_abs_diff(&prod, &CMatrix::identity(2, 2)) < 1e-12);
        }
    }

    #[test]
    fn complete_zero() {
        let pair = complete(&FourierPolynomial::zero(), 1e-4).unwrap();
        assert!((pair.q.coefficient(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_monomial() {
        let eta = 1e-3;
        let p = FourierPolynomial::monomial(1, c(1.0 - eta, 0.0));
        let pair = complete(&p, eta).unwrap();
        let expected = (1.0 - (1.0 - eta) * (1.0f64 - eta)).sqrt();
        for x in [-2.0, 0.0, 1.0, 3.0] {
            assert!((pair.q.eval(x).norm() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn complete_random_degree_eight() {
        for seed in 0..5 {
            let p = random_poly(3, 5, 0.9, seed);
            let pair = complete(&p, 1e-4).unwrap();
            assert!(pair.identity_defect(10_000) <= 1e-8);
            assert!(pair.q.neg_degree() <= 3 && pair.q.pos_degree() <= 5);
        }
    }

    #[test]
    fn complete_rejects_tangent_polynomial() {
        let p = FourierPolynomial::monomial(2, c(1.0, 0.0));
        assert!(matches!(complete(&p, 1e-4), Err(Error::Margin { .. })));
        assert!(complete(&FourierPolynomial::zero(), 0.0).is_err());
    }

    #[test]
    fn angles_for_zero_polynomial() {
        let pair = CompletionPair {
            p: FourierPolynomial::zero(),
            q: FourierPolynomial::monomial(0, c(1.0, 0.0)),
        };
        let angles = compute_angles(&pair).unwrap();
        assert_eq!(angles.len(), 1);
        assert!((angles.theta[0] - PI / 2.0).abs() < 1e-15);
        let u = unitary(3, 1);
        assert!(max_abs(&assemble_and_extract(&angles, &u).unwrap()) < 1e-15);
    }

    fn max_abs(m: &CMatrix) -> f64 {
        crate::operator::max_abs(m)
    }

    #[test]
    fn monomial_gives_power_of_u() {
        for m in 1..=4 {
            let pair = CompletionPair {
                p: FourierPolynomial::monomial(m as i64, c(1.0, 0.0)),
                q: FourierPolynomial::zero(),
            };
            let angles = compute_angles(&pair).unwrap();
            let u = unitary(4, m as u64);
            let mut power = CMatrix::identity(4, 4);
            for _ in 0..m {
                power = u.matrix() * power;
            }
            assert!(max_abs_diff(&assemble_and_extract(&angles, &u).unwrap(), &power) < 1e-12);
        }
    }

    #[test]
    fn identity_polynomial_block_is_u() {
        let pair = CompletionPair {
            p: FourierPolynomial::monomial(1, c(1.0, 0.0)),
            q: FourierPolynomial::zero(),
        };
        let angles = compute_angles(&pair).unwrap();
        let u = unitary(5, 8);
        assert!(max_abs_diff(&assemble_and_extract(&angles, &u).unwrap(), u.matrix()) < 1e-12);
    }

    #[test]
    fn random_pair_reconstruction() {
        let p = random_poly(2, 3, 0.95, 11);
        let angles = compute_angles(&complete(&p, 1e-4).unwrap()).unwrap();
        assert_eq!((angles.k, angles.m), (2, 3));
        let u = unitary(4, 12);
        let err = max_abs_diff(&assemble_and_extract(&angles, &u).unwrap(), &polynomial_of_unitary(&p, &u));
        assert!(err <= 1e-8, "{err:e}");
    }

    #[test]
    fn end_to_end_random_pairs() {
        let mut rng = rng_for(99, 0);
        for trial in 0..50 {
            let k = rng.random_range(0..=8);
            let m = rng.random_range(0..=8);
            let dim = rng.random_range(1..=8);
            let p = random_poly(k, m, rng.random_range(0.1..0.99), 1000 + trial);
            let angles = synthesize(&p, 1e-6).unwrap();
            let u = unitary(dim, 2000 + trial);
            let target = polynomial_of_unitary(&p.scaled(1.0 - 1e-6), &u);
            let err = spectral_norm(&(assemble_and_extract(&angles, &u).unwrap() - target));
            assert!(err <= 1e-7, "trial {trial}: {err:e}");
        }
    }

    #[test]
    fn invalid_pair_is_rejected() {
        let half = c(0.5, 0.0);
        let p = FourierPolynomial::new(0, 1, vec![half, half]).unwrap();
        let pair = CompletionPair { q: p.clone(), p };
        assert!(matches!(compute_angles(&pair), Err(Error::Synthesis { step: 1, .. })));
    }

    #[test]
    fn zero_angles_match_direct_product() {
        let angles = AngleSequence::zeros(1, 2);
        let u = unitary(3, 5);
        let (full, count) = assemble_full(&angles, &u).unwrap();
        // R(0,0,0) = Z, so every step multiplies the top block by U (or I) and
        // the bottom block by -1 (or -U^dagger).
        let block = full.matrix().view((0, 0), (3, 3)).into_owned();
        let mut oracle = CMatrix::identity(3, 3);
        for _ in 0..2 {
            oracle = u.matrix() * oracle;
        }
        assert!(max_abs_diff(&block, &oracle) < 1e-12);
        assert!(max_abs_diff(&assemble_and_extract(&angles, &u).unwrap(), &block) < 1e-12);
        assert_eq!(count.controlled_u, 2);
        assert_eq!(count.controlled_u_dagger, 1);
    }

    #[test]
    fn full_product_is_unitary_for_arbitrary_angles() {
        let mut rng = rng_for(21, 0);
        for _ in 0..10 {
            let (k, m) = (rng.random_range(0..4), rng.random_range(0..4));
            let angles = AngleSequence::new(
                (0..=k + m).map(|_| rng.random_range(-PI..PI)).collect(),
                (0..=k + m).map(|_| rng.random_range(-PI..PI)).collect(),
                rng.random_range(-PI..PI),
                k,
                m,
            )
            .unwrap();
            let (w, count) = assemble_full(&angles, &unitary(3, rng.random())).unwrap();
            assert!(w.unitarity_defect() <= 1e-9);
            assert_eq!((count.controlled_u, count.controlled_u_dagger), (m, k));
        }
    }

    #[test]
    fn sign_polynomial_through_circuit() {
        let s = build_sign_fourier(0.3, 0.1).unwrap();
        let h = random_hermitian(4, 77);
        let u = evolve(&h, -1.0);
        let angles = synthesize(&s, DEFAULT_MARGIN).unwrap();
        let block = assemble_and_extract(&angles, &u).unwrap() / c(1.0 - DEFAULT_MARGIN, 0.0);
        let oracle = apply_spectral(&s, &h, 0.0).unwrap();
        let err = spectral_norm(&(block - oracle.matrix()));
        assert!(err <= 1e-7, "{err:e}");
    }

    #[test]
    fn polynomial_of_unitary_matches_spectral_evaluation() {
        let p = random_poly(2, 2, 0.8, 4);
        let h = random_hermitian(3, 4);
        let u = evolve(&h, -1.0);
        let direct = polynomial_of_unitary(&p, &u);
        let d = crate::operator::eig(&h);
        let spectral = d.map(|l| p.eval(l));
        assert!(max_abs_diff(&direct, &spectral) < 1e-12);
    }
}
