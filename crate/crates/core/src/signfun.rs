//! Bounded odd polynomial approximations of `sign(x)` and their Fourier
//! (Laurent) counterparts on the unit circle.
//!
//! The real polynomial is an odd Chebyshev series for `erf(kappa x)`:
//! `kappa` puts the erf transition inside `[-eps/2, eps/2]` with error
//! `delta/2`, the series is truncated once the discarded tail is at most
//! `delta/8`, and the result is divided by `(1 + tail)` (and shaved by
//! `min(1e-6, delta/8)`) so that `|P| <= 1` holds strictly. Every polynomial is then certified on a
//! dense grid; the grid, not the construction, is the contract.
//!
//! Substituting `x = sin(theta)` gives the Fourier polynomial
//! `S(e^{i theta}) = P(sin theta)`. For odd `n`,
//! `T_n(sin theta) = (-1)^((n-1)/2) sin(n theta)`, so the Laurent coefficients
//! follow directly from the Chebyshev ones without a monomial detour.

use std::f64::consts::PI;

use statrs::function::erf::{erf, erfc_inv};

use crate::error::{Error, Result};
use crate::operator::{c, eig, HermitianOperator, SpectralDecomposition, C64};

/// Default number of certification grid points.
pub const CERT_GRID: usize = 100_000;
/// Slack allowed on top of the nominal bounds during grid certification.
pub const CERT_SLACK: f64 = 1e-9;
/// Empirical constant in `deg <= C_DEG / eps * ln(1/delta)` for this construction.
pub const C_DEG: f64 = 4.0;
/// Largest shave applied after tail normalization.
const SHAVE: f64 = 1e-6;

/// `C_DEG / eps * ln(1/delta)`.
pub fn degree_bound(epsilon: f64, delta: f64) -> f64 {
    C_DEG / epsilon * (1.0 / delta).ln()
}

fn check_unit_interval(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{v} not in (0, 1)"),
        });
    }
    Ok(())
}

/// Approximation parameters `(eps, delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignParams {
    pub epsilon: f64,
    pub delta: f64,
}

/// Odd real polynomial stored in the Chebyshev basis.
///
/// `odd_chebyshev[i]` multiplies `T_{2i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealOddPolynomial {
    odd_chebyshev: Vec<f64>,
    params: Option<SignParams>,
}

impl RealOddPolynomial {
    pub fn from_odd_chebyshev(odd_chebyshev: Vec<f64>, params: Option<SignParams>) -> Self {
        Self {
            odd_chebyshev,
            params,
        }
    }

    /// From monomial coefficients `[c1, c3, c5, ...]` of `x, x^3, x^5, ...`.
    pub fn from_odd_monomials(monomials: &[f64]) -> Self {
        // x^n = 2^(1-n) sum_{k <= (n-1)/2} C(n, k) T_{n-2k} for odd n.
        let mut odd_chebyshev = vec![0.0; monomials.len()];
        for (i, &coef) in monomials.iter().enumerate() {
            let n = 2 * i + 1;
            let scale = 2f64.powi(1 - n as i32);
            let mut binom = 1.0;
            for k in 0..=(n - 1) / 2 {
                odd_chebyshev[(n - 2 * k - 1) / 2] += coef * scale * binom;
                binom = binom * (n - k) as f64 / (k + 1) as f64;
            }
        }
        Self {
            odd_chebyshev,
            params: None,
        }
    }

    pub fn degree(&self) -> usize {
        match self.odd_chebyshev.iter().rposition(|&c| c != 0.0) {
            Some(i) => 2 * i + 1,
            None => 0,
        }
    }

    pub fn odd_chebyshev(&self) -> &[f64] {
        &self.odd_chebyshev
    }

    pub fn params(&self) -> Option<SignParams> {
        self.params
    }

    /// Clenshaw evaluation of `sum_i c_i T_{2i+1}(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        // Odd-only Clenshaw on T_{2i+1}: T_{n+2} = (4x^2 - 2) T_n - T_{n-2}.
        let alpha = 4.0 * x * x - 2.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &coef in self.odd_chebyshev.iter().rev() {
            let b0 = coef + alpha * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        // T_1 = x, T_{-1} = T_1 = x under the recurrence.
        x * (b1 - b2)
    }
}

/// Chebyshev coefficients `c_n` of `f` on `[-1, 1]` from `nodes` Gauss points.
fn chebyshev_coefficients<F: Fn(f64) -> f64>(f: F, nodes: usize) -> Vec<f64> {
    let theta: Vec<f64> = (0..nodes)
        .map(|j| PI * (j as f64 + 0.5) / nodes as f64)
        .collect();
    let values: Vec<f64> = theta.iter().map(|t| f(t.cos())).collect();
    (0..nodes)
        .map(|n| {
            let s: f64 = theta
                .iter()
                .zip(&values)
                .map(|(t, v)| v * (n as f64 * t).cos())
                .sum();
            2.0 * s / nodes as f64
        })
        .collect()
}

/// Bounded odd polynomial with `|P - sign| <= delta` for `|x| >= eps/2`.
pub fn build_sign_poly(epsilon: f64, delta: f64) -> Result<RealOddPolynomial> {
    let poly = fit_sign_poly(epsilon, delta)?;
    certify_poly(&poly, CERT_GRID)?;
    Ok(poly)
}

fn fit_sign_poly(epsilon: f64, delta: f64) -> Result<RealOddPolynomial> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let kappa = erfc_inv(delta / 2.0) / (epsilon / 2.0);
    let nodes = ((16.0 * kappa) as usize + 64).next_power_of_two().max(256);
    let full = chebyshev_coefficients(|x| erf(kappa * x), nodes);
    let odd: Vec<f64> = full.iter().skip(1).step_by(2).copied().collect();

    // Smallest odd degree whose discarded tail is at most delta/8.
    let mut tail = 0.0;
    let mut keep = odd.len();
    for i in (0..odd.len()).rev() {
        if tail + odd[i].abs() > delta / 8.0 {
            break;
        }
        tail += odd[i].abs();
        keep = i;
    }
    let scale = (1.0 - SHAVE.min(delta / 8.0)) / (1.0 + tail);
    let coefficients = odd[..keep].iter().map(|c| c * scale).collect();
    Ok(RealOddPolynomial::from_odd_chebyshev(coefficients, Some(SignParams { epsilon, delta })))
}

/// Worst-case values found by grid certification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    /// Max of `|P|` (or `|S|`) over the full grid.
    pub max_modulus: f64,
    /// Max of `|P - sign|` over the approximation bands.
    pub max_sign_error: f64,
    /// Max of `|S(-x) + S(x)|`; zero for real polynomials.
    pub max_odd_defect: f64,
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(move |i| lo + i as f64 * step)
}

/// Grid check of both bounded-sign conditions on `[-1, 1]`.
pub fn certify_poly(p: &RealOddPolynomial, points: usize) -> Result<Certificate> {
    let params = p.params.ok_or(Error::InvalidParameter {
        name: "params",
        reason: "polynomial carries no (eps, delta)".into(),
    })?;
    let mut cert = Certificate {
        max_modulus: 0.0,
        max_sign_error: 0.0,
        max_odd_defect: 0.0,
    };
    for x in grid(-1.0, 1.0, points) {
        let v = p.eval(x);
        if v.abs() > 1.0 + CERT_SLACK {
            return Err(Error::Certification {
                condition: "|P(x)| <= 1",
                x,
                value: v.abs(),
                allowed: 1.0 + CERT_SLACK,
            });
        }
        cert.max_modulus = cert.max_modulus.max(v.abs());
        if x.abs() >= params.epsilon / 2.0 {
            let err = (v - x.signum()).abs();
            if err > params.delta + CERT_SLACK {
                return Err(Error::Certification {
                    condition: "|P(x) - sign(x)| <= delta",
                    x,
                    value: err,
                    allowed: params.delta + CERT_SLACK,
                });
            }
            cert.max_sign_error = cert.max_sign_error.max(err);
        }
    }
    Ok(cert)
}

/// Laurent polynomial `sum_{n=-k}^{m} a_n z^n`, evaluated on `z = e^{ix}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPolynomial {
    neg_degree: usize,
    pos_degree: usize,
    coefficients: Vec<C64>,
    params: Option<SignParams>,
}

impl FourierPolynomial {
    /// `coefficients[i]` multiplies `z^(i - k)`.
    pub fn new(neg_degree: usize, pos_degree: usize, coefficients: Vec<C64>) -> Result<Self> {
        let expected = neg_degree + pos_degree + 1;
        if coefficients.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: coefficients.len(),
            });
        }
        Ok(Self {
            neg_degree,
            pos_degree,
            coefficients,
            params: None,
        })
    }

    pub fn zero() -> Self {
        Self {
            neg_degree: 0,
            pos_degree: 0,
            coefficients: vec![C64::new(0.0, 0.0)],
            params: None,
        }
    }

    /// `a z^n` with the degree range `[min(n,0), max(n,0)]`.
    pub fn monomial(n: i64, a: C64) -> Self {
        let k = (-n).max(0) as usize;
        let m = n.max(0) as usize;
        let mut coefficients = vec![C64::new(0.0, 0.0); k + m + 1];
        coefficients[(n + k as i64) as usize] = a;
        Self {
            neg_degree: k,
            pos_degree: m,
            coefficients,
            params: None,
        }
    }

    pub fn with_params(mut self, params: Option<SignParams>) -> Self {
        self.params = params;
        self
    }

    pub fn neg_degree(&self) -> usize {
        self.neg_degree
    }

    pub fn pos_degree(&self) -> usize {
        self.pos_degree
    }

    pub fn params(&self) -> Option<SignParams> {
        self.params
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    /// Coefficient of `z^n` (zero outside the stored range).
    pub fn coefficient(&self, n: i64) -> C64 {
        let idx = n + self.neg_degree as i64;
        if idx < 0 || idx as usize >= self.coefficients.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coefficients[idx as usize]
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    /// `sum_n a_n e^{inx}`.
    pub fn eval(&self, x: f64) -> C64 {
        let k = self.neg_degree as i64;
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
            .map(|(i, a)| a * C64::from_polar(1.0, (i as i64 - k) as f64 * x))
            .sum()
    }

    /// Max of `|S(e^{ix})|` over a uniform grid of `[-pi, pi]`.
    pub fn max_modulus(&self, points: usize) -> f64 {
        grid(-PI, PI, points)
            .map(|x| self.eval(x).norm())
            .fold(0.0, f64::max)
    }
}

/// Same as [`FourierPolynomial::eval`].
pub fn eval_fourier(s: &FourierPolynomial, x: f64) -> C64 {
    s.eval(x)
}

/// `S(e^{ix}) = P(sin x)` with `k = m = deg P`.
///
/// A polynomial built for threshold `eps_P` yields a Fourier polynomial
/// accurate for `|x| >= eps/2` with `sin(eps/2) = eps_P/2`; that `eps` is
/// recorded on the result.
pub fn to_fourier(p: &RealOddPolynomial) -> FourierPolynomial {
    let deg = p.degree();
    let zero = C64::new(0.0, 0.0);
    let mut coefficients = vec![zero; 2 * deg + 1];
    for (i, &cn) in p.odd_chebyshev().iter().enumerate() {
        let n = 2 * i + 1;
        if n > deg {
            break;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        // sin(nx) = (z^n - z^-n) / 2i
        let a = c(0.0, -0.5 * sign * cn);
        coefficients[deg + n] = a;
        coefficients[deg - n] = -a;
    }
    let params = p.params().map(|sp| SignParams {
        epsilon: 2.0 * (sp.epsilon / 2.0).min(1.0).asin(),
        delta: sp.delta,
    });
    FourierPolynomial {
        neg_degree: deg,
        pos_degree: deg,
        coefficients,
        params,
    }
}

/// Degree of `S(., eps, delta)` without building the certificate.
pub fn sign_degree(epsilon: f64, delta: f64) -> Result<usize> {
    check_unit_interval("epsilon", epsilon)?;
    Ok(fit_sign_poly(2.0 * (epsilon / 2.0).sin(), delta)?.degree())
}

/// Fourier sign approximation `S(., eps, delta)`, certified on a grid.
pub fn build_sign_fourier(epsilon: f64, delta: f64) -> Result<FourierPolynomial> {
    check_unit_interval("epsilon", epsilon)?;
    let poly_eps = 2.0 * (epsilon / 2.0).sin();
    let mut s = to_fourier(&build_sign_poly(poly_eps, delta)?);
    s.params = Some(SignParams { epsilon, delta });
    certify_fourier(&s, CERT_GRID)?;
    Ok(s)
}

/// Grid check of the bounded, sign-approximating and odd-symmetry conditions
/// on `[-pi, pi]`.
pub fn certify_fourier(s: &FourierPolynomial, points: usize) -> Result<Certificate> {
    let params = s.params.ok_or(Error::InvalidParameter {
        name: "params",
        reason: "polynomial carries no (eps, delta)".into(),
    })?;
    let half = params.epsilon / 2.0;
    let mut cert = Certificate {
        max_modulus: 0.0,
        max_sign_error: 0.0,
        max_odd_defect: 0.0,
    };
    for x in grid(-PI, PI, points) {
        let v = s.eval(x);
        let modulus = v.norm();
        if modulus > 1.0 + CERT_SLACK {
            return Err(Error::Certification {
                condition: "|S(e^{ix})| <= 1",
                x,
                value: modulus,
                allowed: 1.0 + CERT_SLACK,
            });
        }
        cert.max_modulus = cert.max_modulus.max(modulus);
        let odd = (s.eval(-x) + v).norm();
        if odd > CERT_SLACK {
            return Err(Error::Certification {
                condition: "S(e^{-ix}) = -S(e^{ix})",
                x,
                value: odd,
                allowed: CERT_SLACK,
            });
        }
        cert.max_odd_defect = cert.max_odd_defect.max(odd);
        if x.abs() >= half && x.abs() <= PI - half {
            let err = (v - c(x.signum(), 0.0)).norm();
            if err > params.delta + CERT_SLACK {
                return Err(Error::Certification {
                    condition: "|S(e^{ix}) - sign(x)| <= delta",
                    x,
                    value: err,
                    allowed: params.delta + CERT_SLACK,
                });
            }
            cert.max_sign_error = cert.max_sign_error.max(err);
        }
    }
    Ok(cert)
}

/// Admissible open interval for `lambda - shift`.
pub fn admissible_interval(s: &FourierPolynomial) -> (f64, f64) {
    let half = s.params.map_or(0.0, |p| p.epsilon / 2.0);
    (-PI + half, PI - half)
}

/// `sum_j S(e^{i(l_j - shift)}) |l_j><l_j|` from a precomputed decomposition.
pub fn apply_spectral_decomposed(
    s: &FourierPolynomial,
    decomposition: &SpectralDecomposition,
    shift: f64,
) -> Result<HermitianOperator> {
    let (lower, upper) = admissible_interval(s);
    let mut values = Vec::with_capacity(decomposition.dim());
    for &l in &decomposition.eigenvalues {
        let x = l - shift;
        if !(x > lower && x < upper) {
            return Err(Error::OutOfRange {
                eigenvalue: l,
                lower: lower + shift,
                upper: upper + shift,
            });
        }
        let v = s.eval(x);
        if v.im.abs() > 1e-9 {
            return Err(Error::Numeric {
                stage: "spectral map is not real on the unit circle",
                residual: v.im.abs(),
            });
        }
        values.push(v.re);
    }
    let m = decomposition.map_indexed(|j, _| c(values[j], 0.0));
    Ok(HermitianOperator::from_hermitian_part(&m))
}

/// `S(H - shift)` through the eigenbasis of `H`.
pub fn apply_spectral(s: &FourierPolynomial, h: &HermitianOperator, shift: f64) -> Result<HermitianOperator> {
    apply_spectral_decomposed(s, &eig(h), shift)
}

/// `S(e^{i(H - shift)})` without the interval check; `S` is 2 pi periodic so
/// this is always defined.
pub fn apply_periodic(s: &FourierPolynomial, decomposition: &SpectralDecomposition, shift: f64) -> HermitianOperator {
    let m = decomposition.map(|l| c(s.eval(l - shift).re, 0.0));
    HermitianOperator::from_hermitian_part(&m)
}
