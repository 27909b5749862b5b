//! Numerical checks of the perturbed-reflection evolution.
//!
//! The setting is `H~ = REF(Pi) + (sqrt(delta)/2) A` with `H0 = REF(Pi)`.
//! Since `H0` has eigenvalues `-1` on `Pi` and `+1` on its complement,
//! `e^{i H0 s} = e^{is} (I - Pi) + e^{-is} Pi` is available in closed form and
//! the interaction-picture propagator `U(t) = e^{i H0 t} e^{-i H~ t}` expands as
//! `sum_k U_k(t)` with
//!
//! ```text
//! U_0 = I,   U_k(t) = int_0^t B(s) U_{k-1}(s) ds,   B(s) = (sqrt(delta)/2i) e^{i H0 s} A e^{-i H0 s}.
//! ```
//!
//! Integrals are cumulative composite Simpson on a uniform grid; each result
//! carries a Richardson error estimate from a second pass at half the step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cooling::evolution_time;
use crate::error::{Error, Result};
use crate::operator::{c, evolve, reflection, spectral_norm, CMatrix, HermitianOperator, Projector, SpectralDecomposition, C64};
use crate::random::gue_matrix;

/// Minimum number of quadrature intervals.
pub const MIN_INTERVALS: usize = 256;
/// Highest Dyson order computed.
pub const MAX_ORDER: usize = 8;

fn check_inputs(a: &HermitianOperator, pi: &Projector, delta: f64) -> Result<()> {
    if a.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            actual: a.dim(),
        });
    }
    let norm = a.spectral_norm();
    if norm > 1.0 + 1e-10 {
        return Err(Error::InvalidParameter {
            name: "A",
            reason: format!("spectral norm {norm} exceeds 1"),
        });
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} not in (0, 1)"),
        });
    }
    Ok(())
}

fn perturbed(a: &HermitianOperator, pi: &Projector, delta: f64) -> Result<HermitianOperator> {
    reflection(pi).add(&a.scaled(delta.sqrt() / 2.0))
}

fn complement_matrix(pi: &Projector) -> CMatrix {
    pi.complement().matrix().clone()
}

/// `||(I - Pi) e^{-i H~ t} Pi||^2` at `t = pi ceil(1/(pi sqrt(delta)))`.
pub fn leakage(a: &HermitianOperator, pi: &Projector, delta: f64) -> Result<f64> {
    check_inputs(a, pi, delta)?;
    let u = evolve(&perturbed(a, pi, delta)?, evolution_time(delta));
    let block = complement_matrix(pi) * u.matrix() * pi.matrix();
    Ok(spectral_norm(&block).powi(2))
}

/// `||e^{-it} Pi e^{-i H~ t} Pi - e^{-i Pi (A/2) Pi} Pi||^2` at `t = 1/sqrt(delta)`.
///
/// The phase `e^{-it}` removes the trivial evolution `e^{-i H0 t} Pi = e^{it} Pi`.
pub fn effective_error(a: &HermitianOperator, pi: &Projector, delta: f64) -> Result<f64> {
    check_inputs(a, pi, delta)?;
    let t = 1.0 / delta.sqrt();
    let u = evolve(&perturbed(a, pi, delta)?, t);
    let lhs = pi.matrix() * u.matrix() * pi.matrix() * C64::from_polar(1.0, -t);
    let rhs = effective_map(a, pi).matrix() * pi.matrix();
    Ok(spectral_norm(&(lhs - rhs)).powi(2))
}

/// `e^{-i Pi (A/2) Pi}`.
pub fn effective_map(a: &HermitianOperator, pi: &Projector) -> crate::operator::UnitaryOperator {
    let compressed = pi.matrix() * a.matrix() * pi.matrix() * c(0.5, 0.0);
    evolve(&HermitianOperator::from_hermitian_part(&compressed), 1.0)
}

/// Uniform quadrature grid with an even number of intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub intervals: usize,
}

impl QuadratureGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < MIN_INTERVALS || intervals % 2 != 0 {
            return Err(Error::InvalidParameter {
                name: "intervals",
                reason: format!("{intervals} must be even and >= {MIN_INTERVALS}"),
            });
        }
        Ok(Self { intervals })
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { intervals: 512 }
    }
}

/// Running integrals `F(s_i) = int_0^{s_i} f` on a uniform grid.
///
/// Even nodes use composite Simpson; odd nodes add the one-interval rule
/// `h (5 f_{i-1} + 8 f_i - f_{i+1}) / 12` to the previous even node.
fn cumulative_simpson<T>(values: &[T], h: f64, zero: T) -> Vec<T>
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Mul<C64, Output = T>,
    for<'x> &'x T: std::ops::Add<&'x T, Output = T>,
{
    let n = values.len() - 1;
    let mut out = vec![zero; n + 1];
    for i in (2..=n).step_by(2) {
        let panel = (&values[i - 2] + &values[i]) * c(h / 3.0, 0.0) + values[i - 1].clone() * c(4.0 * h / 3.0, 0.0);
        out[i] = &out[i - 2] + &panel;
    }
    for i in (1..n).step_by(2) {
        let single = values[i - 1].clone() * c(5.0 * h / 12.0, 0.0)
            + values[i].clone() * c(8.0 * h / 12.0, 0.0)
            + values[i + 1].clone() * c(-h / 12.0, 0.0);
        out[i] = &out[i - 1] + &single;
    }
    out
}

fn interaction_coupling(a: &HermitianOperator, pi: &Projector, delta: f64, s: f64) -> CMatrix {
    let q = complement_matrix(pi);
    let rotate = |sign: f64| &q * C64::from_polar(1.0, sign * s) + pi.matrix() * C64::from_polar(1.0, -sign * s);
    rotate(1.0) * a.matrix() * rotate(-1.0) * C64::new(0.0, -delta.sqrt() / 2.0)
}

/// `U_0(s_i), ..., U_K(s_i)` on every grid node.
fn dyson_on_grid(a: &HermitianOperator, pi: &Projector, delta: f64, max_order: usize, t: f64, intervals: usize) -> Vec<Vec<CMatrix>> {
    let n = a.dim();
    let h = t / intervals as f64;
    let couplings: Vec<CMatrix> = (0..=intervals)
        .map(|i| interaction_coupling(a, pi, delta, i as f64 * h))
        .collect();
    let mut orders = vec![vec![CMatrix::identity(n, n); intervals + 1]];
    for _ in 1..=max_order {
        let prev = orders.last().expect("order zero present");
        let integrand: Vec<CMatrix> = couplings.iter().zip(prev).map(|(b, u)| b * u).collect();
        orders.push(cumulative_simpson(&integrand, h, CMatrix::zeros(n, n)));
    }
    orders
}

/// `t^k delta^{k/2} / (k! 2^k)`.
pub fn term_norm_bound(k: usize, t: f64, delta: f64) -> f64 {
    (t * delta.sqrt() / 2.0).powi(k as i32) / factorial(k)
}

/// `t^{k-1} delta^{k/2} / ((k-1)! 2)`.
pub fn term_leakage_bound(k: usize, t: f64, delta: f64) -> f64 {
    t.powi(k as i32 - 1) * delta.powf(k as f64 / 2.0) / (factorial(k - 1) * 2.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// One order of the Dyson series at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DysonTerm {
    pub order: usize,
    pub operator: CMatrix,
    pub time: f64,
    pub delta: f64,
    pub error_estimate: f64,
}

impl DysonTerm {
    /// `max(1e-8, 2 * error estimate)`.
    pub fn slack(&self) -> f64 {
        slack(self.error_estimate)
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.operator)
    }
}

/// Assertion slack for a quadrature error estimate.
pub fn slack(error_estimate: f64) -> f64 {
    (2.0 * error_estimate).max(1e-8)
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: format!("{order} > {MAX_ORDER}"),
        });
    }
    Ok(())
}

/// Quadrature error must stay below a tenth of the norm bound it is compared to.
fn check_resolution(estimate: f64, bound: f64) -> Result<()> {
    let allowed = 0.1 * bound;
    if !(estimate <= allowed) {
        return Err(Error::Resolution { estimate, allowed });
    }
    Ok(())
}

/// `U_0(t), ..., U_K(t)` with Richardson error estimates.
pub fn dyson_terms(
    a: &HermitianOperator,
    pi: &Projector,
    delta: f64,
    max_order: usize,
    t: f64,
    grid: QuadratureGrid,
) -> Result<Vec<DysonTerm>> {
    check_inputs(a, pi, delta)?;
    check_order(max_order)?;
    let grid = QuadratureGrid::new(grid.intervals)?;
    let coarse = dyson_on_grid(a, pi, delta, max_order, t, grid.intervals);
    let fine = dyson_on_grid(a, pi, delta, max_order, t, 2 * grid.intervals);
    let mut terms = Vec::with_capacity(max_order + 1);
    for k in 0..=max_order {
        let f = fine[k].last().expect("grid has nodes").clone();
        let estimate = spectral_norm(&(&f - coarse[k].last().expect("grid has nodes"))) / 15.0;
        if k > 0 {
            check_resolution(estimate, term_norm_bound(k, t, delta))?;
        }
        terms.push(DysonTerm {
            order: k,
            operator: f,
            time: t,
            delta,
            error_estimate: estimate,
        });
    }
    Ok(terms)
}

/// The single term `U_k(t)`.
pub fn dyson_term(a: &HermitianOperator, pi: &Projector, delta: f64, order: usize, t: f64, grid: QuadratureGrid) -> Result<DysonTerm> {
    Ok(dyson_terms(a, pi, delta, order, t, grid)?.pop().expect("at least order zero"))
}

/// `e^{-i H0 t} sum_{k <= K} U_k(t)`, an approximation of `e^{-i H~ t}`.
pub fn dyson_series(a: &HermitianOperator, pi: &Projector, delta: f64, max_order: usize, t: f64, grid: QuadratureGrid) -> Result<CMatrix> {
    let terms = dyson_terms(a, pi, delta, max_order, t, grid)?;
    let n = a.dim();
    let sum = terms.iter().fold(CMatrix::zeros(n, n), |acc, term| acc + &term.operator);
    Ok(evolve(&reflection(pi), t).matrix() * sum)
}

/// A measured quantity next to its bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.value <= self.bound + self.slack
    }
}

/// `||(I - Pi) U_k(t) Pi||` against its bound. Order 1 uses the closed form
/// `(sqrt(delta)/2i) (I - Pi) A Pi (e^{2it} - 1) / 2i`.
pub fn per_term_leakage(a: &HermitianOperator, pi: &Projector, delta: f64, order: usize, t: f64, grid: QuadratureGrid) -> Result<BoundCheck> {
    check_inputs(a, pi, delta)?;
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: "must be at least 1".into(),
        });
    }
    let bound = term_leakage_bound(order, t, delta);
    if order == 1 {
        let phase = (C64::from_polar(1.0, 2.0 * t) - 1.0) / C64::new(0.0, 2.0);
        let block = complement_matrix(pi) * a.matrix() * pi.matrix() * (phase * C64::new(0.0, -delta.sqrt() / 2.0));
        return Ok(BoundCheck {
            value: spectral_norm(&block),
            bound,
            slack: 1e-12,
        });
    }
    let term = dyson_term(a, pi, delta, order, t, grid)?;
    let block = complement_matrix(pi) * &term.operator * pi.matrix();
    Ok(BoundCheck {
        value: spectral_norm(&block),
        bound,
        slack: term.slack(),
    })
}

/// `||U_k(t)||` against `t^k delta^{k/2} / (k! 2^k)`.
pub fn term_norm_check(a: &HermitianOperator, pi: &Projector, delta: f64, order: usize, t: f64, grid: QuadratureGrid) -> Result<BoundCheck> {
    let term = dyson_term(a, pi, delta, order, t, grid)?;
    Ok(BoundCheck {
        value: term.norm(),
        bound: term_norm_bound(order, t, delta),
        slack: term.slack(),
    })
}

/// Nested oscillatory integral indexed by a path `J` in `{0,1}^{k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathWeight {
    pub j: Vec<bool>,
    pub value: C64,
    pub error_estimate: f64,
}

impl PathWeight {
    pub fn order(&self) -> usize {
        self.j.len() + 1
    }

    /// `t^{k-1} / (k-1)!`, valid when `J` is not all ones.
    pub fn bound(&self, t: f64) -> f64 {
        t.powi(self.j.len() as i32) / factorial(self.j.len())
    }
}

/// Frequencies `e_1 = J_1 - 1`, `e_n = J_n - J_{n-1}`, `e_k = 1 - J_{k-1}`,
/// outermost first.
pub fn path_exponents(j: &[bool]) -> Vec<i32> {
    let bits: Vec<i32> = j.iter().map(|&b| b as i32).collect();
    let mut e = Vec::with_capacity(bits.len() + 1);
    let mut prev = 1;
    for &b in &bits {
        e.push(b - prev);
        prev = b;
    }
    e.push(1 - prev);
    e
}

fn path_integral(exponents: &[i32], t: f64, intervals: usize) -> C64 {
    let h = t / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| i as f64 * h).collect();
    let mut inner = vec![C64::new(1.0, 0.0); intervals + 1];
    for &e in exponents.iter().rev() {
        let integrand: Vec<C64> = nodes
            .iter()
            .zip(&inner)
            .map(|(&s, f)| f * C64::from_polar(1.0, 2.0 * e as f64 * s))
            .collect();
        inner = cumulative_simpson(&integrand, h, C64::new(0.0, 0.0));
    }
    inner[intervals]
}

/// `Phi_k(J)` at time `t` by nested cumulative quadrature.
pub fn path_weight(j: &[bool], t: f64, grid: QuadratureGrid) -> Result<PathWeight> {
    if j.is_empty() {
        return Err(Error::InvalidParameter {
            name: "J",
            reason: "path needs k >= 2".into(),
        });
    }
    let grid = QuadratureGrid::new(grid.intervals)?;
    let e = path_exponents(j);
    let coarse = path_integral(&e, t, grid.intervals);
    let fine = path_integral(&e, t, 2 * grid.intervals);
    Ok(PathWeight {
        j: j.to_vec(),
        value: fine,
        error_estimate: (fine - coarse).norm() / 15.0,
    })
}

/// First-order and exact transition probabilities between eigenstates.
///
/// Column `j` describes a system prepared in `|l_j>` and evolved under
/// `e^{-i Pi_j (A/2) Pi_j}` with `Pi_j` the projector onto eigenvalues
/// `<= l_j + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub first_order: nalgebra::DMatrix<f64>,
    pub exact: nalgebra::DMatrix<f64>,
    pub offset: f64,
}

impl TransitionMatrix {
    pub fn column_sums(&self) -> Vec<f64> {
        self.first_order.column_iter().map(|col| col.sum()).collect()
    }

    /// Max entry of `|exact - first_order|`.
    pub fn first_order_error(&self) -> f64 {
        (&self.exact - &self.first_order).abs().max()
    }
}

pub fn transition_matrix(s: &SpectralDecomposition, a: &HermitianOperator, offset: f64) -> Result<TransitionMatrix> {
    let n = s.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.dim(),
        });
    }
    let v = &s.eigenvectors;
    let in_basis = v.adjoint() * a.matrix() * v;
    let mut first_order = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut exact = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let lj = s.eigenvalues[j];
        let mut leaving = 0.0;
        for i in 0..n {
            if i != j && s.eigenvalues[i] < lj {
                let w = in_basis[(i, j)].norm_sqr() / 4.0;
                first_order[(i, j)] = w;
                leaving += w;
            }
        }
        first_order[(j, j)] = 1.0 - leaving;

        let mut compressed = in_basis.clone();
        for r in 0..n {
            for col in 0..n {
                if s.eigenvalues[r] > lj + offset || s.eigenvalues[col] > lj + offset {
                    compressed[(r, col)] = c(0.0, 0.0);
                }
            }
        }
        let u = evolve(&HermitianOperator::from_hermitian_part(&(compressed * c(0.5, 0.0))), 1.0);
        for i in 0..n {
            exact[(i, j)] = u.matrix()[(i, j)].norm_sqr();
        }
    }
    Ok(TransitionMatrix {
        first_order,
        exact,
        offset,
    })
}

/// `A = M / sqrt(N)` with `M` drawn from the GUE.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<HermitianOperator> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("{n} < 2"),
        });
    }
    let m = gue_matrix(n, rng) / c((n as f64).sqrt(), 0.0);
    Ok(HermitianOperator::from_hermitian_part(&m))
}

/// Monte-Carlo estimate of the first-order cooling probability out of `|l_j>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingProbability {
    pub empirical: f64,
    pub predicted: f64,
    pub std_error: f64,
}

pub fn cooling_probability<R: Rng + ?Sized>(s: &SpectralDecomposition, j: usize, trials: usize, rng: &mut R) -> Result<CoolingProbability> {
    let n = s.dim();
    if j >= n {
        return Err(Error::InvalidParameter {
            name: "j",
            reason: format!("{j} >= dimension {n}"),
        });
    }
    if trials < 2 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "need at least 2".into(),
        });
    }
    let below: Vec<usize> = (0..n).filter(|&i| s.eigenvalues[i] < s.eigenvalues[j]).collect();
    let v = &s.eigenvectors;
    let vj = v.column(j);
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            let m = gue_matrix(n, rng);
            let mvj = &m * vj;
            below
                .iter()
                .map(|&i| (v.column(i).adjoint() * &mvj)[(0, 0)].norm_sqr())
                .sum::<f64>()
                / (4.0 * n as f64)
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / trials as f64 + 0.0;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    Ok(CoolingProbability {
        empirical: mean,
        predicted: below.len() as f64 / (4.0 * n as f64),
        std_error: (var / trials as f64).sqrt(),
    })
}
