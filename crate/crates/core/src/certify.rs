//! Seeded certification sweeps.
//!
//! Every sweep checks one claim on a batch of instances and yields one
//! [`CertificationRecord`] per instance. [`summarize`] folds them into one
//! record per claim, keeping the instance closest to failing.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooling::{evolution_time, query_costs, run_with_plan, CoolingConfig, CoolingPlan, Mode, Trajectory};
use crate::dyson::{
    cooling_probability, dyson_series, effective_error, leakage, path_weight, per_term_leakage, term_norm_check, transition_matrix,
    QuadratureGrid,
};
use crate::error::{Error, Result};
use crate::gqsp::{assemble_block, polynomial_of_unitary, synthesize};
use crate::operator::{c, eig, evolve, max_abs_diff, spectral_norm, HermitianOperator, Projector, UnitaryOperator};
use crate::random::{gue_matrix, haar_unitary, random_hermitian, random_projector, random_state, rng_for, unit_norm_gue};
use crate::shift::{shift_evolution_factored, shift_operator};
use crate::signfun::{
    build_sign_fourier, build_sign_poly, certify_fourier, certify_poly, degree_bound, FourierPolynomial, CERT_GRID, CERT_SLACK,
};
use crate::stats::{loglog_slope, mean_and_std_error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `measured <= bound + slack`
    AtMost,
    /// `measured >= bound - slack`
    AtLeast,
    /// `|measured - bound| <= slack`
    Within,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationRecord {
    pub claim: String,
    pub instance: String,
    pub comparison: Comparison,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CertificationRecord {
    pub fn new(claim: &str, instance: String, comparison: Comparison, bound: f64, measured: f64, slack: f64) -> Self {
        let mut r = Self {
            claim: claim.to_string(),
            instance,
            comparison,
            bound,
            measured,
            slack,
            pass: false,
        };
        r.pass = r.margin() >= 0.0;
        r
    }

    pub fn at_most(claim: &str, instance: String, measured: f64, bound: f64, slack: f64) -> Self {
        Self::new(claim, instance, Comparison::AtMost, bound, measured, slack)
    }

    pub fn at_least(claim: &str, instance: String, measured: f64, bound: f64, slack: f64) -> Self {
        Self::new(claim, instance, Comparison::AtLeast, bound, measured, slack)
    }

    pub fn within(claim: &str, instance: String, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(claim, instance, Comparison::Within, target, measured, tolerance)
    }

    /// Distance from the failure boundary; negative (or NaN) on failure.
    pub fn margin(&self) -> f64 {
        let m = match self.comparison {
            Comparison::AtMost => self.bound + self.slack - self.measured,
            Comparison::AtLeast => self.measured - self.bound + self.slack,
            Comparison::Within => self.slack - (self.measured - self.bound).abs(),
        };
        if m.is_nan() {
            f64::NEG_INFINITY
        } else {
            m
        }
    }

    /// Margin relative to the scale of the bound, for picking a worst case.
    fn relative_margin(&self) -> f64 {
        self.margin() / (self.bound.abs() + self.slack).max(f64::MIN_POSITIVE)
    }
}

/// One record per claim, in first-appearance order. Each summary carries the
/// worst instance and passes only if every instance passed.
pub fn summarize(records: &[CertificationRecord]) -> Vec<CertificationRecord> {
    let mut claims: Vec<&str> = Vec::new();
    for r in records {
        if !claims.contains(&r.claim.as_str()) {
            claims.push(&r.claim);
        }
    }
    claims
        .into_iter()
        .map(|claim| {
            let group: Vec<&CertificationRecord> = records.iter().filter(|r| r.claim == claim).collect();
            let worst = group
                .iter()
                .min_by(|a, b| a.relative_margin().total_cmp(&b.relative_margin()))
                .expect("non-empty group");
            let mut s = (*worst).clone();
            s.instance = format!("{} instances; worst: {}", group.len(), worst.instance);
            s.pass = group.iter().all(|r| r.pass);
            s
        })
        .collect()
}

pub fn all_pass(records: &[CertificationRecord]) -> bool {
    !records.is_empty() && records.iter().all(|r| r.pass)
}

fn failed_certificate(claim: &str, instance: String, err: Error) -> Result<CertificationRecord> {
    match err {
        Error::Certification { value, allowed, .. } => Ok(CertificationRecord::at_most(claim, instance, value, allowed, 0.0)),
        other => Err(other),
    }
}

/// Bounded and sign-approximating conditions for both the polynomial and the
/// Fourier form, plus the degree envelope.
pub fn sign_sweep(epsilons: &[f64], deltas: &[f64]) -> Result<Vec<CertificationRecord>> {
    let pairs: Vec<(f64, f64)> = epsilons.iter().flat_map(|&e| deltas.iter().map(move |&d| (e, d))).collect();
    let nested: Vec<Result<Vec<CertificationRecord>>> = pairs
        .par_iter()
        .map(|&(eps, delta)| {
            let id = format!("eps={eps} delta={delta}");
            let mut out = Vec::new();
            let p = build_sign_poly(eps, delta)?;
            match certify_poly(&p, CERT_GRID) {
                Ok(cert) => {
                    out.push(CertificationRecord::at_most("sign.poly.bounded", id.clone(), cert.max_modulus, 1.0, CERT_SLACK));
                    out.push(CertificationRecord::at_most("sign.poly.band", id.clone(), cert.max_sign_error, delta, CERT_SLACK));
                }
                Err(e) => out.push(failed_certificate("sign.poly.certificate", id.clone(), e)?),
            }
            out.push(CertificationRecord::at_most(
                "sign.poly.degree",
                id.clone(),
                p.degree() as f64,
                degree_bound(eps, delta),
                0.0,
            ));
            let s = build_sign_fourier(eps, delta)?;
            match certify_fourier(&s, CERT_GRID) {
                Ok(cert) => {
                    out.push(CertificationRecord::at_most("sign.fourier.bounded", id.clone(), cert.max_modulus, 1.0, CERT_SLACK));
                    out.push(CertificationRecord::at_most("sign.fourier.band", id.clone(), cert.max_sign_error, delta, CERT_SLACK));
                    out.push(CertificationRecord::at_most("sign.fourier.odd", id, cert.max_odd_defect, 0.0, CERT_SLACK));
                }
                Err(e) => out.push(failed_certificate("sign.fourier.certificate", id, e)?),
            }
            Ok(out)
        })
        .collect();
    flatten(nested)
}

fn flatten(nested: Vec<Result<Vec<CertificationRecord>>>) -> Result<Vec<CertificationRecord>> {
    let mut out = Vec::new();
    for r in nested {
        out.extend(r?);
    }
    Ok(out)
}

/// Random Laurent polynomial with degrees `k, m` and max modulus on the circle
/// equal to `max_modulus`.
pub fn random_laurent<R: Rng + ?Sized>(k: usize, m: usize, max_modulus: f64, rng: &mut R) -> Result<FourierPolynomial> {
    let coef = (0..=k + m)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let p = FourierPolynomial::new(k, m, coef)?;
    Ok(p.scaled(max_modulus / p.max_modulus(20_000)))
}

/// Reconstruction error and structural query count of synthesized circuits on
/// random polynomial/unitary pairs. Total degree `k + m <= max_degree`.
pub fn gqsp_sweep(instances: usize, max_degree: usize, max_dim: usize, seed: u64) -> Result<Vec<CertificationRecord>> {
    let margin = 1e-6;
    let nested: Vec<Result<Vec<CertificationRecord>>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let total = rng.random_range(0..=max_degree);
            let k = rng.random_range(0..=total);
            let m = total - k;
            let dim = rng.random_range(1..=max_dim);
            let p = random_laurent(k, m, rng.random_range(0.1..0.99), &mut rng)?;
            let u = UnitaryOperator::new(haar_unitary(dim, &mut rng))?;
            let id = format!("#{i} k={k} m={m} dim={dim}");
            let angles = synthesize(&p, margin)?;
            let (top, _, count) = assemble_block(&angles, &u)?;
            let target = polynomial_of_unitary(&p.scaled(1.0 - margin), &u);
            let err = spectral_norm(&(top - target));
            let query_defect = count.controlled_u.abs_diff(m) + count.controlled_u_dagger.abs_diff(k);
            Ok(vec![
                CertificationRecord::at_most("gqsp.reconstruction", id.clone(), err, 1e-7, 0.0),
                CertificationRecord::at_most("gqsp.query_count", id, query_defect as f64, 0.0, 0.0),
            ])
        })
        .collect();
    flatten(nested)
}

/// Factored `e^{i SHIFT_n(H)}` against direct exponentiation.
pub fn shift_sweep(max_dim: usize, max_bits: u32, seed: u64) -> Result<Vec<CertificationRecord>> {
    let mut out = Vec::new();
    for dim in 1..=max_dim {
        for bits in 1..=max_bits {
            let h = random_hermitian(dim, seed.wrapping_add(100 * dim as u64 + bits as u64));
            let direct = evolve(shift_operator(&h, bits)?.operator(), -1.0);
            let factored = shift_evolution_factored(&h, bits)?;
            let err = max_abs_diff(direct.matrix(), factored.matrix());
            out.push(CertificationRecord::at_most("shift.factorization", format!("dim={dim} bits={bits}"), err, 1e-10, 0.0));
        }
    }
    Ok(out)
}

/// Random `(A, Pi)` with `||A|| = 1` and `0 < rank Pi < dim`.
pub fn random_instance(dim: usize, seed: u64) -> (HermitianOperator, Projector) {
    let mut rng = rng_for(seed, 0);
    let a = unit_norm_gue(dim, &mut rng);
    let rank = if dim > 1 { rng.random_range(1..dim) } else { 1 };
    (a, random_projector(dim, rank, &mut rng))
}

fn instance_seed(seed: u64, dim: usize, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(1000 * dim as u64 + i as u64)
}

/// Leakage (and effective-evolution error) over `dims x instances x deltas`.
/// Also records the fraction of instances at the largest delta whose leakage
/// is below a tenth of the bound.
pub fn perturbation_sweep(dims: &[usize], instances: usize, deltas: &[f64], seed: u64) -> Result<Vec<CertificationRecord>> {
    let jobs: Vec<(usize, usize, f64)> = dims
        .iter()
        .flat_map(|&d| (0..instances).flat_map(move |i| deltas.iter().map(move |&delta| (d, i, delta))))
        .collect();
    let values: Vec<Result<(usize, usize, f64, f64, f64)>> = jobs
        .par_iter()
        .map(|&(dim, i, delta)| {
            let (a, pi) = random_instance(dim, instance_seed(seed, dim, i));
            Ok((dim, i, delta, leakage(&a, &pi, delta)?, effective_error(&a, &pi, delta)?))
        })
        .collect();
    let mut out = Vec::new();
    let mut loose = Vec::new();
    let largest = deltas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for v in values {
        let (dim, i, delta, leak, eff) = v?;
        let id = format!("dim={dim} #{i} delta={delta}");
        out.push(CertificationRecord::at_most("leakage.bound", id.clone(), leak, delta, 0.0));
        out.push(CertificationRecord::at_most("effective_evolution.bound", id, eff, delta, 0.0));
        if delta == largest {
            loose.push(leak <= delta / 10.0);
        }
    }
    if !loose.is_empty() {
        let frac = loose.iter().filter(|&&b| b).count() as f64 / loose.len() as f64;
        out.push(CertificationRecord::at_least(
            "leakage.loose_fraction",
            format!("delta={largest}, {} instances", loose.len()),
            frac,
            0.3,
            0.0,
        ));
    }
    Ok(out)
}

/// Dyson-term norm and leakage bounds for `k <= max_order` on random instances.
pub fn dyson_bound_sweep(dim: usize, instances: usize, max_order: usize, delta: f64, seed: u64) -> Result<Vec<CertificationRecord>> {
    let t = evolution_time(delta);
    let grid = QuadratureGrid::default();
    let nested: Vec<Result<Vec<CertificationRecord>>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let (a, pi) = random_instance(dim, instance_seed(seed, dim, i));
            let mut out = Vec::new();
            for k in 1..=max_order {
                let id = format!("dim={dim} #{i} k={k} t={t:.4} delta={delta}");
                let n = term_norm_check(&a, &pi, delta, k, t, grid)?;
                out.push(CertificationRecord::at_most("dyson.term_norm", id.clone(), n.value, n.bound, n.slack));
                let l = per_term_leakage(&a, &pi, delta, k, t, grid)?;
                out.push(CertificationRecord::at_most("dyson.term_leakage", id, l.value, l.bound, l.slack));
            }
            Ok(out)
        })
        .collect();
    flatten(nested)
}

/// First-order leakage vanishes at integer multiples of `pi`.
pub fn first_order_sweep(dim: usize, instances: usize, delta: f64, seed: u64) -> Result<Vec<CertificationRecord>> {
    let mut out = Vec::new();
    for i in 0..instances {
        let (a, pi) = random_instance(dim, instance_seed(seed, dim, i));
        for n in 1..=3 {
            let t = n as f64 * PI;
            let l = per_term_leakage(&a, &pi, delta, 1, t, QuadratureGrid::default())?;
            out.push(CertificationRecord::at_most("dyson.first_order_at_pi", format!("dim={dim} #{i} t={n}pi"), l.value, 1e-10, 0.0));
        }
    }
    Ok(out)
}

/// `|Phi_k(J)| <= t^{k-1}/(k-1)!` for random paths `J` other than all ones.
pub fn path_weight_sweep(max_order: usize, samples: usize, times: &[f64], seed: u64) -> Result<Vec<CertificationRecord>> {
    let mut rng = rng_for(seed, 7);
    let mut out = Vec::new();
    for k in 2..=max_order {
        for _ in 0..samples {
            let j: Vec<bool> = loop {
                let j: Vec<bool> = (0..k - 1).map(|_| rng.random_bool(0.5)).collect();
                if !j.iter().all(|&b| b) {
                    break j;
                }
            };
            for &t in times {
                let w = path_weight(&j, t, QuadratureGrid::default())?;
                let bits: String = j.iter().map(|&b| if b { '1' } else { '0' }).collect();
                out.push(CertificationRecord::at_most(
                    "path_weight.bound",
                    format!("k={k} J={bits} t={t:.4}"),
                    w.value.norm(),
                    w.bound(t),
                    crate::dyson::slack(w.error_estimate),
                ));
            }
        }
    }
    Ok(out)
}

/// Truncated Dyson series against the exact propagator.
pub fn dyson_convergence(dim: usize, delta: f64, t: f64, max_order: usize, seed: u64) -> Result<CertificationRecord> {
    let (a, pi) = random_instance(dim, instance_seed(seed, dim, 0));
    let series = dyson_series(&a, &pi, delta, max_order, t, QuadratureGrid::new(1024)?)?;
    let h = crate::operator::reflection(&pi).add(&a.scaled(delta.sqrt() / 2.0))?;
    let err = spectral_norm(&(evolve(&h, t).matrix() - series));
    Ok(CertificationRecord::at_most(
        "dyson.convergence",
        format!("dim={dim} delta={delta} t={t} K={max_order}"),
        err,
        1e-3,
        0.0,
    ))
}

/// Log-log slopes of total queries over `d` iterations with `delta = 1/d`.
pub fn query_scaling(epsilon: f64, ds: &[usize]) -> Result<(f64, f64)> {
    let x: Vec<f64> = ds.iter().map(|&d| d as f64).collect();
    let mut eih = Vec::new();
    let mut ua = Vec::new();
    for &d in ds {
        let q = query_costs(epsilon, 1.0 / d as f64)?;
        eih.push((d as u64 * q.per_iter_eih) as f64);
        ua.push((d as u64 * q.per_iter_ua) as f64);
    }
    Ok((loglog_slope(&x, &eih), loglog_slope(&x, &ua)))
}

pub fn query_scaling_sweep(epsilon: f64, ds: &[usize]) -> Result<Vec<CertificationRecord>> {
    let (eih, ua) = query_scaling(epsilon, ds)?;
    let id = format!("eps={epsilon} d={ds:?}");
    Ok(vec![
        CertificationRecord::within("queries.eih_slope", id.clone(), eih, 1.5, 0.1),
        CertificationRecord::within("queries.ua_slope", id, ua, 1.5, 0.1),
    ])
}

/// Remainder of the first-order transition matrix under `A -> sA`.
pub fn transition_slope(dim: usize, scales: &[f64], seed: u64) -> Result<f64> {
    let h = random_hermitian(dim, seed);
    let s = eig(&h);
    let a = random_hermitian(dim, seed.wrapping_add(1));
    let errors = scales
        .iter()
        .map(|&sc| Ok(transition_matrix(&s, &a.scaled(sc), 0.0)?.first_order_error()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(loglog_slope(scales, &errors))
}

/// Transition-matrix remainder slope, cooling probability out of the top
/// level, and GUE second moments.
pub fn statistics_sweep(n: usize, draws: usize, seed: u64) -> Result<Vec<CertificationRecord>> {
    let mut out = Vec::new();
    let scales = [0.4, 0.2, 0.1, 0.05];
    let slope = transition_slope(n, &scales, seed)?;
    out.push(CertificationRecord::within("transition.cubic_remainder", format!("N={n} s={scales:?}"), slope, 3.0, 0.3));

    let s = eig(&random_hermitian(n, seed.wrapping_add(2)));
    let mut rng = rng_for(seed, 11);
    let top = cooling_probability(&s, n - 1, draws, &mut rng)?;
    out.push(CertificationRecord::within(
        "cooling_probability.top",
        format!("N={n} j=top draws={draws}"),
        top.empirical,
        top.predicted,
        3.0 * top.std_error,
    ));
    let ground = cooling_probability(&s, 0, draws, &mut rng)?;
    out.push(CertificationRecord::within(
        "cooling_probability.ground",
        format!("N={n} j=0 draws={draws}"),
        ground.empirical,
        0.0,
        0.0,
    ));

    let mut off = Vec::with_capacity(draws);
    let mut diag = Vec::with_capacity(draws);
    let mut mean = Vec::with_capacity(draws);
    for _ in 0..draws {
        let m = gue_matrix(n, &mut rng);
        let pairs = (n * (n - 1) / 2) as f64;
        let mut o = 0.0;
        let mut re = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                o += m[(i, j)].norm_sqr();
                re += m[(i, j)].re;
            }
        }
        off.push(o / pairs);
        mean.push(re / pairs);
        diag.push((0..n).map(|i| m[(i, i)].re.powi(2)).sum::<f64>() / n as f64);
    }
    for (claim, samples, target) in [
        ("gue.offdiag_second_moment", &off, 1.0),
        ("gue.diag_second_moment", &diag, 1.0),
        ("gue.offdiag_mean", &mean, 0.0),
    ] {
        let (m, se) = mean_and_std_error(samples);
        out.push(CertificationRecord::within(claim, format!("N={n} draws={draws}"), m, target, 3.0 * se));
    }
    Ok(out)
}

/// Independent trajectories on a fixed `H`: each trial draws its own
/// unit-norm GUE perturbation and Haar-random initial state.
pub fn cooling_ensemble(h: &HermitianOperator, epsilon: f64, d: usize, trials: usize, seed: u64) -> Result<Vec<Trajectory>> {
    let plan = CoolingPlan::new(epsilon, 1.0 / d as f64, Mode::ExactSpectral)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng_for(seed, trial as u64);
            let a = unit_norm_gue(h.dim(), &mut rng);
            let psi = random_state(h.dim(), &mut rng);
            let config = CoolingConfig::new(h.clone(), a, psi, epsilon, d);
            run_with_plan(&plan, &config, &mut rng).map_err(|e| Error::Trial {
                trial,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Fraction of `d`-step trajectories without a leakage event, against 1/4.
pub fn success_sweep(dim: usize, epsilon: f64, ds: &[usize], trials: usize, seed: u64) -> Result<Vec<CertificationRecord>> {
    let h = random_hermitian(dim, seed);
    let mut out = Vec::new();
    for &d in ds {
        let runs = cooling_ensemble(&h, epsilon, d, trials, seed.wrapping_add(d as u64))?;
        let frac = runs.iter().filter(|t| t.succeeded()).count() as f64 / trials as f64;
        out.push(CertificationRecord::at_least(
            "cooling.success_probability",
            format!("dim={dim} eps={epsilon} d={d} trials={trials}"),
            frac,
            0.25,
            0.0,
        ));
    }
    Ok(out)
}

/// Step-to-step change of the ensemble mean energy (paired differences, index
/// 0 being the initial state) and the initial/final ground overlap.
pub fn descent_sweep(dim: usize, epsilon: f64, d: usize, trials: usize, seed: u64) -> Result<Vec<CertificationRecord>> {
    let h = random_hermitian(dim, seed);
    let runs = cooling_ensemble(&h, epsilon, d, trials, seed.wrapping_add(1))?;
    let energies: Vec<Vec<f64>> = runs
        .iter()
        .map(|t| std::iter::once(t.initial_energy).chain(t.steps.iter().map(|s| s.true_energy)).collect())
        .collect();
    let steps = energies.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = Vec::new();
    for k in 1..steps {
        let diffs: Vec<f64> = energies.iter().map(|e| e[k] - e[k - 1]).collect();
        let (m, se) = mean_and_std_error(&diffs);
        out.push(CertificationRecord::at_most(
            "cooling.energy_descent",
            format!("dim={dim} eps={epsilon} d={d} step={k}"),
            m,
            0.0,
            2.0 * se,
        ));
    }
    let initial: Vec<f64> = runs.iter().map(|t| t.initial_ground_overlap).collect();
    let last: Vec<f64> = runs
        .iter()
        .map(|t| t.steps.last().map_or(t.initial_ground_overlap, |s| s.ground_overlap))
        .collect();
    let (mi, _) = mean_and_std_error(&initial);
    let (mf, _) = mean_and_std_error(&last);
    out.push(CertificationRecord::new(
        "cooling.overlap_gain",
        format!("dim={dim} eps={epsilon} d={d} trials={trials}"),
        Comparison::AtLeast,
        mi,
        mf,
        0.0,
    ));
    if let Some(r) = out.last_mut() {
        r.pass = mf > mi;
    }
    Ok(out)
}

/// Which sweeps to run and at what size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Trajectories per cooling sweep; zero skips the trajectory claims.
    pub trajectory_trials: usize,
    /// Monte-Carlo draws for the random-matrix statistics.
    pub draws: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trajectory_trials: 0,
            draws: 10_000,
        }
    }
}

/// Every sweep at its reference size. Returns per-instance records.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CertificationRecord>> {
    let seed = config.seed;
    let mut out = sign_sweep(&[0.3, 0.1], &[0.1, 0.01])?;
    out.extend(gqsp_sweep(50, 16, 8, seed)?);
    out.extend(shift_sweep(4, 4, seed)?);
    out.extend(perturbation_sweep(&[2, 4, 8, 16], 20, &[0.25, 0.04, 0.01], seed)?);
    out.extend(dyson_bound_sweep(4, 30, 3, 0.04, seed)?);
    out.extend(first_order_sweep(4, 10, 0.04, seed)?);
    out.extend(path_weight_sweep(4, 8, &[PI, 5.0], seed)?);
    out.push(dyson_convergence(4, 0.04, 5.0, 6, seed)?);
    out.extend(query_scaling_sweep(0.1, &[4, 16, 64, 256])?);
    out.extend(statistics_sweep(8, config.draws, seed)?);
    if config.trajectory_trials > 0 {
        out.extend(success_sweep(16, 0.1, &[2, 8, 32], config.trajectory_trials, seed)?);
        out.extend(descent_sweep(16, 0.1, 32, config.trajectory_trials, seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(CertificationRecord::at_most("x", String::new(), 1.0, 1.0, 0.0).pass);
        assert!(!CertificationRecord::at_most("x", String::new(), 1.1, 1.0, 0.05).pass);
        assert!(CertificationRecord::at_least("x", String::new(), 0.96, 1.0, 0.05).pass);
        assert!(CertificationRecord::within("x", String::new(), 1.4, 1.5, 0.1 + 1e-12).pass);
        assert!(!CertificationRecord::within("x", String::new(), 1.3, 1.5, 0.1).pass);
        assert!(!CertificationRecord::at_most("x", String::new(), f64::NAN, 1.0, 0.0).pass);
    }

    #[test]
    fn summary_keeps_worst_instance() {
        let records = vec![
            CertificationRecord::at_most("a", "easy".into(), 0.1, 1.0, 0.0),
            CertificationRecord::at_most("a", "hard".into(), 0.9, 1.0, 0.0),
            CertificationRecord::at_most("b", "fail".into(), 2.0, 1.0, 0.0),
        ];
        let s = summarize(&records);
        assert_eq!(s.len(), 2);
        assert!(s[0].pass && s[0].instance.ends_with("hard"));
        assert!(!s[1].pass);
        assert!(!all_pass(&records));
        assert!(!all_pass(&[]));
    }

    #[test]
    fn shift_sweep_small() {
        let r = shift_sweep(2, 2, 3).unwrap();
        assert_eq!(r.len(), 4);
        assert!(all_pass(&r));
    }

    #[test]
    fn perturbation_sweep_small() {
        let r = perturbation_sweep(&[2, 3], 3, &[0.25, 0.04], 5).unwrap();
        assert_eq!(r.len(), 2 * 3 * 2 * 2 + 1);
        assert!(r.iter().filter(|r| r.claim != "leakage.loose_fraction").all(|r| r.pass));
    }

    #[test]
    fn gqsp_sweep_small() {
        let r = gqsp_sweep(4, 6, 3, 9).unwrap();
        assert!(all_pass(&r), "{r:#?}");
    }

    #[test]
    fn ensemble_is_deterministic() {
        let h = random_hermitian(4, 3);
        let a = cooling_ensemble(&h, 0.3, 4, 3, 8).unwrap();
        let b = cooling_ensemble(&h, 0.3, 4, 3, 8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.steps, y.steps);
        }
    }
}
