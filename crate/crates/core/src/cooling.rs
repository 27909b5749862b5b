//! The cooling loop: idealized energy measurement, sign-transformed
//! Hamiltonian, perturbed evolution and bookkeeping.
//!
//! Energy measurement is a projective measurement onto windows of width `eps`.
//! The window holding the measured state is reported by its center `E_k`, so
//! every eigenvalue in the post-measurement state lies within `eps/2` of
//! `E_k`. The sign polynomial is centered at `E_k + eps`: the measured
//! window sits on its `-1` plateau, the next window up in its transition
//! region and everything from `E_k + 3 eps/2` on its `+1` plateau. Weight that
//! ends up there after the evolution is leakage.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gqsp::{assemble_and_extract, synthesize, AngleSequence, DEFAULT_MARGIN};
use crate::operator::{c, eig, evolve, CVector, HermitianOperator, SpectralDecomposition, StateVector};
use crate::shift::{check_budget, register_shift};
use crate::signfun::{apply_periodic, apply_spectral_decomposed, build_sign_fourier, sign_degree, FourierPolynomial};

/// Charge per unit of `ceil(ln 1/eps) ceil(ln 1/delta) / eps` for one energy measurement.
pub const C_QPE: f64 = 1.0;
/// Largest admissible resolution.
pub const MAX_EPSILON: f64 = 0.7;
/// Eigenvalues this close to the minimum count as ground states.
pub const GROUND_TOL: f64 = 1e-9;

/// How `H_sign` is realized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    ExactSpectral,
    GqspCircuit,
}

/// `t = pi ceil(1 / (pi sqrt(delta)))`.
pub fn evolution_time(delta: f64) -> f64 {
    PI * (1.0 / (PI * delta.sqrt())).ceil()
}

/// Oracle queries charged per iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCosts {
    pub per_iter_eih: u64,
    pub per_iter_ua: u64,
}

fn validate_resolution(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= MAX_EPSILON) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{epsilon} not in (0, {MAX_EPSILON}]"),
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

/// Costs for a sign polynomial of the given degree.
///
/// `e^{iH}`: each application of `H_sign` costs `2 deg` controlled queries
/// (`deg` forward and `deg` inverse), repeated `ceil(t/pi)` times, plus the
/// measurement charge. `U_A`: `ceil(t)`.
pub fn query_costs_for_degree(epsilon: f64, delta: f64, degree: usize) -> QueryCosts {
    let t = evolution_time(delta);
    let qpe = C_QPE * (1.0 / epsilon).ln().ceil() * (1.0 / delta).ln().ceil() / epsilon;
    QueryCosts {
        per_iter_eih: 2 * degree as u64 * (t / PI).round() as u64 + qpe.ceil() as u64,
        per_iter_ua: t.ceil() as u64,
    }
}

/// Costs using the degree of `S(., eps, delta)`.
pub fn query_costs(epsilon: f64, delta: f64) -> Result<QueryCosts> {
    validate_resolution(epsilon, delta)?;
    Ok(query_costs_for_degree(epsilon, delta, sign_degree(epsilon, delta)?))
}

/// Everything that depends only on `(eps, delta, mode)`.
#[derive(Clone, Debug)]
pub struct CoolingPlan {
    epsilon: f64,
    delta: f64,
    mode: Mode,
    sign: FourierPolynomial,
    angles: Option<AngleSequence>,
    time: f64,
    costs: QueryCosts,
}

impl CoolingPlan {
    pub fn new(epsilon: f64, delta: f64, mode: Mode) -> Result<Self> {
        validate_resolution(epsilon, delta)?;
        let sign = build_sign_fourier(epsilon, delta)?;
        let angles = match mode {
            Mode::ExactSpectral => None,
            Mode::GqspCircuit => Some(synthesize(&sign, DEFAULT_MARGIN)?),
        };
        let costs = query_costs_for_degree(epsilon, delta, sign.pos_degree());
        Ok(Self {
            epsilon,
            delta,
            mode,
            sign,
            angles,
            time: evolution_time(delta),
            costs,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn sign(&self) -> &FourierPolynomial {
        &self.sign
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn costs(&self) -> QueryCosts {
        self.costs
    }

    /// `H_sign = S(H - shift)` in the configured mode.
    pub fn hsign(&self, h: &HermitianOperator, decomposition: &SpectralDecomposition, shift: f64) -> Result<HermitianOperator> {
        let exact = apply_spectral_decomposed(&self.sign, decomposition, shift)?;
        match &self.angles {
            None => Ok(exact),
            Some(angles) => {
                let u = evolve(&h.shifted(shift), -1.0);
                let block = assemble_and_extract(angles, &u)? / c(1.0 - DEFAULT_MARGIN, 0.0);
                Ok(HermitianOperator::from_hermitian_part(&block))
            }
        }
    }
}

/// `S(H - E_k - eps)` for a one-off call.
pub fn build_hsign(h: &HermitianOperator, energy: f64, epsilon: f64, delta: f64, mode: Mode) -> Result<HermitianOperator> {
    let plan = CoolingPlan::new(epsilon, delta, mode)?;
    plan.hsign(h, &eig(h), energy + epsilon)
}

/// Measurement windows `[offset + b w, offset + (b+1) w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBins {
    pub width: f64,
    pub offset: f64,
}

impl EnergyBins {
    /// Width `eps` with a half-bin offset, moved if an eigenvalue lands within
    /// `eps/100` of a boundary.
    pub fn for_spectrum(epsilon: f64, eigenvalues: &[f64]) -> Self {
        let margin = |offset: f64| {
            eigenvalues
                .iter()
                .map(|&l| {
                    let r = (l - offset).rem_euclid(epsilon);
                    r.min(epsilon - r)
                })
                .fold(f64::INFINITY, f64::min)
        };
        let default = epsilon / 2.0;
        let offset = if margin(default) >= epsilon / 100.0 {
            default
        } else {
            (0..16)
                .map(|j| default + j as f64 * epsilon / 16.0)
                .max_by(|a, b| margin(*a).total_cmp(&margin(*b)))
                .unwrap_or(default)
        };
        Self { width: epsilon, offset }
    }

    pub fn index(&self, energy: f64) -> i64 {
        ((energy - self.offset) / self.width).floor() as i64
    }

    pub fn center(&self, index: i64) -> f64 {
        self.offset + (index as f64 + 0.5) * self.width
    }
}

/// Outcome of one idealized energy measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub bin: i64,
    pub energy: f64,
    pub state: StateVector,
}

/// Projective measurement of `psi` onto the windows of `bins`.
pub fn measure_energy<R: Rng + ?Sized>(
    decomposition: &SpectralDecomposition,
    bins: &EnergyBins,
    psi: &StateVector,
    rng: &mut R,
) -> Result<Measurement> {
    let coeffs = decomposition.coefficients(psi)?;
    let mut weights: Vec<(i64, f64)> = Vec::new();
    for (j, &l) in decomposition.eigenvalues.iter().enumerate() {
        let b = bins.index(l);
        let w = coeffs[j].norm_sqr();
        match weights.last_mut() {
            Some((last, acc)) if *last == b => *acc += w,
            _ => weights.push((b, w)),
        }
    }
    weights.retain(|&(_, w)| w > 1e-28);
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if weights.is_empty() {
        return Err(Error::ZeroProjection);
    }
    let mut u = rng.random::<f64>() * total;
    let mut bin = weights[weights.len() - 1].0;
    for &(b, w) in &weights {
        if u < w {
            bin = b;
            break;
        }
        u -= w;
    }
    let mut projected = CVector::zeros(decomposition.dim());
    for (j, &l) in decomposition.eigenvalues.iter().enumerate() {
        if bins.index(l) == bin {
            projected += decomposition.eigenvectors.column(j) * coeffs[j];
        }
    }
    Ok(Measurement {
        bin,
        energy: bins.center(bin),
        state: StateVector::normalized(projected)?,
    })
}

/// Energy measurement with resolution `eps`; returns `(E_k, psi')`.
pub fn qpe_project<R: Rng + ?Sized>(h: &HermitianOperator, psi: &StateVector, epsilon: f64, rng: &mut R) -> Result<(f64, StateVector)> {
    let d = eig(h);
    let bins = EnergyBins::for_spectrum(epsilon, &d.eigenvalues);
    let m = measure_energy(&d, &bins, psi, rng)?;
    Ok((m.energy, m.state))
}

/// Record of one iteration. Query counters are cumulative over the trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    pub energy_estimate: f64,
    pub bin: i64,
    pub post_qpe_state: StateVector,
    pub post_evolution_state: StateVector,
    pub leakage_weight: f64,
    pub true_energy: f64,
    pub ground_overlap: f64,
    pub queries_eih: u64,
    pub queries_ua: u64,
    /// Set when the following measurement lands two or more windows higher.
    pub leaked: bool,
}

/// A plan bound to one `(H, A)` pair.
#[derive(Clone, Debug)]
pub struct Cooler<'a> {
    plan: &'a CoolingPlan,
    h: HermitianOperator,
    a: HermitianOperator,
    decomposition: SpectralDecomposition,
    bins: EnergyBins,
}

impl<'a> Cooler<'a> {
    pub fn new(plan: &'a CoolingPlan, h: &HermitianOperator, a: &HermitianOperator) -> Result<Self> {
        if h.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                actual: a.dim(),
            });
        }
        for (name, op) in [("hamiltonian", h), ("perturbation", a)] {
            let norm = op.spectral_norm();
            if norm > 1.0 + 1e-10 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("spectral norm {norm} exceeds 1"),
                });
            }
        }
        let decomposition = eig(h);
        let bins = EnergyBins::for_spectrum(plan.epsilon, &decomposition.eigenvalues);
        Ok(Self {
            plan,
            h: h.clone(),
            a: a.clone(),
            decomposition,
            bins,
        })
    }

    /// Replace the measurement windows.
    pub fn with_bins(mut self, bins: EnergyBins) -> Self {
        self.bins = bins;
        self
    }

    pub fn bins(&self) -> EnergyBins {
        self.bins
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn measure<R: Rng + ?Sized>(&self, psi: &StateVector, rng: &mut R) -> Result<Measurement> {
        measure_energy(&self.decomposition, &self.bins, psi, rng)
    }

    /// `e^{-i H~ t} psi` with `H~ = S(H - energy - eps) + (sqrt(delta)/2) A`.
    pub fn evolve_from(&self, energy: f64, psi: &StateVector) -> Result<StateVector> {
        let hsign = self.plan.hsign(&self.h, &self.decomposition, energy + self.plan.epsilon)?;
        let perturbed = hsign.add(&self.a.scaled(self.plan.delta.sqrt() / 2.0))?;
        evolve(&perturbed, self.plan.time).apply(psi)
    }

    /// Weight of `psi` on eigenvalues at or above `threshold`.
    pub fn weight_at_or_above(&self, psi: &StateVector, threshold: f64) -> Result<f64> {
        let coeffs = self.decomposition.coefficients(psi)?;
        Ok(self
            .decomposition
            .eigenvalues
            .iter()
            .zip(coeffs.iter())
            .filter(|(l, _)| **l >= threshold)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// Weight of `psi` on the ground eigenspace.
    pub fn ground_overlap(&self, psi: &StateVector) -> Result<f64> {
        let coeffs = self.decomposition.coefficients(psi)?;
        let ground = self.decomposition.eigenvalues[0];
        Ok(self
            .decomposition
            .eigenvalues
            .iter()
            .zip(coeffs.iter())
            .filter(|(l, _)| **l <= ground + GROUND_TOL)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    pub fn energy(&self, psi: &StateVector) -> Result<f64> {
        self.h.expectation(psi)
    }

    /// One measure-and-evolve iteration; counters cover this step only.
    pub fn step<R: Rng + ?Sized>(&self, psi: &StateVector, rng: &mut R) -> Result<StepResult> {
        let m = self.measure(psi, rng)?;
        let out = self.evolve_from(m.energy, &m.state)?;
        let leakage_weight = self.weight_at_or_above(&out, m.energy + 1.5 * self.plan.epsilon)?;
        Ok(StepResult {
            energy_estimate: m.energy,
            bin: m.bin,
            post_qpe_state: m.state,
            true_energy: self.energy(&out)?,
            ground_overlap: self.ground_overlap(&out)?,
            post_evolution_state: out,
            leakage_weight,
            queries_eih: self.plan.costs.per_iter_eih,
            queries_ua: self.plan.costs.per_iter_ua,
            leaked: false,
        })
    }
}

/// Convenience wrapper building a fresh plan.
#[allow(clippy::too_many_arguments)]
pub fn cooling_step<R: Rng + ?Sized>(
    h: &HermitianOperator,
    a: &HermitianOperator,
    psi: &StateVector,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
    mode: Mode,
) -> Result<StepResult> {
    let plan = CoolingPlan::new(epsilon, delta, mode)?;
    Cooler::new(&plan, h, a)?.step(psi, rng)
}

/// When to stop iterating.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub max_steps: usize,
    #[serde(default)]
    pub target_energy: Option<f64>,
    #[serde(default)]
    pub patience: Option<usize>,
}

impl StoppingRule {
    pub fn max_steps(max_steps: usize) -> Self {
        Self {
            max_steps,
            target_energy: None,
            patience: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxSteps,
    TargetReached,
    PatienceExhausted,
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct CoolingConfig {
    pub hamiltonian: HermitianOperator,
    pub perturbation: HermitianOperator,
    pub initial_state: StateVector,
    pub epsilon: f64,
    pub d: usize,
    /// Overrides `delta = 1/d` when set.
    pub delta: Option<f64>,
    pub mode: Mode,
    pub stop: StoppingRule,
    pub seed: u64,
}

impl CoolingConfig {
    pub fn new(
        hamiltonian: HermitianOperator,
        perturbation: HermitianOperator,
        initial_state: StateVector,
        epsilon: f64,
        d: usize,
    ) -> Self {
        Self {
            hamiltonian,
            perturbation,
            initial_state,
            epsilon,
            d,
            delta: None,
            mode: Mode::ExactSpectral,
            stop: StoppingRule::max_steps(d),
            seed: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / self.d as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: format!("{} < 2", self.d),
            });
        }
        if self.stop.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                reason: "must be positive".into(),
            });
        }
        if self.initial_state.dim() != self.hamiltonian.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.dim(),
                actual: self.initial_state.dim(),
            });
        }
        validate_resolution(self.epsilon, self.delta())
    }

    pub fn plan(&self) -> Result<CoolingPlan> {
        self.validate()?;
        CoolingPlan::new(self.epsilon, self.delta(), self.mode)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub initial_energy: f64,
    pub initial_ground_overlap: f64,
    pub steps: Vec<StepResult>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn leakage_events(&self) -> usize {
        self.steps.iter().filter(|s| s.leaked).count()
    }

    pub fn succeeded(&self) -> bool {
        self.leakage_events() == 0 && !matches!(self.termination, Termination::Failed(_))
    }
}

/// Run with the generator `rng_for(config.seed, 0)`.
pub fn run(config: &CoolingConfig) -> Result<Trajectory> {
    let plan = config.plan()?;
    run_with_plan(&plan, config, &mut crate::random::rng_for(config.seed, 0))
}

/// Iterate until the stopping rule fires. A final measurement after the last
/// step decides whether that step leaked.
pub fn run_with_plan<R: Rng + ?Sized>(plan: &CoolingPlan, config: &CoolingConfig, rng: &mut R) -> Result<Trajectory> {
    config.validate()?;
    let cooler = Cooler::new(plan, &config.hamiltonian, &config.perturbation)?;
    let mut psi = config.initial_state.clone();
    let mut trajectory = Trajectory {
        initial_energy: cooler.energy(&psi)?,
        initial_ground_overlap: cooler.ground_overlap(&psi)?,
        steps: Vec::new(),
        termination: Termination::MaxSteps,
    };
    let (mut eih, mut ua) = (0u64, 0u64);
    let mut stalled = 0usize;
    loop {
        let mut step = match cooler.step(&psi, rng) {
            Ok(s) => s,
            Err(e) => {
                trajectory.termination = Termination::Failed(e.to_string());
                break;
            }
        };
        eih += step.queries_eih;
        ua += step.queries_ua;
        step.queries_eih = eih;
        step.queries_ua = ua;
        if let Some(prev) = trajectory.steps.last_mut() {
            prev.leaked = step.bin >= prev.bin + 2;
            stalled = if step.energy_estimate >= prev.energy_estimate { stalled + 1 } else { 0 };
        }
        psi = step.post_evolution_state.clone();
        let energy = step.energy_estimate;
        trajectory.steps.push(step);
        if config.stop.target_energy.is_some_and(|target| energy <= target) {
            trajectory.termination = Termination::TargetReached;
            break;
        }
        if config.stop.patience.is_some_and(|p| stalled >= p) {
            trajectory.termination = Termination::PatienceExhausted;
            break;
        }
        if trajectory.steps.len() >= config.stop.max_steps {
            break;
        }
    }
    if let Some(last) = trajectory.steps.last_mut() {
        if !matches!(trajectory.termination, Termination::Failed(_)) {
            let m = cooler.measure(&psi, rng)?;
            last.leaked = m.bin >= last.bin + 2;
        }
    }
    Ok(trajectory)
}

/// Idealized coherent energy estimation: `|l> -> |j(l)> |l>` with `j(l)` the
/// register value whose shift `2 pi j / 2^n` is nearest to `l` (mod `2 pi`).
pub fn coherent_qpe_encode(h: &HermitianOperator, psi: &StateVector, bits: u32) -> Result<StateVector> {
    check_budget(h.dim(), bits)?;
    let d = eig(h);
    let coeffs = d.coefficients(psi)?;
    let size = 1usize << bits;
    let n = h.dim();
    let mut joint = CVector::zeros(size * n);
    for (j, &l) in d.eigenvalues.iter().enumerate() {
        let reg = register_for_energy(l, bits);
        let v = d.eigenvectors.column(j) * coeffs[j];
        let mut block = joint.rows_mut(reg * n, n);
        block += v;
    }
    StateVector::new(joint)
}

/// Register value nearest to `energy` modulo `2 pi`.
pub fn register_for_energy(energy: f64, bits: u32) -> usize {
    let size = 1i64 << bits;
    let j = (energy / register_shift(1, bits)).round() as i64;
    j.rem_euclid(size) as usize
}

/// Perturbed evolution of a register-controlled superposition.
///
/// Every register block `j` evolves under
/// `S(H - 2 pi j / 2^n - eps) + (sqrt(delta)/2) A`; `S` is evaluated
/// periodically, which matches the unitary `e^{i SHIFT_n(H)}` it is built from.
pub fn coherent_step(
    plan: &CoolingPlan,
    h: &HermitianOperator,
    a: &HermitianOperator,
    joint: &StateVector,
    bits: u32,
) -> Result<StateVector> {
    check_budget(h.dim(), bits)?;
    let n = h.dim();
    let size = 1usize << bits;
    if joint.dim() != size * n {
        return Err(Error::DimensionMismatch {
            expected: size * n,
            actual: joint.dim(),
        });
    }
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: a.dim(),
        });
    }
    let d = eig(h);
    let coupling = a.scaled(plan.delta.sqrt() / 2.0);
    let mut out = CVector::zeros(size * n);
    for j in 0..size {
        let block: CVector = joint.amplitudes().rows(j * n, n).into_owned();
        if block.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let hsign = apply_periodic(&plan.sign, &d, register_shift(j, bits) + plan.epsilon);
        let u = evolve(&hsign.add(&coupling)?, plan.time);
        out.rows_mut(j * n, n).copy_from(&(u.matrix() * block));
    }
    StateVector::new(out)
}

/// Probability of each register value in a joint state.
pub fn register_distribution(joint: &StateVector, bits: u32) -> Vec<f64> {
    let size = 1usize << bits;
    let n = joint.dim() / size;
    (0..size)
        .map(|j| joint.amplitudes().rows(j * n, n).norm_squared())
        .collect()
}

/// System state conditioned on register value `j`, if it has weight.
pub fn register_branch(joint: &StateVector, bits: u32, j: usize) -> Option<StateVector> {
    let n = joint.dim() >> bits;
    StateVector::normalized(joint.amplitudes().rows(j * n, n).into_owned()).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;
    use crate::random::{random_hermitian, random_state, rng_for, unit_norm_gue};

    fn plan(eps: f64, delta: f64) -> CoolingPlan {
        CoolingPlan::new(eps, delta, Mode::ExactSpectral).unwrap()
    }

    fn same_up_to_phase(a: &StateVector, b: &StateVector) -> f64 {
        (1.0 - a.overlap(b).unwrap()).abs()
    }

    #[test]
    fn measurement_of_eigenstate() {
        let h = random_hermitian(6, 1);
        let d = eig(&h);
        let psi = d.eigenvector(3);
        let (e, out) = qpe_project(&h, &psi, 0.1, &mut rng_for(0, 0)).unwrap();
        let bins = EnergyBins::for_spectrum(0.1, &d.eigenvalues);
        assert_eq!(e, bins.center(bins.index(d.eigenvalues[3])));
        assert!((d.eigenvalues[3] - e).abs() <= 0.05);
        assert!(same_up_to_phase(&psi, &out) < 1e-12);
    }

    #[test]
    fn measurement_frequencies_follow_born_rule() {
        let h = HermitianOperator::from_diagonal(&[-0.8, 0.6]);
        let psi = StateVector::normalized(CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])).unwrap();
        let mut rng = rng_for(5, 0);
        let trials = 10_000;
        let mut low = 0;
        for _ in 0..trials {
            let (e, _) = qpe_project(&h, &psi, 0.1, &mut rng).unwrap();
            if e < 0.0 {
                low += 1;
            }
        }
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((low as f64 / trials as f64 - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn same_window_keeps_relative_amplitudes() {
        let h = HermitianOperator::from_diagonal(&[0.01, 0.02, 0.9]);
        let amps = vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)];
        let psi = StateVector::normalized(CVector::from_vec(amps)).unwrap();
        let mut rng = rng_for(1, 0);
        loop {
            let (e, out) = qpe_project(&h, &psi, 0.1, &mut rng).unwrap();
            if e < 0.5 {
                let a = out.amplitudes();
                assert!((a[1] / a[0] - c(0.0, 0.8)).norm() < 1e-12);
                assert!(a[2].norm() < 1e-15);
                break;
            }
        }
    }

    #[test]
    fn bins_avoid_eigenvalues_on_boundaries() {
        let bins = EnergyBins::for_spectrum(0.1, &[0.0, 0.1, 0.2]);
        for l in [0.0, 0.1, 0.2] {
            let r = (l - bins.offset).rem_euclid(0.1);
            assert!(r.min(0.1 - r) >= 0.001);
        }
        let bins = EnergyBins::for_spectrum(0.1, &[0.05]);
        assert!(bins.offset != 0.05);
    }

    #[test]
    fn hsign_plateaus() {
        let (eps, delta) = (0.3, 0.1);
        let h = HermitianOperator::from_diagonal(&[-0.5, -0.4, -0.3]);
        let e = -0.3;
        let hs = build_hsign(&h, e, eps, delta, Mode::ExactSpectral).unwrap();
        for l in eig(&hs).eigenvalues {
            assert!((-1.0..=-1.0 + delta).contains(&l), "{l}");
        }
        let h = HermitianOperator::from_diagonal(&[0.2, 0.5, 0.9]);
        let hs = build_hsign(&h, -0.3, eps, delta, Mode::ExactSpectral).unwrap();
        for l in eig(&hs).eigenvalues {
            assert!((1.0 - delta..=1.0).contains(&l), "{l}");
        }
    }

    #[test]
    fn hsign_modes_agree() {
        let h = random_hermitian(8, 12);
        let exact = build_hsign(&h, -0.2, 0.3, 0.1, Mode::ExactSpectral).unwrap();
        let circuit = build_hsign(&h, -0.2, 0.3, 0.1, Mode::GqspCircuit).unwrap();
        let d = eig(&h);
        let rotate = |m: &crate::operator::CMatrix| d.eigenvectors.adjoint() * m * &d.eigenvectors;
        let dev = max_abs_diff(&rotate(exact.matrix()), &rotate(circuit.matrix()));
        assert!(dev <= 1e-6, "{dev:e}");
    }

    #[test]
    fn zero_perturbation_is_a_phase() {
        let h = random_hermitian(8, 3);
        let p = plan(0.2, 0.1);
        let cooler = Cooler::new(&p, &h, &HermitianOperator::zeros(8)).unwrap();
        let psi = random_state(8, &mut rng_for(3, 1));
        let s = cooler.step(&psi, &mut rng_for(3, 2)).unwrap();
        assert!(s.leakage_weight <= 1e-20);
        let before = cooler.energy(&s.post_qpe_state).unwrap();
        assert!((s.true_energy - before).abs() < 1e-10);
    }

    #[test]
    fn commuting_perturbation_does_not_leak() {
        let h = random_hermitian(8, 4);
        let d = eig(&h);
        let a = HermitianOperator::from_hermitian_part(&d.map(|l| c((3.0 * l).sin(), 0.0)));
        let p = plan(0.2, 0.1);
        let cooler = Cooler::new(&p, &h, &a).unwrap();
        let mut rng = rng_for(4, 0);
        for _ in 0..10 {
            let psi = random_state(8, &mut rng);
            let s = cooler.step(&psi, &mut rng).unwrap();
            assert!(s.leakage_weight <= 1e-10);
            let before = d.coefficients(&s.post_qpe_state).unwrap();
            let after = d.coefficients(&s.post_evolution_state).unwrap();
            for j in 0..8 {
                assert!((before[j].norm() - after[j].norm()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn leakage_stays_below_delta() {
        let delta = 0.0625;
        let h = random_hermitian(16, 7);
        let p = plan(0.1, delta);
        let mut worst: f64 = 0.0;
        for trial in 0..200 {
            let mut rng = rng_for(7, trial);
            let a = unit_norm_gue(16, &mut rng);
            let cooler = Cooler::new(&p, &h, &a).unwrap();
            let psi = random_state(16, &mut rng);
            worst = worst.max(cooler.step(&psi, &mut rng).unwrap().leakage_weight);
        }
        assert!(worst <= delta + 1e-8, "{worst}");
    }

    #[test]
    fn ground_state_stays_in_ground_window() {
        let h = random_hermitian(6, 9);
        let d = eig(&h);
        let mut config = CoolingConfig::new(h, unit_norm_gue(6, &mut rng_for(9, 1)), d.eigenvector(0), 0.1, 4);
        config.seed = 9;
        let t = run(&config).unwrap();
        let bins = EnergyBins::for_spectrum(0.1, &d.eigenvalues);
        let ground_bin = bins.index(d.eigenvalues[0]);
        assert_eq!(t.steps.len(), 4);
        for s in &t.steps {
            assert!(s.bin <= ground_bin + 1);
        }
        assert_eq!(t.steps[0].bin, ground_bin);
    }

    #[test]
    fn designed_coupling_cools_toy_model() {
        // Levels well separated; A couples only the first excited state to the ground state.
        let h = HermitianOperator::from_diagonal(&[-0.9, -0.3, 0.3, 0.9]);
        let mut a = crate::operator::CMatrix::zeros(4, 4);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 0.0);
        let a = HermitianOperator::new(a).unwrap();
        let psi = StateVector::basis(4, 1);
        let mut config = CoolingConfig::new(h, a, psi, 0.2, 2);
        config.seed = 2;
        let t = run(&config).unwrap();
        assert!(t.steps.last().unwrap().ground_overlap > t.initial_ground_overlap);
        // First-order oracle: one step moves sin^2(t/4 * sqrt(delta))-ish weight; check closed form.
        let delta: f64 = 0.5;
        let time = evolution_time(delta);
        let cooler_plan = plan(0.2, delta);
        let h = HermitianOperator::from_diagonal(&[-0.9, -0.3, 0.3, 0.9]);
        let mut a = crate::operator::CMatrix::zeros(4, 4);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 0.0);
        let cooler = Cooler::new(&cooler_plan, &h, &HermitianOperator::new(a).unwrap()).unwrap();
        let out = cooler.evolve_from(-0.3, &StateVector::basis(4, 1)).unwrap();
        // Restricted to {|0>, |1>} the evolution is a 2x2 exponential.
        let s0 = cooler_plan.sign().eval(-0.9 - (-0.3 + 0.2)).re;
        let s1 = cooler_plan.sign().eval(-0.3 - (-0.3 + 0.2)).re;
        let g = delta.sqrt() / 2.0;
        let block = crate::operator::CMatrix::from_row_slice(2, 2, &[c(s0, 0.0), c(g, 0.0), c(g, 0.0), c(s1, 0.0)]);
        let u = evolve(&HermitianOperator::new(block).unwrap(), time);
        let expected = u.matrix()[(0, 1)].norm_sqr();
        assert!((out.amplitudes()[0].norm_sqr() - expected).abs() < 1e-12);
    }

    #[test]
    fn run_is_deterministic_and_stops() {
        let h = random_hermitian(8, 21);
        let a = unit_norm_gue(8, &mut rng_for(21, 1));
        let psi = random_state(8, &mut rng_for(21, 2));
        let mut config = CoolingConfig::new(h, a, psi, 0.2, 8);
        config.seed = 77;
        let t1 = run(&config).unwrap();
        let t2 = run(&config).unwrap();
        assert_eq!(t1.steps, t2.steps);
        assert!(t1.steps.len() <= 8);
        for w in t1.steps.windows(2) {
            assert!(w[1].queries_eih > w[0].queries_eih && w[1].queries_ua > w[0].queries_ua);
        }

        config.stop = StoppingRule {
            max_steps: 50,
            target_energy: Some(10.0),
            patience: None,
        };
        let t = run(&config).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.termination, Termination::TargetReached);

        config.stop = StoppingRule {
            max_steps: 50,
            target_energy: None,
            patience: Some(2),
        };
        let t = run(&config).unwrap();
        assert!(t.termination == Termination::PatienceExhausted || t.steps.len() == 50);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let h = random_hermitian(4, 1);
        let psi = StateVector::basis(4, 0);
        let config = CoolingConfig::new(h.clone(), HermitianOperator::zeros(4), psi.clone(), 0.8, 4);
        assert!(run(&config).is_err());
        let config = CoolingConfig::new(h.clone(), HermitianOperator::zeros(4), psi.clone(), 0.1, 1);
        assert!(run(&config).is_err());
        let config = CoolingConfig::new(h.scaled(2.0), HermitianOperator::zeros(4), psi, 0.1, 4);
        assert!(run(&config).is_err());
    }

    #[test]
    fn query_cost_scaling() {
        let base = query_costs(0.2, 0.1).unwrap();
        let half_delta = query_costs(0.2, 0.05).unwrap();
        assert!(half_delta.per_iter_ua as f64 <= base.per_iter_ua as f64 * 2f64.sqrt() + 1.0 + 1e-9);
        let half_eps = query_costs(0.1, 0.1).unwrap();
        assert!(half_eps.per_iter_eih >= 2 * base.per_iter_eih);
    }

    #[test]
    fn coherent_single_branch_matches_incoherent() {
        let bits = 4;
        let (eps, delta) = (0.2, 0.1);
        let p = plan(eps, delta);
        let h = HermitianOperator::from_diagonal(&[0.0, 0.35, 0.5, 0.8]);
        let a = unit_norm_gue(4, &mut rng_for(1, 1));
        let cooler = Cooler::new(&p, &h, &a).unwrap();
        let j = 1;
        let energy = register_shift(j, bits);
        let psi = StateVector::basis(4, 1);
        let mut joint = CVector::zeros(16 * 4);
        joint.rows_mut(j * 4, 4).copy_from(psi.amplitudes());
        let out = coherent_step(&p, &h, &a, &StateVector::new(joint).unwrap(), bits).unwrap();
        let branch = register_branch(&out, bits, j).unwrap();
        let incoherent = cooler.evolve_from(energy, &psi).unwrap();
        assert!((branch.inner(&incoherent).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
        assert!((register_distribution(&out, bits)[j] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_superposition_is_blockwise() {
        let bits = 3;
        let p = plan(0.3, 0.1);
        let h = random_hermitian(3, 5);
        let a = unit_norm_gue(3, &mut rng_for(5, 1));
        let mut rng = rng_for(5, 2);
        let (u, v) = (random_state(3, &mut rng), random_state(3, &mut rng));
        let single = |j: usize, s: &StateVector| {
            let mut joint = CVector::zeros(8 * 3);
            joint.rows_mut(j * 3, 3).copy_from(s.amplitudes());
            coherent_step(&p, &h, &a, &StateVector::new(joint).unwrap(), bits).unwrap()
        };
        let mut joint = CVector::zeros(8 * 3);
        joint.rows_mut(3, 3).copy_from(&(u.amplitudes() * c(0.6, 0.0)));
        joint.rows_mut(15, 3).copy_from(&(v.amplitudes() * c(0.0, 0.8)));
        let out = coherent_step(&p, &h, &a, &StateVector::new(joint).unwrap(), bits).unwrap();
        let expected = single(1, &u).amplitudes() * c(0.6, 0.0) + single(5, &v).amplitudes() * c(0.0, 0.8);
        assert!((out.amplitudes() - expected).norm() < 1e-12);
    }

    #[test]
    fn coherent_without_perturbation_is_phase_per_branch() {
        let bits = 2;
        let p = plan(0.3, 0.1);
        let h = random_hermitian(3, 6);
        let d = eig(&h);
        let psi = d.eigenvector(1);
        let joint = coherent_qpe_encode(&h, &psi, bits).unwrap();
        let out = coherent_step(&p, &h, &HermitianOperator::zeros(3), &joint, bits).unwrap();
        assert!((out.inner(&joint).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(coherent_step(&p, &h, &HermitianOperator::zeros(3), &psi, bits).is_err());
    }

    #[test]
    fn coherent_measurement_reproduces_incoherent_statistics() {
        let bits = 5;
        let width = register_shift(1, bits);
        let (eps, delta) = (width, 0.1);
        let p = plan(eps, delta);
        let h = random_hermitian(6, 31);
        let a = unit_norm_gue(6, &mut rng_for(31, 1));
        let psi = random_state(6, &mut rng_for(31, 2));
        let joint = coherent_qpe_encode(&h, &psi, bits).unwrap();
        let out = coherent_step(&p, &h, &a, &joint, bits).unwrap();
        let probs = register_distribution(&out, bits);

        let bins = EnergyBins {
            width,
            offset: -width / 2.0,
        };
        let cooler = Cooler::new(&p, &h, &a).unwrap().with_bins(bins);
        let trials = 10_000;
        let mut counts = vec![0usize; 1 << bits];
        let mut rng = rng_for(31, 3);
        for _ in 0..trials {
            let m = cooler.measure(&psi, &mut rng).unwrap();
            counts[m.bin.rem_euclid(1 << bits) as usize] += 1;
        }
        for (j, &pj) in probs.iter().enumerate() {
            let sigma = (pj * (1.0 - pj) / trials as f64).sqrt();
            let freq = counts[j] as f64 / trials as f64;
            assert!((freq - pj).abs() <= 3.0 * sigma + 1e-12, "register {j}: {freq} vs {pj}");
        }
        // Conditional states agree branch by branch.
        for j in 0..(1 << bits) {
            if probs[j] < 1e-12 {
                continue;
            }
            let energy = bins.center(if j >= 1 << (bits - 1) { j as i64 - (1 << bits) } else { j as i64 });
            let post = register_branch(&joint, bits, j).unwrap();
            let incoherent = cooler.evolve_from(energy, &post).unwrap();
            let coherent = register_branch(&out, bits, j).unwrap();
            assert!((coherent.inner(&incoherent).unwrap() - c(1.0, 0.0)).norm() < 1e-9);
        }
    }
}
