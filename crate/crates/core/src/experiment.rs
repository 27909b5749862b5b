//! Experiment configuration, operator generators, seeded batch runs and
//! result persistence.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certify::CertificationRecord;
use crate::cooling::{run_with_plan, CoolingConfig, Mode, StoppingRule, Termination, Trajectory};
use crate::error::{Error, Result};
use crate::format::{read_matrix, write_csv, write_structured, SCHEMA_VERSION};
use crate::operator::{c, eig, kron, CMatrix, HermitianOperator, StateVector, MAX_TOTAL_DIM};
use crate::random::{random_hermitian, random_state, rng_for, unit_norm_gue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    RandomHermitian {
        dim: usize,
        seed: u64,
    },
    /// `-J sum Z_i Z_{i+1} - h sum X_i` on an open chain.
    Tfim {
        sites: usize,
        #[serde(rename = "J")]
        coupling: f64,
        #[serde(rename = "h")]
        field: f64,
        #[serde(default = "default_true")]
        normalized: bool,
    },
    File {
        path: PathBuf,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// Unit-norm GUE draw. With a seed, one draw is shared by every trial;
    /// without, each trial draws its own.
    Gue {
        #[serde(default)]
        seed: Option<u64>,
    },
    File {
        path: PathBuf,
    },
    Zero,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    #[default]
    HaarRandom,
    Basis {
        index: usize,
    },
    /// Eigenstate of `H`, counted from the bottom of the spectrum.
    Eigenstate {
        index: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub perturbation: PerturbationSpec,
    #[serde(default)]
    pub initial_state: InitialStateSpec,
    pub epsilon: f64,
    pub d: usize,
    /// Overrides `delta = 1/d`.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub mode: Mode,
    /// Defaults to `d` steps.
    #[serde(default)]
    pub stop: Option<StoppingRule>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; not part of the config hash.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_trials() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let context = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| crate::format::parse_error(&context, e))?;
        Self::from_json(&text, &context)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form, with the
    /// output path cleared.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Pauli string helper: `op` on `site`, identity elsewhere.
fn site_operator(op: &CMatrix, site: usize, sites: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    (0..sites).fold(CMatrix::identity(1, 1), |acc, k| kron(&acc, if k == site { op } else { &id }))
}

pub fn tfim(sites: usize, coupling: f64, field: f64, normalized: bool) -> Result<HermitianOperator> {
    if sites == 0 || sites >= usize::BITS as usize || 1usize << sites > MAX_TOTAL_DIM {
        return Err(Error::ResourceExceeded {
            requested: if sites < usize::BITS as usize { 1usize << sites } else { usize::MAX },
            budget: MAX_TOTAL_DIM,
        });
    }
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
    let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let dim = 1 << sites;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..sites.saturating_sub(1) {
        h -= site_operator(&z, i, sites) * site_operator(&z, i + 1, sites) * c(coupling, 0.0);
    }
    for i in 0..sites {
        h -= site_operator(&x, i, sites) * c(field, 0.0);
    }
    let h = HermitianOperator::from_hermitian_part(&h);
    let norm = h.spectral_norm();
    Ok(if normalized && norm > 0.0 { h.scaled(1.0 / norm) } else { h })
}

fn hermitian_from_file(path: &Path) -> Result<HermitianOperator> {
    HermitianOperator::new(read_matrix(path)?).map_err(|e| Error::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    })
}

fn check_norm(h: HermitianOperator, what: &'static str) -> Result<HermitianOperator> {
    let norm = h.spectral_norm();
    if norm > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter {
            name: what,
            reason: format!("spectral norm {norm} exceeds 1"),
        });
    }
    Ok(h)
}

pub fn generate_hamiltonian(spec: &SystemSpec) -> Result<HermitianOperator> {
    let h = match spec {
        SystemSpec::RandomHermitian { dim, seed } => {
            if *dim == 0 || *dim > MAX_TOTAL_DIM {
                return Err(Error::InvalidParameter {
                    name: "dim",
                    reason: format!("{dim} not in 1..={MAX_TOTAL_DIM}"),
                });
            }
            random_hermitian(*dim, *seed)
        }
        SystemSpec::Tfim {
            sites,
            coupling,
            field,
            normalized,
        } => tfim(*sites, *coupling, *field, *normalized)?,
        SystemSpec::File { path } => hermitian_from_file(path)?,
    };
    check_norm(h, "hamiltonian")
}

/// Perturbation for one trial; `rng` is the trial's generator.
pub fn generate_perturbation<R: Rng + ?Sized>(spec: &PerturbationSpec, dim: usize, rng: &mut R) -> Result<HermitianOperator> {
    let a = match spec {
        PerturbationSpec::Gue { seed: Some(s) } => unit_norm_gue(dim, &mut rng_for(*s, 0)),
        PerturbationSpec::Gue { seed: None } => unit_norm_gue(dim, rng),
        PerturbationSpec::File { path } => hermitian_from_file(path)?,
        PerturbationSpec::Zero => HermitianOperator::zeros(dim),
    };
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: a.dim(),
        });
    }
    check_norm(a, "perturbation")
}

fn initial_state<R: Rng + ?Sized>(spec: &InitialStateSpec, h: &HermitianOperator, rng: &mut R) -> Result<StateVector> {
    let dim = h.dim();
    let check = |index: usize| {
        if index >= dim {
            Err(Error::InvalidParameter {
                name: "initial_state.index",
                reason: format!("{index} >= dimension {dim}"),
            })
        } else {
            Ok(index)
        }
    };
    Ok(match spec {
        InitialStateSpec::HaarRandom => random_state(dim, rng),
        InitialStateSpec::Basis { index } => StateVector::basis(dim, check(*index)?),
        InitialStateSpec::Eigenstate { index } => eig(h).eigenvector(check(*index)?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub energy_estimate: f64,
    pub bin: i64,
    pub true_energy: f64,
    pub ground_overlap: f64,
    pub leakage_weight: f64,
    pub queries_eih: u64,
    pub queries_ua: u64,
    pub leaked: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub initial_energy: f64,
    pub initial_ground_overlap: f64,
    pub steps: Vec<StepRow>,
    pub termination: Termination,
    pub leakage_events: usize,
    pub success: bool,
}

impl TrialRecord {
    pub fn from_trajectory(trial: usize, t: &Trajectory) -> Self {
        Self {
            trial,
            initial_energy: t.initial_energy,
            initial_ground_overlap: t.initial_ground_overlap,
            steps: t
                .steps
                .iter()
                .map(|s| StepRow {
                    energy_estimate: s.energy_estimate,
                    bin: s.bin,
                    true_energy: s.true_energy,
                    ground_overlap: s.ground_overlap,
                    leakage_weight: s.leakage_weight,
                    queries_eih: s.queries_eih,
                    queries_ua: s.queries_ua,
                    leaked: s.leaked,
                })
                .collect(),
            termination: t.termination.clone(),
            leakage_events: t.leakage_events(),
            success: t.succeeded(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    #[serde(default)]
    pub certification: Option<Vec<CertificationRecord>>,
}

impl RunRecord {
    pub fn success_fraction(&self) -> f64 {
        if self.trials.is_empty() {
            return 0.0;
        }
        self.trials.iter().filter(|t| t.success).count() as f64 / self.trials.len() as f64
    }
}

/// Run every trial. Trial `i` draws from `rng_for(seed, i)`; results are
/// ordered by trial index whatever the completion order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let h = generate_hamiltonian(&cfg.system)?;
    let dim = h.dim();
    let template = |a: HermitianOperator, psi: StateVector| {
        let mut config = CoolingConfig::new(h.clone(), a, psi, cfg.epsilon, cfg.d);
        config.delta = cfg.delta;
        config.mode = cfg.mode;
        config.seed = cfg.seed;
        if let Some(stop) = cfg.stop {
            config.stop = stop;
        }
        config
    };
    let plan = template(HermitianOperator::zeros(dim), StateVector::basis(dim, 0)).plan()?;
    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let annotate = |e: Error| Error::Trial {
                trial,
                source: Box::new(e),
            };
            let mut rng = rng_for(cfg.seed, trial as u64);
            let a = generate_perturbation(&cfg.perturbation, dim, &mut rng).map_err(annotate)?;
            let psi = initial_state(&cfg.initial_state, &h, &mut rng).map_err(annotate)?;
            let trajectory = run_with_plan(&plan, &template(a, psi), &mut rng).map_err(annotate)?;
            Ok(TrialRecord::from_trajectory(trial, &trajectory))
        })
        .collect::<Vec<Result<TrialRecord>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        config_hash: cfg.hash(),
        config: cfg.clone(),
        trials,
        certification: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Structured,
}

/// Write `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Persist `record` under `dir` as `run-<hash>.v<schema>.csv` or
/// `run-<hash>.json`; returns the path written.
pub fn emit(record: &RunRecord, format: OutputFormat, dir: &Path) -> Result<PathBuf> {
    let (name, text) = match format {
        OutputFormat::Csv => (format!("run-{}.v{}.csv", record.config_hash, SCHEMA_VERSION), write_csv(record)),
        OutputFormat::Structured => (format!("run-{}.json", record.config_hash), write_structured(record)?),
    };
    let path = dir.join(name);
    write_atomic(&path, &text)?;
    Ok(path)
}
