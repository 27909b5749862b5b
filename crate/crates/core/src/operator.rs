//! Dense complex operators and the spectral toolkit everything else is built on.
//!
//! All operators are small dense matrices (total dimension at most
//! [`MAX_TOTAL_DIM`]). Matrix functions of Hermitian operators always go
//! through the eigendecomposition, so `evolve` is exact up to the accuracy of
//! the Hermitian eigensolver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Numerical tolerances shared by the operator invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Max entry of `|M - M^dagger|`.
    pub hermitian: f64,
    /// Max entry of `|U U^dagger - I|`.
    pub unitary: f64,
    /// Max entry of `|P^2 - P|`.
    pub idempotent: f64,
    /// Distance of projector eigenvalues from {0, 1}.
    pub projector_eigenvalue: f64,
    /// Max entry of `|V diag(l) V^dagger - H|`.
    pub reconstruction: f64,
    /// `| |psi| - 1 |`.
    pub normalization: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermitian: 1e-12,
    unitary: 1e-10,
    idempotent: 1e-10,
    projector_eigenvalue: 1e-8,
    reconstruction: 1e-9,
    normalization: 1e-10,
};

/// Largest total Hilbert-space dimension any constructor will build.
pub const MAX_TOTAL_DIM: usize = 4096;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Largest entry modulus of `m`.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// A Hermitian matrix (Hamiltonians, perturbations, reflections).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        ensure_square(&entries)?;
        let asym = max_asymmetry(&entries);
        if asym > TOLERANCES.hermitian {
            return Err(Error::NotHermitian {
                max_asymmetry: asym,
            });
        }
        Ok(Self {
            entries: hermitian_part(&entries),
        })
    }

    /// `(M + M^dagger) / 2`, without any validation of `M`.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self {
            entries: hermitian_part(m),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut entries = CMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            entries[(i, i)] = c(d, 0.0);
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: &self.entries * c(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// `H - s I`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim() {
            entries[(i, i)] -= c(s, 0.0);
        }
        Self { entries }
    }

    /// `U H U^dagger`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        ensure_dim(self.dim(), u.nrows())?;
        Ok(Self::from_hermitian_part(&(u * &self.entries * u.adjoint())))
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        ensure_dim(self.dim(), psi.dim())?;
        let v = psi.amplitudes();
        Ok(v.dotc(&(&self.entries * v)).re)
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// A unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator {
    entries: CMatrix,
}

impl UnitaryOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let n = ensure_square(&entries)?;
        let dev = max_abs_diff(&(&entries * entries.adjoint()), &CMatrix::identity(n, n));
        if dev > TOLERANCES.unitary {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self { entries })
    }

    pub(crate) fn new_unchecked(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
        })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        ensure_dim(self.dim(), psi.dim())?;
        Ok(StateVector {
            amplitudes: &self.entries * psi.amplitudes(),
        })
    }

    /// Max entry deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        max_abs_diff(
            &(&self.entries * self.entries.adjoint()),
            &CMatrix::identity(n, n),
        )
    }
}

/// An orthogonal projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    entries: CMatrix,
}

impl Projector {
    pub fn new(entries: CMatrix) -> Result<Self> {
        ensure_square(&entries)?;
        let asym = max_asymmetry(&entries);
        if asym > TOLERANCES.hermitian {
            return Err(Error::NotProjector {
                reason: format!("not Hermitian (asymmetry {asym:e})"),
            });
        }
        let idem = max_abs_diff(&(&entries * &entries), &entries);
        if idem > TOLERANCES.idempotent {
            return Err(Error::NotProjector {
                reason: format!("not idempotent (|P^2 - P| = {idem:e})"),
            });
        }
        let eig = SymmetricEigen::new(hermitian_part(&entries));
        for &l in eig.eigenvalues.iter() {
            if l.abs().min((l - 1.0).abs()) > TOLERANCES.projector_eigenvalue {
                return Err(Error::NotProjector {
                    reason: format!("eigenvalue {l} not in {{0, 1}}"),
                });
            }
        }
        Ok(Self {
            entries: hermitian_part(&entries),
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    /// Projector onto the span of the given orthonormal columns.
    pub fn from_orthonormal_columns(cols: &CMatrix) -> Result<Self> {
        let gram = cols.adjoint() * cols;
        let k = cols.ncols();
        let dev = max_abs_diff(&gram, &CMatrix::identity(k, k));
        if dev > TOLERANCES.unitary {
            return Err(Error::NotProjector {
                reason: format!("columns not orthonormal (deviation {dev:e})"),
            });
        }
        Ok(Self {
            entries: hermitian_part(&(cols * cols.adjoint())),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.trace().re.round() as usize
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            entries: CMatrix::identity(n, n) - &self.entries,
        }
    }

    /// `|P psi|^2`.
    pub fn weight(&self, psi: &StateVector) -> Result<f64> {
        ensure_dim(self.dim(), psi.dim())?;
        Ok((&self.entries * psi.amplitudes()).norm_squared())
    }
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > TOLERANCES.normalization {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescale to unit norm; fails on (numerically) zero vectors.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm < 1e-14 {
            return Err(Error::ZeroProjection);
        }
        Ok(Self {
            amplitudes: amplitudes / c(norm, 0.0),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = c(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// `H = V diag(eigenvalues) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> StateVector {
        StateVector {
            amplitudes: self.eigenvectors.column(j).into_owned(),
        }
    }

    /// `V diag(f(l)) V^dagger`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        self.map_indexed(|_, l| f(l))
    }

    /// Like [`map`](Self::map) but `f` also sees the eigenvalue index.
    pub fn map_indexed<F: FnMut(usize, f64) -> C64>(&self, mut f: F) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let fl = f(j, l);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fl;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| c(l, 0.0))
    }

    /// Max entry deviation between the reconstruction and `h`.
    pub fn reconstruction_error(&self, h: &HermitianOperator) -> f64 {
        max_abs_diff(&self.reconstruct(), h.matrix())
    }

    /// Coefficients `<l_j|psi>` in the eigenbasis.
    pub fn coefficients(&self, psi: &StateVector) -> Result<CVector> {
        ensure_dim(self.dim(), psi.dim())?;
        Ok(self.eigenvectors.adjoint() * psi.amplitudes())
    }

    /// Projector onto the eigenvectors selected by `keep`.
    pub fn projector_where<F: Fn(usize, f64) -> bool>(&self, keep: F) -> Projector {
        let n = self.dim();
        let mut entries = CMatrix::zeros(n, n);
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            if keep(j, l) {
                let v = self.eigenvectors.column(j);
                entries += &v * v.adjoint();
            }
        }
        Projector {
            entries: hermitian_part(&entries),
        }
    }
}

/// Eigendecomposition with ascending eigenvalues; ties keep the solver's
/// column order (stable sort).
pub fn eig(h: &HermitianOperator) -> SpectralDecomposition {
    let n = h.dim();
    let raw = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw.eigenvalues[a].total_cmp(&raw.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&j| raw.eigenvalues[j]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &raw.eigenvectors.column(src));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Validating entry point for raw matrices.
pub fn eig_matrix(m: &CMatrix) -> Result<SpectralDecomposition> {
    Ok(eig(&HermitianOperator::new(m.clone())?))
}

/// `exp(-i H t)`.
pub fn evolve(h: &HermitianOperator, t: f64) -> UnitaryOperator {
    evolve_decomposed(&eig(h), t)
}

pub fn evolve_decomposed(s: &SpectralDecomposition, t: f64) -> UnitaryOperator {
    UnitaryOperator {
        entries: s.map(|l| C64::from_polar(1.0, -l * t)),
    }
}

/// `REF(P) = I - 2P`.
pub fn reflection(p: &Projector) -> HermitianOperator {
    let n = p.dim();
    HermitianOperator {
        entries: CMatrix::identity(n, n) - p.matrix() * c(2.0, 0.0),
    }
}

/// Projector onto eigenvectors with eigenvalue strictly below `threshold`.
pub fn projector_below(s: &SpectralDecomposition, threshold: f64) -> Projector {
    s.projector_where(|_, l| l < threshold)
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
