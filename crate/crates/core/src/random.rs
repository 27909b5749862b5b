//! Seeded random generators for operators and states.
//!
//! Every random quantity is drawn from a [`ChaCha8Rng`] obtained with
//! [`rng_for`]: the 64-bit seed keys the generator and the trial index selects
//! an independent ChaCha stream, so `(seed, trial)` pairs never share
//! randomness and results do not depend on scheduling.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operator::{c, CMatrix, CVector, HermitianOperator, Projector, StateVector, C64};

pub type SimRng = ChaCha8Rng;

/// Independent substream `stream` of the generator keyed by `seed`.
pub fn rng_for(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with `E|z|^2 = 1` per entry.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| c(s * normal(rng), s * normal(rng)))
}

/// Raw GUE matrix: off-diagonal `N(0,1/2) + i N(0,1/2)`, diagonal `N(0,1)`.
/// The upper triangle is sampled row by row and mirrored.
pub fn gue_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(normal(rng), 0.0);
        for j in (i + 1)..n {
            let z = c(s * normal(rng), s * normal(rng));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// GUE sample rescaled to spectral norm exactly 1.
pub fn unit_norm_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let h = HermitianOperator::from_hermitian_part(&gue_matrix(n, rng));
    let norm = h.spectral_norm();
    h.scaled(1.0 / norm)
}

/// Random Hermitian operator of spectral norm 1, deterministic in `seed`.
pub fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    unit_norm_gue(dim, &mut rng_for(seed, 0))
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for z in out.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    out
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_fn(dim, |_, _| c(s * normal(rng), s * normal(rng)));
    StateVector::normalized(v).expect("Gaussian vector is nonzero")
}

/// Projector onto a Haar-random subspace of the given rank.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Projector {
    let u = haar_unitary(dim, rng);
    let cols = u.columns(0, rank).into_owned();
    Projector::from_orthonormal_columns(&cols).expect("Haar columns are orthonormal")
}
