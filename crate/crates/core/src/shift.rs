//! Register-controlled spectral shifts.
//!
//! `SHIFT_n(H) = sum_j |j><j| (x) (H - 2 pi j / 2^n)` with the register as the
//! leading tensor factor. Register bit `m` carries weight `2^m`; in Kronecker
//! order the most significant bit comes first.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::operator::{c, evolve, kron, CMatrix, HermitianOperator, UnitaryOperator, MAX_TOTAL_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRegisterOperator {
    bits: u32,
    base: HermitianOperator,
    entries: HermitianOperator,
}

impl ShiftRegisterOperator {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn base(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.entries
    }

    pub fn register_size(&self) -> usize {
        1 << self.bits
    }

    /// Diagonal block `j`, i.e. `H - 2 pi j / 2^n`.
    pub fn block(&self, j: usize) -> CMatrix {
        let m = self.base.dim();
        self.entries.matrix().view((j * m, j * m), (m, m)).into_owned()
    }
}

/// Shift applied to register value `j`.
pub fn register_shift(j: usize, bits: u32) -> f64 {
    j as f64 * 2.0 * PI / (1u64 << bits) as f64
}

pub(crate) fn check_budget(dim: usize, bits: u32) -> Result<()> {
    if bits == 0 {
        return Err(Error::InvalidParameter {
            name: "bits",
            reason: "register needs at least one bit".into(),
        });
    }
    let requested = (dim as u128) << bits.min(64);
    if bits >= 32 || requested > MAX_TOTAL_DIM as u128 {
        return Err(Error::ResourceExceeded {
            requested: requested.min(usize::MAX as u128) as usize,
            budget: MAX_TOTAL_DIM,
        });
    }
    Ok(())
}

pub fn shift_operator(h: &HermitianOperator, bits: u32) -> Result<ShiftRegisterOperator> {
    check_budget(h.dim(), bits)?;
    let m = h.dim();
    let size = 1usize << bits;
    let mut entries = CMatrix::zeros(size * m, size * m);
    for j in 0..size {
        let block = h.shifted(register_shift(j, bits));
        entries
            .view_mut((j * m, j * m), (m, m))
            .copy_from(block.matrix());
    }
    Ok(ShiftRegisterOperator {
        bits,
        base: h.clone(),
        entries: HermitianOperator::from_hermitian_part(&entries),
    })
}

/// `Phase(theta) = diag(1, exp(-i theta))`.
pub fn phase_gate(theta: f64) -> CMatrix {
    let mut g = CMatrix::identity(2, 2);
    g[(1, 1)] = c(theta.cos(), -theta.sin());
    g
}

/// `exp(i SHIFT_n(H))` from one `exp(iH)` and `n` single-qubit phase gates.
pub fn shift_evolution_factored(h: &HermitianOperator, bits: u32) -> Result<UnitaryOperator> {
    check_budget(h.dim(), bits)?;
    let full = 2.0 * PI / (1u64 << bits) as f64;
    let mut register = CMatrix::identity(1, 1);
    for m in (0..bits).rev() {
        register = kron(&register, &phase_gate((1u64 << m) as f64 * full));
    }
    let system = evolve(h, -1.0);
    Ok(UnitaryOperator::new_unchecked(kron(&register, system.matrix())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::max_abs_diff;
    use crate::random::random_hermitian;

    #[test]
    fn zero_hamiltonian_one_bit() {
        let s = shift_operator(&HermitianOperator::zeros(2), 1).unwrap();
        assert!(max_abs_diff(&s.block(0), &CMatrix::zeros(2, 2)) < 1e-15);
        assert!(max_abs_diff(&s.block(1), &(CMatrix::identity(2, 2) * c(-PI, 0.0))) < 1e-15);
    }

    #[test]
    fn scalar_hamiltonian_two_bits() {
        let s = shift_operator(&HermitianOperator::from_diagonal(&[0.2]), 2).unwrap();
        for j in 0..4 {
            let expected = 0.2 - j as f64 * PI / 2.0;
            assert!((s.operator().matrix()[(j, j)].re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn random_blocks_match_direct_formula() {
        let h = random_hermitian(4, 5);
        let s = shift_operator(&h, 3).unwrap();
        for j in 0..8 {
            let direct = h.shifted(j as f64 * 2.0 * PI / 8.0);
            assert!(max_abs_diff(&s.block(j), direct.matrix()) == 0.0);
        }
        // Off-diagonal blocks vanish.
        let m = s.operator().matrix();
        assert_eq!(m[(0, 4)], c(0.0, 0.0));
    }

    #[test]
    fn factored_zero_hamiltonian() {
        let u = shift_evolution_factored(&HermitianOperator::zeros(2), 1).unwrap();
        let expected = kron(&phase_gate(PI), &CMatrix::identity(2, 2));
        assert!(max_abs_diff(u.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn factored_zero_block_is_plain_evolution() {
        let h = random_hermitian(3, 9);
        for bits in 1..=3 {
            let u = shift_evolution_factored(&h, bits).unwrap();
            let block = u.matrix().view((0, 0), (3, 3)).into_owned();
            assert!(max_abs_diff(&block, evolve(&h, -1.0).matrix()) < 1e-14);
        }
    }

    #[test]
    fn factored_matches_direct_exponential() {
        for dim in 1..=4 {
            for bits in 1..=4 {
                let h = random_hermitian(dim, 40 + dim as u64 * 10 + bits as u64);
                let direct = evolve(shift_operator(&h, bits).unwrap().operator(), -1.0);
                let factored = shift_evolution_factored(&h, bits).unwrap();
                let err = max_abs_diff(direct.matrix(), factored.matrix());
                assert!(err <= 1e-10, "dim {dim} bits {bits}: {err:e}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let h = HermitianOperator::zeros(8);
        assert!(matches!(shift_operator(&h, 10), Err(Error::ResourceExceeded { .. })));
        assert!(shift_operator(&h, 0).is_err());
    }
}
