//! Operators on a register's Hilbert space: ladder operators, number
//! operators, and the sparse algebra the Hamiltonians and operator
//! identities are assembled from.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::register::{check_same_register, ModeRegister};
use super::sparse::CsrMatrix;
use crate::error::Result;

/// Complex matrix (sparse storage) acting on a register's Hilbert space.
#[derive(Debug, Clone)]
pub struct FockOperator {
    register: Arc<ModeRegister>,
    matrix: CsrMatrix,
}

impl FockOperator {
    pub fn zero(register: &Arc<ModeRegister>) -> Self {
        FockOperator {
            register: Arc::clone(register),
            matrix: CsrMatrix::zeros(register.dim()),
        }
    }

    pub fn identity(register: &Arc<ModeRegister>) -> Self {
        FockOperator {
            register: Arc::clone(register),
            matrix: CsrMatrix::identity(register.dim()),
        }
    }

    pub fn from_triplets(
        register: &Arc<ModeRegister>,
        triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        FockOperator {
            register: Arc::clone(register),
            matrix: CsrMatrix::from_triplets(register.dim(), triplets),
        }
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    pub(crate) fn csr(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn scale(&self, factor: C64) -> Self {
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn dagger(&self) -> Self {
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        self.matrix.apply(x)
    }

    /// Largest |A_ij - conj(A_ji)|.
    pub fn hermiticity_residual(&self) -> f64 {
        self.matrix.hermiticity_residual()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// (A + A†)/2.
    pub fn symmetrized(&self) -> Self {
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self.matrix.symmetrize(),
        }
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Self) -> Self {
        check_registers(self, other);
        let ab = self.matrix.matmul(&other.matrix);
        let ba = other.matrix.matmul(&self.matrix);
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: ab.linear_comb(C64::new(1.0, 0.0), &ba, C64::new(-1.0, 0.0)),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// Operator 2-norm (largest singular value); densifies, so only for
    /// desk-scale dimensions.
    pub fn two_norm(&self) -> f64 {
        crate::linalg::two_norm(&self.matrix.to_dense())
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        self.matrix.to_dense()
    }

    /// Restriction P A P for a diagonal projector given as a keep-mask.
    pub fn masked(&self, keep: &[bool]) -> Self {
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self.matrix.masked(keep),
        }
    }
}

fn check_registers(a: &FockOperator, b: &FockOperator) {
    check_same_register(&a.register, &b.register).expect("operators on different registers");
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        check_registers(self, rhs);
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self
                .matrix
                .linear_comb(C64::new(1.0, 0.0), &rhs.matrix, C64::new(1.0, 0.0)),
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        check_registers(self, rhs);
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self
                .matrix
                .linear_comb(C64::new(1.0, 0.0), &rhs.matrix, C64::new(-1.0, 0.0)),
        }
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        check_registers(self, rhs);
        FockOperator {
            register: Arc::clone(&self.register),
            matrix: self.matrix.matmul(&rhs.matrix),
        }
    }
}

/// Annihilation operator for the named mode: <n-1|a|n> = sqrt(n), identity
/// on the other modes, zero row at the top cutoff level.
pub fn annihilation(register: &Arc<ModeRegister>, label: &str) -> Result<FockOperator> {
    let mode = register.mode_index(label)?;
    let stride = register.stride(mode);
    let dim = register.dim();
    let mut triplets = Vec::new();
    for idx in 0..dim {
        let n = register.occupation_in_mode(idx, mode);
        if n >= 1 {
            triplets.push((idx - stride, idx, C64::new((n as f64).sqrt(), 0.0)));
        }
    }
    Ok(FockOperator::from_triplets(register, triplets))
}

/// Creation operator a† for the named mode.
pub fn creation(register: &Arc<ModeRegister>, label: &str) -> Result<FockOperator> {
    Ok(annihilation(register, label)?.dagger())
}

/// Number operator a†a for the named mode.
pub fn number(register: &Arc<ModeRegister>, label: &str) -> Result<FockOperator> {
    let mode = register.mode_index(label)?;
    let dim = register.dim();
    let mut triplets = Vec::with_capacity(dim);
    for idx in 0..dim {
        let n = register.occupation_in_mode(idx, mode);
        if n > 0 {
            triplets.push((idx, idx, C64::new(n as f64, 0.0)));
        }
    }
    Ok(FockOperator::from_triplets(register, triplets))
}

/// Keep-mask for the cutoff-interior subspace: basis states whose occupation
/// stays at least `excluded` levels below every mode's cutoff. Ladder
/// commutators and frame identities are exact there; truncation corrupts
/// only the top levels.
pub fn interior_mask(register: &ModeRegister, excluded: usize) -> Vec<bool> {
    (0..register.dim())
        .map(|idx| {
            (0..register.mode_count()).all(|m| {
                register.occupation_in_mode(idx, m) + excluded <= register.cutoffs()[m]
            })
        })
        .collect()
}

/// Keep-mask excluding the top `excluded` total-quanta shells: basis states
/// with total occupation <= max(cutoffs) - excluded. The right interior for
/// excitation-conserving operators, whose truncated blocks are exact only
/// below the cutoff shell.
pub fn total_quanta_mask(register: &ModeRegister, excluded: usize) -> Vec<bool> {
    let max_cut = register.cutoffs().iter().copied().max().unwrap_or(0);
    let bound = max_cut.saturating_sub(excluded);
    (0..register.dim())
        .map(|idx| {
            let total: usize = (0..register.mode_count())
                .map(|m| register.occupation_in_mode(idx, m))
                .sum();
            total <= bound
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ladder_matrix_elements() {
        let reg = ModeRegister::new(vec!["a"], vec![2]).unwrap();
        let a = annihilation(&reg, "a").unwrap();
        // a|1> = |0>, a|2> = sqrt(2)|1>
        assert_eq!(a.element(0, 1), c(1.0));
        assert!((a.element(1, 2) - c(2.0_f64.sqrt())).norm() < 1e-15);
        // a|0> = 0
        let vac = [c(1.0), c(0.0), c(0.0)];
        assert!(a.apply_vec(&vac).iter().all(|z| z.norm() == 0.0));
        // zero row at top: a† has no element raising |2>
        let adag = a.dagger();
        for col in 0..3 {
            for row in 0..3 {
                if row == col + 1 {
                    continue;
                }
                assert_eq!(adag.element(row, col), c(0.0));
            }
        }
    }

    #[test]
    fn canonical_commutator_on_interior() {
        let reg = ModeRegister::new(vec!["a", "b"], vec![4, 3]).unwrap();
        for label in ["a", "b"] {
            let a = annihilation(&reg, label).unwrap();
            let comm = a.commutator(&a.dagger());
            let resid = &comm - &FockOperator::identity(&reg);
            let mask = interior_mask(&reg, 1);
            assert!(resid.masked(&mask).frobenius_norm() < 1e-14);
        }
        // cross-mode commutators vanish everywhere
        let a = annihilation(&reg, "a").unwrap();
        let b = annihilation(&reg, "b").unwrap();
        assert!(a.commutator(&b).frobenius_norm() < 1e-15);
        assert!(a.commutator(&b.dagger()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn number_operator_diagonal() {
        let reg = ModeRegister::new(vec!["a", "b"], vec![2, 2]).unwrap();
        let n = number(&reg, "b").unwrap();
        for idx in 0..reg.dim() {
            let occ = reg.occupation_of(idx);
            assert_eq!(n.element(idx, idx), c(occ[1] as f64));
        }
    }

    #[test]
    fn masks() {
        let reg = ModeRegister::new(vec!["a", "b"], vec![3, 3]).unwrap();
        let per_mode = interior_mask(&reg, 2);
        let idx_ok = reg.index_of(&[1, 1]);
        let idx_bad = reg.index_of(&[2, 0]);
        assert!(per_mode[idx_ok]);
        assert!(!per_mode[idx_bad]);
        let total = total_quanta_mask(&reg, 2);
        assert!(total[reg.index_of(&[1, 0])]);
        assert!(!total[reg.index_of(&[1, 1])]);
        assert!(total[reg.index_of(&[0, 1])]);
    }
}
