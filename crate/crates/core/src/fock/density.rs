//! Density matrices on (sub-)registers: partial traces land here, together
//! with the spectral quantities built on them (entropy, fidelity).

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::operator::FockOperator;
use super::register::{check_same_register, ModeRegister};
use super::state::PureState;
use crate::error::{Result, SimError};
use crate::linalg;

/// Eigenvalues below this are treated as zero in entropy sums.
const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    register: Arc<ModeRegister>,
    matrix: DMatrix<C64>,
    leakage: f64,
}

impl DensityMatrix {
    pub(crate) fn from_parts(
        register: &Arc<ModeRegister>,
        matrix: DMatrix<C64>,
        leakage: f64,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), register.dim());
        DensityMatrix {
            register: Arc::clone(register),
            matrix,
            leakage,
        }
    }

    /// |psi><psi| as an explicit matrix; desk-scale registers only.
    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.register().dim();
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        m.gerc(C64::new(1.0, 0.0), &v, &v, C64::new(0.0, 0.0));
        DensityMatrix {
            register: Arc::clone(state.register()),
            matrix: m,
            leakage: state.leakage(),
        }
    }

    /// Diagonal density matrix from occupation probabilities.
    pub fn from_diagonal(
        register: &Arc<ModeRegister>,
        probabilities: &[f64],
        leakage: f64,
    ) -> Result<Self> {
        if probabilities.len() != register.dim() {
            return Err(SimError::DimensionMismatch {
                expected: register.dim(),
                got: probabilities.len(),
            });
        }
        let mut m = DMatrix::<C64>::zeros(register.dim(), register.dim());
        for (i, &p) in probabilities.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        Ok(DensityMatrix {
            register: Arc::clone(register),
            matrix: m,
            leakage,
        })
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = ||rho||_F^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Occupation probabilities (the diagonal).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Tr(rho A).
    pub fn expectation(&self, op: &FockOperator) -> Result<C64> {
        check_same_register(&self.register, op.register())?;
        let mut acc = C64::new(0.0, 0.0);
        for (r, c, v) in op.csr().entries() {
            acc += self.matrix[(c, r)] * v;
        }
        Ok(acc)
    }

    /// Reduced density matrix on the kept modes.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let sub = self.register.sub_register(keep)?;
        let keep_dim = sub.dim();
        let env_dim = self.register.dim() / keep_dim;
        // index split: full index -> (kept, env)
        let modes = self.register.mode_count();
        let keep_idx: Vec<usize> = sub
            .labels()
            .iter()
            .map(|l| self.register.mode_index(l))
            .collect::<Result<_>>()?;
        let mut full_of = vec![0usize; keep_dim * env_dim];
        {
            let mut env_strides = vec![0usize; modes];
            let mut kept_strides = vec![0usize; modes];
            let mut estride = 1usize;
            let mut kpos = keep_idx.len();
            for mode in (0..modes).rev() {
                if keep_idx.contains(&mode) {
                    kpos -= 1;
                    kept_strides[mode] = sub.stride(kpos);
                } else {
                    env_strides[mode] = estride;
                    estride *= self.register.mode_dim(mode);
                }
            }
            for idx in 0..self.register.dim() {
                let mut a = 0usize;
                let mut e = 0usize;
                for mode in 0..modes {
                    let n = self.register.occupation_in_mode(idx, mode);
                    a += n * kept_strides[mode];
                    e += n * env_strides[mode];
                }
                full_of[a * env_dim + e] = idx;
            }
        }
        let mut out = DMatrix::<C64>::zeros(keep_dim, keep_dim);
        for a in 0..keep_dim {
            for b in 0..keep_dim {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..env_dim {
                    acc += self.matrix[(full_of[a * env_dim + e], full_of[b * env_dim + e])];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix {
            register: sub,
            matrix: out,
            leakage: self.leakage,
        })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// -sum lambda ln lambda over eigenvalues above the floor; tiny
    /// negatives from roundoff are clamped to zero.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l > ENTROPY_EIGENVALUE_FLOOR)
            .map(|l| -l * l.ln())
            .sum()
    }

    /// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via
    /// eigen-square-roots. For commuting diagonal states this reduces to
    /// (sum_i sqrt(p_i q_i))^2.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        check_same_register(&self.register, &other.register)?;
        let eig = linalg::hermitian_eigen(&self.matrix);
        let n = self.dim();
        let mut sqrt_lambda = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            sqrt_lambda[(i, i)] = C64::new(eig.eigenvalues[i].max(0.0).sqrt(), 0.0);
        }
        let sqrt_rho = &eig.eigenvectors * sqrt_lambda * eig.eigenvectors.adjoint();
        let inner = &sqrt_rho * &other.matrix * &sqrt_rho;
        let sum: f64 = linalg::hermitian_eigenvalues(&inner)
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        Ok(sum * sum)
    }

    /// Fidelity with a pure state: <psi|rho|psi>.
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        check_same_register(&self.register, psi.register())?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let rho_v = &self.matrix * &v;
        Ok(v.dotc(&rho_v).re)
    }

    /// Hermiticity / trace / positivity diagnostics against the type's
    /// invariants.
    pub fn check_valid(&self, trace_tol: f64) -> Result<()> {
        let herm = (&self.matrix - self.matrix.adjoint()).norm();
        if herm > 1e-12 * (1.0 + self.matrix.norm()) {
            return Err(SimError::NotHermitian(herm));
        }
        let tr = self.trace();
        if (tr - (1.0 - self.leakage)).abs() > trace_tol + self.leakage {
            return Err(SimError::Config(format!(
                "density trace {tr} outside 1 - leakage {} (tol {trace_tol})",
                self.leakage
            )));
        }
        if let Some(min) = self
            .eigenvalues()
            .first()
            .copied()
            .filter(|&l| l < -1e-12)
        {
            return Err(SimError::Config(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}
