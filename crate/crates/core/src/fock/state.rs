//! Pure states: complex amplitude vectors on a register, with explicit
//! truncation-leakage tracking. Truncated states are never silently
//! renormalized; tests budget the leakage instead.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::density::DensityMatrix;
use super::operator::FockOperator;
use super::register::{check_same_register, ModeRegister};
use crate::error::{Result, SimError};

#[derive(Debug, Clone)]
pub struct PureState {
    register: Arc<ModeRegister>,
    amplitudes: Vec<C64>,
    leakage: f64,
}

impl PureState {
    /// All modes in their ground state.
    pub fn vacuum(register: &Arc<ModeRegister>) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); register.dim()];
        amplitudes[0] = C64::new(1.0, 0.0);
        PureState {
            register: Arc::clone(register),
            amplitudes,
            leakage: 0.0,
        }
    }

    /// Basis state with the given occupation numbers.
    pub fn basis(register: &Arc<ModeRegister>, occupations: &[usize]) -> Result<Self> {
        if occupations.len() != register.mode_count() {
            return Err(SimError::DimensionMismatch {
                expected: register.mode_count(),
                got: occupations.len(),
            });
        }
        for (m, (&n, &cut)) in occupations.iter().zip(register.cutoffs()).enumerate() {
            if n > cut {
                return Err(SimError::CutoffInfeasible(format!(
                    "occupation {n} exceeds cutoff {cut} for mode `{}`",
                    register.labels()[m]
                )));
            }
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); register.dim()];
        amplitudes[register.index_of(occupations)] = C64::new(1.0, 0.0);
        Ok(PureState {
            register: Arc::clone(register),
            amplitudes,
            leakage: 0.0,
        })
    }

    pub fn from_amplitudes(
        register: &Arc<ModeRegister>,
        amplitudes: Vec<C64>,
        leakage: f64,
    ) -> Result<Self> {
        if amplitudes.len() != register.dim() {
            return Err(SimError::DimensionMismatch {
                expected: register.dim(),
                got: amplitudes.len(),
            });
        }
        Ok(PureState {
            register: Arc::clone(register),
            amplitudes,
            leakage,
        })
    }

    pub fn register(&self) -> &Arc<ModeRegister> {
        &self.register
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> C64 {
        self.amplitudes[self.register.index_of(occupations)]
    }

    /// Truncation weight lost to the cutoff, tracked as metadata.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn with_leakage(mut self, leakage: f64) -> Self {
        self.leakage = leakage;
        self
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Record 1 - |psi|^2 as the state's leakage.
    pub fn tag_leakage_from_norm(mut self) -> Self {
        self.leakage = (1.0 - self.norm_sqr()).max(0.0);
        self
    }

    /// <self|other>.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        check_same_register(&self.register, &other.register)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// <psi|A|psi>.
    pub fn expectation(&self, op: &FockOperator) -> Result<C64> {
        check_same_register(&self.register, op.register())?;
        let applied = op.apply_vec(&self.amplitudes);
        Ok(self
            .amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// A|psi> (leakage metadata carried through).
    pub fn apply(&self, op: &FockOperator) -> Result<Self> {
        check_same_register(&self.register, op.register())?;
        Ok(PureState {
            register: Arc::clone(&self.register),
            amplitudes: op.apply_vec(&self.amplitudes),
            leakage: self.leakage,
        })
    }

    pub fn scale(&self, factor: C64) -> Self {
        PureState {
            register: Arc::clone(&self.register),
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
            leakage: self.leakage,
        }
    }

    /// Explicit renormalization; never applied implicitly.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// ||self - other||.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_same_register(&self.register, &other.register)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Reduced density matrix on the kept modes; trace preserved.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let sub = self.register.sub_register(keep)?;
        let keep_idx: Vec<usize> = sub
            .labels()
            .iter()
            .map(|l| self.register.mode_index(l))
            .collect::<Result<_>>()?;
        let keep_dim = sub.dim();
        let env_dim = self.register.dim() / keep_dim;

        // amplitude matrix M[kept, env]; reduced rho = M M†
        let mut m = DMatrix::<C64>::zeros(keep_dim, env_dim);
        let modes = self.register.mode_count();
        let mut env_strides = vec![0usize; modes];
        let mut kept_strides = vec![0usize; modes];
        {
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
        }
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let mut a = 0usize;
            let mut e = 0usize;
            for mode in 0..modes {
                let n = self.register.occupation_in_mode(idx, mode);
                a += n * kept_strides[mode];
                e += n * env_strides[mode];
            }
            m[(a, e)] = amp;
        }
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_parts(&sub, rho, self.leakage))
    }

    /// Mutable access for constructors that fill amplitudes in place.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<C64> {
        &mut self.amplitudes
    }
}

/// Result of applying exp(A) through its Taylor series.
#[derive(Debug, Clone)]
pub struct ExpSeries {
    pub state: PureState,
    pub terms: usize,
    /// Norm of the last term added; the series' self-reported residual.
    pub last_term_norm: f64,
}

pub const EXP_SERIES_MAX_TERMS: usize = 20_000;

/// exp(A)|psi> by Taylor application with a term-norm stopping rule.
///
/// Exponentials of pure creation-operator polynomials terminate exactly on
/// truncated spaces; mixed exponents stop once a term's norm drops below
/// `tol`.
pub fn apply_exp_series(op: &FockOperator, state: &PureState, tol: f64) -> Result<ExpSeries> {
    check_same_register(state.register(), op.register())?;
    let mut acc: Vec<C64> = state.amplitudes().to_vec();
    let mut term: Vec<C64> = state.amplitudes().to_vec();
    let mut last_norm = 0.0;
    for k in 1..=EXP_SERIES_MAX_TERMS {
        term = op.apply_vec(&term);
        let inv_k = 1.0 / k as f64;
        let mut norm_sqr = 0.0;
        for (dst, t) in acc.iter_mut().zip(term.iter_mut()) {
            *t *= inv_k;
            *dst += *t;
            norm_sqr += t.norm_sqr();
        }
        last_norm = norm_sqr.sqrt();
        if last_norm <= tol {
            let out = PureState {
                register: Arc::clone(state.register()),
                amplitudes: acc,
                leakage: state.leakage(),
            };
            return Ok(ExpSeries {
                state: out,
                terms: k,
                last_term_norm: last_norm,
            });
        }
    }
    Err(SimError::SeriesNotConverged {
        terms: EXP_SERIES_MAX_TERMS,
        last_term: last_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::{annihilation, creation};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let reg = ModeRegister::new(vec!["a"], vec![3]).unwrap();
        let psi = PureState::basis(&reg, &[2]).unwrap();
        let zero = FockOperator::zero(&reg);
        let out = apply_exp_series(&zero, &psi, 1e-16).unwrap();
        assert!(out.state.distance(&psi).unwrap() < 1e-16);
        assert_eq!(out.terms, 1);
    }

    #[test]
    fn pair_creation_series_coefficients() {
        // exp(gamma b1† b2†)|00> puts gamma^n on |nn>
        let reg = ModeRegister::new(vec!["b1", "b2"], vec![8, 8]).unwrap();
        let pair = &creation(&reg, "b1").unwrap() * &creation(&reg, "b2").unwrap();
        let out = apply_exp_series(&pair.scale(c(0.5, 0.0)), &PureState::vacuum(&reg), 1e-16)
            .unwrap()
            .state;
        for n in 0..=8usize {
            let expect = 0.5_f64.powi(n as i32);
            assert!((out.amplitude(&[n, n]) - c(expect, 0.0)).norm() < 1e-14);
        }
        assert!((out.amplitude(&[2, 2]) - c(0.25, 0.0)).norm() < 1e-15);
        // nothing off the diagonal
        assert!((out.amplitude(&[1, 2])).norm() == 0.0);
    }

    #[test]
    fn exp_series_inverse_composition() {
        // exp(alpha a) exp(-alpha a) psi = psi for support below the cutoff margin
        let reg = ModeRegister::new(vec!["a"], vec![12]).unwrap();
        let a = annihilation(&reg, "a").unwrap();
        let psi = {
            let mut s = PureState::basis(&reg, &[3]).unwrap();
            s.amplitudes_mut()[1] = c(0.5, 0.2);
            s.normalized()
        };
        let alpha = c(0.4, -0.1);
        let fwd = apply_exp_series(&a.scale(alpha), &psi, 1e-16).unwrap().state;
        let back = apply_exp_series(&a.scale(-alpha), &fwd, 1e-16).unwrap().state;
        assert!(back.distance(&psi).unwrap() < 1e-13);
    }

    #[test]
    fn exp_series_antihermitian_preserves_norm() {
        let reg = ModeRegister::new(vec!["a", "b"], vec![6, 6]).unwrap();
        let a = annihilation(&reg, "a").unwrap();
        let b = annihilation(&reg, "b").unwrap();
        // K = s a†b - s* a b† is anti-Hermitian
        let s = c(0.3, 0.4);
        let k = &(&a.dagger() * &b).scale(s) - &(&a * &b.dagger()).scale(s.conj());
        let psi = PureState::basis(&reg, &[2, 1]).unwrap();
        let out = apply_exp_series(&k, &psi, 1e-14).unwrap().state;
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let reg = ModeRegister::new(vec!["a", "b"], vec![2, 2]).unwrap();
        // |psi_a> ⊗ |psi_b> with |psi_a> = (|0> + |1>)/sqrt(2), |psi_b> = |2>
        let mut psi = PureState::vacuum(&reg);
        let inv = 1.0 / 2.0_f64.sqrt();
        psi.amplitudes_mut()[reg.index_of(&[0, 2])] = c(inv, 0.0);
        psi.amplitudes_mut()[reg.index_of(&[1, 2])] = c(inv, 0.0);
        psi.amplitudes_mut()[0] = c(0.0, 0.0);
        let rho = psi.partial_trace(&["a"]).unwrap();
        // pure projector |psi_a><psi_a|
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!((rho.purity() - 1.0).abs() < 1e-13);
        assert!((rho.element(0, 1) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn register_mismatch_and_empty_keep_are_errors() {
        let reg_a = ModeRegister::new(vec!["a"], vec![2]).unwrap();
        let reg_b = ModeRegister::new(vec!["b"], vec![2]).unwrap();
        let psi = PureState::vacuum(&reg_a);
        let phi = PureState::vacuum(&reg_b);
        assert!(matches!(
            psi.overlap(&phi),
            Err(crate::error::SimError::RegisterMismatch(_))
        ));
        let op = crate::fock::operator::annihilation(&reg_b, "b").unwrap();
        assert!(psi.expectation(&op).is_err());
        assert!(psi.apply(&op).is_err());
        let reg = ModeRegister::new(vec!["a", "b"], vec![2, 2]).unwrap();
        let joint = PureState::vacuum(&reg);
        assert!(matches!(
            joint.partial_trace(&[]),
            Err(crate::error::SimError::EmptyKeep)
        ));
        assert!(matches!(
            crate::fock::operator::annihilation(&reg, "missing"),
            Err(crate::error::SimError::UnknownLabel(_))
        ));
    }

    #[test]
    fn runaway_series_is_reported() {
        // exp of a large positive multiple of the number operator overflows
        // before the term norms can shrink
        let reg = ModeRegister::new(vec!["a"], vec![8]).unwrap();
        let n = crate::fock::operator::number(&reg, "a").unwrap().scale(c(200.0, 0.0));
        let psi = PureState::basis(&reg, &[8]).unwrap();
        let err = apply_exp_series(&n, &psi, 1e-16).unwrap_err();
        assert!(matches!(err, SimError::SeriesNotConverged { .. }));
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let reg = ModeRegister::new(vec!["a", "b", "c"], vec![2, 3, 2]).unwrap();
        let mut psi = PureState::vacuum(&reg);
        // deterministic pseudo-random amplitudes
        let mut seed = 0x243f6a8885a308d3u64;
        for z in psi.amplitudes_mut().iter_mut() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
            let im = ((seed >> 17) as f64) / (1u64 << 47) as f64 - 0.5;
            *z = c(re, im);
        }
        let psi = psi.normalized();
        for keep in [["a"].as_slice(), ["b"].as_slice(), ["a", "c"].as_slice()] {
            let rho = psi.partial_trace(keep).unwrap();
            assert!((rho.trace() - psi.norm_sqr()).abs() < 1e-12);
        }
    }
}
