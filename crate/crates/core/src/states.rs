//! Constructors for the named states and operator frames: two-mode squeezed
//! vacua, Minkowski/Rindler vacua, the Unruh-Minkowski Bogoliubov frame and
//! the collective B frame for oscillator pairs.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Result, SimError};
use crate::fock::{
    annihilation, apply_exp_series, creation, FockOperator, ModeRegister, PureState,
};

/// Default bound on the geometric tail a cutoff may discard.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Squeezing parameter gamma in (-1, 1), alternatively given through the
/// Rindler frequency Omega via gamma = exp(-pi Omega).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParam {
    gamma: f64,
}

impl SqueezeParam {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.abs() >= 1.0 {
            return Err(SimError::GammaOutOfRange(gamma));
        }
        Ok(SqueezeParam { gamma })
    }

    pub fn from_omega(omega_rindler: f64) -> Result<Self> {
        if !omega_rindler.is_finite() || omega_rindler < 0.0 {
            return Err(SimError::SingularInput(format!(
                "Rindler frequency must be >= 0, got {omega_rindler}"
            )));
        }
        Self::from_gamma((-std::f64::consts::PI * omega_rindler).exp())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Rindler frequency -ln(gamma)/pi; defined for gamma > 0.
    pub fn omega_rindler(&self) -> Option<f64> {
        (self.gamma > 0.0).then(|| -self.gamma.ln() / std::f64::consts::PI)
    }

    /// Squeeze amplitude r with gamma = tanh r. Read-only diagnostic.
    pub fn squeeze_amplitude(&self) -> f64 {
        self.gamma.atanh()
    }

    /// Smallest cutoff n with gamma^(2(n+1))/(1-gamma^2) below the tail
    /// tolerance: the geometric tail of the squeezed state bounds the
    /// truncation leakage.
    pub fn tail_cutoff(&self, tail_tol: f64) -> usize {
        let g2 = self.gamma * self.gamma;
        let denom = 1.0 - g2;
        let mut n = 1usize;
        while g2.powi(n as i32 + 1) / denom >= tail_tol {
            n += 1;
            if n > 1_000_000 {
                break;
            }
        }
        n
    }

    /// Truncation weight of the two-mode squeezed state at the cutoff.
    pub fn tail_leakage(&self, cutoff: usize) -> f64 {
        (self.gamma * self.gamma).powi(cutoff as i32 + 1)
    }
}

/// Two-mode squeezed vacuum sqrt(1-gamma^2) sum_n gamma^n |n>_A |n>_B,
/// any other register modes in their ground state.
pub fn two_mode_squeezed_vacuum(
    param: SqueezeParam,
    mode_a: &str,
    mode_b: &str,
    register: &Arc<ModeRegister>,
) -> Result<PureState> {
    let gamma = param.gamma();
    let ia = register.mode_index(mode_a)?;
    let ib = register.mode_index(mode_b)?;
    if ia == ib {
        return Err(SimError::DuplicateLabel(mode_a.to_string()));
    }
    let nmax = register.cutoffs()[ia].min(register.cutoffs()[ib]);
    let prefactor = (1.0 - gamma * gamma).sqrt();
    let mut occupations = vec![0usize; register.mode_count()];
    let mut psi = PureState::from_amplitudes(
        register,
        vec![C64::new(0.0, 0.0); register.dim()],
        0.0,
    )?;
    let mut coeff = prefactor;
    for n in 0..=nmax {
        occupations[ia] = n;
        occupations[ib] = n;
        let idx = register.index_of(&occupations);
        psi.amplitudes_mut()[idx] = C64::new(coeff, 0.0);
        coeff *= gamma;
    }
    Ok(psi.with_leakage(param.tail_leakage(nmax)))
}

/// Minkowski vacuum: two-mode squeezed state of the Rindler photon pair,
/// all chain modes in their ground state.
pub fn minkowski_vacuum(
    param: SqueezeParam,
    b1: &str,
    b2: &str,
    register: &Arc<ModeRegister>,
) -> Result<PureState> {
    two_mode_squeezed_vacuum(param, b1, b2, register)
}

/// Rindler vacuum: every mode empty.
pub fn rindler_vacuum(register: &Arc<ModeRegister>) -> PureState {
    PureState::vacuum(register)
}

/// Oscillator-chain ground state: every mode empty.
pub fn chain_ground(register: &Arc<ModeRegister>) -> PureState {
    PureState::vacuum(register)
}

/// Unruh-Minkowski operator frame derived from the Rindler pair:
/// a1 = (b1 - gamma b2†)/sqrt(1-gamma^2), a2 = (b2 - gamma b1†)/sqrt(1-gamma^2).
/// Both annihilate the Minkowski vacuum up to truncation-boundary residuals.
#[derive(Debug, Clone)]
pub struct BogoliubovFrame {
    pub gamma: SqueezeParam,
    pub a1: FockOperator,
    pub a2: FockOperator,
    pub b1_label: String,
    pub b2_label: String,
}

pub fn bogoliubov_frame(
    param: SqueezeParam,
    b1: &str,
    b2: &str,
    register: &Arc<ModeRegister>,
) -> Result<BogoliubovFrame> {
    let gamma = param.gamma();
    let norm = C64::new(1.0 / (1.0 - gamma * gamma).sqrt(), 0.0);
    let g = C64::new(gamma, 0.0);
    let b1_op = annihilation(register, b1)?;
    let b2_op = annihilation(register, b2)?;
    let a1 = (&b1_op - &b2_op.dagger().scale(g)).scale(norm);
    let a2 = (&b2_op - &b1_op.dagger().scale(g)).scale(norm);
    Ok(BogoliubovFrame {
        gamma: param,
        a1,
        a2,
        b1_label: b1.to_string(),
        b2_label: b2.to_string(),
    })
}

impl BogoliubovFrame {
    /// Residual norms ||a1|0_M>||, ||a2|0_M>|| on the given state.
    pub fn annihilation_residuals(&self, minkowski: &PureState) -> Result<(f64, f64)> {
        let r1 = minkowski.apply(&self.a1)?.norm();
        let r2 = minkowski.apply(&self.a2)?.norm();
        Ok((r1, r2))
    }

    /// Reconstruct the Rindler operators: b1 = (a1 + gamma a2†)/sqrt(1-gamma^2).
    pub fn inverse_b1(&self) -> FockOperator {
        let gamma = self.gamma.gamma();
        let norm = C64::new(1.0 / (1.0 - gamma * gamma).sqrt(), 0.0);
        (&self.a1 + &self.a2.dagger().scale(C64::new(gamma, 0.0))).scale(norm)
    }

    pub fn inverse_b2(&self) -> FockOperator {
        let gamma = self.gamma.gamma();
        let norm = C64::new(1.0 / (1.0 - gamma * gamma).sqrt(), 0.0);
        (&self.a2 + &self.a1.dagger().scale(C64::new(gamma, 0.0))).scale(norm)
    }
}

/// Collective frame for an oscillator pair:
/// B1 = (s1 + gamma s2†)/sqrt(1-gamma^2), B2 = (s2 + gamma s1†)/sqrt(1-gamma^2).
pub fn collective_b_frame(
    param: SqueezeParam,
    sigma1: &str,
    sigma2: &str,
    register: &Arc<ModeRegister>,
) -> Result<(FockOperator, FockOperator)> {
    let gamma = param.gamma();
    let norm = C64::new(1.0 / (1.0 - gamma * gamma).sqrt(), 0.0);
    let g = C64::new(gamma, 0.0);
    let s1 = annihilation(register, sigma1)?;
    let s2 = annihilation(register, sigma2)?;
    let b_1 = (&s1 + &s2.dagger().scale(g)).scale(norm);
    let b_2 = (&s2 + &s1.dagger().scale(g)).scale(norm);
    Ok((b_1, b_2))
}

/// Vacuum of the collective B frame:
/// |0_B> = sqrt(1-gamma^2) exp(-gamma s1† s2†) |G>, other modes untouched.
pub fn b_frame_vacuum(
    param: SqueezeParam,
    sigma1: &str,
    sigma2: &str,
    register: &Arc<ModeRegister>,
) -> Result<PureState> {
    let neg = SqueezeParam::from_gamma(-param.gamma())?;
    two_mode_squeezed_vacuum(neg, sigma1, sigma2, register)
}

/// Joint vacuum |0_B>|0_A> of the Unruh-Minkowski duality frames: the B
/// vacuum on the oscillator pair tensored with the Minkowski vacuum on the
/// Rindler pair.
pub fn unruh_duality_vacuum(
    param: SqueezeParam,
    sigma1: &str,
    sigma2: &str,
    b1: &str,
    b2: &str,
    register: &Arc<ModeRegister>,
) -> Result<PureState> {
    let gamma = param.gamma();
    let g = C64::new(gamma, 0.0);
    let pair_b = &creation(register, b1)? * &creation(register, b2)?;
    let pair_s = &creation(register, sigma1)? * &creation(register, sigma2)?;
    let seed = PureState::vacuum(register);
    let with_field = apply_exp_series(&pair_b.scale(g), &seed, 0.0)?.state;
    let both = apply_exp_series(&pair_s.scale(-g), &with_field, 0.0)?.state;
    Ok(both
        .scale(C64::new(1.0 - gamma * gamma, 0.0))
        .tag_leakage_from_norm())
}
