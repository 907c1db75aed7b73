//! Hamiltonian builders and exact numerical time evolution. The evolution
//! is the brute-force oracle every closed form is tested against: spectral
//! decomposition of the (sparse) Hamiltonian, applied per connected
//! component of its nonzero pattern so tail-policy cutoffs stay cheap.
//!
//! hbar = c = 1 throughout; the coupling g absorbs dimensional constants.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Result, SimError};
use crate::fock::{annihilation, FockOperator, ModeRegister, PureState};
use crate::linalg;

/// Accept H as Hermitian outright below this residual.
const HERMITICITY_TOL: f64 = 1e-10;

/// Coupling and Rindler-time parameters of an evolution run.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionParams {
    pub g: f64,
    pub tau: f64,
}

/// Single-chain interaction V = g (sigma† b1 + sigma b1†); Hermitian, acts
/// as the identity on any other register modes.
pub fn h_single_chain(
    g: f64,
    register: &Arc<ModeRegister>,
    sigma: &str,
    b1: &str,
) -> Result<FockOperator> {
    let s = annihilation(register, sigma)?;
    let b = annihilation(register, b1)?;
    let coupling = C64::new(g, 0.0);
    Ok((&(&s.dagger() * &b) + &(&s * &b.dagger())).scale(coupling))
}

/// Two-chain interaction: block sum of the per-chain couplings.
pub fn h_two_chain(
    g: f64,
    register: &Arc<ModeRegister>,
    sigma1: &str,
    b1: &str,
    sigma2: &str,
    b2: &str,
) -> Result<FockOperator> {
    let first = h_single_chain(g, register, sigma1, b1)?;
    let second = h_single_chain(g, register, sigma2, b2)?;
    Ok(&first + &second)
}

/// Generic duality coupling V = g (A1† B1 + A1 B1† + A2† B2 + A2 B2†) for
/// four materialized frame operators on one register.
#[derive(Debug, Clone)]
pub struct GenericCoupling {
    pub hamiltonian: FockOperator,
    /// Interior residuals of the bosonic commutators [X, X†] - 1 for the
    /// four inputs; nonzero values beyond tolerance are cutoff effects and
    /// only warn.
    pub commutator_residuals: Vec<(String, f64)>,
}

pub fn h_generic_duality(
    g: f64,
    a1: &FockOperator,
    a2: &FockOperator,
    b1: &FockOperator,
    b2: &FockOperator,
) -> Result<GenericCoupling> {
    let register = a1.register();
    let mask = crate::fock::interior_mask(register, 2);
    let id = FockOperator::identity(register);
    let mut commutator_residuals = Vec::new();
    for (name, op) in [("A1", a1), ("A2", a2), ("B1", b1), ("B2", b2)] {
        let resid = (&op.commutator(&op.dagger()) - &id).masked(&mask).frobenius_norm();
        if resid > 1e-10 {
            eprintln!(
                "warning: duality frame operator {name} has interior commutator residual {resid:.3e}"
            );
        }
        commutator_residuals.push((name.to_string(), resid));
    }
    let coupling = C64::new(g, 0.0);
    let part1 = &(&a1.dagger() * b1) + &(a1 * &b1.dagger());
    let part2 = &(&a2.dagger() * b2) + &(a2 * &b2.dagger());
    Ok(GenericCoupling {
        hamiltonian: (&part1 + &part2).scale(coupling),
        commutator_residuals,
    })
}

/// Heisenberg-picture mean occupations for the single chain started in
/// |G>|0_M>: N_sigma = gamma^2/(1-gamma^2) sin^2(g tau) and
/// N_b1 = gamma^2/(1-gamma^2) cos^2(g tau).
pub fn heisenberg_numbers(gamma: f64, g: f64, tau: f64) -> Result<(f64, f64)> {
    if gamma.abs() >= 1.0 {
        return Err(SimError::GammaOutOfRange(gamma));
    }
    let occupancy = gamma * gamma / (1.0 - gamma * gamma);
    let (s, c) = (g * tau).sin_cos();
    Ok((occupancy * s * s, occupancy * c * c))
}

/// Uniform time grid; the default covers one Rabi period with 65 points.
pub fn tau_grid(tau_max: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| tau_max * i as f64 / (points - 1) as f64)
        .collect()
}

pub const DEFAULT_GRID_POINTS: usize = 65;

/// One Rabi period of the single chain (frequency g).
pub fn single_chain_period(g: f64) -> f64 {
    2.0 * std::f64::consts::PI / g.abs()
}

/// One Rabi period of the two-chain system (frequency 2g).
pub fn two_chain_period(g: f64) -> f64 {
    std::f64::consts::PI / g.abs()
}

struct Block {
    indices: Vec<usize>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
    /// V† psi0 restricted to this block.
    coefficients: DVector<C64>,
}

/// Cached spectral decomposition of H restricted to the connected
/// components of its sparsity pattern that carry initial-state amplitude.
/// Exact unitary evolution up to eigensolver error; components without
/// amplitude never mix in, so they are skipped.
pub struct Propagator {
    register: Arc<ModeRegister>,
    dim: usize,
    blocks: Vec<Block>,
    leakage: f64,
    /// Hermiticity residual of the input when symmetrization kicked in.
    pub symmetrized_residual: Option<f64>,
}

impl Propagator {
    pub fn new(hamiltonian: &FockOperator, psi0: &PureState) -> Result<Self> {
        if !hamiltonian.register().same_layout(psi0.register()) {
            return Err(SimError::RegisterMismatch("H and psi0".into()));
        }
        let residual = hamiltonian.hermiticity_residual();
        let max_el = hamiltonian
            .csr()
            .entries()
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max);
        let (h, symmetrized_residual) = if residual <= HERMITICITY_TOL {
            (hamiltonian.clone(), None)
        } else if residual <= 1e-3 * max_el.max(1.0) {
            eprintln!(
                "warning: symmetrizing Hamiltonian with hermiticity residual {residual:.3e}"
            );
            (hamiltonian.symmetrized(), Some(residual))
        } else {
            return Err(SimError::NotHermitian(residual));
        };

        let dim = h.dim();
        // union-find over the sparsity pattern
        let mut parent: Vec<u32> = (0..dim as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for (r, c, _) in h.csr().entries() {
            let (pr, pc) = (find(&mut parent, r as u32), find(&mut parent, c as u32));
            if pr != pc {
                parent[pr.max(pc) as usize] = pr.min(pc);
            }
        }
        // roots of inhabited components
        let mut inhabited: Vec<u32> = Vec::new();
        for (i, amp) in psi0.amplitudes().iter().enumerate() {
            if amp.norm_sqr() > 0.0 {
                inhabited.push(find(&mut parent, i as u32));
            }
        }
        inhabited.sort_unstable();
        inhabited.dedup();
        // gather members per inhabited root
        let mut members: std::collections::BTreeMap<u32, Vec<usize>> =
            inhabited.iter().map(|&r| (r, Vec::new())).collect();
        for i in 0..dim {
            let root = find(&mut parent, i as u32);
            if let Some(list) = members.get_mut(&root) {
                list.push(i);
            }
        }

        let mut position = vec![usize::MAX; dim];
        let mut blocks = Vec::with_capacity(members.len());
        for indices in members.into_values() {
            for (local, &global) in indices.iter().enumerate() {
                position[global] = local;
            }
            let n = indices.len();
            let mut sub = DMatrix::<C64>::zeros(n, n);
            for (local, &global) in indices.iter().enumerate() {
                for (col, val) in h.csr().row(global) {
                    let lc = position[col];
                    debug_assert_ne!(lc, usize::MAX);
                    sub[(local, lc)] = val;
                }
            }
            let eig = linalg::hermitian_eigen(&sub);
            let psi_block =
                DVector::from_iterator(n, indices.iter().map(|&g| psi0.amplitudes()[g]));
            let coefficients = eig.eigenvectors.adjoint() * psi_block;
            for &global in &indices {
                position[global] = usize::MAX;
            }
            blocks.push(Block {
                indices,
                eigenvalues: eig.eigenvalues,
                eigenvectors: eig.eigenvectors,
                coefficients,
            });
        }
        Ok(Propagator {
            register: Arc::clone(psi0.register()),
            dim,
            blocks,
            leakage: psi0.leakage(),
            symmetrized_residual,
        })
    }

    /// |psi(tau)> = exp(-i H tau) |psi0>.
    pub fn state_at(&self, tau: f64) -> PureState {
        let mut amps = vec![C64::new(0.0, 0.0); self.dim];
        for block in &self.blocks {
            let phased = DVector::from_iterator(
                block.coefficients.len(),
                block
                    .coefficients
                    .iter()
                    .zip(&block.eigenvalues)
                    .map(|(&c, &l)| c * C64::from_polar(1.0, -l * tau)),
            );
            let local = &block.eigenvectors * phased;
            for (i, &global) in block.indices.iter().enumerate() {
                amps[global] = local[i];
            }
        }
        PureState::from_amplitudes(&self.register, amps, self.leakage)
            .expect("propagator register is consistent")
    }
}

/// One-shot exp(-i H tau)|psi0> via the cached spectral route.
pub fn evolve(hamiltonian: &FockOperator, psi0: &PureState, tau: f64) -> Result<PureState> {
    Ok(Propagator::new(hamiltonian, psi0)?.state_at(tau))
}
