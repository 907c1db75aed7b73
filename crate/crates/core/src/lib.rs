//! Truncated-Fock-space simulator and verification suite for accelerated
//! oscillator chains coupled to Rindler photons in the Minkowski vacuum.
//!
//! The crate numerically evolves the coupled oscillator–photon system on
//! finite Fock registers and certifies the closed-form results against
//! brute-force oracles: exact spectral time evolution, partial-trace
//! thermal marginals, Bogoliubov frame dualities, operator identities on
//! cutoff-interior subspaces, and the classical normal-mode limit.

pub mod classical;
pub mod closedform;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod identities;
pub(crate) mod linalg;
pub mod rindler;
pub mod scenarios;
pub mod states;

pub use error::{Result, SimError};
