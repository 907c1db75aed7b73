//! Mode registers: ordered collections of bosonic modes with per-mode
//! Fock cutoffs, defining the tensor-product basis everything else acts on.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Ordered list of bosonic modes with per-mode occupation cutoffs.
///
/// The basis is enumerated row-major in the declared mode order:
/// `index(n) = sum_i n_i * prod_{j>i} (cutoff_j + 1)`. This ordering is the
/// single canonical one used by operators, states and serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRegister {
    modes: Vec<String>,
    cutoffs: Vec<usize>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    dim: usize,
}

impl ModeRegister {
    /// Build a register from mode labels and per-mode max occupations.
    pub fn new<S: Into<String>>(labels: Vec<S>, cutoffs: Vec<usize>) -> Result<Arc<Self>> {
        let modes: Vec<String> = labels.into_iter().map(Into::into).collect();
        if modes.len() != cutoffs.len() {
            return Err(SimError::DimensionMismatch {
                expected: modes.len(),
                got: cutoffs.len(),
            });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(SimError::DuplicateLabel(m.clone()));
            }
        }
        for (m, &c) in modes.iter().zip(&cutoffs) {
            if c == 0 {
                return Err(SimError::ZeroCutoff(m.clone()));
            }
        }
        let mut reg = ModeRegister {
            modes,
            cutoffs,
            strides: Vec::new(),
            dim: 0,
        };
        reg.rebuild_layout();
        Ok(Arc::new(reg))
    }

    /// Uniform cutoff across all modes.
    pub fn uniform<S: Into<String>>(labels: Vec<S>, cutoff: usize) -> Result<Arc<Self>> {
        let n = labels.len();
        Self::new(labels, vec![cutoff; n])
    }

    pub(crate) fn rebuild_layout(&mut self) {
        let n = self.modes.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (self.cutoffs[i + 1] + 1);
        }
        let dim = if n == 0 {
            1
        } else {
            strides[0] * (self.cutoffs[0] + 1)
        };
        self.strides = strides;
        self.dim = dim;
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.modes
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    /// Position of a mode label in the register.
    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| SimError::UnknownLabel(label.to_string()))
    }

    /// Max occupation of the named mode.
    pub fn cutoff(&self, label: &str) -> Result<usize> {
        Ok(self.cutoffs[self.mode_index(label)?])
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.strides[mode]
    }

    /// Per-mode dimension (cutoff + 1).
    pub fn mode_dim(&self, mode: usize) -> usize {
        self.cutoffs[mode] + 1
    }

    /// Canonical basis index of an occupation vector.
    pub fn index_of(&self, occupations: &[usize]) -> usize {
        debug_assert_eq!(occupations.len(), self.modes.len());
        occupations
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| n * s)
            .sum()
    }

    /// Occupation vector of a canonical basis index.
    pub fn occupation_of(&self, index: usize) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, _)| self.occupation_in_mode(index, i))
            .collect()
    }

    /// Occupation of one mode inside a basis index.
    #[inline]
    pub fn occupation_in_mode(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    /// Sub-register keeping the named modes, in register order.
    pub fn sub_register(&self, keep: &[&str]) -> Result<Arc<Self>> {
        if keep.is_empty() {
            return Err(SimError::EmptyKeep);
        }
        let mut idx: Vec<usize> = keep
            .iter()
            .map(|l| self.mode_index(l))
            .collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != keep.len() {
            return Err(SimError::DuplicateLabel(keep.join(",")));
        }
        ModeRegister::new(
            idx.iter().map(|&i| self.modes[i].clone()).collect(),
            idx.iter().map(|&i| self.cutoffs[i]).collect(),
        )
    }

    /// True when the other register has identical labels and cutoffs.
    pub fn same_layout(&self, other: &Self) -> bool {
        self.modes == other.modes && self.cutoffs == other.cutoffs
    }
}

pub(crate) fn check_same_register(a: &ModeRegister, b: &ModeRegister) -> Result<()> {
    if a.same_layout(b) {
        Ok(())
    } else {
        Err(SimError::RegisterMismatch(format!(
            "{:?}/{:?} vs {:?}/{:?}",
            a.labels(),
            a.cutoffs(),
            b.labels(),
            b.cutoffs()
        )))
    }
}
