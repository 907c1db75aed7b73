//! Minimal CSR complex sparse matrix. Ladder operators and the model's
//! Hamiltonians have O(1) entries per row, so registers well beyond dense
//! reach stay cheap to build and apply.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(dim: usize) -> Self {
        CsrMatrix {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        CsrMatrix {
            dim,
            row_ptr: (0..=dim).collect(),
            cols: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    /// Build from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));
        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = merged.iter().map(|&(_, c, _)| c).collect();
        let vals = merged.iter().map(|&(_, _, v)| v).collect();
        CsrMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.cols[lo..hi]
            .iter()
            .copied()
            .zip(self.vals[lo..hi].iter().copied())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(cc, _)| cc == c)
            .map(|(_, v)| v)
            .unwrap_or_else(|| C64::new(0.0, 0.0))
    }

    pub fn scale(&self, factor: C64) -> Self {
        if factor == C64::new(0.0, 0.0) {
            return Self::zeros(self.dim);
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }

    /// alpha*self + beta*other.
    pub fn linear_comb(&self, alpha: C64, other: &Self, beta: C64) -> Self {
        assert_eq!(self.dim, other.dim, "sparse dim mismatch");
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for (r, c, v) in self.entries() {
            triplets.push((r, c, alpha * v));
        }
        for (r, c, v) in other.entries() {
            triplets.push((r, c, beta * v));
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "sparse dim mismatch");
        let mut triplets = Vec::new();
        let mut scratch: Vec<(usize, C64)> = Vec::new();
        for r in 0..self.dim {
            scratch.clear();
            for (k, a) in self.row(r) {
                for (j, b) in other.row(k) {
                    scratch.push((j, a * b));
                }
            }
            scratch.sort_unstable_by_key(|&(j, _)| j);
            let mut it = scratch.iter().copied();
            if let Some((mut cur_j, mut cur_v)) = it.next() {
                for (j, v) in it {
                    if j == cur_j {
                        cur_v += v;
                    } else {
                        triplets.push((r, cur_j, cur_v));
                        cur_j = j;
                        cur_v = v;
                    }
                }
                triplets.push((r, cur_j, cur_v));
            }
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn adjoint(&self) -> Self {
        let triplets = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, triplets)
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim, "vector length mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            *out = acc;
        }
        y
    }

    /// Largest |A_ij - conj(A_ji)| over all entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.adjoint();
        let diff = self.linear_comb(C64::new(1.0, 0.0), &adj, C64::new(-1.0, 0.0));
        diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// (A + A†)/2.
    pub fn symmetrize(&self) -> Self {
        let adj = self.adjoint();
        self.linear_comb(C64::new(0.5, 0.0), &adj, C64::new(0.5, 0.0))
    }

    /// Zero out every entry whose row or column index is masked off.
    pub fn masked(&self, keep: &[bool]) -> Self {
        assert_eq!(keep.len(), self.dim);
        let triplets = self
            .entries()
            .filter(|&(r, c, _)| keep[r] && keep[c])
            .collect();
        Self::from_triplets(self.dim, triplets)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<C64> {
        let mut m = nalgebra::DMatrix::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }
}
