//! Dense Hermitian eigendecomposition with deterministic ordering:
//! eigenvalues ascending, each eigenvector's first nonzero component made
//! real positive. Keeps spectral evolution and serialized reports
//! reproducible across runs.

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64 as C64;

pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in eigenvalue order.
    pub eigenvectors: DMatrix<C64>,
}

/// Rows (= columns, by hermiticity) carrying at least one nonzero entry.
/// The eigensolver runs on this support only: exactly-zero rows contribute
/// eigenvalue 0 with basis eigenvectors, and feeding them through the
/// tridiagonalization trips NaN paths in the upstream solver.
fn support(mat: &DMatrix<C64>) -> Vec<usize> {
    let n = mat.nrows();
    let zero = C64::new(0.0, 0.0);
    (0..n)
        .filter(|&r| (0..n).any(|c| mat[(r, c)] != zero || mat[(c, r)] != zero))
        .collect()
}

/// Eigendecomposition of a Hermitian matrix with the canonical ordering and
/// phase convention.
pub fn hermitian_eigen(mat: &DMatrix<C64>) -> HermitianEigen {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "matrix must be square");
    if n == 0 {
        return HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        };
    }
    let live = support(mat);
    let k = live.len();
    let mut sub = DMatrix::<C64>::zeros(k, k);
    for (i, &r) in live.iter().enumerate() {
        for (j, &c) in live.iter().enumerate() {
            sub[(i, j)] = mat[(r, c)];
        }
    }
    // (eigenvalue, construction index, scattered eigenvector)
    let mut pairs: Vec<(f64, usize, DVector<C64>)> = Vec::with_capacity(n);
    if k == 1 {
        let mut col = DVector::<C64>::zeros(n);
        col[live[0]] = C64::new(1.0, 0.0);
        pairs.push((sub[(0, 0)].re, 0, col));
    } else if k > 1 {
        let eig = sub.symmetric_eigen();
        for j in 0..k {
            let lambda = eig.eigenvalues[j];
            assert!(!lambda.is_nan(), "eigensolver returned NaN");
            let mut col = DVector::<C64>::zeros(n);
            for (i, &r) in live.iter().enumerate() {
                col[r] = eig.eigenvectors[(i, j)];
            }
            fix_phase(&mut col);
            pairs.push((lambda, j, col));
        }
    }
    for (extra, r) in (0..n).filter(|r| !live.contains(r)).enumerate() {
        let mut col = DVector::<C64>::zeros(n);
        col[r] = C64::new(1.0, 0.0);
        pairs.push((0.0, k + extra, col));
    }
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("eigenvalue is NaN")
            .then(a.1.cmp(&b.1))
    });
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, (lambda, _, col)) in pairs.into_iter().enumerate() {
        values.push(lambda);
        vectors.set_column(dst, &col);
    }
    HermitianEigen {
        eigenvalues: values,
        eigenvectors: vectors,
    }
}

/// Rotate the global phase so the first component above threshold is real
/// positive.
fn fix_phase(v: &mut DVector<C64>) {
    let max_abs = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return;
    }
    let threshold = 1e-12 * max_abs;
    if let Some(pivot) = v.iter().find(|z| z.norm() > threshold).copied() {
        let phase = pivot / Complex::new(pivot.norm(), 0.0);
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(mat: &DMatrix<C64>) -> Vec<f64> {
    let n = mat.nrows();
    if n == 0 {
        return Vec::new();
    }
    let live = support(mat);
    let k = live.len();
    let mut sub = DMatrix::<C64>::zeros(k, k);
    for (i, &r) in live.iter().enumerate() {
        for (j, &c) in live.iter().enumerate() {
            sub[(i, j)] = mat[(r, c)];
        }
    }
    let mut vals: Vec<f64> = match k {
        0 => Vec::new(),
        1 => vec![sub[(0, 0)].re],
        _ => sub.symmetric_eigen().eigenvalues.iter().copied().collect(),
    };
    vals.extend(std::iter::repeat_n(0.0, n - k));
    vals.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalue is NaN"));
    vals
}

/// Largest singular value, computed through the Gram matrix.
pub fn two_norm(mat: &DMatrix<C64>) -> f64 {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0.0;
    }
    let gram = mat.adjoint() * mat;
    let top = hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    top.sqrt()
}
