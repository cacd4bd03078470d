//! Small dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{CMatrix, CVector};

/// Relative singular-value threshold used for every rank decision.
pub const RANK_RTOL: f64 = 1e-9;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest absolute entry (max norm).
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Spectral norm.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// ‖A − A*‖ (max-entry norm).
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// ‖A A* − I‖ (max-entry norm).
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m * m.adjoint() - identity(m.nrows())))
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Eigen-decomposition of a (numerically) unitary matrix: eigenvalues on the
/// unit circle and orthonormal eigenvectors.
///
/// Uses the fact that for a normal matrix U the Hermitian matrices
/// (U + U*)/2 and (U − U*)/(2i) commute; diagonalising a generic real
/// combination of the two splits any degeneracy of either one.
pub fn unitary_eigen(m: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let half = Complex64::new(0.5, 0.0);
    let re_part = (m + m.adjoint()) * half;
    let im_part = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    let mix = &re_part + &im_part * Complex64::new(0.618_033_988_749_894_9, 0.0);
    let (_, vecs) = hermitian_eigen(&mix);
    let n = m.nrows();
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let v = vecs.column(k);
        let mv = m * v;
        values.push(v.dotc(&mv));
    }
    (values, vecs)
}

/// Singular values (descending) and right singular vectors of `m`; the
/// columns of the returned matrix are the right singular vectors ordered
/// like the singular values.
pub fn svd_right(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut vectors = CMatrix::zeros(n, order.len());
    for (col, &i) in order.iter().enumerate() {
        let row = v_t.row(i).adjoint();
        vectors.set_column(col, &row);
    }
    (values, vectors)
}

/// Numerical rank at relative threshold `rtol` (relative to the largest
/// singular value, or to `scale` when the matrix is itself tiny).
pub fn numerical_rank(m: &CMatrix, rtol: f64, scale: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max).max(scale);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * top).count()
}

/// Orthonormal basis of the numerical nullspace of `m`: right singular
/// vectors whose singular value is at most `rtol` times `scale`.
pub fn nullspace(m: &CMatrix, rtol: f64, scale: f64) -> Vec<CVector> {
    let (values, vectors) = svd_right(m);
    let mut basis = Vec::new();
    let n = m.ncols();
    for (k, &sv) in values.iter().enumerate() {
        if sv <= rtol * scale {
            basis.push(vectors.column(k).into_owned());
        }
    }
    // Wide matrices have extra nullspace directions not reported by the SVD.
    if values.len() < n && basis.len() < n - values.len() {
        let mut q = vectors.clone();
        q.resize_horizontally_mut(n, Complex64::new(0.0, 0.0));
        for extra in values.len()..n {
            let mut e = CVector::zeros(n);
            e[extra] = Complex64::new(1.0, 0.0);
            for k in 0..extra {
                let col = q.column(k).into_owned();
                let proj = col.dotc(&e);
                e -= col * proj;
            }
            let norm = e.norm();
            if norm > 1e-12 {
                let unit = e / Complex64::new(norm, 0.0);
                q.set_column(extra, &unit);
                basis.push(unit);
            }
        }
    }
    basis
}

/// The `count` right singular vectors with the smallest singular values.
pub fn smallest_right_vectors(m: &CMatrix, count: usize) -> (Vec<f64>, Vec<CVector>) {
    let (values, vectors) = svd_right(m);
    let n = values.len();
    let take = count.min(n);
    let mut out = Vec::with_capacity(take);
    let mut svs = Vec::with_capacity(take);
    for k in (n - take..n).rev() {
        out.push(vectors.column(k).into_owned());
        svs.push(values[k]);
    }
    (svs, out)
}

/// Normalise so that the largest-magnitude component is real positive and
/// the Euclidean norm is one.
pub fn normalize_phase(v: &CVector) -> CVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let pivot = v
        .iter()
        .cloned()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot / pivot.norm();
    v.map(|z| z / phase / norm)
}

/// Real matrix to complex.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
