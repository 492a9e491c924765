//! Small dense helpers for 3×3 symmetric matrices.
//!
//! Matrix functions (square root, logarithm, exponential) go through the
//! symmetric eigendecomposition; at this size it is exact to rounding and has
//! no convergence parameters.

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

/// Determinant by cofactor expansion along the first row.
pub fn det3(m: &Matrix3<f64>) -> f64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Adjugate (transposed cofactor matrix), so that `m * adj(m) = det(m) I`.
pub fn adjugate3(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)]
    };
    Matrix3::new(
        c(1, 2, 1, 2),
        -c(0, 2, 1, 2),
        c(0, 1, 1, 2),
        -c(1, 2, 0, 2),
        c(0, 2, 0, 2),
        -c(0, 1, 0, 2),
        c(1, 2, 0, 1),
        -c(0, 2, 0, 1),
        c(0, 1, 0, 1),
    )
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigen(m: &Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = Vector3::from_fn(|i, _| eig.eigenvalues[order[i]]);
    let vectors = Matrix3::from_fn(|r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &Matrix3<f64>) -> f64 {
    sym_eigen(m).0[0]
}

/// Applies `f` to the spectrum: `V diag(f(λ)) Vᵀ`, symmetrized on output.
pub fn spectral_map(m: &Matrix3<f64>, f: impl Fn(f64) -> f64) -> Matrix3<f64> {
    let (values, vectors) = sym_eigen(m);
    let mapped = Matrix3::from_diagonal(&values.map(f));
    symmetrize(&(vectors * mapped * vectors.transpose()))
}

pub fn sqrtm(m: &Matrix3<f64>) -> Matrix3<f64> {
    spectral_map(m, f64::sqrt)
}

pub fn inv_sqrtm(m: &Matrix3<f64>) -> Matrix3<f64> {
    spectral_map(m, |x| 1.0 / x.sqrt())
}

pub fn logm(m: &Matrix3<f64>) -> Matrix3<f64> {
    spectral_map(m, f64::ln)
}

pub fn expm(m: &Matrix3<f64>) -> Matrix3<f64> {
    spectral_map(m, f64::exp)
}

pub fn symmetrize(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) * 0.5
}

/// Rotation about the z axis by `angle` radians.
pub fn rotation_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}
