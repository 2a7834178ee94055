//! Small dense helpers shared by the gate, spectral and many-body code.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;
pub type DenseMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest singular value of a 2×2 complex matrix, in closed form.
///
/// Uses the larger eigenvalue of `M†M = [[p, q], [q*, s]]`,
/// `(p + s)/2 + √(((p − s)/2)² + |q|²)`, which has no cancellation when the
/// two singular values nearly coincide.
pub fn op_norm2(m: &Mat2) -> f64 {
    let col0 = m[(0, 0)].norm_sqr() + m[(1, 0)].norm_sqr();
    let col1 = m[(0, 1)].norm_sqr() + m[(1, 1)].norm_sqr();
    let q = m[(0, 0)].conj() * m[(0, 1)] + m[(1, 0)].conj() * m[(1, 1)];
    let half_gap = 0.5 * (col0 - col1);
    let lambda = 0.5 * (col0 + col1) + half_gap.hypot(q.norm());
    lambda.sqrt()
}

/// Eigenvalues of a 2×2 complex matrix from its characteristic polynomial.
pub fn eigenvalues2(m: &Mat2) -> [Complex64; 2] {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let root = (half_tr * half_tr - det).sqrt();
    [half_tr + root, half_tr - root]
}

pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    entries.into_iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-entry distance of `m†m` from the identity.
pub fn unitarity_residual(m: &DenseMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let n = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Max-entry distance between two equally sized matrices.
pub fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Max-entry distance after rotating `b` by the global phase that best aligns it with `a`.
pub fn max_diff_phase_aligned(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let rotated = b * phase;
    max_diff(a, &rotated)
}

/// Spectral norm (largest singular value) of a dense matrix.
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}
