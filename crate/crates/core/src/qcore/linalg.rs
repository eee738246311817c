use nalgebra::{DMatrix, Matrix4};

use crate::C64;

/// Eigen-decomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator-norm distance ‖u − v‖∞ between two 4×4 matrices.
pub fn opnorm_dist(u: &Matrix4<C64>, v: &Matrix4<C64>) -> f64 {
    (u - v).singular_values().max()
}

/// e^{iH} for Hermitian `h`, computed in the eigenbasis so the result is unitary
/// to machine precision.
pub fn expm_i_hermitian(h: &Matrix4<C64>) -> Matrix4<C64> {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, l)));
    v * phases * v.adjoint()
}
