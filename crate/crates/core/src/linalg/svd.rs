use nalgebra::{DMatrix, RealField};

use super::CMatrix;
use crate::scalar::{Cplx, Real};

/// Singular values in descending order.
///
/// The longer dimension is first reduced by a QR factorization so the SVD
/// itself runs on a square matrix of the shorter dimension.
pub fn singular_values<T: Real + RealField>(a: &CMatrix<T>) -> Vec<T> {
    let (m, n) = (a.rows(), a.cols());
    let dense = DMatrix::<Cplx<T>>::from_row_slice(m, n, a.data());
    let square = if n > m { dense.adjoint().qr().r() } else { dense.qr().r() };
    let mut s: Vec<T> = square.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}
