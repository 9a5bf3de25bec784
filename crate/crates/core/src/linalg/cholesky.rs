use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Cholesky factor `A = L Lᴴ` of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: CMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Only the lower triangle of `a` is read.
    pub fn factor(mut a: CMatrix<T>) -> Result<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "Cholesky needs a square matrix");
        for j in 0..n {
            let (done, rest) = a.data.split_at_mut(j * n);
            let rowj = &mut rest[..n];
            // row j of L: l_jk = (a_jk - Σ_{m<k} l_jm conj(l_km)) / l_kk
            for k in 0..j {
                let rowk = &done[k * n..k * n + n];
                let mut s = rowj[k];
                for m in 0..k {
                    s = s - rowj[m] * rowk[m].conj();
                }
                rowj[k] = s / rowk[k].re;
            }
            let d = rowj[..j].iter().fold(rowj[j].re, |acc, v| acc - v.norm_sqr());
            if !(d > T::zero()) {
                return Err(Error::Singular(j));
            }
            rowj[j] = Cplx::new(d.sqrt(), T::zero());
            for v in rowj[j + 1..].iter_mut() {
                *v = Cplx::new(T::zero(), T::zero());
            }
        }
        Ok(Self { l: a })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.l.rows();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let mut s = y[i];
            for j in 0..i {
                s = s - row[j] * y[j];
            }
            y[i] = s / row[i].re;
        }
        // Lᴴ x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s = s - self.l.get(j, i).conj() * y[j];
            }
            y[i] = s / self.l.get(i, i).re;
        }
        y
    }
}
