use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: CMatrix<T>) -> Result<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols(), "LU needs a square matrix");
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, a.get(i, k).norm()))
                    .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > T::zero()) {
                return Err(Error::Singular(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let (x, y) = (a.get(k, j), a.get(p, j));
                    a.set(k, j, y);
                    a.set(p, j, x);
                }
            }
            let pivot = a.get(k, k);
            let (upper, lower) = a.data.split_at_mut((k + 1) * n);
            let krow = &upper[k * n..];
            for row in lower.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l.re != T::zero() || l.im != T::zero() {
                    for (r, u) in row[k + 1..].iter_mut().zip(&krow[k + 1..]) {
                        *r = *r - l * u;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        let mut x: Vec<Cplx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s = s - row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s = s - row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }
}
