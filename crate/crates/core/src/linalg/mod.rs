//! Dense complex linear algebra used by the solvers.

mod cholesky;
mod gmres;
mod lu;
mod svd;

pub use cholesky::Cholesky;
pub use gmres::{gmres, GmresOptions, GmresOutcome};
pub use lu::Lu;
pub use svd::singular_values;

use crate::scalar::{czero, Cplx, Real};

/// Matrix-free linear operator `x ↦ A x`.
pub type MatVec<'a, T> = dyn Fn(&[Cplx<T>]) -> Vec<Cplx<T>> + 'a;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Cplx<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cplx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cplx<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Cplx<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Cplx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Cplx<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Cplx<T>] {
        &self.data
    }

    /// `A x`.
    pub fn matvec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).fold(czero(), |acc: Cplx<T>, (a, b)| acc + a * b)).collect()
    }

    /// `Aᴴ y`.
    pub fn adjoint_matvec(&self, y: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![czero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a.conj() * yi;
            }
        }
        out
    }

    /// `A Aᴴ` (Hermitian, `rows × rows`).
    pub fn gram_rows(&self) -> Self {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            let ri = self.row(i);
            for j in 0..=i {
                let v = ri.iter().zip(self.row(j)).fold(czero(), |acc: Cplx<T>, (a, b)| acc + a * b.conj());
                g.set(i, j, v);
                g.set(j, i, v.conj());
            }
        }
        g
    }

    /// `Aᴴ A` (Hermitian, `cols × cols`).
    pub fn gram_cols(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ai = row[i].conj();
                let gi = &mut g.data[i * n..(i + 1) * n];
                for (gij, aj) in gi[..=i].iter_mut().zip(row) {
                    *gij = *gij + ai * aj;
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                let v = g.get(i, j);
                g.set(j, i, v.conj());
            }
        }
        g
    }

    pub fn add_diagonal(&mut self, s: T) {
        for i in 0..self.rows.min(self.cols) {
            let v = self.get(i, i);
            self.set(i, i, v + s);
        }
    }
}
