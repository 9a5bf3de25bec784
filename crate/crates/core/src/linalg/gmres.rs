//! Restarted GMRES for complex non-Hermitian systems.

use super::MatVec;
use crate::scalar::{czero, norm2, Cplx, Real};

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions<T> {
    /// Relative residual `‖b - Ax‖ / ‖b‖` to reach.
    pub tol: T,
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Total matrix-vector products allowed.
    pub max_iterations: usize,
}

impl<T: Real> Default for GmresOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-8), restart: 80, max_iterations: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome<T> {
    pub x: Vec<Cplx<T>>,
    pub iterations: usize,
    /// True relative residual, recomputed from `x`.
    pub residual: T,
    pub converged: bool,
}

/// Solves `A x = b` with `A` given as a matrix-free product.
pub fn gmres<T: Real>(
    apply: &MatVec<T>,
    b: &[Cplx<T>],
    x0: Option<&[Cplx<T>]>,
    opts: &GmresOptions<T>,
) -> GmresOutcome<T> {
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = x0.map(|x| x.to_vec()).unwrap_or_else(|| vec![czero(); n]);
    if b_norm == T::zero() {
        return GmresOutcome { x: vec![czero(); n], iterations: 0, residual: T::zero(), converged: true };
    }
    let m = opts.restart.max(1).min(n.max(1));
    let mut iterations = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<Cplx<T>> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let r_norm = norm2(&r);
        let rel = r_norm / b_norm;
        if rel <= opts.tol || iterations >= opts.max_iterations {
            return GmresOutcome { x, iterations, residual: rel, converged: rel <= opts.tol };
        }

        let mut basis: Vec<Vec<Cplx<T>>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / r_norm).collect());
        // column-major Hessenberg: h[j][i]
        let mut h: Vec<Vec<Cplx<T>>> = Vec::with_capacity(m);
        let mut cs: Vec<T> = Vec::with_capacity(m);
        let mut sn: Vec<Cplx<T>> = Vec::with_capacity(m);
        let mut g = vec![czero(); m + 1];
        g[0] = Cplx::new(r_norm, T::zero());
        let mut steps = 0;

        for j in 0..m {
            iterations += 1;
            let mut w = apply(&basis[j]);
            let mut col = vec![czero(); j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = v.iter().zip(&w).fold(czero(), |acc: Cplx<T>, (a, b)| acc + a.conj() * b);
                col[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk = *wk - hij * vk;
                }
            }
            let w_norm = norm2(&w);
            col[j + 1] = Cplx::new(w_norm, T::zero());
            for i in 0..j {
                let t = col[i] * cs[i] + sn[i] * col[i + 1];
                col[i + 1] = col[i + 1] * cs[i] - sn[i].conj() * col[i];
                col[i] = t;
            }
            let (a, bb) = (col[j], col[j + 1]);
            let r = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if a.norm() == T::zero() {
                (T::zero(), Cplx::new(T::one(), T::zero()))
            } else {
                (a.norm() / r, (a / a.norm()) * bb.conj() / r)
            };
            col[j] = Cplx::new(c, T::zero()) * a + s * bb;
            col[j + 1] = czero();
            g[j + 1] = -s.conj() * g[j];
            g[j] = g[j] * c;
            cs.push(c);
            sn.push(s);
            h.push(col);
            steps = j + 1;
            let converged_inner = g[j + 1].norm() / b_norm <= opts.tol * T::lit(0.5);
            if converged_inner || w_norm == T::zero() || iterations >= opts.max_iterations {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        // back substitution on the triangular part
        let mut y = vec![czero(); steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for (jj, yj) in y.iter().enumerate().skip(i + 1) {
                s = s - h[jj][i] * yj;
            }
            y[i] = s / h[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk = *xk + yi * vk;
            }
        }
    }
}
