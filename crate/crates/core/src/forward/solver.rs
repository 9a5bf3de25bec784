//! Discrete Lippmann–Schwinger equation `u + G(q u) = u₀`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{
    far_field_map, Backend, ComplexField, DomainGrid, FarField, SphereGrid, VolumeOperator, WaveContext,
};
use crate::linalg::{gmres, CMatrix, GmresOptions, Lu, MatVec};
use crate::scalar::{cre, norm2, Cplx, Real};

/// Systems up to this many unknowns are solved by dense LU under
/// [`SolveMethod::Auto`].
pub const DENSE_LIMIT: usize = 1200;

/// Dense LU is still attempted as a fallback when GMRES stalls, up to this size.
const DENSE_FALLBACK_LIMIT: usize = 4096;

/// Longest Krylov basis used when retrying a stalled GMRES run.
const RETRY_RESTART: usize = 400;

/// Bound on `restart × unknowns` for the retry, limiting the Krylov basis memory.
const RETRY_BASIS_ENTRIES: usize = 20_000_000;

/// Potential `q = k²(1 - n²)` sampled on the design grid.
#[derive(Debug, Clone)]
pub struct Potential<T> {
    field: ComplexField<T>,
    context: WaveContext<T>,
}

impl<T: Real> Potential<T> {
    pub fn new(field: ComplexField<T>, context: WaveContext<T>) -> Self {
        Self { field, context }
    }

    pub fn zero(grid: &Arc<DomainGrid<T>>, context: WaveContext<T>) -> Self {
        Self { field: ComplexField::zeros(grid), context }
    }

    /// `q = k²(1 - n²)` from sampled squared refraction coefficients.
    pub fn from_refraction(n_squared: &ComplexField<T>, context: WaveContext<T>) -> Self {
        let k2 = context.k() * context.k();
        Self { field: n_squared.map(|n2| (cre(T::one()) - n2) * k2), context }
    }

    /// `n² = 1 - q/k²`.
    pub fn refraction_squared(&self) -> ComplexField<T> {
        let k2 = self.context.k() * self.context.k();
        self.field.map(|q| cre(T::one()) - q / k2)
    }

    pub fn field(&self) -> &ComplexField<T> {
        &self.field
    }

    pub fn values(&self) -> &[Cplx<T>] {
        self.field.values()
    }

    pub fn grid(&self) -> &Arc<DomainGrid<T>> {
        self.field.grid()
    }

    pub fn context(&self) -> &WaveContext<T> {
        &self.context
    }

    /// Same potential illuminated from another direction.
    pub fn with_context(&self, context: WaveContext<T>) -> Self {
        Self { field: self.field.clone(), context }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Dense LU up to [`DENSE_LIMIT`] unknowns, GMRES above.
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub method: SolveMethod,
    pub restart: usize,
    pub max_iterations: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-8), method: SolveMethod::Auto, restart: 80, max_iterations: 3000 }
    }
}

impl<T: Real> SolveOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct ScatteringSolution<T> {
    /// Total field at the voxel centers.
    pub u: ComplexField<T>,
    /// `A_q(β) = B(q u)(β)`.
    pub amplitude: FarField<T>,
    /// `‖u + G(qu) - u₀‖ / ‖u₀‖`.
    pub residual: T,
    /// Matrix-vector products used (zero for a direct solve).
    pub iterations: usize,
    pub method: SolveMethod,
}

impl<T: Real> ScatteringSolution<T> {
    /// Source density `h = q u`.
    pub fn source(&self, q: &Potential<T>) -> Result<ComplexField<T>> {
        q.field().zip_with(&self.u, |a, b| a * b)
    }
}

/// Solves the discrete Lippmann–Schwinger equation to relative residual
/// `tol` and evaluates the scattering amplitude on `sphere`.
pub fn solve_scattering<T: Real>(
    q: &Potential<T>,
    sphere: &Arc<SphereGrid<T>>,
    tol: T,
) -> Result<ScatteringSolution<T>> {
    solve_scattering_with(q, sphere, &SolveOptions::with_tol(tol))
}

pub fn solve_scattering_with<T: Real>(
    q: &Potential<T>,
    sphere: &Arc<SphereGrid<T>>,
    opts: &SolveOptions<T>,
) -> Result<ScatteringSolution<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::param("tol", format!("tolerance must be positive, got {}", opts.tol)));
    }
    let grid = q.grid();
    let ctx = q.context();
    let u0 = ctx.incident_field(grid);
    if q.field().is_zero() {
        return Ok(ScatteringSolution {
            u: u0,
            amplitude: FarField::zeros(sphere),
            residual: T::zero(),
            iterations: 0,
            method: opts.method,
        });
    }
    let n = grid.len();
    let method = match opts.method {
        SolveMethod::Auto if n <= DENSE_LIMIT => SolveMethod::Dense,
        SolveMethod::Auto => SolveMethod::Iterative,
        m => m,
    };
    let backend = if method == SolveMethod::Dense { Backend::Dense } else { Backend::Auto };
    let op = VolumeOperator::new(grid, ctx.k(), backend)?;
    let qv = q.values();
    let apply = |u: &[Cplx<T>]| -> Vec<Cplx<T>> {
        let qu: Vec<_> = qv.iter().zip(u).map(|(a, b)| a * b).collect();
        let gqu = op.apply(&qu);
        u.iter().zip(gqu).map(|(a, b)| a + b).collect()
    };

    let (mut u, mut iterations, mut used) = match method {
        SolveMethod::Dense => (dense_solve(&op, qv, u0.values())?, 0, SolveMethod::Dense),
        _ => {
            let (x, it) = iterative_solve(&op, qv, u0.values(), None, opts);
            (x, it, SolveMethod::Iterative)
        }
    };
    let mut residual = relative_residual(&apply, &u, u0.values());
    let retry_restart = RETRY_RESTART.min(RETRY_BASIS_ENTRIES / n.max(1));
    if residual > opts.tol
        && used == SolveMethod::Iterative
        && opts.method == SolveMethod::Auto
        && retry_restart > opts.restart
    {
        let retry = SolveOptions { restart: retry_restart, ..*opts };
        let (x, it) = iterative_solve(&op, qv, u0.values(), Some(&u), &retry);
        u = x;
        iterations += it;
        residual = relative_residual(&apply, &u, u0.values());
    }
    if residual > opts.tol
        && used == SolveMethod::Iterative
        && opts.method == SolveMethod::Auto
        && n <= DENSE_FALLBACK_LIMIT
    {
        u = dense_solve(&op, qv, u0.values())?;
        residual = relative_residual(&apply, &u, u0.values());
        used = SolveMethod::Dense;
        iterations = 0;
    }
    if !(residual <= opts.tol) {
        return Err(Error::NotConverged { residual: residual.as_f64(), tol: opts.tol.as_f64(), iterations });
    }
    let u = ComplexField::new(Arc::clone(grid), u)?;
    let h = q.field().zip_with(&u, |a, b| a * b)?;
    let amplitude = far_field_map(grid, sphere, ctx.k(), &h)?;
    Ok(ScatteringSolution { u, amplitude, residual, iterations, method: used })
}

fn relative_residual<T: Real>(apply: &MatVec<T>, u: &[Cplx<T>], rhs: &[Cplx<T>]) -> T {
    let au = apply(u);
    let r: Vec<_> = au.iter().zip(rhs).map(|(a, b)| a - b).collect();
    norm2(&r) / norm2(rhs)
}

fn dense_solve<T: Real>(op: &VolumeOperator<T>, q: &[Cplx<T>], rhs: &[Cplx<T>]) -> Result<Vec<Cplx<T>>> {
    let n = q.len();
    // (I + G diag(q))_{ij} = δ_ij + G_ij q_j
    let a = CMatrix::from_fn(n, n, |i, j| {
        let g = op.entry(i, j) * q[j];
        if i == j {
            g + cre(T::one())
        } else {
            g
        }
    });
    Ok(Lu::factor(a)?.solve(rhs))
}

/// GMRES with right diagonal preconditioning by `1 + G_ii q_i`.
fn iterative_solve<T: Real>(
    op: &VolumeOperator<T>,
    q: &[Cplx<T>],
    rhs: &[Cplx<T>],
    start: Option<&[Cplx<T>]>,
    opts: &SolveOptions<T>,
) -> (Vec<Cplx<T>>, usize) {
    let s = op.self_term();
    let diag: Vec<Cplx<T>> = q.iter().map(|qi| cre(T::one()) + s * qi).collect();
    let apply = |y: &[Cplx<T>]| -> Vec<Cplx<T>> {
        let u: Vec<_> = y.iter().zip(&diag).map(|(a, d)| a / d).collect();
        let qu: Vec<_> = q.iter().zip(&u).map(|(a, b)| a * b).collect();
        let gqu = op.apply(&qu);
        u.iter().zip(gqu).map(|(a, b)| a + b).collect()
    };
    let gopts = GmresOptions {
        // leave headroom for the recomputed residual
        tol: opts.tol * T::lit(0.1),
        restart: opts.restart,
        max_iterations: opts.max_iterations,
    };
    let y0: Option<Vec<Cplx<T>>> = start.map(|u| u.iter().zip(&diag).map(|(a, d)| a * d).collect());
    let out = gmres(&apply, rhs, y0.as_deref(), &gopts);
    let u = out.x.iter().zip(&diag).map(|(a, d)| a / d).collect();
    (u, out.iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Aabb, Region};
    use num_complex::Complex;

    fn ball_grid(n: usize) -> Arc<DomainGrid<f64>> {
        Arc::new(
            DomainGrid::new(Aabb::centered_cube(0.5), [n; 3], Region::Ball { center: [0.0; 3], radius: 0.5 }).unwrap(),
        )
    }

    #[test]
    fn zero_potential_returns_incident_wave() {
        let g = ball_grid(6);
        let ctx = WaveContext::new(2.0, [0.0, 0.0, 1.0]).unwrap();
        let s = Arc::new(SphereGrid::product(4, 8).unwrap());
        let sol = solve_scattering(&Potential::zero(&g, ctx), &s, 1e-8).unwrap();
        for (x, u) in g.centers().iter().zip(sol.u.values()) {
            assert_eq!(*u, ctx.incident(x));
        }
        assert!(sol.amplitude.values().iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn dense_and_iterative_paths_agree() {
        let g = ball_grid(10);
        let ctx = WaveContext::normalized(3.0, [0.3, -0.2, 1.0]).unwrap();
        let s = Arc::new(SphereGrid::product(6, 8).unwrap());
        let q = Potential::new(ComplexField::from_fn(&g, |x| Complex::new(4.0 + 3.0 * x[0], 0.5 * x[2])), ctx);
        let mut opts = SolveOptions::with_tol(1e-11);
        opts.method = SolveMethod::Dense;
        let dense = solve_scattering_with(&q, &s, &opts).unwrap();
        opts.method = SolveMethod::Iterative;
        let iter = solve_scattering_with(&q, &s, &opts).unwrap();
        assert_eq!(iter.method, SolveMethod::Iterative);
        let diff = dense.u.zip_with(&iter.u, |a, b| a - b).unwrap().l2_norm() / dense.u.l2_norm();
        assert!(diff < 1e-8, "{diff}");
        assert!(dense.residual < 1e-11 && iter.residual < 1e-11);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let g = ball_grid(8);
        let ctx = WaveContext::new(2.0, [0.0, 0.0, 1.0]).unwrap();
        let s = Arc::new(SphereGrid::product(4, 8).unwrap());
        let q = Potential::new(ComplexField::constant(&g, Complex::new(400.0, 0.0)), ctx);
        let opts = SolveOptions { tol: 1e-12, method: SolveMethod::Iterative, restart: 2, max_iterations: 4 };
        match solve_scattering_with(&q, &s, &opts) {
            Err(Error::NotConverged { residual, .. }) => assert!(residual > 1e-12),
            other => panic!("expected nonconvergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let g = ball_grid(4);
        let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
        let s = Arc::new(SphereGrid::product(4, 8).unwrap());
        assert!(solve_scattering(&Potential::zero(&g, ctx), &s, 0.0).is_err());
    }

    #[test]
    fn refraction_roundtrip() {
        let g = ball_grid(4);
        let ctx = WaveContext::new(2.0, [0.0, 0.0, 1.0]).unwrap();
        let n2 = ComplexField::constant(&g, Complex::new(1.5, 0.1));
        let q = Potential::from_refraction(&n2, ctx);
        assert!((q.values()[0] - Complex::new(-2.0, -0.4)).norm() < 1e-14);
        assert!((q.refraction_squared().values()[0] - Complex::new(1.5, 0.1)).norm() < 1e-14);
    }
}
