//! Foldy–Lax system `u_j = u₀(x_j) - Σ_{m≠j} C₀ g(x_j, x_m) u_m`.

use std::sync::Arc;

use super::ParticleCloud;
use crate::error::{Error, Result};
use crate::grid::{green, FarField, SphereGrid, WaveContext};
use crate::linalg::{gmres, CMatrix, GmresOptions, Lu};
use crate::scalar::{cis, cre, czero, norm2, Cplx, Real};
use crate::vec3;

/// Clouds up to this size are solved by dense LU.
pub const FOLDY_LAX_DENSE_LIMIT: usize = 1500;

/// Largest cloud accepted.
pub const FOLDY_LAX_MAX: usize = 10_000;

/// Relative residual every solve must reach.
pub const FOLDY_LAX_TOL: f64 = 1e-10;

/// Largest `ka` for which the point-interaction model is accepted.
const MAX_KA: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct EnsembleSolution<T> {
    /// Effective field `u_m` at each particle.
    pub local_fields: Vec<Cplx<T>>,
    /// `A_M(β) = -(C₀/4π) Σ_m e^{-ikβ·x_m} u_m`.
    pub amplitude: FarField<T>,
    pub residual: T,
    /// Matrix-vector products used (zero for a direct solve).
    pub iterations: usize,
}

pub fn foldy_lax_solve<T: Real>(
    cloud: &ParticleCloud<T>,
    context: &WaveContext<T>,
    sphere: &Arc<SphereGrid<T>>,
) -> Result<EnsembleSolution<T>> {
    let m = cloud.len();
    let k = context.k();
    let ka = k * cloud.radius();
    if ka > T::lit(MAX_KA) {
        return Err(Error::param("a", format!("ka = {ka} exceeds {MAX_KA}")));
    }
    if m > FOLDY_LAX_MAX {
        return Err(Error::BudgetExceeded { what: "Foldy-Lax unknowns", count: m, limit: FOLDY_LAX_MAX });
    }
    let x = cloud.positions();
    let c0 = cloud.capacitance();
    let rhs: Vec<Cplx<T>> = x.iter().map(|p| context.incident(p)).collect();
    let coupling = |i: usize, j: usize| -> Cplx<T> {
        if i == j {
            czero()
        } else {
            green(k, vec3::dist(&x[i], &x[j])) * c0
        }
    };
    let apply = |u: &[Cplx<T>]| -> Vec<Cplx<T>> {
        (0..m).map(|i| u[i] + (0..m).fold(czero(), |acc: Cplx<T>, j| acc + coupling(i, j) * u[j])).collect()
    };

    let tol = T::lit(FOLDY_LAX_TOL);
    let (u, iterations) = if m <= FOLDY_LAX_DENSE_LIMIT {
        let a = CMatrix::from_fn(m, m, |i, j| if i == j { cre(T::one()) } else { coupling(i, j) });
        (Lu::factor(a)?.solve(&rhs), 0)
    } else {
        let opts = GmresOptions { tol: tol * T::lit(0.1), restart: 100, max_iterations: 3000 };
        let out = gmres(&apply, &rhs, None, &opts);
        (out.x, out.iterations)
    };
    let au = apply(&u);
    let r: Vec<Cplx<T>> = au.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let b_norm = norm2(&rhs);
    let residual = if b_norm > T::zero() { norm2(&r) / b_norm } else { T::zero() };
    if !(residual <= tol) {
        return Err(Error::NotConverged { residual: residual.as_f64(), tol: FOLDY_LAX_TOL, iterations });
    }
    let scale = -c0 / (T::lit(4.0) * T::PI());
    let values = sphere
        .directions()
        .iter()
        .map(|beta| {
            x.iter().zip(&u).fold(czero(), |acc: Cplx<T>, (p, &um)| acc + cis(-k * vec3::dot(beta, p)) * um) * scale
        })
        .collect();
    let amplitude = FarField::new(Arc::clone(sphere), values)?;
    Ok(EnsembleSolution { local_fields: u, amplitude, residual, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::soft_sphere_amplitude;
    use crate::vec3::Vec3;

    fn sphere() -> Arc<SphereGrid<f64>> {
        Arc::new(SphereGrid::product(8, 16).unwrap())
    }

    #[test]
    fn single_particle_at_origin() {
        let a = 0.01;
        let cloud = ParticleCloud::new(vec![[0.0; 3]], a, 0).unwrap();
        let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
        let s = sphere();
        let sol = foldy_lax_solve(&cloud, &ctx, &s).unwrap();
        assert_eq!(sol.local_fields, vec![Cplx::new(1.0, 0.0)]);
        for v in sol.amplitude.values() {
            assert!((v - Cplx::new(-a, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_particle_matches_partial_waves() {
        let a = 0.01;
        let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
        let cloud = ParticleCloud::new(vec![[0.0; 3]], a, 0).unwrap();
        let s = sphere();
        let sol = foldy_lax_solve(&cloud, &ctx, &s).unwrap();
        let angles: Vec<f64> =
            s.directions().iter().map(|b| vec3::dot(b, &ctx.alpha()).clamp(-1.0, 1.0).acos()).collect();
        let exact = soft_sphere_amplitude(a, 1.0, &angles).unwrap();
        for (fl, ex) in sol.amplitude.values().iter().zip(exact) {
            assert!((fl - ex).norm() / a <= 0.02);
        }
    }

    #[test]
    fn two_particle_symmetry() {
        // particles mirrored through x = 0 with α = e₃: A(θ, φ) = A(θ, π - φ)
        let ctx = WaveContext::new(2.0, [0.0, 0.0, 1.0]).unwrap();
        let cloud = ParticleCloud::new(vec![[0.3, 0.1, 0.2], [-0.3, 0.1, 0.2]], 0.02, 0).unwrap();
        let n_az = 16;
        let s = sphere();
        let sol = foldy_lax_solve(&cloud, &ctx, &s).unwrap();
        let v = sol.amplitude.values();
        for p in 0..8 {
            for m in 0..n_az {
                let mirror = (n_az + n_az / 2 - m) % n_az;
                assert!((v[p * n_az + m] - v[p * n_az + mirror]).norm() < 1e-12);
            }
        }
        assert!((sol.local_fields[0] - sol.local_fields[1]).norm() < 1e-14);
    }

    #[test]
    fn residual_and_reciprocity_of_coupling() {
        let ctx = WaveContext::new(1.0, [1.0, 0.0, 0.0]).unwrap();
        let pts: Vec<Vec3<f64>> =
            (0..30).map(|i| [(i as f64 * 0.7).sin(), (i as f64 * 1.3).cos(), i as f64 * 0.1]).collect();
        let cloud = ParticleCloud::new(pts, 0.01, 0).unwrap();
        let sol = foldy_lax_solve(&cloud, &ctx, &sphere()).unwrap();
        assert!(sol.residual <= 1e-10);
    }

    #[test]
    fn large_ka_is_rejected() {
        let cloud = ParticleCloud::new(vec![[0.0; 3]], 0.2, 0).unwrap();
        let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
        assert!(foldy_lax_solve(&cloud, &ctx, &sphere()).is_err());
    }
}
