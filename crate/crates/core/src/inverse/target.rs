use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, DomainGrid, FarField, SphereGrid, WaveContext};
use crate::scalar::{Cplx, Real};
use crate::vec3::{self, Vec3};

/// Desired far-field pattern with its accuracy goal.
#[derive(Debug, Clone)]
pub struct DesignTarget<T> {
    pub f: FarField<T>,
    /// Goal for `‖f - A_q‖_{L²(S²)}`.
    pub epsilon: T,
    pub context: WaveContext<T>,
}

impl<T: Real> DesignTarget<T> {
    pub fn new(f: FarField<T>, epsilon: T, context: WaveContext<T>) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::param("epsilon", format!("accuracy goal must be positive, got {epsilon}")));
        }
        Ok(Self { f, epsilon, context })
    }

    /// Goal expressed relative to `‖f‖`.
    pub fn relative(f: FarField<T>, relative_epsilon: T, context: WaveContext<T>) -> Result<Self> {
        let eps = relative_epsilon * f.l2_norm();
        Self::new(f, eps, context)
    }
}

/// `amplitude` on the cap `β·axis ≥ cos(half_angle)`, zero elsewhere.
pub fn cap_pattern<T: Real>(
    sphere: &Arc<SphereGrid<T>>,
    axis: Vec3<T>,
    half_angle: T,
    amplitude: Cplx<T>,
) -> Result<FarField<T>> {
    annulus_pattern(sphere, axis, T::zero(), half_angle, amplitude)
}

/// `amplitude` where the angle to `axis` lies in `[inner, outer]`.
pub fn annulus_pattern<T: Real>(
    sphere: &Arc<SphereGrid<T>>,
    axis: Vec3<T>,
    inner: T,
    outer: T,
    amplitude: Cplx<T>,
) -> Result<FarField<T>> {
    let axis = vec3::normalized(&axis).ok_or_else(|| Error::param("axis", "zero axis"))?;
    if !(inner >= T::zero() && inner <= outer && outer <= T::PI()) {
        return Err(Error::param("angles", format!("need 0 <= inner <= outer <= pi, got [{inner}, {outer}]")));
    }
    let (ci, co) = (inner.cos(), outer.cos());
    Ok(FarField::from_fn(sphere, |beta| {
        let c = vec3::dot(beta, &axis);
        if c <= ci && c >= co {
            amplitude
        } else {
            Cplx::new(T::zero(), T::zero())
        }
    }))
}

/// Seeded source density with independent standard normal real and
/// imaginary parts in every voxel.
pub fn random_source<T: Real>(grid: &Arc<DomainGrid<T>>, seed: u64) -> ComplexField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> T { T::lit(rng.sample::<f64, _>(StandardNormal)) };
    let values = (0..grid.len()).map(|_| Cplx::new(normal(), normal())).collect();
    ComplexField::new(Arc::clone(grid), values).expect("length matches grid")
}
