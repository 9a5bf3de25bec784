//! Sampled functions on the domain grid and on the direction sphere.

use std::sync::Arc;

use num_complex::Complex;

use super::{DomainGrid, SphereGrid};
use crate::error::{Error, Result};
use crate::scalar::{czero, Cplx, Real};
use crate::vec3::{self, Vec3};

/// Fixed wavenumber and incident direction of the plane wave `e^{ik α·x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext<T> {
    k: T,
    alpha: Vec3<T>,
}

impl<T: Real> WaveContext<T> {
    /// `alpha` must already be a unit vector to within `1e-14` in double
    /// precision (scaled by the machine epsilon of `T` otherwise).
    pub fn new(k: T, alpha: Vec3<T>) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::param("k", format!("wavenumber must be positive, got {k}")));
        }
        let tol = T::lit(1e-14).max(T::epsilon() * T::lit(8.0));
        let n = vec3::norm(&alpha);
        if !((n - T::one()).abs() <= tol) {
            return Err(Error::param("alpha", format!("|alpha| = {n} is not 1")));
        }
        Ok(Self { k, alpha })
    }

    /// Normalizes `alpha` before validation.
    pub fn normalized(k: T, alpha: Vec3<T>) -> Result<Self> {
        let a = vec3::normalized(&alpha).ok_or_else(|| Error::param("alpha", "zero incident direction"))?;
        Self::new(k, a)
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn alpha(&self) -> Vec3<T> {
        self.alpha
    }

    /// Incident plane wave at `x`.
    pub fn incident(&self, x: &Vec3<T>) -> Cplx<T> {
        crate::scalar::cis(self.k * vec3::dot(&self.alpha, x))
    }

    /// Incident plane wave sampled at every masked voxel center.
    pub fn incident_field(&self, grid: &Arc<DomainGrid<T>>) -> ComplexField<T> {
        let values = grid.centers().iter().map(|x| self.incident(x)).collect();
        ComplexField { grid: Arc::clone(grid), values }
    }
}

/// Complex values at the masked voxel centers of a grid.
#[derive(Debug, Clone)]
pub struct ComplexField<T> {
    grid: Arc<DomainGrid<T>>,
    values: Vec<Cplx<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Arc<DomainGrid<T>>, values: Vec<Cplx<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Arc<DomainGrid<T>>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![czero(); grid.len()] }
    }

    pub fn constant(grid: &Arc<DomainGrid<T>>, value: Cplx<T>) -> Self {
        Self { grid: Arc::clone(grid), values: vec![value; grid.len()] }
    }

    /// Samples `f` at every masked center.
    pub fn from_fn(grid: &Arc<DomainGrid<T>>, f: impl Fn(&Vec3<T>) -> Cplx<T>) -> Self {
        let values = grid.centers().iter().map(f).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn grid(&self) -> &Arc<DomainGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Cplx<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Cplx<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_grid(&self, grid: &DomainGrid<T>) -> Result<()> {
        if self.grid.same_as(grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Pointwise combination with a field on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Result<Self> {
        other.check_grid(&self.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { grid: Arc::clone(&self.grid), values })
    }

    pub fn map(&self, f: impl Fn(Cplx<T>) -> Cplx<T>) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `L²(D)` norm with the voxel-volume weight.
    pub fn l2_norm(&self) -> T {
        (crate::scalar::norm2(&self.values).powi(2) * self.grid.voxel_volume()).sqrt()
    }

    /// `L²(D)` inner product `Σ V a_l conj(b_l)`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        other.check_grid(&self.grid)?;
        let s = self.values.iter().zip(&other.values).fold(czero(), |acc: Cplx<T>, (a, b)| acc + a * b.conj());
        Ok(s * self.grid.voxel_volume())
    }

    pub fn max_modulus(&self) -> T {
        crate::scalar::max_modulus(&self.values)
    }

    pub fn min_modulus(&self) -> T {
        self.values.iter().fold(T::infinity(), |acc, z| acc.min(z.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }
}

/// Real values at the masked voxel centers of a grid.
#[derive(Debug, Clone)]
pub struct RealField<T> {
    grid: Arc<DomainGrid<T>>,
    values: Vec<T>,
}

impl<T: Real> RealField<T> {
    pub fn new(grid: Arc<DomainGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: &Arc<DomainGrid<T>>, value: T) -> Self {
        Self { grid: Arc::clone(grid), values: vec![value; grid.len()] }
    }

    pub fn grid(&self) -> &Arc<DomainGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `∫_D N dx` by the midpoint rule.
    pub fn integral(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v) * self.grid.voxel_volume()
    }

    pub fn mean(&self) -> T {
        if self.values.is_empty() {
            return T::zero();
        }
        self.values.iter().fold(T::zero(), |a, &v| a + v) / T::count(self.values.len())
    }

    /// Embeds as a complex field with zero imaginary part.
    pub fn to_complex(&self) -> ComplexField<T> {
        ComplexField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        }
    }
}

/// Complex values at the nodes of a sphere grid.
#[derive(Debug, Clone)]
pub struct FarField<T> {
    sphere: Arc<SphereGrid<T>>,
    values: Vec<Cplx<T>>,
}

impl<T: Real> FarField<T> {
    pub fn new(sphere: Arc<SphereGrid<T>>, values: Vec<Cplx<T>>) -> Result<Self> {
        if values.len() != sphere.len() {
            return Err(Error::LengthMismatch { expected: sphere.len(), got: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("far field", "non-finite value"));
        }
        Ok(Self { sphere, values })
    }

    pub fn zeros(sphere: &Arc<SphereGrid<T>>) -> Self {
        Self { sphere: Arc::clone(sphere), values: vec![czero(); sphere.len()] }
    }

    pub fn from_fn(sphere: &Arc<SphereGrid<T>>, f: impl Fn(&Vec3<T>) -> Cplx<T>) -> Self {
        let values = sphere.directions().iter().map(f).collect();
        Self { sphere: Arc::clone(sphere), values }
    }

    pub fn sphere(&self) -> &Arc<SphereGrid<T>> {
        &self.sphere
    }

    pub fn values(&self) -> &[Cplx<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_sphere(&self, sphere: &SphereGrid<T>) -> Result<()> {
        if std::ptr::eq(self.sphere.as_ref(), sphere) || *self.sphere == *sphere {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `L²(S²)` norm with the quadrature weights.
    pub fn l2_norm(&self) -> T {
        self.values.iter().zip(self.sphere.weights()).fold(T::zero(), |acc, (z, &w)| acc + w * z.norm_sqr()).sqrt()
    }

    /// `L²(S²)` inner product `Σ w_j a_j conj(b_j)`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        other.check_sphere(&self.sphere)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.sphere.weights())
            .fold(czero(), |acc: Cplx<T>, ((a, b), &w)| acc + a * b.conj() * w))
    }

    /// `‖self - other‖_{L²(S²)}`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        other.check_sphere(&self.sphere)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.sphere.weights())
            .fold(T::zero(), |acc, ((a, b), &w)| acc + w * (a - b).norm_sqr())
            .sqrt())
    }

    /// `‖self - reference‖ / ‖reference‖`; zero when both vanish.
    pub fn relative_distance(&self, reference: &Self) -> Result<T> {
        let d = self.distance(reference)?;
        let r = reference.l2_norm();
        Ok(if r > T::zero() {
            d / r
        } else if d == T::zero() {
            T::zero()
        } else {
            T::infinity()
        })
    }

    pub fn scaled(&self, s: Cplx<T>) -> Self {
        Self { sphere: Arc::clone(&self.sphere), values: self.values.iter().map(|&v| v * s).collect() }
    }
}
