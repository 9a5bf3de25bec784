//! Conversion of a designed potential into a particle number density.

use crate::error::{Error, Result};
use crate::forward::Potential;
use crate::grid::RealField;
use crate::scalar::Real;

/// Capacitance `C₀ = 4πa` of a sphere of radius `a`.
pub fn sphere_capacitance<T: Real>(a: T) -> T {
    T::lit(4.0) * T::PI() * a
}

/// `N(x) = Re(q - q₀) / C₀` together with its feasibility diagnostics.
#[derive(Debug, Clone)]
pub struct DensityField<T> {
    /// Unclipped density; may be negative.
    pub raw: RealField<T>,
    /// `max(N, 0)`.
    pub clipped: RealField<T>,
    /// Voxels with `N < 0`.
    pub negative_voxels: usize,
    /// Voxels where `Im(q - q₀)` exceeds `1e-8·max|q|`.
    pub complex_voxels: usize,
    /// Voxels that are negative or complex (counted once).
    pub infeasible_voxels: usize,
    pub capacitance: T,
}

impl<T: Real> DensityField<T> {
    pub fn infeasible_fraction(&self) -> T {
        let n = self.raw.values().len();
        if n == 0 {
            T::zero()
        } else {
            T::count(self.infeasible_voxels) / T::count(n)
        }
    }

    /// Expected particle count `∫ max(N,0) dx`.
    pub fn expected_count(&self) -> T {
        self.clipped.integral()
    }
}

pub fn density<T: Real>(q_delta: &Potential<T>, q0: &Potential<T>, c0: T) -> Result<DensityField<T>> {
    if !(c0 > T::zero()) || !c0.is_finite() {
        return Err(Error::param("c0", format!("capacitance must be positive, got {c0}")));
    }
    let grid = q_delta.grid();
    q0.field().check_grid(grid)?;
    let q_max = q_delta.field().max_modulus().max(q0.field().max_modulus());
    let im_tol = T::lit(1e-8) * q_max;
    let mut raw = Vec::with_capacity(grid.len());
    let (mut negative, mut complex, mut infeasible) = (0, 0, 0);
    for (q, b) in q_delta.values().iter().zip(q0.values()) {
        let p = q - b;
        let n = p.re / c0;
        let is_negative = n < T::zero();
        let is_complex = p.im.abs() > im_tol;
        negative += usize::from(is_negative);
        complex += usize::from(is_complex);
        infeasible += usize::from(is_negative || is_complex);
        raw.push(n);
    }
    let clipped = raw.iter().map(|&n| n.max(T::zero())).collect();
    Ok(DensityField {
        raw: RealField::new(grid.clone(), raw)?,
        clipped: RealField::new(grid.clone(), clipped)?,
        negative_voxels: negative,
        complex_voxels: complex,
        infeasible_voxels: infeasible,
        capacitance: c0,
    })
}
