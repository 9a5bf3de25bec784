//! Ill-posedness and cutoff diagnostics.

use nalgebra::RealField;

use crate::error::{Error, Result};
use crate::grid::{ball_self_integral, scaled_far_field_matrix, ComplexField, DomainGrid, SphereGrid};
use crate::linalg::singular_values;
use crate::scalar::Real;
use crate::vec3::{self, Vec3};

/// Largest number of matrix entries `directions × voxels` accepted by
/// [`far_field_singular_values`].
pub const SVD_BUDGET: usize = 4_000_000;

/// Singular spectrum of the discrete far-field operator.
#[derive(Debug, Clone, PartialEq)]
pub struct IllPosednessReport<T> {
    /// Nonincreasing.
    pub singular_values: Vec<T>,
    /// `σ_max / σ_min` (infinite when `σ_min = 0`).
    pub condition_number: T,
    pub rows: usize,
    pub cols: usize,
}

impl<T: Real> IllPosednessReport<T> {
    pub fn is_monotone(&self) -> bool {
        self.singular_values.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Singular values of `h ↦ Bh` in the `L²(D) → L²(S²)` norms.
pub fn far_field_singular_values<T: Real + RealField>(
    grid: &DomainGrid<T>,
    sphere: &SphereGrid<T>,
    k: T,
) -> Result<IllPosednessReport<T>> {
    let (rows, cols) = (sphere.len(), grid.len());
    let entries = rows.saturating_mul(cols);
    if entries > SVD_BUDGET {
        return Err(Error::BudgetExceeded { what: "far-field matrix entries", count: entries, limit: SVD_BUDGET });
    }
    let m = scaled_far_field_matrix(grid, sphere, k);
    let singular_values = singular_values(&m);
    let max = singular_values.first().copied().unwrap_or_else(T::zero);
    let min = singular_values.last().copied().unwrap_or_else(T::zero);
    let condition_number = if min > T::zero() { max / min } else { T::infinity() };
    Ok(IllPosednessReport { singular_values, condition_number, rows, cols })
}

/// `I = ∫_{N} |g(x,y) h(y)| dy` over the voxels flagged by `in_tube`,
/// with the voxel containing `x` (if flagged) integrated exactly over its
/// equal-volume ball.
pub fn tube_integral<T: Real>(grid: &DomainGrid<T>, h: &ComplexField<T>, in_tube: &[bool], x: &Vec3<T>) -> Result<T> {
    h.check_grid(grid)?;
    if in_tube.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: in_tube.len() });
    }
    let v = grid.voxel_volume();
    let own = grid.nearest_voxel(x);
    let four_pi = T::lit(4.0) * T::PI();
    let mut total = T::zero();
    for (i, (c, hv)) in grid.centers().iter().zip(h.values()).enumerate() {
        if !in_tube[i] {
            continue;
        }
        let r = vec3::dist(x, c);
        if Some(i) == own && r <= grid.equivalent_radius() {
            // ∫_ball 1/(4πr) = R²/2, the k → 0 value of the self term
            total = total + hv.norm() * ball_self_integral(T::lit(1e-12), grid.equivalent_radius()).re;
        } else {
            total = total + hv.norm() * v / (four_pi * r);
        }
    }
    Ok(total)
}
