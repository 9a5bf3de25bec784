use std::sync::Arc;

use super::Potential;
use crate::error::Result;
use crate::grid::{far_field_map, FarField, SphereGrid};
use crate::scalar::Real;

/// First-order amplitude `A_B(β) = -(1/4π) ∫_D e^{ik(α-β)·x} q(x) dx`, i.e.
/// the exact amplitude formula with `u` replaced by `u₀`.
pub fn born_amplitude<T: Real>(q: &Potential<T>, sphere: &Arc<SphereGrid<T>>) -> Result<FarField<T>> {
    let grid = q.grid();
    let u0 = q.context().incident_field(grid);
    let h = q.field().zip_with(&u0, |a, b| a * b)?;
    far_field_map(grid, sphere, q.context().k(), &h)
}
