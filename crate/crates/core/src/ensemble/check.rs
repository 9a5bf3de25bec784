//! Comparison of particle clouds against the continuous design.

use std::sync::Arc;

use super::{foldy_lax_solve, sample_particles};
use crate::error::{Error, Result};
use crate::forward::Potential;
use crate::grid::{FarField, SphereGrid};
use crate::inverse::{density, sphere_capacitance, DesignResult};
use crate::scalar::{czero, Cplx, Real};

/// One sampled cloud and its Foldy–Lax solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRun<T> {
    pub seed: u64,
    pub count: usize,
    pub mean_spacing: Option<T>,
    pub residual: T,
    /// `‖A_M - B h_δ‖ / ‖B h_δ‖` for this cloud alone.
    pub distance: T,
    /// `Σ (4π/3)a³ / vol(D)`.
    pub volume_fraction: T,
}

#[derive(Debug, Clone)]
pub struct EffectiveMediumReport<T> {
    pub radius: T,
    pub capacitance: T,
    pub per_seed: Vec<SeedRun<T>>,
    /// Seed-averaged `A_M`.
    pub mean_amplitude: FarField<T>,
    /// `‖mean A_M - B h_δ‖ / ‖B h_δ‖` (zero for an empty design).
    pub distance: T,
    pub mean_count: T,
    pub mean_volume_fraction: T,
    /// `C₀ · mean count / vol(D)`.
    pub capacitance_density: T,
    /// `mean over D of Re(q_δ - q₀)`.
    pub mean_contrast: T,
}

/// Samples one cloud per seed from `N = (q_δ - q₀)/(4πa)`, solves the
/// Foldy–Lax system and compares the seed-averaged amplitude with the
/// design prediction `B h_δ`.
pub fn effective_medium_check<T: Real>(
    design: &DesignResult<T>,
    a: T,
    seeds: &[u64],
    sphere: &Arc<SphereGrid<T>>,
) -> Result<EffectiveMediumReport<T>> {
    effective_medium_compare(&design.q_delta, &design.background, &design.predicted, a, seeds, sphere)
}

/// [`effective_medium_check`] from the designed potential and its
/// predicted amplitude alone.
pub fn effective_medium_compare<T: Real>(
    q_delta: &Potential<T>,
    background: &Potential<T>,
    predicted: &FarField<T>,
    a: T,
    seeds: &[u64],
    sphere: &Arc<SphereGrid<T>>,
) -> Result<EffectiveMediumReport<T>> {
    if !background.field().is_zero() {
        return Err(Error::param("background", "particle validation requires q0 = 0".to_string()));
    }
    if seeds.is_empty() {
        return Err(Error::param("seeds", "at least one seed is required".to_string()));
    }
    predicted.check_sphere(sphere)?;
    let c0 = sphere_capacitance(a);
    let grid = q_delta.grid();
    let vol = grid.masked_volume();
    let mean_contrast = q_delta.values().iter().fold(T::zero(), |acc, q| acc + q.re) / T::count(grid.len().max(1));
    if q_delta.field().is_zero() {
        return Ok(EffectiveMediumReport {
            radius: a,
            capacitance: c0,
            per_seed: Vec::new(),
            mean_amplitude: FarField::zeros(sphere),
            distance: T::zero(),
            mean_count: T::zero(),
            mean_volume_fraction: T::zero(),
            capacitance_density: T::zero(),
            mean_contrast,
        });
    }
    let dens = density(q_delta, background, c0)?;
    if dens.negative_voxels > 0 {
        return Err(Error::param("design", format!("density is negative on {} voxels", dens.negative_voxels)));
    }
    let reference = predicted.l2_norm();
    let mut sum: Vec<Cplx<T>> = vec![czero(); sphere.len()];
    let mut per_seed = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cloud = sample_particles(&dens.raw, a, seed)?;
        let sol = foldy_lax_solve(&cloud, q_delta.context(), sphere)?;
        for (s, v) in sum.iter_mut().zip(sol.amplitude.values()) {
            *s = *s + *v;
        }
        per_seed.push(SeedRun {
            seed,
            count: cloud.len(),
            mean_spacing: cloud.mean_spacing(),
            residual: sol.residual,
            distance: sol.amplitude.distance(predicted)? / reference,
            volume_fraction: cloud.particle_volume() / vol,
        });
    }
    let n = T::count(seeds.len());
    let mean_amplitude = FarField::new(Arc::clone(sphere), sum.into_iter().map(|s| s / n).collect())?;
    let distance = mean_amplitude.distance(predicted)? / reference;
    let mean_count = per_seed.iter().fold(T::zero(), |acc, r| acc + T::count(r.count)) / n;
    let mean_volume_fraction = per_seed.iter().fold(T::zero(), |acc, r| acc + r.volume_fraction) / n;
    Ok(EffectiveMediumReport {
        radius: a,
        capacitance: c0,
        per_seed,
        mean_amplitude,
        distance,
        mean_count,
        mean_volume_fraction,
        capacitance_density: c0 * mean_count / vol,
        mean_contrast,
    })
}
