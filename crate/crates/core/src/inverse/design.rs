//! The full design pipeline: fit, `ψ`, cutoff, density.

use std::sync::Arc;

use super::{
    choose_delta, compute_psi, density, fit_h, sphere_capacitance, DensityField, DesignTarget, RegularizationPolicy,
};
use crate::error::{Error, Result};
use crate::forward::{solve_scattering, Potential};
use crate::grid::{far_field_map, ComplexField, DomainGrid, FarField, SphereGrid};
use crate::scalar::Real;

/// Settings of [`design_with`] beyond the target itself.
#[derive(Debug, Clone)]
pub struct DesignOptions<T> {
    pub reg: RegularizationPolicy<T>,
    /// Background potential `q₀`; zero when absent.
    pub background: Option<ComplexField<T>>,
    /// Radius `a` of the soft particles, giving `C₀ = 4πa`.
    pub particle_radius: T,
}

impl<T: Real> DesignOptions<T> {
    pub fn new(reg: RegularizationPolicy<T>) -> Self {
        Self { reg, background: None, particle_radius: T::lit(0.01) }
    }
}

#[derive(Debug, Clone)]
pub struct DesignResult<T> {
    pub target: DesignTarget<T>,
    /// Fitted source density before the cutoff.
    pub h: ComplexField<T>,
    pub h_delta: ComplexField<T>,
    /// `u₀ - Gh`.
    pub psi: ComplexField<T>,
    /// `u₀ - G h_δ`.
    pub psi_delta: ComplexField<T>,
    pub q_delta: Potential<T>,
    pub background: Potential<T>,
    pub delta: T,
    pub delta_fallback: bool,
    pub lambda: T,
    pub h_norm: T,
    /// `‖f - Bh‖`.
    pub residual_fit: T,
    /// `‖f - B h_δ‖`.
    pub residual_final: T,
    pub cut_fraction: T,
    pub min_psi: T,
    pub min_kept_psi: T,
    /// `B h_δ`, the amplitude the design predicts for `q_δ`.
    pub predicted: FarField<T>,
    pub density: DensityField<T>,
    pub infeasible_voxels: usize,
    pub warnings: Vec<String>,
}

impl<T: Real> DesignResult<T> {
    /// `residual_final ≤ 2·max(ε, residual_fit)`.
    pub fn final_bound(&self) -> T {
        T::lit(2.0) * self.target.epsilon.max(self.residual_fit)
    }

    pub fn passed(&self) -> bool {
        self.residual_final <= self.final_bound()
    }
}

/// Runs the pipeline with `q₀ = 0` and particles of radius `0.01`.
pub fn design<T: Real>(
    target: &DesignTarget<T>,
    grid: &Arc<DomainGrid<T>>,
    sphere: &Arc<SphereGrid<T>>,
    reg: RegularizationPolicy<T>,
) -> Result<DesignResult<T>> {
    design_with(target, grid, sphere, &DesignOptions::new(reg))
}

pub fn design_with<T: Real>(
    target: &DesignTarget<T>,
    grid: &Arc<DomainGrid<T>>,
    sphere: &Arc<SphereGrid<T>>,
    options: &DesignOptions<T>,
) -> Result<DesignResult<T>> {
    let fit = fit_h(target, grid, sphere, options.reg)?;
    let mut warnings = Vec::new();
    if !fit.reached {
        warnings.push(format!(
            "target not reached: residual {} exceeds epsilon {} at lambda {}",
            fit.residual, target.epsilon, fit.lambda
        ));
    }
    finish(target.clone(), grid, sphere, options, fit.h, fit.lambda, fit.h_norm, fit.residual, warnings)
}

/// Builds a design whose source is `h = q u` for the solution `u` of the
/// forward problem with potential `q`, targeting the amplitude of `q`.
///
/// The fit step is exact here, so the cutoff and density stages see the
/// potential they should reproduce.
pub fn design_from_potential<T: Real>(
    q: &Potential<T>,
    sphere: &Arc<SphereGrid<T>>,
    tol: T,
    particle_radius: T,
) -> Result<DesignResult<T>> {
    let grid = q.grid();
    let solution = solve_scattering(q, sphere, tol)?;
    let h = solution.source(q)?;
    let norm = solution.amplitude.l2_norm();
    let epsilon = (tol * norm).max(T::min_positive_value());
    let target = DesignTarget::new(solution.amplitude.clone(), epsilon, *q.context())?;
    let residual_fit = far_field_map(grid, sphere, q.context().k(), &h)?.distance(&target.f)?;
    let h_norm = h.l2_norm();
    let options = DesignOptions { reg: RegularizationPolicy::Fixed(T::zero()), background: None, particle_radius };
    finish(target, grid, sphere, &options, h, T::zero(), h_norm, residual_fit, Vec::new())
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real>(
    target: DesignTarget<T>,
    grid: &Arc<DomainGrid<T>>,
    sphere: &Arc<SphereGrid<T>>,
    options: &DesignOptions<T>,
    h: ComplexField<T>,
    lambda: T,
    h_norm: T,
    residual_fit: T,
    mut warnings: Vec<String>,
) -> Result<DesignResult<T>> {
    let context = target.context;
    let k = context.k();
    let background = match &options.background {
        Some(q0) => {
            q0.check_grid(grid)?;
            Potential::new(q0.clone(), context)
        }
        None => Potential::zero(grid, context),
    };
    if !(options.particle_radius > T::zero()) {
        return Err(Error::param("particle_radius", format!("must be positive, got {}", options.particle_radius)));
    }
    let psi = compute_psi(grid, &context, &h)?;
    let choice = choose_delta(grid, k, &h, &psi)?;
    if choice.fallback {
        warnings.push(format!(
            "no cutoff level satisfied the bound; using delta {} with min |psi_delta| {}",
            choice.delta, choice.outcome.min_kept_psi
        ));
    }
    let out = choice.outcome;
    let predicted = far_field_map(grid, sphere, k, &out.h_delta)?;
    let residual_final = predicted.distance(&target.f)?;
    let q_delta = Potential::new(out.q_delta, context);
    let dens = density(&q_delta, &background, sphere_capacitance(options.particle_radius))?;
    if dens.infeasible_voxels > 0 {
        warnings.push(format!(
            "density infeasible on {} of {} voxels ({} negative, {} complex)",
            dens.infeasible_voxels,
            grid.len(),
            dens.negative_voxels,
            dens.complex_voxels
        ));
    }
    let result = DesignResult {
        h,
        h_delta: out.h_delta,
        min_psi: psi.min_modulus(),
        psi,
        psi_delta: out.psi_delta,
        q_delta,
        background,
        delta: choice.delta,
        delta_fallback: choice.fallback,
        lambda,
        h_norm,
        residual_fit,
        residual_final,
        cut_fraction: out.cut_fraction,
        min_kept_psi: out.min_kept_psi,
        predicted,
        infeasible_voxels: dens.infeasible_voxels,
        density: dens,
        target,
        warnings,
    };
    let mut result = result;
    if !result.passed() {
        let msg = format!(
            "residual_final {} exceeds 2·max(epsilon, residual_fit) = {}",
            result.residual_final,
            result.final_bound()
        );
        result.warnings.push(msg);
    }
    Ok(result)
}
