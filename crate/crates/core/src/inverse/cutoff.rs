//! `ψ = u₀ - Gh`, the null-set cutoff and the choice of the cutoff level.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Backend, ComplexField, DomainGrid, VolumeOperator, WaveContext};
use crate::scalar::{czero, Cplx, Real};

/// Exponents `m` of the cutoff ladder `δ = 2^{-m}`, finest first.
pub const DELTA_LADDER: std::ops::RangeInclusive<u32> = 3..=20;

/// `ψ(x) = u₀(x) - ∫_D g(x,y) h(y) dy`.
pub fn compute_psi<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    context: &WaveContext<T>,
    h: &ComplexField<T>,
) -> Result<ComplexField<T>> {
    h.check_grid(grid)?;
    let op = VolumeOperator::new(grid, context.k(), Backend::Auto)?;
    let gh = op.apply(h.values());
    let values = grid.centers().iter().zip(gh).map(|(x, g)| context.incident(x) - g).collect();
    ComplexField::new(Arc::clone(grid), values)
}

/// Result of removing the tube `N_δ = {|ψ| < δ}`.
#[derive(Debug, Clone)]
pub struct CutoffOutcome<T> {
    pub delta: T,
    /// `h` on `D_δ`, zero on `N_δ`.
    pub h_delta: ComplexField<T>,
    /// `u₀ - G h_δ`.
    pub psi_delta: ComplexField<T>,
    /// `h_δ / ψ_δ` on `D_δ`, zero on `N_δ`.
    pub q_delta: ComplexField<T>,
    /// `true` for voxels in `D_δ`.
    pub kept: Vec<bool>,
    pub cut_fraction: T,
    /// `min_{D_δ} |ψ_δ|` (infinite when everything is cut).
    pub min_kept_psi: T,
}

impl<T: Real> CutoffOutcome<T> {
    /// The lower bound `|ψ_δ| ≥ δ/2` on every kept voxel.
    pub fn bound_holds(&self) -> bool {
        self.min_kept_psi >= self.delta * T::lit(0.5)
    }

    pub fn cut_count(&self) -> usize {
        self.kept.iter().filter(|k| !**k).count()
    }
}

/// Applies the cutoff and checks the `|ψ_δ| ≥ δ/2` bound.
pub fn cutoff<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    k: T,
    h: &ComplexField<T>,
    psi: &ComplexField<T>,
    delta: T,
) -> Result<CutoffOutcome<T>> {
    let out = cutoff_unchecked(grid, k, h, psi, delta)?;
    if out.bound_holds() {
        Ok(out)
    } else {
        Err(Error::BoundViolation { min_psi: out.min_kept_psi.as_f64(), half_delta: (delta * T::lit(0.5)).as_f64() })
    }
}

/// Applies the cutoff without enforcing the bound.
///
/// `ψ_δ` is updated as `ψ + G(h - h_δ)`, which equals `u₀ - G h_δ` whenever
/// `ψ = u₀ - Gh` and only requires `G` on the removed tube.
pub fn cutoff_unchecked<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    k: T,
    h: &ComplexField<T>,
    psi: &ComplexField<T>,
    delta: T,
) -> Result<CutoffOutcome<T>> {
    let op = VolumeOperator::new(grid, k, Backend::Auto)?;
    cutoff_with(&op, h, psi, delta)
}

fn cutoff_with<T: Real>(
    op: &VolumeOperator<T>,
    h: &ComplexField<T>,
    psi: &ComplexField<T>,
    delta: T,
) -> Result<CutoffOutcome<T>> {
    let grid = op.grid();
    if !(delta > T::zero()) {
        return Err(Error::param("delta", format!("cutoff level must be positive, got {delta}")));
    }
    h.check_grid(grid)?;
    psi.check_grid(grid)?;
    let kept: Vec<bool> = psi.values().iter().map(|p| p.norm() >= delta).collect();
    let removed: Vec<Cplx<T>> = h.values().iter().zip(&kept).map(|(&v, &k)| if k { czero() } else { v }).collect();
    let h_delta: Vec<Cplx<T>> = h.values().iter().zip(&kept).map(|(&v, &k)| if k { v } else { czero() }).collect();
    let psi_delta: Vec<Cplx<T>> = if removed.iter().any(|v| *v != czero()) {
        let g = op.apply(&removed);
        psi.values().iter().zip(g).map(|(p, g)| p + g).collect()
    } else {
        psi.values().to_vec()
    };
    let mut min_kept = T::infinity();
    let q_delta: Vec<Cplx<T>> = h_delta
        .iter()
        .zip(&psi_delta)
        .zip(&kept)
        .map(|((hv, pv), &k)| {
            if k {
                min_kept = min_kept.min(pv.norm());
            }
            if k && *hv != czero() {
                hv / pv
            } else {
                czero()
            }
        })
        .collect();
    let cut = kept.iter().filter(|k| !**k).count();
    let cut_fraction = if kept.is_empty() { T::zero() } else { T::count(cut) / T::count(kept.len()) };
    Ok(CutoffOutcome {
        delta,
        h_delta: ComplexField::new(Arc::clone(grid), h_delta)?,
        psi_delta: ComplexField::new(Arc::clone(grid), psi_delta)?,
        q_delta: ComplexField::new(Arc::clone(grid), q_delta)?,
        kept,
        cut_fraction,
        min_kept_psi: min_kept,
    })
}

/// Selected cutoff level and the corresponding outcome.
#[derive(Debug, Clone)]
pub struct DeltaChoice<T> {
    pub delta: T,
    pub outcome: CutoffOutcome<T>,
    /// No rung satisfied the bound; the coarsest rung is returned.
    pub fallback: bool,
}

/// Smallest `δ = 2^{-m}`, `m = 20, 19, …, 3`, whose cutoff keeps
/// `|ψ_δ| ≥ δ/2` on every kept voxel.
pub fn choose_delta<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    k: T,
    h: &ComplexField<T>,
    psi: &ComplexField<T>,
) -> Result<DeltaChoice<T>> {
    let op = VolumeOperator::new(grid, k, Backend::Auto)?;
    let mut previous: Option<CutoffOutcome<T>> = None;
    for m in DELTA_LADDER.rev() {
        let delta = T::lit(0.5).powi(m as i32);
        let outcome = match previous.take() {
            // identical tube: only δ changes
            Some(prev) if prev.kept.iter().zip(psi.values()).all(|(&k, p)| k == (p.norm() >= delta)) => {
                CutoffOutcome { delta, ..prev }
            }
            _ => cutoff_with(&op, h, psi, delta)?,
        };
        if outcome.bound_holds() {
            return Ok(DeltaChoice { delta, outcome, fallback: false });
        }
        previous = Some(outcome);
    }
    let delta = T::lit(0.5).powi(*DELTA_LADDER.start() as i32);
    let outcome = match previous {
        Some(o) if o.delta == delta => o,
        _ => cutoff_with(&op, h, psi, delta)?,
    };
    Ok(DeltaChoice { delta, outcome, fallback: true })
}
