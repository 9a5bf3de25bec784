//! Inverse design at fixed wavenumber and incident direction.
//!
//! The pipeline fits a source density `h` whose far field matches the
//! target, forms `ψ = u₀ - Gh`, removes the tube `{|ψ| < δ}` around the null
//! set of `ψ`, reconstructs `q = h/ψ` on the rest, and converts `q - q₀` into
//! a particle number density.

mod cutoff;
mod density;
mod design;
mod diagnostics;
mod fit;
mod target;

pub use cutoff::{choose_delta, compute_psi, cutoff, cutoff_unchecked, CutoffOutcome, DeltaChoice, DELTA_LADDER};
pub use density::{density, sphere_capacitance, DensityField};
pub use design::{design, design_from_potential, design_with, DesignOptions, DesignResult};
pub use diagnostics::{far_field_singular_values, tube_integral, IllPosednessReport, SVD_BUDGET};
pub use fit::{fit_h, RegularizationPolicy, TikhonovFit, TikhonovProblem, LAMBDA_FLOOR};
pub use target::{annulus_pattern, cap_pattern, random_source, DesignTarget};
