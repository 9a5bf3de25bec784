//! Clouds of small acoustically soft spheres and their multiple scattering.
//!
//! A density `N(x)` is realized as discrete particle positions, and the
//! point-interaction (Foldy–Lax) system couples the particles through the
//! free-space Green's function. Each particle of radius `a` scatters with
//! strength `C₀ = 4πa`.

mod cells;
mod check;
mod cloud;
mod foldy_lax;

pub use check::{effective_medium_check, effective_medium_compare, EffectiveMediumReport, SeedRun};
pub use cloud::{mean_nearest_distance, sample_particles, ParticleCloud, MAX_PARTICLES, MAX_PLACEMENT_RETRIES};
pub use foldy_lax::{foldy_lax_solve, EnsembleSolution, FOLDY_LAX_DENSE_LIMIT, FOLDY_LAX_MAX, FOLDY_LAX_TOL};
