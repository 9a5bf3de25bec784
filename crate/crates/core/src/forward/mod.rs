//! Forward scattering by a compactly supported potential, plus the Born
//! and soft-sphere partial-wave oracles used to certify it.

mod born;
mod partial_wave;
mod solver;

pub use born::born_amplitude;
pub use partial_wave::{
    legendre_p, soft_sphere_amplitude, spherical_bessel_j, spherical_bessel_y, SOFT_SPHERE_KA_LIMIT,
};
pub use solver::{
    solve_scattering, solve_scattering_with, Potential, ScatteringSolution, SolveMethod, SolveOptions, DENSE_LIMIT,
};
