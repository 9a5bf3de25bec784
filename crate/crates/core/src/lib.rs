//! Inverse design of wave-focusing materials.
//!
//! Given a target far-field pattern `f(β)` at a fixed wavenumber `k` and a
//! fixed incident direction `α`, the crate builds a compactly supported
//! potential `q` whose scattering amplitude approximates `f`, converts `q`
//! into a number density of small acoustically soft particles, and checks
//! both steps against independent forward solvers.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod forward;
pub mod grid;
pub mod inverse;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type DomainGrid64 = grid::DomainGrid<f64>;
pub type SphereGrid64 = grid::SphereGrid<f64>;
pub type ComplexField64 = grid::ComplexField<f64>;
pub type RealField64 = grid::RealField<f64>;
pub type FarField64 = grid::FarField<f64>;
pub type WaveContext64 = grid::WaveContext<f64>;
pub type Potential64 = forward::Potential<f64>;
pub type ScatteringSolution64 = forward::ScatteringSolution<f64>;
pub type DesignTarget64 = inverse::DesignTarget<f64>;
pub type DesignResult64 = inverse::DesignResult<f64>;
pub type ParticleCloud64 = ensemble::ParticleCloud<f64>;
pub type EnsembleSolution64 = ensemble::EnsembleSolution<f64>;
pub type Complex64 = Cplx<f64>;
