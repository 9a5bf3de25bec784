//! Discretization of the design domain and the direction sphere, plus the
//! volume and far-field operators shared by the solvers.

mod domain;
mod far_field;
mod field;
mod sphere;
mod volume;

pub use domain::{Aabb, DomainGrid, Region};
pub use far_field::{far_field_adjoint, far_field_at, far_field_map, scaled_far_field_matrix};
pub use field::{ComplexField, FarField, RealField, WaveContext};
pub use sphere::{direction, gauss_legendre, SphereGrid};
pub use volume::{
    apply_volume_potential, ball_self_integral, green, uniform_ball_potential, Backend, VolumeOperator, FFT_THRESHOLD,
};
