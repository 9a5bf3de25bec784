//! The far-field operator `(Bh)(β) = -(1/4π) ∫_D e^{-ikβ·x} h(x) dx` and its
//! adjoint with respect to the weighted inner products on `D` and `S²`.

use std::sync::Arc;

use super::{ComplexField, DomainGrid, FarField, SphereGrid};
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::scalar::{cis, czero, Cplx, Real};
use crate::vec3::{self, Vec3};

/// `(Bh)(β_j) = -(1/4π) Σ_l e^{-ikβ_j·x_l} h_l V`.
pub fn far_field_map<T: Real>(
    grid: &DomainGrid<T>,
    sphere: &Arc<SphereGrid<T>>,
    k: T,
    h: &ComplexField<T>,
) -> Result<FarField<T>> {
    h.check_grid(grid)?;
    let values = sphere.directions().iter().map(|beta| far_field_at(grid, k, h.values(), beta)).collect();
    FarField::new(Arc::clone(sphere), values)
}

/// `(Bh)(β)` for a single direction.
pub fn far_field_at<T: Real>(grid: &DomainGrid<T>, k: T, h: &[Cplx<T>], beta: &Vec3<T>) -> Cplx<T> {
    let sum =
        grid.centers().iter().zip(h).fold(czero(), |acc: Cplx<T>, (x, &hv)| acc + cis(-k * vec3::dot(beta, x)) * hv);
    sum * (-grid.voxel_volume() / (T::lit(4.0) * T::PI()))
}

/// `(B*f)(x_l) = -(1/4π) Σ_j w_j e^{ikβ_j·x_l} f_j`, the exact adjoint of
/// [`far_field_map`] for `⟨a,b⟩_D = Σ V a conj(b)` and
/// `⟨a,b⟩_{S²} = Σ w a conj(b)`.
pub fn far_field_adjoint<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    sphere: &SphereGrid<T>,
    k: T,
    f: &FarField<T>,
) -> Result<ComplexField<T>> {
    f.check_sphere(sphere)?;
    let scale = -T::one() / (T::lit(4.0) * T::PI());
    let values = grid
        .centers()
        .iter()
        .map(|x| {
            let s = sphere
                .directions()
                .iter()
                .zip(sphere.weights())
                .zip(f.values())
                .fold(czero(), |acc: Cplx<T>, ((beta, &w), &fv)| acc + cis(k * vec3::dot(beta, x)) * fv * w);
            s * scale
        })
        .collect();
    ComplexField::new(Arc::clone(grid), values)
}

/// Matrix of `B` in orthonormalized coordinates:
/// `M_{jl} = sqrt(w_j) · (-1/4π) e^{-ikβ_j·x_l} · sqrt(V)`.
///
/// With `ĥ = sqrt(V) h` and `f̂_j = sqrt(w_j) f_j`, `‖f - Bh‖_{L²(S²)} =
/// ‖f̂ - M ĥ‖₂` and `‖h‖_{L²(D)} = ‖ĥ‖₂`, so the singular values of `M` are
/// those of `B` between the weighted spaces.
pub fn scaled_far_field_matrix<T: Real>(grid: &DomainGrid<T>, sphere: &SphereGrid<T>, k: T) -> CMatrix<T> {
    let n = grid.len();
    let sv = grid.voxel_volume().sqrt();
    let four_pi = T::lit(4.0) * T::PI();
    let mut m = CMatrix::zeros(sphere.len(), n);
    for (j, (beta, &w)) in sphere.directions().iter().zip(sphere.weights()).enumerate() {
        let s = -w.sqrt() * sv / four_pi;
        let row = m.row_mut(j);
        for (l, x) in grid.centers().iter().enumerate() {
            row[l] = cis(-k * vec3::dot(beta, x)) * s;
        }
    }
    m
}
