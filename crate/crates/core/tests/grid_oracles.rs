//! Quadrature, kernel and far-field operator checks against closed forms.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use wavefocus::grid::{
    apply_volume_potential, far_field_adjoint, far_field_map, Aabb, Backend, ComplexField, DomainGrid, FarField,
    Region, SphereGrid, VolumeOperator,
};

/// `∫_{|y|<R} e^{ik|x-y|}/(4π|x-y|) dy` at the ball center.
fn ball_potential_at_center(k: f64, r: f64) -> Complex64 {
    let ikr = Complex64::new(0.0, k * r);
    (ikr.exp() * (1.0 - ikr) - 1.0) / (k * k)
}

/// Same integral at distance `s < R` from the center, by midpoint quadrature
/// over spherical shells of radius `t`.
fn ball_potential(k: f64, r: f64, s: f64) -> Complex64 {
    if s == 0.0 {
        return ball_potential_at_center(k, r);
    }
    // shell average of the kernel: e^{ik max(s,t)} sin(k min(s,t)) / (4π k s t)
    let n = 200_000;
    let dt = r / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let t = (i as f64 + 0.5) * dt;
        let (lo, hi) = if t < s { (t, s) } else { (s, t) };
        let shell = Complex64::new(0.0, k * hi).exp() * (k * lo).sin() / (k * lo * hi);
        acc += shell * t * t * dt;
    }
    acc
}

#[test]
fn quadrature_reproduces_plane_wave_average() {
    let s = SphereGrid::<f64>::product(16, 32).unwrap();
    let k = 2.5;
    let points: [(f64, f64, f64); 4] = [(0.1, 0.2, -0.3), (1.0, -0.5, 0.7), (0.0, 0.0, 1.9), (1.2, 1.1, 0.4)];
    for &(x, y, z) in &points {
        let r = (x * x + y * y + z * z).sqrt();
        let sum: Complex64 = s
            .directions()
            .iter()
            .zip(s.weights())
            .map(|(b, w)| Complex64::new(0.0, k * (b[0] * x + b[1] * y + b[2] * z)).exp() * w)
            .sum();
        let exact = 4.0 * PI * (k * r).sin() / (k * r);
        assert!((sum - exact).norm() <= 1e-10 * exact.abs().max(1.0), "{sum} vs {exact}");
    }
}

#[test]
fn shell_oracle_is_consistent_at_center() {
    let a = ball_potential(1.7, 0.6, 1e-9);
    let b = ball_potential_at_center(1.7, 0.6);
    assert!((a - b).norm() < 1e-6);
}

#[test]
fn ball_potential_converges_under_refinement() {
    let (k, r) = (2.0, 0.5);
    let mut errors = Vec::new();
    for n in [9usize, 17, 33] {
        let g = Arc::new(
            DomainGrid::new(Aabb::centered_cube(r), [n; 3], Region::Ball { center: [0.0; 3], radius: r }).unwrap(),
        );
        let h = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
        let phi = VolumeOperator::new(&g, k, Backend::Fft).unwrap().apply(h.values());
        let c = g.nearest_voxel(&[0.0; 3]).unwrap();
        let exact = ball_potential_at_center(k, r);
        errors.push((phi[c] - exact).norm() / exact.norm());
    }
    assert!(errors[2] < 0.01, "{errors:?}");
    assert!(errors[0] / errors[1] >= 1.8, "{errors:?}");
    assert!(errors[1] / errors[2] >= 1.8, "{errors:?}");
}

#[test]
fn ball_potential_off_center() {
    let (k, r) = (1.5, 0.5);
    let g = Arc::new(
        DomainGrid::new(Aabb::centered_cube(r), [25; 3], Region::Ball { center: [0.0; 3], radius: r }).unwrap(),
    );
    let h = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
    let phi = apply_volume_potential(&g, k, &h).unwrap();
    let p = [0.2, 0.0, 0.0];
    let i = g.nearest_voxel(&p).unwrap();
    let x = g.centers()[i];
    let s = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let exact = ball_potential(k, r, s);
    assert!((phi.values()[i] - exact).norm() / exact.norm() < 0.01);
}

fn small_setup() -> (Arc<DomainGrid<f64>>, Arc<SphereGrid<f64>>) {
    let g = Arc::new(DomainGrid::new(Aabb::new([-0.4, -0.5, -0.3], [0.6, 0.5, 0.4]), [5, 6, 4], Region::Box).unwrap());
    (g, Arc::new(SphereGrid::product(6, 10).unwrap()))
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn far_field_adjoint_identity(hv in complex_vec(120), fv in complex_vec(60), k in 0.5f64..8.0) {
        let (g, s) = small_setup();
        let h = ComplexField::new(g.clone(), hv).unwrap();
        let f = FarField::new(s.clone(), fv).unwrap();
        let bh = far_field_map(&g, &s, k, &h).unwrap();
        let bf = far_field_adjoint(&g, &s, k, &f).unwrap();
        let lhs = bh.inner(&f).unwrap();
        let rhs = h.inner(&bf).unwrap();
        let scale = bh.l2_norm() * f.l2_norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn volume_potential_is_linear(a in complex_vec(120), b in complex_vec(120), k in 0.5f64..8.0) {
        let (g, _) = small_setup();
        let ha = ComplexField::new(g.clone(), a).unwrap();
        let hb = ComplexField::new(g.clone(), b).unwrap();
        let sum = ha.zip_with(&hb, |x, y| x + y).unwrap();
        let ga = apply_volume_potential(&g, k, &ha).unwrap();
        let gb = apply_volume_potential(&g, k, &hb).unwrap();
        let gs = apply_volume_potential(&g, k, &sum).unwrap();
        for ((s, x), y) in gs.values().iter().zip(ga.values()).zip(gb.values()) {
            prop_assert!((s - x - y).norm() <= 1e-12 * (1.0 + s.norm()));
        }
    }

    #[test]
    fn plane_wave_identity_random_points(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, k in 0.1f64..2.8) {
        let s = SphereGrid::<f64>::product(16, 32).unwrap();
        let r = (x * x + y * y + z * z).sqrt().max(1e-6);
        let sum: Complex64 = s
            .directions()
            .iter()
            .zip(s.weights())
            .map(|(b, w)| Complex64::new(0.0, k * (b[0] * x + b[1] * y + b[2] * z)).exp() * w)
            .sum();
        let exact = 4.0 * PI * (k * r).sin() / (k * r);
        prop_assert!((sum - exact).norm() <= 1e-8 * exact.abs().max(1e-3));
    }
}
