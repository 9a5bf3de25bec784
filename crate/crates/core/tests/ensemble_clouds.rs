//! Particle sampling statistics and Foldy–Lax checks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use wavefocus::ensemble::{effective_medium_check, foldy_lax_solve, sample_particles, ParticleCloud};
use wavefocus::forward::{soft_sphere_amplitude, Potential};
use wavefocus::grid::{Aabb, ComplexField, DomainGrid, RealField, Region, SphereGrid, WaveContext};
use wavefocus::inverse::design_from_potential;

fn unit_box() -> Arc<DomainGrid<f64>> {
    Arc::new(DomainGrid::new(Aabb::new([0.0; 3], [1.0; 3]), [5; 3], Region::Box).unwrap())
}

#[test]
fn poisson_counts_and_spacing() {
    let n = RealField::constant(&unit_box(), 100.0);
    let mut spacing = 0.0;
    let seeds = 1..=10u64;
    for seed in seeds.clone() {
        let cloud = sample_particles(&n, 0.002, seed).unwrap();
        assert!((cloud.len() as f64 - 100.0).abs() <= 30.0, "seed {seed}: {}", cloud.len());
        assert_eq!(cloud, sample_particles(&n, 0.002, seed).unwrap());
        spacing += cloud.mean_spacing().unwrap();
    }
    spacing /= seeds.count() as f64;
    let expected = 0.55 * 100f64.powf(-1.0 / 3.0);
    assert!((spacing - expected).abs() <= 0.3 * expected, "{spacing} vs {expected}");
}

#[test]
fn single_soft_sphere_against_partial_waves() {
    let a = 0.01;
    let s = Arc::new(SphereGrid::<f64>::product(8, 8).unwrap());
    let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
    let cloud = ParticleCloud::new(vec![[0.0; 3]], a, 0).unwrap();
    let sol = foldy_lax_solve(&cloud, &ctx, &s).unwrap();
    let angles: Vec<f64> = s.directions().iter().map(|b| b[2].clamp(-1.0, 1.0).acos()).collect();
    let exact = soft_sphere_amplitude(a, 1.0, &angles).unwrap();
    for (fl, ex) in sol.amplitude.values().iter().zip(&exact) {
        assert!((fl - ex).norm() / a <= 0.02);
    }
}

#[test]
fn weak_ball_cloud_tracks_design() {
    let r = 3.0;
    let g = Arc::new(
        DomainGrid::new(Aabb::centered_cube(r), [12; 3], Region::Ball { center: [0.0; 3], radius: r }).unwrap(),
    );
    let s = Arc::new(SphereGrid::product(8, 16).unwrap());
    let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
    let q = Potential::new(ComplexField::constant(&g, Complex64::new(0.5, 0.0)), ctx);
    let d = design_from_potential(&q, &s, 1e-10, 0.05).unwrap();
    let seeds: Vec<u64> = (1..=4).collect();
    let rep = effective_medium_check(&d, 0.05, &seeds, &s).unwrap();
    assert!(rep.distance <= 0.25, "{}", rep.distance);
    assert!(rep.per_seed.iter().all(|r| r.residual <= 1e-10));
    assert!(rep.mean_volume_fraction <= 0.01);
    // C₀ N = q - q₀ in the mean, within Poisson error of the total count
    let total: usize = rep.per_seed.iter().map(|r| r.count).sum();
    let sigma = rep.mean_contrast / (total as f64).sqrt();
    assert!((rep.capacitance_density - rep.mean_contrast).abs() <= 3.0 * sigma);
    let again = effective_medium_check(&d, 0.05, &seeds, &s).unwrap();
    assert_eq!(rep.per_seed, again.per_seed);
    assert_eq!(rep.mean_amplitude.values(), again.mean_amplitude.values());
}

#[test]
fn empty_design_is_vacuous() {
    let g = Arc::new(DomainGrid::new(Aabb::centered_cube(1.0), [4; 3], Region::Box).unwrap());
    let s = Arc::new(SphereGrid::product(4, 8).unwrap());
    let ctx = WaveContext::new(1.0, [0.0, 0.0, 1.0]).unwrap();
    let d = design_from_potential(&Potential::zero(&g, ctx), &s, 1e-10, 0.05).unwrap();
    let rep = effective_medium_check(&d, 0.05, &[1, 2], &s).unwrap();
    assert_eq!(rep.distance, 0.0);
    assert!(rep.per_seed.is_empty());
}

#[test]
fn two_point_scatterers_closed_form() {
    // u₁ = u₀(x₁) - c g u₂, u₂ = u₀(x₂) - c g u₁ solved by hand
    let a = 0.01;
    let c0 = 4.0 * PI * a;
    let k = 2.0;
    let x1 = [0.0, 0.0, -0.1];
    let x2 = [0.0, 0.0, 0.1];
    let ctx = WaveContext::new(k, [0.0, 0.0, 1.0]).unwrap();
    let s = Arc::new(SphereGrid::product(4, 8).unwrap());
    let cloud = ParticleCloud::new(vec![x1, x2], a, 0).unwrap();
    let sol = foldy_lax_solve(&cloud, &ctx, &s).unwrap();
    let gk = Complex64::new(0.0, k * 0.2).exp() / (4.0 * PI * 0.2) * c0;
    let b1 = Complex64::new(0.0, -0.1 * k).exp();
    let b2 = Complex64::new(0.0, 0.1 * k).exp();
    let det = 1.0 - gk * gk;
    let u1 = (b1 - gk * b2) / det;
    let u2 = (b2 - gk * b1) / det;
    assert!((sol.local_fields[0] - u1).norm() < 1e-14);
    assert!((sol.local_fields[1] - u2).norm() < 1e-14);
}
