//! Fit, cutoff and design checks on reachable and synthetic targets.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use wavefocus::grid::{far_field_map, Aabb, ComplexField, DomainGrid, Region, SphereGrid, WaveContext};
use wavefocus::inverse::{
    cap_pattern, choose_delta, cutoff, cutoff_unchecked, design, fit_h, random_source, tube_integral, DesignTarget,
    RegularizationPolicy, TikhonovProblem,
};

fn cube(n: usize) -> Arc<DomainGrid<f64>> {
    Arc::new(DomainGrid::new(Aabb::centered_cube(0.5), [n; 3], Region::Box).unwrap())
}

#[test]
fn reachable_target_on_twelve_cubed() {
    let g = cube(12);
    let s = Arc::new(SphereGrid::product(16, 32).unwrap());
    let ctx = WaveContext::new(2.0 * PI, [0.0, 0.0, 1.0]).unwrap();
    let h_star = random_source(&g, 2024);
    let f = far_field_map(&g, &s, ctx.k(), &h_star).unwrap();
    let target = DesignTarget::relative(f, 1e-3, ctx).unwrap();
    let fit = fit_h(&target, &g, &s, RegularizationPolicy::Discrepancy).unwrap();
    assert!(fit.reached && fit.residual <= target.epsilon && fit.residual >= 0.5 * target.epsilon);
    let r = design(&target, &g, &s, RegularizationPolicy::Discrepancy).unwrap();
    assert!(r.residual_final <= 2.0 * target.epsilon);
    assert!(r.passed());
}

#[test]
fn fixed_lambda_reports_unreached_target() {
    let g = cube(4);
    let s = Arc::new(SphereGrid::product(6, 12).unwrap());
    let ctx = WaveContext::new(2.0, [0.0, 0.0, 1.0]).unwrap();
    let f = cap_pattern(&s, [0.0, 0.0, 1.0], PI / 6.0, Complex64::new(1.0, 0.0)).unwrap();
    let target = DesignTarget::relative(f, 1e-6, ctx).unwrap();
    let fit = fit_h(&target, &g, &s, RegularizationPolicy::Fixed(1.0)).unwrap();
    assert!(!fit.reached);
    assert!(fit.residual > target.epsilon);
    let disc = fit_h(&target, &g, &s, RegularizationPolicy::Discrepancy).unwrap();
    assert!(!disc.reached);
    assert!((disc.lambda - 1e-14).abs() < 1e-20);
}

#[test]
fn null_line_tube_volume() {
    // ψ = x₁ + i x₂ vanishes on the x₃ axis; the tube {|ψ| < δ} is a cylinder
    let n = 41;
    let g = cube(n);
    let psi = ComplexField::from_fn(&g, |x| Complex64::new(x[0], x[1]));
    let h = ComplexField::constant(&g, Complex64::new(1.0, 0.0));
    for delta in [0.25, 0.125] {
        let out = cutoff_unchecked(&g, 1.0, &h, &psi, delta).unwrap();
        let expected = PI * delta * delta;
        assert!((out.cut_fraction - expected).abs() <= 0.1 * expected, "{delta}: {} vs {expected}", out.cut_fraction);
        assert!(out.bound_holds());
        let bound = h.max_modulus() / (0.5 * delta);
        assert!(out.q_delta.max_modulus() <= bound);
    }
    let choice = choose_delta(&g, 1.0, &h, &psi).unwrap();
    assert!(!choice.fallback);
    assert!(choice.outcome.min_kept_psi >= 0.5 * choice.delta);
    assert!(choice.outcome.cut_count() >= n);
}

/// `(1/2) ∫_0^δ ρ asinh(L/ρ) dρ`: the kernel `1/(4π r)` integrated over a
/// one-sided cylinder of radius `δ` and length `L` seen from its axis end.
fn one_sided_tube(delta: f64, length: f64) -> f64 {
    let n = 20_000;
    let d = delta / n as f64;
    (0..n).map(|i| (i as f64 + 0.5) * d).map(|rho| 0.5 * rho * (length / rho).asinh() * d).sum()
}

#[test]
fn tube_integral_matches_cylinder_oracle_and_scales() {
    let length = 1.0;
    let mut logs = Vec::new();
    for m in 4..=7 {
        let delta = 0.5f64.powi(m);
        let dz = delta / 8.0;
        let nz = (length / dz).round() as usize + 1;
        let half = 2.0 * delta;
        let g = DomainGrid::new(
            Aabb::new([-half, -half, -0.5 * dz], [half, half, -0.5 * dz + nz as f64 * dz]),
            [33, 33, nz],
            Region::Box,
        )
        .unwrap();
        let g = Arc::new(g);
        let h = ComplexField::constant(&g, Complex64::new(0.0, 1.0));
        let in_tube: Vec<bool> = g.centers().iter().map(|c| c[0].hypot(c[1]) < delta).collect();
        let i = tube_integral(&g, &h, &in_tube, &[0.0, 0.0, 0.0]).unwrap();
        let oracle = one_sided_tube(delta, length);
        assert!((i - oracle).abs() <= 0.1 * oracle, "δ={delta}: {i} vs {oracle}");
        logs.push((delta.ln(), i.ln()));
    }
    let slope = least_squares_slope(&logs);
    assert!((1.7..=2.2).contains(&slope), "{slope}");
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn successful_cutoff_bounds_quotient() {
    let g = cube(8);
    let ctx = WaveContext::new(5.0, [0.0, 0.0, 1.0]).unwrap();
    let h = random_source(&g, 9).map(|v| v * 40.0);
    let psi = wavefocus::inverse::compute_psi(&g, &ctx, &h).unwrap();
    let choice = choose_delta(&g, ctx.k(), &h, &psi).unwrap();
    if !choice.fallback {
        let out = cutoff(&g, ctx.k(), &h, &psi, choice.delta).unwrap();
        assert!(out.min_kept_psi >= 0.5 * choice.delta);
        assert!(out.q_delta.max_modulus() <= h.max_modulus() / (0.5 * choice.delta));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tikhonov_is_monotone_in_lambda(seed in 0u64..1000, k in 1.0f64..8.0, log_lo in -10.0f64..-4.0) {
        let g = cube(5);
        let s = Arc::new(SphereGrid::product(6, 12).unwrap());
        let ctx = WaveContext::new(k, [0.0, 0.0, 1.0]).unwrap();
        let f = far_field_map(&g, &s, k, &random_source(&g, seed)).unwrap();
        let f = wavefocus::grid::FarField::new(
            s.clone(),
            f.values().iter().zip(s.directions()).map(|(v, b)| v + Complex64::new(0.01 * b[0], 0.02 * b[2])).collect(),
        )
        .unwrap();
        let target = DesignTarget::new(f, 1.0, ctx).unwrap();
        let problem = TikhonovProblem::new(&g, &s, &target).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for step in 0..=8 {
            let lambda = 10f64.powf(log_lo + step as f64);
            let (_, residual, norm) = problem.solve(lambda).unwrap();
            if let Some((r0, n0)) = prev {
                prop_assert!(residual >= r0 * (1.0 - 1e-9));
                prop_assert!(norm <= n0 * (1.0 + 1e-9));
            }
            prev = Some((residual, norm));
        }
    }

    #[test]
    fn construction_identity_on_kept_voxels(seed in 0u64..1000, scale in 1.0f64..200.0) {
        let g = cube(6);
        let ctx = WaveContext::new(3.0, [0.0, 1.0, 0.0]).unwrap();
        let h = random_source(&g, seed).map(|v| v * scale);
        let psi = wavefocus::inverse::compute_psi(&g, &ctx, &h).unwrap();
        let choice = choose_delta(&g, ctx.k(), &h, &psi).unwrap();
        let out = &choice.outcome;
        for (((q, p), hd), kept) in out.q_delta.values().iter().zip(out.psi_delta.values()).zip(out.h_delta.values()).zip(&out.kept) {
            if *kept {
                prop_assert!((q * p - hd).norm() <= 1e-12 * hd.norm().max(1e-300));
            } else {
                prop_assert_eq!(*q, Complex64::new(0.0, 0.0));
                prop_assert_eq!(*hd, Complex64::new(0.0, 0.0));
            }
        }
        if !choice.fallback {
            prop_assert!(out.min_kept_psi >= 0.5 * choice.delta);
            prop_assert!(out.q_delta.max_modulus() <= h.max_modulus() / (0.5 * choice.delta));
        }
    }
}
