//! Exact far-field amplitude of a sound-soft (Dirichlet) sphere.
//!
//! With `u = e^{ikz} + u_s` and `u = 0` on `|x| = a`,
//!
//! ```text
//! A(θ) = (i/k) Σ_l (2l+1) j_l(ka) / h_l(ka) · P_l(cos θ),   h_l = j_l + i y_l
//! ```
//!
//! For `ka → 0` this tends to `-a`, the amplitude of a point scatterer of
//! capacitance `4πa`.

use crate::error::{Error, Result};
use crate::scalar::{czero, Cplx, Real};

/// The series is only evaluated for `ka` below this bound.
pub const SOFT_SPHERE_KA_LIMIT: f64 = 50.0;

/// Amplitude at each scattering angle (radians from the incident direction).
pub fn soft_sphere_amplitude<T: Real>(a: T, k: T, angles: &[T]) -> Result<Vec<Cplx<T>>> {
    if !(k > T::zero()) {
        return Err(Error::param("k", "wavenumber must be positive"));
    }
    if a < T::zero() || !a.is_finite() {
        return Err(Error::param("a", format!("radius must be non-negative, got {a}")));
    }
    let ka = k * a;
    if !(ka < T::lit(SOFT_SPHERE_KA_LIMIT)) {
        return Err(Error::param("ka", format!("ka = {ka} exceeds {SOFT_SPHERE_KA_LIMIT}")));
    }
    if a == T::zero() {
        return Ok(vec![czero(); angles.len()]);
    }
    let coeffs = partial_wave_coefficients(ka);
    let lmax = coeffs.len() - 1;
    let prefactor = Cplx::new(T::zero(), T::one() / k);
    Ok(angles
        .iter()
        .map(|&theta| {
            let p = legendre_p(lmax, theta.cos());
            let s = coeffs.iter().zip(&p).fold(czero(), |acc: Cplx<T>, (c, &pl)| acc + c * pl);
            s * prefactor
        })
        .collect())
}

/// `(2l+1) j_l(ka)/h_l(ka)` for `l = 0..=L`, with `L = ⌈ka⌉ + 12` extended
/// while the next term still exceeds `1e-12` of the partial sum.
fn partial_wave_coefficients<T: Real>(ka: T) -> Vec<Cplx<T>> {
    let base = ka.ceil().to_usize().unwrap_or(0) + 12;
    let cap = base + 60;
    let j = spherical_bessel_j(cap, ka);
    let y = spherical_bessel_y(cap, ka);
    let term = |l: usize| -> Cplx<T> {
        if !y[l].is_finite() {
            return czero();
        }
        let h = Cplx::new(j[l], y[l]);
        Cplx::new(j[l], T::zero()) / h * T::count(2 * l + 1)
    };
    let mut coeffs: Vec<Cplx<T>> = (0..=base).map(term).collect();
    let scale = coeffs.iter().fold(T::zero(), |acc, c| acc + c.norm());
    let tail = T::lit(1e-12) * scale;
    for l in base + 1..=cap {
        let c = term(l);
        if c.norm() <= tail {
            break;
        }
        coeffs.push(c);
    }
    coeffs
}

/// `P_0(x), …, P_lmax(x)` by the three-term recurrence.
pub fn legendre_p<T: Real>(lmax: usize, x: T) -> Vec<T> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(T::one());
    if lmax >= 1 {
        p.push(x);
    }
    for l in 2..=lmax {
        let lt = T::count(l);
        let v = ((T::lit(2.0) * lt - T::one()) * x * p[l - 1] - (lt - T::one()) * p[l - 2]) / lt;
        p.push(v);
    }
    p
}

/// `j_0(x), …, j_lmax(x)` by Miller's downward recurrence normalized
/// against the closed forms of `j_0` or `j_1`.
pub fn spherical_bessel_j<T: Real>(lmax: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); lmax + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let start = lmax + 30 + x.abs().ceil().to_usize().unwrap_or(0);
    let big = T::lit(1e20);
    let mut vals = vec![T::zero(); start + 2];
    vals[start] = T::lit(1e-30).max(T::min_positive_value() * T::lit(1e6));
    for l in (1..=start).rev() {
        let v = T::count(2 * l + 1) / x * vals[l] - vals[l + 1];
        vals[l - 1] = v;
        if v.abs() > big {
            for w in vals[l - 1..].iter_mut() {
                *w = *w / big;
            }
        }
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let norm = if j0.abs() >= j1.abs() { j0 / vals[0] } else { j1 / vals[1] };
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = *v * norm;
    }
    out
}

/// `y_0(x), …, y_lmax(x)` by upward recurrence (stable for `y_l`).
pub fn spherical_bessel_y<T: Real>(lmax: usize, x: T) -> Vec<T> {
    let (s, c) = x.sin_cos();
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(-c / x);
    if lmax >= 1 {
        out.push(-c / (x * x) - s / x);
    }
    for l in 1..lmax {
        let v = T::count(2 * l + 1) / x * out[l] - out[l - 1];
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SphereGrid;

    #[test]
    fn bessel_closed_forms() {
        for &x in &[0.3_f64, 1.0, 4.5, 17.0, 49.0] {
            let j = spherical_bessel_j(3, x);
            let y = spherical_bessel_y(3, x);
            let (s, c) = x.sin_cos();
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let y2 = -(3.0 / (x * x) - 1.0) * c / x - 3.0 * s / (x * x);
            assert!((j[0] - s / x).abs() < 1e-14, "j0({x})");
            assert!((j[2] - j2).abs() < 1e-10 * j2.abs().max(1e-3), "j2({x}) {} {}", j[2], j2);
            assert!((y[2] - y2).abs() < 1e-10 * y2.abs().max(1.0), "y2({x})");
        }
    }

    #[test]
    fn bessel_small_argument_series() {
        // j_l(x) ≈ x^l / (2l+1)!!
        let x = 1e-3_f64;
        let j = spherical_bessel_j(6, x);
        let mut dfact = 1.0;
        for (l, jl) in j.iter().enumerate() {
            dfact *= (2 * l + 1) as f64;
            let approx = x.powi(l as i32) / dfact;
            assert!((jl / approx - 1.0).abs() < 1e-5, "l = {l}");
        }
    }

    #[test]
    fn wronskian_holds() {
        // j_l y_{l-1} - j_{l-1} y_l = 1/x²
        let x = 7.3_f64;
        let j = spherical_bessel_j(20, x);
        let y = spherical_bessel_y(20, x);
        for l in 1..=20 {
            let w = j[l] * y[l - 1] - j[l - 1] * y[l];
            assert!((w * x * x - 1.0).abs() < 1e-9, "l = {l}: {w}");
        }
    }

    #[test]
    fn zero_radius_gives_zero() {
        let a = soft_sphere_amplitude(0.0_f64, 1.0, &[0.0, 1.0, 3.0]).unwrap();
        assert!(a.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn small_sphere_tends_to_minus_radius() {
        let (a, k) = (0.01_f64, 1.0);
        let angles: Vec<f64> = (0..64).map(|i| std::f64::consts::PI * i as f64 / 63.0).collect();
        for v in soft_sphere_amplitude(a, k, &angles).unwrap() {
            assert!((v + a).norm() / a <= 0.02);
        }
    }

    #[test]
    fn optical_theorem() {
        for &ka in &[0.01_f64, 0.5, 2.0, 8.0] {
            let k = 1.0;
            let a = ka / k;
            let sphere = SphereGrid::<f64>::product(60, 4).unwrap();
            let angles: Vec<f64> = sphere.angles().iter().map(|&(t, _)| t).collect();
            let amp = soft_sphere_amplitude(a, k, &angles).unwrap();
            let total: f64 = amp.iter().zip(sphere.weights()).map(|(z, w)| z.norm_sqr() * w).sum();
            let forward = soft_sphere_amplitude(a, k, &[0.0]).unwrap()[0];
            let rhs = k / (4.0 * std::f64::consts::PI) * total;
            assert!((forward.im - rhs).abs() / rhs < 1e-8, "ka = {ka}: {} vs {rhs}", forward.im);
        }
    }

    #[test]
    fn rejects_large_ka() {
        assert!(soft_sphere_amplitude(60.0_f64, 1.0, &[0.0]).is_err());
    }
}
