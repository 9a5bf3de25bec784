//! Product quadrature on the unit sphere of far-field directions.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Quadrature nodes and positive weights on S².
///
/// Directions are always derived from their `(theta, phi)` angles so that a
/// grid read back from a far-field file is bit-identical to the one written.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid<T> {
    angles: Vec<(T, T)>,
    directions: Vec<Vec3<T>>,
    weights: Vec<T>,
}

impl<T: Real> SphereGrid<T> {
    /// Gauss–Legendre nodes in `cos θ` times `n_azimuthal` uniform nodes in
    /// `φ = 2π m / n_azimuthal`. Polar index varies slowest.
    pub fn product(n_polar: usize, n_azimuthal: usize) -> Result<Self> {
        if n_polar < 2 {
            return Err(Error::param("n_polar", format!("{n_polar} < 2")));
        }
        if n_azimuthal < 4 {
            return Err(Error::param("n_azimuthal", format!("{n_azimuthal} < 4")));
        }
        let (nodes, gl_weights) = gauss_legendre(n_polar);
        let dphi = 2.0 * std::f64::consts::PI / n_azimuthal as f64;
        let mut angles = Vec::with_capacity(n_polar * n_azimuthal);
        let mut weights = Vec::with_capacity(n_polar * n_azimuthal);
        for (t, w) in nodes.iter().zip(&gl_weights) {
            let theta = T::lit(t.acos());
            for m in 0..n_azimuthal {
                angles.push((theta, T::lit(dphi * m as f64)));
                weights.push(T::lit(w * dphi));
            }
        }
        Self::from_parts(angles, weights)
    }

    /// Builds a grid from explicit angles and weights.
    pub fn from_parts(angles: Vec<(T, T)>, weights: Vec<T>) -> Result<Self> {
        if angles.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: angles.len(), got: weights.len() });
        }
        if angles.is_empty() {
            return Err(Error::param("sphere", "no directions"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > T::zero()) || !w.is_finite()) {
            return Err(Error::param("weight", format!("non-positive quadrature weight {w}")));
        }
        let directions = angles.iter().map(|&(t, p)| direction(t, p)).collect();
        Ok(Self { angles, directions, weights })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec3<T>] {
        &self.directions
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `(theta, phi)` of every node.
    pub fn angles(&self) -> &[(T, T)] {
        &self.angles
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }
}

/// Unit vector with polar angle `theta` from +z and azimuth `phi`.
pub fn direction<T: Real>(theta: T, phi: T) -> Vec3<T> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for l in 2..=n {
        let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}
