//! Volume potential `(Gh)(x) = ∫_D g(x,y) h(y) dy` with the outgoing
//! Helmholtz kernel `g(r) = e^{ikr} / (4πr)`.
//!
//! Off-diagonal couplings use the midpoint rule `g(|x_i - x_j|) V`. The
//! weakly singular self cell is replaced by the ball of equal volume, whose
//! integral is available in closed form:
//!
//! ```text
//! ∫_{|y|<R} g(|y|) dy = ∫_0^R r e^{ikr} dr = (e^{ikR}(1 - ikR) - 1) / k²
//! ```
//!
//! Two backends are provided. The dense path evaluates every pair directly
//! and is the reference. The FFT path embeds the translation-invariant
//! kernel in a zero-padded box of twice the grid size and applies it as a
//! circular convolution.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{ComplexField, DomainGrid};
use crate::error::{Error, Result};
use crate::scalar::{cis, czero, Cplx, Real};
use crate::vec3;

/// Outgoing free-space Green's function at distance `r > 0`.
#[inline]
pub fn green<T: Real>(k: T, r: T) -> Cplx<T> {
    cis(k * r) / (T::lit(4.0) * T::PI() * r)
}

/// `∫_{|y|<R} e^{ik|y|} / (4π|y|) dy`.
///
/// Uses the Taylor series `Σ (ik)^n R^{n+2} / (n! (n+2))` when `kR` is small
/// to avoid cancellation; the limit as `k → 0` is `R²/2`.
pub fn ball_self_integral<T: Real>(k: T, radius: T) -> Cplx<T> {
    let kr = k * radius;
    if kr < T::lit(0.5) {
        let ik = Complex::new(T::zero(), k);
        let mut term = cre_pow(radius * radius); // (ik)^n R^{n+2} / n!
        let mut sum = czero();
        for n in 0..40usize {
            let contrib = term / T::count(n + 2);
            sum = sum + contrib;
            if contrib.norm() <= T::epsilon() * sum.norm() {
                break;
            }
            term = term * ik * radius / T::count(n + 1);
        }
        sum
    } else {
        let one = Complex::new(T::one(), T::zero());
        (cis(kr) * Complex::new(T::one(), -kr) - one) / (k * k)
    }
}

fn cre_pow<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// Potential of a unit-density ball of radius `radius` evaluated at an
/// interior point at distance `r` from its center:
/// `(e^{ikR}(1 - ikR) sin(kr)/(kr) - 1) / k²`.
pub fn uniform_ball_potential<T: Real>(k: T, radius: T, r: T) -> Cplx<T> {
    let kr = k * r;
    let sinc = if kr.abs() < T::lit(1e-4) { T::one() - kr * kr / T::lit(6.0) } else { kr.sin() / kr };
    let kbig = k * radius;
    let one = Complex::new(T::one(), T::zero());
    (cis(kbig) * Complex::new(T::one(), -kbig) * sinc - one) / (k * k)
}

/// How [`VolumeOperator::apply`] evaluates the convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Direct pairwise evaluation, `O(n²)` kernel evaluations per product.
    Dense,
    /// Zero-padded FFT convolution on the bounding box.
    Fft,
    /// FFT above [`FFT_THRESHOLD`] unknowns, dense below.
    Auto,
}

/// Number of unknowns above which [`Backend::Auto`] switches to the FFT.
pub const FFT_THRESHOLD: usize = 512;

/// Discrete volume potential on a fixed grid.
pub struct VolumeOperator<T: Real> {
    grid: Arc<DomainGrid<T>>,
    k: T,
    self_term: Cplx<T>,
    fft: Option<FftKernel<T>>,
}

impl<T: Real> std::fmt::Debug for VolumeOperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VolumeOperator")
            .field("unknowns", &self.grid.len())
            .field("k", &self.k)
            .field("self_term", &self.self_term)
            .field("fft", &self.fft.is_some())
            .finish()
    }
}

impl<T: Real> VolumeOperator<T> {
    pub fn new(grid: &Arc<DomainGrid<T>>, k: T, backend: Backend) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::param("k", format!("wavenumber must be positive, got {k}")));
        }
        let self_term = ball_self_integral(k, grid.equivalent_radius());
        let use_fft = match backend {
            Backend::Dense => false,
            Backend::Fft => true,
            Backend::Auto => grid.len() > FFT_THRESHOLD,
        };
        let fft = use_fft.then(|| FftKernel::new(grid, k, self_term));
        Ok(Self { grid: Arc::clone(grid), k, self_term, fft })
    }

    pub fn grid(&self) -> &Arc<DomainGrid<T>> {
        &self.grid
    }

    pub fn k(&self) -> T {
        self.k
    }

    /// Diagonal entry: the equal-volume-ball integral.
    pub fn self_term(&self) -> Cplx<T> {
        self.self_term
    }

    pub fn uses_fft(&self) -> bool {
        self.fft.is_some()
    }

    /// Matrix entry coupling voxel `i` to voxel `j`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Cplx<T> {
        if i == j {
            self.self_term
        } else {
            let c = self.grid.centers();
            green(self.k, vec3::dist(&c[i], &c[j])) * self.grid.voxel_volume()
        }
    }

    /// Applies `G` to raw per-voxel values.
    pub fn apply(&self, h: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(h.len(), self.grid.len(), "volume potential input length");
        match &self.fft {
            Some(kernel) => kernel.apply(&self.grid, h),
            None => self.apply_dense(h),
        }
    }

    /// Pairwise reference evaluation, independent of the backend.
    pub fn apply_dense(&self, h: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let centers = self.grid.centers();
        let vol = self.grid.voxel_volume();
        let four_pi = T::lit(4.0) * T::PI();
        centers
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let mut acc = self.self_term * h[i];
                for (j, xj) in centers.iter().enumerate() {
                    if i != j {
                        let r = vec3::dist(xi, xj);
                        acc = acc + cis(self.k * r) * (h[j] * (vol / (four_pi * r)));
                    }
                }
                acc
            })
            .collect()
    }

    /// Dense row-major `n × n` matrix of the operator.
    pub fn assemble(&self) -> Vec<Cplx<T>> {
        let n = self.grid.len();
        let mut m = vec![czero(); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.entry(i, j);
            }
        }
        m
    }

    pub fn apply_field(&self, h: &ComplexField<T>) -> Result<ComplexField<T>> {
        h.check_grid(&self.grid)?;
        ComplexField::new(Arc::clone(&self.grid), self.apply(h.values()))
    }
}

/// Reference evaluation of `∫_D g(x,y) h(y) dy` at every masked voxel.
pub fn apply_volume_potential<T: Real>(
    grid: &Arc<DomainGrid<T>>,
    k: T,
    h: &ComplexField<T>,
) -> Result<ComplexField<T>> {
    h.check_grid(grid)?;
    let op = VolumeOperator::new(grid, k, Backend::Dense)?;
    ComplexField::new(Arc::clone(grid), op.apply_dense(h.values()))
}

/// Spectrum of the kernel on the padded box plus reusable FFT plans.
struct FftKernel<T: Real> {
    padded: [usize; 3],
    spectrum: Vec<Cplx<T>>,
    plans: Fft3<T>,
}

impl<T: Real> FftKernel<T> {
    fn new(grid: &DomainGrid<T>, k: T, self_term: Cplx<T>) -> Self {
        let shape = grid.shape();
        let padded = [2 * shape[0], 2 * shape[1], 2 * shape[2]];
        let spacing = grid.spacing();
        let vol = grid.voxel_volume();
        let mut table = vec![czero(); padded[0] * padded[1] * padded[2]];
        // offset d in (-n, n) lives at index d mod 2n; index n is never reached
        let offset = |idx: usize, n: usize| -> Option<i64> {
            if idx < n {
                Some(idx as i64)
            } else if idx > n {
                Some(idx as i64 - 2 * n as i64)
            } else {
                None
            }
        };
        for iz in 0..padded[2] {
            let Some(dz) = offset(iz, shape[2]) else { continue };
            for iy in 0..padded[1] {
                let Some(dy) = offset(iy, shape[1]) else { continue };
                for ix in 0..padded[0] {
                    let Some(dx) = offset(ix, shape[0]) else { continue };
                    let value = if dx == 0 && dy == 0 && dz == 0 {
                        self_term
                    } else {
                        let d = [
                            T::lit(dx as f64) * spacing[0],
                            T::lit(dy as f64) * spacing[1],
                            T::lit(dz as f64) * spacing[2],
                        ];
                        green(k, vec3::norm(&d)) * vol
                    };
                    table[ix + padded[0] * (iy + padded[1] * iz)] = value;
                }
            }
        }
        let plans = Fft3::new(padded);
        plans.forward(&mut table);
        Self { padded, spectrum: table, plans }
    }

    fn apply(&self, grid: &DomainGrid<T>, h: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let [px, py, pz] = self.padded;
        let mut buf = vec![czero(); px * py * pz];
        let padded_index = |v: &[usize; 3]| v[0] + px * (v[1] + py * v[2]);
        for (v, &hv) in grid.voxels().iter().zip(h) {
            buf[padded_index(v)] = hv;
        }
        self.plans.forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b = *b * *s;
        }
        self.plans.inverse(&mut buf);
        let scale = T::one() / T::count(px * py * pz);
        grid.voxels().iter().map(|v| buf[padded_index(v)] * scale).collect()
    }
}

/// Unnormalized separable 3-D FFT on an `x`-fastest array.
struct Fft3<T: Real> {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<T>>; 3],
    inverse: [Arc<dyn Fft<T>>; 3],
}

impl<T: Real> Fft3<T> {
    fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = std::array::from_fn(|a| planner.plan_fft_forward(dims[a]));
        let inverse = std::array::from_fn(|a| planner.plan_fft_inverse(dims[a]));
        Self { dims, forward, inverse }
    }

    fn forward(&self, data: &mut [Cplx<T>]) {
        self.run(data, &self.forward);
    }

    fn inverse(&self, data: &mut [Cplx<T>]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Cplx<T>], plans: &[Arc<dyn Fft<T>>; 3]) {
        let [nx, ny, nz] = self.dims;
        // x lines are contiguous
        plans[0].process(data);
        let mut line = vec![czero(); ny.max(nz)];
        for iz in 0..nz {
            for ix in 0..nx {
                let base = ix + nx * ny * iz;
                for iy in 0..ny {
                    line[iy] = data[base + nx * iy];
                }
                plans[1].process(&mut line[..ny]);
                for iy in 0..ny {
                    data[base + nx * iy] = line[iy];
                }
            }
        }
        let plane = nx * ny;
        for j in 0..plane {
            for iz in 0..nz {
                line[iz] = data[j + plane * iz];
            }
            plans[2].process(&mut line[..nz]);
            for iz in 0..nz {
                data[j + plane * iz] = line[iz];
            }
        }
    }
}
