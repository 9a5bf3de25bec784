//! Seeded placement of particles according to a number density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::cells::CellList;
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::inverse::sphere_capacitance;
use crate::scalar::Real;
use crate::vec3::{self, Vec3};

/// Largest expected particle count [`sample_particles`] accepts.
pub const MAX_PARTICLES: usize = 100_000;

/// Placement attempts per particle before giving up on the separation rule.
pub const MAX_PLACEMENT_RETRIES: usize = 64;

/// Largest admissible ratio of radius to mean nearest-neighbour spacing.
const MAX_RADIUS_TO_SPACING: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud<T> {
    positions: Vec<Vec3<T>>,
    radius: T,
    seed: u64,
    mean_spacing: Option<T>,
}

impl<T: Real> ParticleCloud<T> {
    /// Validates the separation `≥ 4a` and `a/d ≤ 0.2`.
    pub fn new(positions: Vec<Vec3<T>>, radius: T, seed: u64) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::param("a", format!("particle radius must be positive, got {radius}")));
        }
        if positions.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::param("positions", "non-finite coordinate".to_string()));
        }
        let min_sep = T::lit(4.0) * radius;
        let mut list = CellList::new(min_sep);
        for (i, p) in positions.iter().enumerate() {
            if list.any_within(p, min_sep) {
                return Err(Error::InfeasibleSeparation { index: i, min_distance: min_sep.as_f64() });
            }
            list.insert(*p);
        }
        let mean_spacing = mean_nearest_distance(&positions);
        if let Some(d) = mean_spacing {
            if radius / d > T::lit(MAX_RADIUS_TO_SPACING) {
                return Err(Error::param("a", format!("a/d = {} exceeds {MAX_RADIUS_TO_SPACING}", radius / d)));
            }
        }
        Ok(Self { positions, radius, seed, mean_spacing })
    }

    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// `C₀ = 4πa`.
    pub fn capacitance(&self) -> T {
        sphere_capacitance(self.radius)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Mean nearest-neighbour distance; `None` for fewer than two particles.
    pub fn mean_spacing(&self) -> Option<T> {
        self.mean_spacing
    }

    /// `Σ (4π/3) a³`.
    pub fn particle_volume(&self) -> T {
        T::count(self.len()) * T::lit(4.0 / 3.0) * T::PI() * self.radius.powi(3)
    }
}

/// Mean distance from each point to its nearest neighbour.
pub fn mean_nearest_distance<T: Real>(points: &[Vec3<T>]) -> Option<T> {
    if points.len() < 2 {
        return None;
    }
    let (lo, hi) = points.iter().fold(([T::infinity(); 3], [T::neg_infinity(); 3]), |(mut lo, mut hi), p| {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
        (lo, hi)
    });
    let extent = vec3::sub(&hi, &lo);
    let longest = extent[0].max(extent[1]).max(extent[2]);
    let size = (longest / T::count(points.len()).cbrt()).max(T::lit(1e-12));
    let list = CellList::with_points(size, points);
    let total = (0..points.len()).fold(T::zero(), |acc, i| acc + list.nearest_distance(i).unwrap_or_else(T::zero));
    Some(total / T::count(points.len()))
}

/// Poisson sampling of particles with mean `N(x)·V` in every voxel, placed
/// uniformly inside the voxel and kept at least `4a` apart.
pub fn sample_particles<T: Real>(density: &RealField<T>, a: T, seed: u64) -> Result<ParticleCloud<T>> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::param("a", format!("particle radius must be positive, got {a}")));
    }
    let grid = density.grid();
    if let Some(n) = density.values().iter().find(|n| !(**n >= T::zero()) || !n.is_finite()) {
        return Err(Error::param("density", format!("must be finite and nonnegative, found {n}")));
    }
    let v = grid.voxel_volume();
    let expected = density.integral();
    if expected < T::one() {
        return Err(Error::param("density", format!("expected particle count {expected} is below 1")));
    }
    if expected > T::count(MAX_PARTICLES) {
        return Err(Error::BudgetExceeded {
            what: "expected particle count",
            count: expected.to_usize().unwrap_or(usize::MAX),
            limit: MAX_PARTICLES,
        });
    }
    let spacing = grid.spacing();
    let min_sep = T::lit(4.0) * a;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = CellList::new(min_sep);
    let mut positions = Vec::new();
    for (c, &n) in grid.centers().iter().zip(density.values()) {
        let mean = (n * v).as_f64();
        if mean <= 0.0 {
            continue;
        }
        let count = Poisson::new(mean).map_err(|e| Error::param("density", e.to_string()))?.sample(&mut rng) as usize;
        for _ in 0..count {
            let mut placed = false;
            for _ in 0..MAX_PLACEMENT_RETRIES {
                let p: Vec3<T> =
                    std::array::from_fn(|ax| c[ax] + spacing[ax] * (T::lit(rng.random::<f64>()) - T::lit(0.5)));
                if !list.any_within(&p, min_sep) {
                    list.insert(p);
                    positions.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::InfeasibleSeparation { index: positions.len(), min_distance: min_sep.as_f64() });
            }
            if positions.len() > MAX_PARTICLES {
                return Err(Error::BudgetExceeded {
                    what: "particle count",
                    count: positions.len(),
                    limit: MAX_PARTICLES,
                });
            }
        }
    }
    ParticleCloud::new(positions, a, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Aabb, DomainGrid, Region};
    use std::sync::Arc;

    fn unit_box(n: usize) -> Arc<DomainGrid<f64>> {
        Arc::new(DomainGrid::new(Aabb::new([0.0; 3], [1.0; 3]), [n; 3], Region::Box).unwrap())
    }

    #[test]
    fn zero_density_is_rejected() {
        let g = unit_box(4);
        assert!(sample_particles(&RealField::constant(&g, 0.0), 0.01, 1).is_err());
    }

    #[test]
    fn negative_density_is_rejected() {
        let g = unit_box(4);
        assert!(sample_particles(&RealField::constant(&g, -1.0), 0.01, 1).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let g = unit_box(4);
        let err = sample_particles(&RealField::constant(&g, 2e5), 1e-4, 1).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn poisson_count_and_determinism() {
        let g = unit_box(5);
        let n = RealField::constant(&g, 100.0);
        let c1 = sample_particles(&n, 0.005, 42).unwrap();
        let c2 = sample_particles(&n, 0.005, 42).unwrap();
        assert_eq!(c1, c2);
        assert!((c1.len() as f64 - 100.0).abs() <= 30.0, "count {}", c1.len());
        let c3 = sample_particles(&n, 0.005, 43).unwrap();
        assert_ne!(c1.positions(), c3.positions());
        for p in c1.positions() {
            assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn separation_is_enforced() {
        assert!(ParticleCloud::new(vec![[0.0; 3], [0.03, 0.0, 0.0]], 0.01, 0).is_err());
        assert!(ParticleCloud::new(vec![[0.0; 3], [0.05, 0.0, 0.0]], 0.01, 0).is_ok());
    }

    #[test]
    fn radius_to_spacing_is_enforced() {
        assert!(ParticleCloud::new(vec![[0.0; 3], [1.0, 0.0, 0.0]], 0.21, 0).is_err());
    }

    #[test]
    fn mean_spacing_of_lattice() {
        let pts: Vec<Vec3<f64>> =
            (0..27).map(|i| [(i % 3) as f64 * 0.5, ((i / 3) % 3) as f64 * 0.5, (i / 9) as f64 * 0.5]).collect();
        assert!((mean_nearest_distance(&pts).unwrap() - 0.5).abs() < 1e-15);
    }
}
