//! Voxelization of the bounded design region.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Vec3<T>, max: Vec3<T>) -> Self {
        Self { min, max }
    }

    /// The cube `[-half, half]^3`.
    pub fn centered_cube(half: T) -> Self {
        Self { min: [-half; 3], max: [half; 3] }
    }

    pub fn volume(&self) -> T {
        (0..3).fold(T::one(), |acc, i| acc * (self.max[i] - self.min[i]))
    }
}

/// Membership predicate used to mask voxels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region<T> {
    /// Every voxel of the bounding box.
    Box,
    Ball {
        center: Vec3<T>,
        radius: T,
    },
}

impl<T: Real> Region<T> {
    fn contains(&self, p: &Vec3<T>) -> bool {
        match self {
            Region::Box => true,
            Region::Ball { center, radius } => {
                let d = crate::vec3::sub(p, center);
                crate::vec3::dot(&d, &d) <= *radius * *radius
            }
        }
    }
}

/// Regular voxel grid over a box with a boolean mask selecting the design
/// region. Masked voxels are enumerated in row-major order with `ix`
/// varying fastest; every per-voxel array in the crate uses that order.
#[derive(Debug, Clone)]
pub struct DomainGrid<T> {
    bounds: Aabb<T>,
    shape: [usize; 3],
    spacing: Vec3<T>,
    mask: Vec<bool>,
    voxels: Vec<[usize; 3]>,
    linear: Vec<usize>,
    centers: Vec<Vec3<T>>,
    voxel_volume: T,
}

impl<T: Real> DomainGrid<T> {
    /// Builds the grid and masks voxels whose centers satisfy `region`.
    pub fn new(bounds: Aabb<T>, shape: [usize; 3], region: Region<T>) -> Result<Self> {
        validate_box(&bounds, &shape)?;
        if let Region::Ball { center, radius } = region {
            if !(radius > T::zero()) {
                return Err(Error::param("radius", "ball radius must be positive"));
            }
            for i in 0..3 {
                if center[i] - radius < bounds.min[i] || center[i] + radius > bounds.max[i] {
                    return Err(Error::RegionOutsideBounds(format!(
                        "ball of radius {radius} at {center:?} leaves the box on axis {i}"
                    )));
                }
            }
        }
        let spacing: Vec3<T> = std::array::from_fn(|i| (bounds.max[i] - bounds.min[i]) / T::count(shape[i]));
        let total = shape[0] * shape[1] * shape[2];
        let mut mask = vec![false; total];
        for iz in 0..shape[2] {
            for iy in 0..shape[1] {
                for ix in 0..shape[0] {
                    let c = center_of(&bounds.min, &spacing, [ix, iy, iz]);
                    mask[ix + shape[0] * (iy + shape[1] * iz)] = region.contains(&c);
                }
            }
        }
        Ok(Self::assemble(bounds, shape, spacing, mask))
    }

    /// Rebuilds a grid from its lower corner, spacing and explicit mask, as
    /// stored in field files.
    pub fn from_mask(min: Vec3<T>, spacing: Vec3<T>, shape: [usize; 3], mask: Vec<bool>) -> Result<Self> {
        for (i, &d) in spacing.iter().enumerate() {
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::DegenerateBox {
                    axis: i,
                    min: min[i].as_f64(),
                    max: (min[i] + d * T::count(shape[i])).as_f64(),
                });
            }
        }
        for (axis, &count) in shape.iter().enumerate() {
            if count < 2 {
                return Err(Error::TooFewVoxels { axis, count });
            }
        }
        let total = shape[0] * shape[1] * shape[2];
        if mask.len() != total {
            return Err(Error::LengthMismatch { expected: total, got: mask.len() });
        }
        let max = std::array::from_fn(|i| min[i] + spacing[i] * T::count(shape[i]));
        Ok(Self::assemble(Aabb { min, max }, shape, spacing, mask))
    }

    fn assemble(bounds: Aabb<T>, shape: [usize; 3], spacing: Vec3<T>, mask: Vec<bool>) -> Self {
        let mut voxels = Vec::new();
        let mut linear = Vec::new();
        let mut centers = Vec::new();
        for (l, &inside) in mask.iter().enumerate() {
            if inside {
                let idx = [l % shape[0], (l / shape[0]) % shape[1], l / (shape[0] * shape[1])];
                voxels.push(idx);
                linear.push(l);
                centers.push(center_of(&bounds.min, &spacing, idx));
            }
        }
        let voxel_volume = spacing[0] * spacing[1] * spacing[2];
        Self { bounds, shape, spacing, mask, voxels, linear, centers, voxel_volume }
    }

    pub fn bounds(&self) -> &Aabb<T> {
        &self.bounds
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn spacing(&self) -> Vec3<T> {
        self.spacing
    }

    /// Per-voxel inclusion flags over the full box, `ix` fastest.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Number of masked voxels (unknowns).
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec3<T>] {
        &self.centers
    }

    /// Integer indices of the masked voxels.
    pub fn voxels(&self) -> &[[usize; 3]] {
        &self.voxels
    }

    /// Linear box index of every masked voxel.
    pub fn linear_indices(&self) -> &[usize] {
        &self.linear
    }

    pub fn voxel_volume(&self) -> T {
        self.voxel_volume
    }

    /// Total masked volume.
    pub fn masked_volume(&self) -> T {
        self.voxel_volume * T::count(self.len())
    }

    /// Radius of the ball with the volume of one voxel.
    pub fn equivalent_radius(&self) -> T {
        (T::lit(3.0) * self.voxel_volume / (T::lit(4.0) * T::PI())).cbrt()
    }

    /// Position of the masked voxel nearest to `p`.
    pub fn nearest_voxel(&self, p: &Vec3<T>) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, c) in self.centers.iter().enumerate() {
            let d = crate::vec3::dist(c, p);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Two grids are compatible when they discretize the same voxels.
    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.shape == other.shape
                && self.bounds.min == other.bounds.min
                && self.spacing == other.spacing
                && self.mask == other.mask)
    }
}

impl<T: Real> PartialEq for DomainGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

fn center_of<T: Real>(min: &Vec3<T>, spacing: &Vec3<T>, idx: [usize; 3]) -> Vec3<T> {
    std::array::from_fn(|i| min[i] + (T::count(idx[i]) + T::lit(0.5)) * spacing[i])
}

#[allow(clippy::needless_range_loop)]
fn validate_box<T: Real>(bounds: &Aabb<T>, shape: &[usize; 3]) -> Result<()> {
    for i in 0..3 {
        let (lo, hi) = (bounds.min[i], bounds.max[i]);
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateBox { axis: i, min: lo.as_f64(), max: hi.as_f64() });
        }
        if shape[i] < 2 {
            return Err(Error::TooFewVoxels { axis: i, count: shape[i] });
        }
    }
    Ok(())
}
