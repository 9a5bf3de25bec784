//! Uniform cell list for neighbour queries among points.

use std::collections::HashMap;

use crate::scalar::Real;
use crate::vec3::{self, Vec3};

#[derive(Debug)]
pub(crate) struct CellList<T> {
    size: T,
    cells: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<Vec3<T>>,
}

impl<T: Real> CellList<T> {
    pub(crate) fn new(size: T) -> Self {
        Self { size, cells: HashMap::new(), points: Vec::new() }
    }

    pub(crate) fn with_points(size: T, points: &[Vec3<T>]) -> Self {
        let mut list = Self::new(size);
        for p in points {
            list.insert(*p);
        }
        list
    }

    fn key(&self, p: &Vec3<T>) -> [i64; 3] {
        let c = |v: T| (v / self.size).floor().to_i64().unwrap_or(0);
        [c(p[0]), c(p[1]), c(p[2])]
    }

    pub(crate) fn insert(&mut self, p: Vec3<T>) {
        let key = self.key(&p);
        self.cells.entry(key).or_default().push(self.points.len());
        self.points.push(p);
    }

    /// Whether any stored point lies strictly closer than `r ≤ size` to `p`.
    pub(crate) fn any_within(&self, p: &Vec3<T>, r: T) -> bool {
        let key = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&[key[0] + dx, key[1] + dy, key[2] + dz]) {
                        if ids.iter().any(|&i| vec3::dist(&self.points[i], p) < r) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Distance from stored point `i` to its nearest other stored point.
    pub(crate) fn nearest_distance(&self, i: usize) -> Option<T> {
        if self.points.len() < 2 {
            return None;
        }
        let p = self.points[i];
        let key = self.key(&p);
        let mut best = T::infinity();
        let mut ring: i64 = 0;
        loop {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    for dz in -ring..=ring {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                            continue;
                        }
                        if let Some(ids) = self.cells.get(&[key[0] + dx, key[1] + dy, key[2] + dz]) {
                            for &j in ids {
                                if j != i {
                                    best = best.min(vec3::dist(&self.points[j], &p));
                                }
                            }
                        }
                    }
                }
            }
            // every point outside the searched rings is at least `ring·size` away
            if best <= T::count(ring as usize) * self.size {
                return Some(best);
            }
            ring += 1;
        }
    }
}
