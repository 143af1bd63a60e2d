//! Decision vectors: interior control points flattened as `x0, y0, z0, x1, ...`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlGenome {
    coords: Vec<f64>,
}

impl ControlGenome {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn from_points(points: &[Point3]) -> Self {
        Self {
            coords: points.iter().flat_map(|p| [p.x, p.y, p.z]).collect(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Number of interior control points (DOP).
    pub fn dop(&self) -> usize {
        self.coords.len() / 3
    }

    pub fn point(&self, i: usize) -> Point3 {
        Point3::new(self.coords[3 * i], self.coords[3 * i + 1], self.coords[3 * i + 2])
    }

    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        self.coords
            .chunks_exact(3)
            .map(|c| Point3::new(c[0], c[1], c[2]))
    }
}

/// Per-coordinate box `[lo_k, hi_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::validation("bounds need matching, non-empty lo/hi vectors"));
        }
        for (k, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::validation(format!(
                    "bad bound for coordinate {k}: [{l}, {h}]"
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The same 3-D box repeated for `dop` control points.
    pub fn for_points(dop: usize, lo: Point3, hi: Point3) -> Result<Self> {
        let lo = (0..dop).flat_map(|_| [lo.x, lo.y, lo.z]).collect();
        let hi = (0..dop).flat_map(|_| [hi.x, hi.y, hi.z]).collect();
        Self::new(lo, hi)
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn lo(&self, k: usize) -> f64 {
        self.lo[k]
    }

    pub fn hi(&self, k: usize) -> f64 {
        self.hi[k]
    }

    pub fn width(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn contains(&self, genome: &ControlGenome) -> bool {
        genome.len() == self.len()
            && genome
                .coords()
                .iter()
                .enumerate()
                .all(|(k, &v)| v >= self.lo[k] && v <= self.hi[k])
    }

    pub fn check(&self, genome: &ControlGenome) -> Result<()> {
        if genome.len() != self.len() {
            return Err(Error::validation(format!(
                "genome has {} coordinates, bounds expect {}",
                genome.len(),
                self.len()
            )));
        }
        if !self.contains(genome) {
            return Err(Error::validation("genome coordinate outside bounds"));
        }
        Ok(())
    }

    /// Uniform value in `[lo_k, hi_k]`.
    pub fn sample_coord<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> f64 {
        if self.hi[k] > self.lo[k] {
            rng.random_range(self.lo[k]..=self.hi[k])
        } else {
            self.lo[k]
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ControlGenome {
        ControlGenome::new((0..self.len()).map(|k| self.sample_coord(k, rng)).collect())
    }
}
