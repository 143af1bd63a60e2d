use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GridShape, TerrainGrid};
use crate::error::{Error, Result};

/// Coefficients of the rolling base surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerrainCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for TerrainCoefficients {
    fn default() -> Self {
        Self {
            a: 3.0 * PI,
            b: 0.1,
            c: 0.3,
            d: 0.9,
            e: 0.5,
            f: 0.5,
        }
    }
}

/// `sin(y + a) + b sin(x) + c cos(y) + d cos(e r) + f sin(f r)` with `r = |(x, y)|`.
pub fn base_surface(k: &TerrainCoefficients, x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    (y + k.a).sin() + k.b * x.sin() + k.c * y.cos() + k.d * (k.e * r).cos() + k.f * (k.f * r).sin()
}

/// A Gaussian-shaped mountain: `height * exp(-((x-x0)/slope_x)^2 - ((y-y0)/slope_y)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountainObstacle {
    pub center: [f64; 2],
    pub height: f64,
    pub slope_x: f64,
    pub slope_y: f64,
}

impl MountainObstacle {
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let u = (x - self.center[0]) / self.slope_x;
        let v = (y - self.center[1]) / self.slope_y;
        self.height * (-(u * u) - v * v).exp()
    }
}

/// Mountain environment: base surface merged (by max) with a sum of obstacles.
///
/// The base surface is evaluated at `(x / horizontal_scale, y / horizontal_scale)`
/// and multiplied by `vertical_scale`; both default to 1 (the raw surface in
/// world units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MountainSpec {
    #[serde(default)]
    pub coefficients: TerrainCoefficients,
    pub obstacles: Vec<MountainObstacle>,
    #[serde(default = "one")]
    pub horizontal_scale: f64,
    #[serde(default = "one")]
    pub vertical_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl MountainSpec {
    pub fn new(obstacles: Vec<MountainObstacle>) -> Self {
        Self {
            coefficients: TerrainCoefficients::default(),
            obstacles,
            horizontal_scale: 1.0,
            vertical_scale: 1.0,
        }
    }

    pub fn with_scales(mut self, horizontal: f64, vertical: f64) -> Self {
        self.horizontal_scale = horizontal;
        self.vertical_scale = vertical;
        self
    }

    pub fn validate(&self, extent: [f64; 2]) -> Result<()> {
        if !(self.horizontal_scale > 0.0 && self.vertical_scale.is_finite()) {
            return Err(Error::validation("mountain surface scales must be positive"));
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.height > 0.0 && o.height.is_finite()) {
                return Err(Error::validation(format!(
                    "obstacle {i}: height must be positive, got {}",
                    o.height
                )));
            }
            if !(o.slope_x > 0.0 && o.slope_y > 0.0) {
                return Err(Error::validation(format!(
                    "obstacle {i}: slope parameters must be positive, got ({}, {})",
                    o.slope_x, o.slope_y
                )));
            }
            let [cx, cy] = o.center;
            if !(0.0..=extent[0]).contains(&cx) || !(0.0..=extent[1]).contains(&cy) {
                return Err(Error::validation(format!(
                    "obstacle {i}: center ({cx}, {cy}) outside the map extent"
                )));
            }
        }
        Ok(())
    }

    pub fn base_height(&self, x: f64, y: f64) -> f64 {
        let s = self.horizontal_scale;
        self.vertical_scale * base_surface(&self.coefficients, x / s, y / s)
    }

    pub fn obstacle_height(&self, x: f64, y: f64) -> f64 {
        self.obstacles.iter().map(|o| o.height_at(x, y)).sum()
    }

    /// Merged height; with no obstacles the base surface is returned unclipped.
    pub fn height(&self, x: f64, y: f64) -> f64 {
        let base = self.base_height(x, y);
        if self.obstacles.is_empty() {
            base
        } else {
            base.max(self.obstacle_height(x, y))
        }
    }
}

/// Rasterises a mountain environment on a grid anchored at the origin.
pub fn synth_mountain(spec: &MountainSpec, shape: GridShape, cell_size: f64) -> Result<TerrainGrid> {
    if shape.rows < 2 || shape.cols < 2 {
        return Err(Error::validation("grid shape must be at least 2x2"));
    }
    let extent = [
        (shape.cols - 1) as f64 * cell_size,
        (shape.rows - 1) as f64 * cell_size,
    ];
    spec.validate(extent)?;
    TerrainGrid::from_fn([0.0, 0.0], cell_size, shape, |x, y| spec.height(x, y))
}

/// Draws `count` obstacles: heights uniform in [0.3, 0.9] x `height_budget`, slopes
/// uniform in [5%, 15%] of the map extent, centres uniform in the middle 80% of the map.
pub fn random_mountain_spec<R: Rng + ?Sized>(
    count: usize,
    extent: [f64; 2],
    height_budget: f64,
    rng: &mut R,
) -> MountainSpec {
    let obstacles = (0..count)
        .map(|_| MountainObstacle {
            center: [
                rng.random_range(0.1 * extent[0]..=0.9 * extent[0]),
                rng.random_range(0.1 * extent[1]..=0.9 * extent[1]),
            ],
            height: rng.random_range(0.3 * height_budget..=0.9 * height_budget),
            slope_x: rng.random_range(0.05 * extent[0]..=0.15 * extent[0]),
            slope_y: rng.random_range(0.05 * extent[1]..=0.15 * extent[1]),
        })
        .collect();
    MountainSpec::new(obstacles)
}
