use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GridShape, TerrainGrid};
use crate::error::{Error, Result};

/// Axis-aligned rectangular building footprint with a flat roof.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prism {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub height: f64,
}

impl Prism {
    /// Footprint containment, with the footprint grown by `margin` on every side.
    pub fn contains(&self, x: f64, y: f64, margin: f64) -> bool {
        x >= self.min[0] - margin
            && x <= self.max[0] + margin
            && y >= self.min[1] - margin
            && y <= self.max[1] + margin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrbanSpec {
    pub prisms: Vec<Prism>,
    /// Protected-zone width added around every footprint.
    #[serde(default)]
    pub protected_width: f64,
}

impl UrbanSpec {
    pub fn validate(&self, extent: [f64; 2]) -> Result<()> {
        if !(self.protected_width >= 0.0 && self.protected_width.is_finite()) {
            return Err(Error::validation("protected width must be non-negative"));
        }
        for (i, p) in self.prisms.iter().enumerate() {
            if !(p.height > 0.0 && p.height.is_finite()) {
                return Err(Error::validation(format!(
                    "prism {i}: height must be positive, got {}",
                    p.height
                )));
            }
            if !(p.min[0] <= p.max[0] && p.min[1] <= p.max[1]) {
                return Err(Error::validation(format!("prism {i}: inverted footprint")));
            }
            let inside = p.min[0] >= 0.0
                && p.min[1] >= 0.0
                && p.max[0] <= extent[0]
                && p.max[1] <= extent[1];
            if !inside {
                return Err(Error::validation(format!(
                    "prism {i}: footprint {:?}-{:?} outside the map extent",
                    p.min, p.max
                )));
            }
        }
        Ok(())
    }

    /// Tallest prism covering `(x, y)`, or 0.
    pub fn height(&self, x: f64, y: f64) -> f64 {
        self.prisms
            .iter()
            .filter(|p| p.contains(x, y, self.protected_width))
            .map(|p| p.height)
            .fold(0.0, f64::max)
    }
}

/// Rasterises an urban environment on a grid anchored at the origin.
pub fn synth_urban(spec: &UrbanSpec, shape: GridShape, cell_size: f64) -> Result<TerrainGrid> {
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

/// Draws `count` prisms with sides uniform in [5%, 15%] of the extent, centres uniform
/// in the middle 80% of the map and heights uniform in [0.3, 0.9] x `height_budget`.
pub fn random_urban_spec<R: Rng + ?Sized>(
    count: usize,
    extent: [f64; 2],
    height_budget: f64,
    protected_width: f64,
    rng: &mut R,
) -> UrbanSpec {
    let prisms = (0..count)
        .map(|_| {
            let cx = rng.random_range(0.1 * extent[0]..=0.9 * extent[0]);
            let cy = rng.random_range(0.1 * extent[1]..=0.9 * extent[1]);
            let w = rng.random_range(0.05 * extent[0]..=0.15 * extent[0]);
            let h = rng.random_range(0.05 * extent[1]..=0.15 * extent[1]);
            let height = rng.random_range(0.3 * height_budget..=0.9 * height_budget);
            Prism {
                min: [(cx - w / 2.0).max(0.0), (cy - h / 2.0).max(0.0)],
                max: [(cx + w / 2.0).min(extent[0]), (cy + h / 2.0).min(extent[1])],
                height,
            }
        })
        .collect();
    UrbanSpec {
        prisms,
        protected_width,
    }
}
