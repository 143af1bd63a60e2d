//! Elevation grids: synthetic mountain and urban generators, ESRI-ASCII ingestion,
//! bilinear elevation lookup and horizontal proximity queries.
//!
//! A [`TerrainGrid`] is node-registered: node `(row, col)` sits at
//! `origin + (col * cell_size, row * cell_size)`, row 0 being the southern edge.
//! Grids are immutable once built and can be shared freely between evaluators.

mod dem;
mod mountain;
mod urban;

pub use dem::{load_dem, parse_dem, save_dem, write_dem, NODATA_DEFAULT};
pub use mountain::{
    base_surface, random_mountain_spec, synth_mountain, MountainObstacle, MountainSpec,
    TerrainCoefficients,
};
pub use urban::{random_urban_spec, synth_urban, Prism, UrbanSpec};

use crate::error::{Error, Result};
use crate::geometry::Point3;

/// Relative widening of the squared radius in neighbourhood queries.
pub const RADIUS_SLACK: f64 = 1e-9;

/// Number of grid nodes along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
}

impl GridShape {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    /// Shape of a grid covering `extent` at `cell_size` spacing (extent must be a
    /// whole multiple of the cell size, up to rounding).
    pub fn covering(extent: [f64; 2], cell_size: f64) -> Self {
        let cols = (extent[0] / cell_size).round() as usize + 1;
        let rows = (extent[1] / cell_size).round() as usize + 1;
        Self { rows, cols }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid {
    origin: [f64; 2],
    cell_size: f64,
    rows: usize,
    cols: usize,
    // row-major, row 0 at y = origin[1]
    elevations: Vec<f64>,
}

impl TerrainGrid {
    pub fn new(
        origin: [f64; 2],
        cell_size: f64,
        shape: GridShape,
        elevations: Vec<f64>,
    ) -> Result<Self> {
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::validation(format!(
                "cell size must be positive and finite, got {cell_size}"
            )));
        }
        if shape.rows < 2 || shape.cols < 2 {
            return Err(Error::validation(format!(
                "grid must be at least 2x2, got {}x{}",
                shape.rows, shape.cols
            )));
        }
        if elevations.len() != shape.rows * shape.cols {
            return Err(Error::validation(format!(
                "expected {} elevations for a {}x{} grid, got {}",
                shape.rows * shape.cols,
                shape.rows,
                shape.cols,
                elevations.len()
            )));
        }
        if let Some(i) = elevations.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite elevation at row {}, col {}",
                i / shape.cols,
                i % shape.cols
            )));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::validation("grid origin must be finite"));
        }
        Ok(Self {
            origin,
            cell_size,
            rows: shape.rows,
            cols: shape.cols,
            elevations,
        })
    }

    /// Builds a grid by sampling `height(x, y)` at every node.
    pub fn from_fn(
        origin: [f64; 2],
        cell_size: f64,
        shape: GridShape,
        height: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut elevations = Vec::with_capacity(shape.rows * shape.cols);
        for row in 0..shape.rows {
            let y = origin[1] + row as f64 * cell_size;
            for col in 0..shape.cols {
                let x = origin[0] + col as f64 * cell_size;
                elevations.push(height(x, y));
            }
        }
        Self::new(origin, cell_size, shape, elevations)
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Width and height in world units.
    pub fn extent(&self) -> [f64; 2] {
        [
            (self.cols - 1) as f64 * self.cell_size,
            (self.rows - 1) as f64 * self.cell_size,
        ]
    }

    pub fn elevations(&self) -> &[f64] {
        &self.elevations
    }

    pub fn height(&self, row: usize, col: usize) -> f64 {
        self.elevations[row * self.cols + col]
    }

    /// World coordinates of a node.
    pub fn node_xy(&self, row: usize, col: usize) -> [f64; 2] {
        [
            self.origin[0] + col as f64 * self.cell_size,
            self.origin[1] + row as f64 * self.cell_size,
        ]
    }

    pub fn min_elevation(&self) -> f64 {
        self.elevations.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_elevation(&self) -> f64 {
        self.elevations
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn slack(&self) -> f64 {
        1e-9 * self.extent()[0].max(self.extent()[1]).max(1.0)
    }

    /// Whether `(x, y)` lies inside the grid extent (with a rounding slack of
    /// 1e-9 of the map size).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let [w, h] = self.extent();
        let eps = self.slack();
        let dx = x - self.origin[0];
        let dy = y - self.origin[1];
        dx >= -eps && dx <= w + eps && dy >= -eps && dy <= h + eps
    }

    /// Bilinear interpolation of the four nodes surrounding `(x, y)`.
    pub fn elevation_at(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::Domain(format!(
                "point ({x}, {y}) lies outside the terrain extent"
            )));
        }
        let fx = ((x - self.origin[0]) / self.cell_size).max(0.0);
        let fy = ((y - self.origin[1]) / self.cell_size).max(0.0);
        let col = (fx.floor() as usize).min(self.cols - 2);
        let row = (fy.floor() as usize).min(self.rows - 2);
        let tx = (fx - col as f64).clamp(0.0, 1.0);
        let ty = (fy - row as f64).clamp(0.0, 1.0);

        let z00 = self.height(row, col);
        let z01 = self.height(row, col + 1);
        let z10 = self.height(row + 1, col);
        let z11 = self.height(row + 1, col + 1);
        let south = z00 + (z01 - z00) * tx;
        let north = z10 + (z11 - z10) * tx;
        Ok(south + (north - south) * ty)
    }

    /// Calls `visit` with every node whose horizontal distance to `center` is at
    /// most `radius`; the node's elevation is the point's z.
    ///
    /// The squared radius is widened by [`RADIUS_SLACK`] so that nodes lying exactly
    /// on the circle are included no matter how the last bit of `center` rounds.
    pub fn for_each_point_within(&self, center: Point3, radius: f64, mut visit: impl FnMut(Point3)) {
        if !(radius >= 0.0) {
            return;
        }
        let lo_c = ((center.x - radius - self.origin[0]) / self.cell_size).ceil();
        let hi_c = ((center.x + radius - self.origin[0]) / self.cell_size).floor();
        let lo_r = ((center.y - radius - self.origin[1]) / self.cell_size).ceil();
        let hi_r = ((center.y + radius - self.origin[1]) / self.cell_size).floor();
        if hi_c < 0.0 || hi_r < 0.0 || lo_c > (self.cols - 1) as f64 || lo_r > (self.rows - 1) as f64
        {
            return;
        }
        // One extra node on each side absorbs rounding in the window bounds.
        let c0 = (lo_c.max(1.0) as usize) - 1;
        let c1 = (hi_c as usize + 1).min(self.cols - 1);
        let r0 = (lo_r.max(1.0) as usize) - 1;
        let r1 = (hi_r as usize + 1).min(self.rows - 1);
        let r2 = radius * radius * (1.0 + RADIUS_SLACK);
        for row in r0..=r1 {
            let y = self.origin[1] + row as f64 * self.cell_size;
            let dy = y - center.y;
            for col in c0..=c1 {
                let x = self.origin[0] + col as f64 * self.cell_size;
                let dx = x - center.x;
                if dx * dx + dy * dy <= r2 {
                    visit(Point3::new(x, y, self.height(row, col)));
                }
            }
        }
    }

    /// Every node within horizontal distance `radius` of `center`.
    pub fn grid_points_within(&self, center: Point3, radius: f64) -> Vec<Point3> {
        let mut out = Vec::new();
        self.for_each_point_within(center, radius, |p| out.push(p));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> TerrainGrid {
        // corners 0,0 (south) and 4,4 (north): constant along x
        TerrainGrid::new(
            [0.0, 0.0],
            1.0,
            GridShape::new(2, 2),
            vec![0.0, 0.0, 4.0, 4.0],
        )
        .unwrap()
    }

    #[test]
    fn node_query_returns_stored_value() {
        let g = TerrainGrid::from_fn([0.0, 0.0], 2.0, GridShape::new(4, 5), |x, y| x * 10.0 + y)
            .unwrap();
        for row in 0..4 {
            for col in 0..5 {
                let [x, y] = g.node_xy(row, col);
                assert_eq!(g.elevation_at(x, y).unwrap(), g.height(row, col));
            }
        }
    }

    #[test]
    fn cell_midpoint_is_bilinear() {
        assert!((ramp().elevation_at(0.5, 0.5).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn outside_extent_is_domain_error() {
        assert!(matches!(ramp().elevation_at(1.5, 0.5), Err(Error::Domain(_))));
        assert!(matches!(ramp().elevation_at(0.5, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn extent_matches_shape() {
        let g = TerrainGrid::from_fn([0.0, 0.0], 0.5, GridShape::new(3, 5), |_, _| 0.0).unwrap();
        assert_eq!(g.extent(), [2.0, 1.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TerrainGrid::new([0.0, 0.0], 0.0, GridShape::new(2, 2), vec![0.0; 4]).is_err());
        assert!(TerrainGrid::new([0.0, 0.0], 1.0, GridShape::new(2, 2), vec![0.0; 3]).is_err());
        assert!(
            TerrainGrid::new([0.0, 0.0], 1.0, GridShape::new(2, 2), vec![0.0, f64::NAN, 0.0, 0.0])
                .is_err()
        );
        assert!(TerrainGrid::new([0.0, 0.0], 1.0, GridShape::new(1, 4), vec![0.0; 4]).is_err());
    }

    #[test]
    fn small_radius_between_nodes_is_empty() {
        let g = TerrainGrid::from_fn([0.0, 0.0], 1.0, GridShape::new(5, 5), |_, _| 0.0).unwrap();
        assert!(g.grid_points_within(Point3::new(1.5, 1.5, 0.0), 0.4).is_empty());
    }

    #[test]
    fn radius_one_cell_on_node_gives_five_points() {
        let g = TerrainGrid::from_fn([0.0, 0.0], 1.0, GridShape::new(5, 5), |_, _| 0.0).unwrap();
        let mut pts: Vec<(i64, i64)> = g
            .grid_points_within(Point3::new(2.0, 2.0, 9.0), 1.0)
            .iter()
            .map(|p| (p.x as i64, p.y as i64))
            .collect();
        pts.sort();
        assert_eq!(pts, vec![(1, 2), (2, 1), (2, 2), (2, 3), (3, 2)]);
    }

    #[test]
    fn huge_radius_returns_all_nodes() {
        let g = TerrainGrid::from_fn([3.0, -2.0], 1.5, GridShape::new(4, 6), |x, y| x - y).unwrap();
        let pts = g.grid_points_within(Point3::new(5.0, 0.0, 0.0), 1e6);
        assert_eq!(pts.len(), 24);
        for p in pts {
            assert_eq!(p.z, p.x - p.y);
        }
    }

    #[test]
    fn query_far_outside_grid_is_empty() {
        let g = TerrainGrid::from_fn([0.0, 0.0], 1.0, GridShape::new(3, 3), |_, _| 0.0).unwrap();
        assert!(g.grid_points_within(Point3::new(-10.0, -10.0, 0.0), 2.0).is_empty());
        assert!(g.grid_points_within(Point3::new(50.0, 1.0, 0.0), 2.0).is_empty());
    }
}
