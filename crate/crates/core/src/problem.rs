//! Bi-objective UAV path scoring: path length, terrain threat and normalised
//! constraint violation, evaluated against a shared [`TerrainGrid`].

use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Bounds, ControlGenome};
use crate::geometry::Point3;
use crate::spline::{PathEndpoints, PathSample, SplineBasis, SplineConfig};
use crate::terrain::TerrainGrid;

/// `(f1, f2)`: path length and threat degree, both minimised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub length: f64,
    pub threat: f64,
}

impl ObjectivePair {
    pub const fn new(length: f64, threat: f64) -> Self {
        Self { length, threat }
    }

    pub fn values(&self) -> [f64; 2] {
        [self.length, self.threat]
    }
}

/// Raw violation counts, their normalised forms and the total `g = g1' + g2' + g3'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub altitude: usize,
    pub turning: usize,
    pub climbing: usize,
    pub altitude_norm: f64,
    pub turning_norm: f64,
    pub climbing_norm: f64,
    pub total: f64,
}

impl ViolationReport {
    pub const fn feasible() -> Self {
        Self {
            altitude: 0,
            turning: 0,
            climbing: 0,
            altitude_norm: 0.0,
            turning_norm: 0.0,
            climbing_norm: 0.0,
            total: 0.0,
        }
    }

    /// Normalises each count by its number of checks (a check count of 0 gives 0).
    pub fn from_counts(counts: [usize; 3], checks: [usize; 3]) -> Self {
        let norm = |c: usize, n: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };
        let altitude_norm = norm(counts[0], checks[0]);
        let turning_norm = norm(counts[1], checks[1]);
        let climbing_norm = norm(counts[2], checks[2]);
        Self {
            altitude: counts[0],
            turning: counts[1],
            climbing: counts[2],
            altitude_norm,
            turning_norm,
            climbing_norm,
            total: altitude_norm + turning_norm + climbing_norm,
        }
    }

    /// A report carrying only a total; used by synthetic test problems.
    pub fn with_total(total: f64) -> Self {
        Self {
            total,
            ..Self::feasible()
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.total == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub r_safe: f64,
    /// Maximum horizontal turning angle (radians).
    pub max_turn: f64,
    /// Maximum climbing slope (radians).
    pub max_climb: f64,
    pub endpoints: PathEndpoints,
    pub spline: SplineConfig,
    pub bounds: Bounds,
}

impl ProblemConfig {
    /// 45 degree turning and climbing limits, default spline.
    pub fn new(r_safe: f64, endpoints: PathEndpoints, bounds: Bounds) -> Self {
        Self {
            r_safe,
            max_turn: FRAC_PI_4,
            max_climb: FRAC_PI_4,
            endpoints,
            spline: SplineConfig::default(),
            bounds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_safe > 0.0 && self.r_safe.is_finite()) {
            return Err(Error::validation("r_safe must be positive"));
        }
        let angle_ok = |a: f64| a > 0.0 && a <= std::f64::consts::PI;
        if !angle_ok(self.max_turn) || !angle_ok(self.max_climb) {
            return Err(Error::validation("angle limits must lie in (0, pi]"));
        }
        if !self.bounds.len().is_multiple_of(3) {
            return Err(Error::validation("bounds must cover whole 3-D control points"));
        }
        self.spline.validate()
    }

    pub fn dop(&self) -> usize {
        self.bounds.len() / 3
    }
}

/// Sum of segment lengths.
pub fn path_length(sample: &PathSample) -> f64 {
    sample.deltas().iter().map(|d| d.norm()).sum()
}

/// `sum_i sum_j (r_safe / r_ij)^2` over the grid nodes within horizontal distance
/// `r_safe` of each path point; `r_ij` is the 3-D distance. A path point sitting on
/// a node yields `+inf`.
pub fn threat_degree(sample: &PathSample, grid: &TerrainGrid, r_safe: f64) -> f64 {
    let r2 = r_safe * r_safe;
    let mut total = 0.0;
    for &p in sample.points() {
        grid.for_each_point_within(p, r_safe, |node| {
            let d = p - node;
            let dist2 = d.x * d.x + d.y * d.y + d.z * d.z;
            total += if dist2 == 0.0 { f64::INFINITY } else { r2 / dist2 };
        });
    }
    total
}

/// Horizontal turning angle between two consecutive segments; 0 when either has
/// no horizontal extent.
pub fn turning_angle(prev: Point3, next: Point3) -> f64 {
    let a = prev.horizontal_norm();
    let b = next.horizontal_norm();
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let cos = (prev.x * next.x + prev.y * next.y) / (a * b);
    cos.clamp(-1.0, 1.0).acos()
}

/// Climbing slope of a segment: `atan(|dz| / horizontal)`, pi/2 for a vertical step.
pub fn climbing_slope(delta: Point3) -> f64 {
    delta.z.abs().atan2(delta.horizontal_norm())
}

pub fn check_constraints(sample: &PathSample, grid: &TerrainGrid, cfg: &ProblemConfig) -> Result<ViolationReport> {
    let points = sample.points();
    let deltas = sample.deltas();
    let s = deltas.len();

    let mut altitude = 0;
    for p in points {
        if p.z - grid.elevation_at(p.x, p.y)? <= cfg.r_safe {
            altitude += 1;
        }
    }
    let turning = deltas
        .windows(2)
        .filter(|w| {
            let a = turning_angle(w[0], w[1]);
            !(0.0..=cfg.max_turn).contains(&a)
        })
        .count();
    let climbing = deltas
        .iter()
        .filter(|d| !(0.0..=cfg.max_climb).contains(&climbing_slope(**d)))
        .count();

    Ok(ViolationReport::from_counts(
        [altitude, turning, climbing],
        [s + 1, s.saturating_sub(1), s],
    ))
}

/// Per-point diagnostics for debugging a single path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub index: usize,
    pub z: f64,
    pub terrain_z: f64,
    /// Turning angle at this point (interior points only).
    pub alpha: Option<f64>,
    /// Slope of the segment arriving at this point.
    pub beta: Option<f64>,
    pub threat: f64,
}

pub fn evaluation_trace(sample: &PathSample, grid: &TerrainGrid, r_safe: f64) -> Result<Vec<TraceRow>> {
    let points = sample.points();
    let deltas = sample.deltas();
    points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut threat = 0.0;
            grid.for_each_point_within(p, r_safe, |node| {
                let d = p.distance(node);
                threat += if d == 0.0 { f64::INFINITY } else { (r_safe / d).powi(2) };
            });
            Ok(TraceRow {
                index: i,
                z: p.z,
                terrain_z: grid.elevation_at(p.x, p.y)?,
                alpha: (i >= 1 && i < deltas.len()).then(|| turning_angle(deltas[i - 1], deltas[i])),
                beta: (i >= 1).then(|| climbing_slope(deltas[i - 1])),
                threat,
            })
        })
        .collect()
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "z", "terrain_z", "alpha", "beta", "threat"])
        .map_err(|e| Error::Format(e.to_string()))?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.z.to_string(),
            r.terrain_z.to_string(),
            opt(r.alpha),
            opt(r.beta),
            r.threat.to_string(),
        ])
        .map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Anything the optimisers can minimise: a box-bounded genome mapped to two
/// objectives and a constraint-violation report.
pub trait Problem: Sync {
    fn bounds(&self) -> &Bounds;
    fn evaluate(&self, genome: &ControlGenome) -> Result<(ObjectivePair, ViolationReport)>;
}

/// The UAV path-planning problem over one terrain.
#[derive(Debug, Clone)]
pub struct UavProblem {
    grid: Arc<TerrainGrid>,
    cfg: ProblemConfig,
    basis: SplineBasis,
}

impl UavProblem {
    pub fn new(grid: Arc<TerrainGrid>, cfg: ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        for p in [cfg.endpoints.start, cfg.endpoints.target] {
            if !grid.contains(p.x, p.y) {
                return Err(Error::validation(format!(
                    "endpoint ({}, {}) outside the terrain",
                    p.x, p.y
                )));
            }
        }
        let basis = SplineBasis::new(cfg.dop() + 2, cfg.spline)?;
        Ok(Self { grid, cfg, basis })
    }

    pub fn grid(&self) -> &TerrainGrid {
        &self.grid
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn sample(&self, genome: &ControlGenome) -> Result<PathSample> {
        self.basis.sample_genome(genome, &self.cfg.endpoints)
    }

    pub fn trace(&self, genome: &ControlGenome) -> Result<Vec<TraceRow>> {
        evaluation_trace(&self.sample(genome)?, &self.grid, self.cfg.r_safe)
    }
}

impl Problem for UavProblem {
    fn bounds(&self) -> &Bounds {
        &self.cfg.bounds
    }

    fn evaluate(&self, genome: &ControlGenome) -> Result<(ObjectivePair, ViolationReport)> {
        self.cfg.bounds.check(genome)?;
        let sample = self.sample(genome)?;
        let objectives = ObjectivePair::new(
            path_length(&sample),
            threat_degree(&sample, &self.grid, self.cfg.r_safe),
        );
        let violation = check_constraints(&sample, &self.grid, &self.cfg)?;
        Ok((objectives, violation))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::GridShape;

    fn flat(cell: f64, n: usize) -> TerrainGrid {
        TerrainGrid::from_fn([0.0, 0.0], cell, GridShape::new(n, n), |_, _| 0.0).unwrap()
    }

    #[test]
    fn length_of_straight_and_bent_paths() {
        let straight = PathSample::new(
            (0..=10)
                .map(|i| Point3::new(0.3 * i as f64, 0.4 * i as f64, 0.0))
                .collect(),
        );
        assert!((path_length(&straight) - 5.0).abs() < 1e-12);
        let bent = PathSample::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
        ]);
        assert_eq!(path_length(&bent), 2.0);
        let mut rev = bent.points().to_vec();
        rev.reverse();
        assert_eq!(path_length(&PathSample::new(rev)), 2.0);
    }

    #[test]
    fn threat_zero_far_from_nodes() {
        // radius 0.1 around points centred between nodes of a unit grid
        let g = flat(1.0, 5);
        let p = PathSample::new(vec![Point3::new(1.5, 1.5, 5.0), Point3::new(2.5, 2.5, 5.0)]);
        assert_eq!(threat_degree(&p, &g, 0.1), 0.0);
    }

    #[test]
    fn threat_single_point_at_r_safe() {
        // only the node under the point is in range; distance is the altitude
        let g = flat(10.0, 3);
        let p = PathSample::new(vec![Point3::new(10.0, 10.0, 2.0)]);
        assert_eq!(threat_degree(&p, &g, 2.0), 1.0);
    }

    #[test]
    fn threat_two_points() {
        // one node in range of each point, at distances r_safe and r_safe/2
        let g = flat(1.0, 3);
        let p = PathSample::new(vec![Point3::new(0.0, 0.0, 0.9), Point3::new(2.0, 2.0, 0.45)]);
        assert!((threat_degree(&p, &g, 0.9) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_point_is_infinite_threat() {
        let g = flat(1.0, 3);
        let p = PathSample::new(vec![Point3::new(1.0, 1.0, 0.0)]);
        assert_eq!(threat_degree(&p, &g, 0.5), f64::INFINITY);
    }

    fn cfg(r_safe: f64) -> ProblemConfig {
        let ends = PathEndpoints::new(Point3::new(0.0, 0.0, 10.0), Point3::new(9.0, 0.0, 10.0)).unwrap();
        let bounds = Bounds::for_points(1, Point3::new(0.0, 0.0, 0.0), Point3::new(10.0, 10.0, 20.0)).unwrap();
        ProblemConfig::new(r_safe, ends, bounds)
    }

    #[test]
    fn high_straight_path_is_feasible() {
        let g = flat(1.0, 11);
        let p = PathSample::new((0..10).map(|i| Point3::new(i as f64, 0.0, 10.0)).collect());
        let v = check_constraints(&p, &g, &cfg(1.0)).unwrap();
        assert_eq!(v, ViolationReport::feasible());
        assert!(v.is_feasible());
    }

    #[test]
    fn collinear_turn_is_zero_and_right_angle_violates() {
        assert_eq!(turning_angle(Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 0.0, 5.0)), 0.0);
        let g = flat(1.0, 11);
        let p = PathSample::new(vec![
            Point3::new(1.0, 1.0, 10.0),
            Point3::new(2.0, 1.0, 10.0),
            Point3::new(2.0, 2.0, 10.0),
        ]);
        let v = check_constraints(&p, &g, &cfg(1.0)).unwrap();
        assert_eq!(v.turning, 1);
        assert_eq!(v.turning_norm, 1.0);
        assert_eq!(v.total, 1.0);
    }

    #[test]
    fn degenerate_segments() {
        assert_eq!(turning_angle(Point3::new(0.0, 0.0, 1.0), Point3::new(1.0, 0.0, 0.0)), 0.0);
        assert_eq!(climbing_slope(Point3::new(0.0, 0.0, 2.0)), std::f64::consts::FRAC_PI_2);
        assert_eq!(climbing_slope(Point3::new(0.0, 0.0, 0.0)), 0.0);
        assert!((climbing_slope(Point3::new(1.0, 0.0, -1.0)) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn low_points_count_as_altitude_violations() {
        let g = flat(1.0, 11);
        let p = PathSample::new(vec![
            Point3::new(1.0, 1.0, 0.5),
            Point3::new(2.0, 1.0, 1.0),
            Point3::new(3.0, 1.0, 1.5),
        ]);
        let v = check_constraints(&p, &g, &cfg(1.0)).unwrap();
        assert_eq!(v.altitude, 2);
        assert!((v.altitude_norm - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalised_parts_are_bounded() {
        let v = ViolationReport::from_counts([151, 149, 150], [151, 149, 150]);
        assert_eq!(v.total, 3.0);
        let v = ViolationReport::from_counts([0, 0, 0], [1, 0, 1]);
        assert_eq!(v.total, 0.0);
    }
}
