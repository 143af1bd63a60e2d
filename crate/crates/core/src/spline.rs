//! Clamped B-spline flight paths.
//!
//! The control polygon is `[start, interior..., target]`; the knot vector is the
//! clamped uniform one, so the sampled path starts and ends exactly on the
//! fixed endpoints.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::ControlGenome;
use crate::geometry::Point3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplineConfig {
    /// Polynomial degree (3 = cubic).
    pub degree: usize,
    /// Number of path segments; the path has `samples + 1` points.
    pub samples: usize,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            degree: 3,
            samples: 150,
        }
    }
}

impl SplineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::validation("spline degree must be at least 1"));
        }
        if self.samples < self.degree + 1 {
            return Err(Error::validation(format!(
                "sample count {} must be at least degree + 1 = {}",
                self.samples,
                self.degree + 1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathEndpoints {
    pub start: Point3,
    pub target: Point3,
}

impl PathEndpoints {
    pub fn new(start: Point3, target: Point3) -> Result<Self> {
        if !(start.is_finite() && target.is_finite()) {
            return Err(Error::validation("path endpoints must be finite"));
        }
        if start == target {
            return Err(Error::validation("start and target coincide"));
        }
        Ok(Self { start, target })
    }
}

/// Sampled flight path with cached segment deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    points: Vec<Point3>,
    deltas: Vec<Point3>,
}

impl PathSample {
    pub fn new(points: Vec<Point3>) -> Self {
        let deltas = points.windows(2).map(|w| w[1] - w[0]).collect();
        Self { points, deltas }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// `deltas()[i] = points[i + 1] - points[i]`.
    pub fn deltas(&self) -> &[Point3] {
        &self.deltas
    }

    /// Number of segments (s).
    pub fn segments(&self) -> usize {
        self.deltas.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z"])
            .map_err(|e| Error::Format(e.to_string()))?;
        for p in &self.points {
            w.write_record([p.x.to_string(), p.y.to_string(), p.z.to_string()])
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Format(e.to_string()))
    }
}

/// Clamped uniform knot vector for `n_ctrl` control points of the given degree:
/// `degree + 1` zeros, interior knots `1, 2, ...`, then `degree + 1` copies of
/// `n_ctrl - degree`.
pub fn clamped_knots(n_ctrl: usize, degree: usize) -> Vec<f64> {
    let last = (n_ctrl - degree) as f64;
    let mut knots = vec![0.0; degree + 1];
    knots.extend((1..n_ctrl - degree).map(|i| i as f64));
    knots.extend(std::iter::repeat_n(last, degree + 1));
    knots
}

/// Cox-de Boor blending function `B_{i,order}(t)`, with `order = 1` the
/// half-open indicator of `[u_i, u_{i+1})`. Terms with a zero denominator are 0.
pub fn basis(i: usize, order: usize, t: f64, knots: &[f64]) -> f64 {
    if order <= 1 {
        return if knots[i] <= t && t < knots[i + 1] { 1.0 } else { 0.0 };
    }
    let left_den = knots[i + order - 1] - knots[i];
    let right_den = knots[i + order] - knots[i + 1];
    let left = if left_den > 0.0 {
        (t - knots[i]) / left_den * basis(i, order - 1, t, knots)
    } else {
        0.0
    };
    let right = if right_den > 0.0 {
        (knots[i + order] - t) / right_den * basis(i + 1, order - 1, t, knots)
    } else {
        0.0
    };
    left + right
}

/// Precomputed sampling matrix for a fixed control-point count and config.
///
/// Row `j` holds the `degree + 1` non-zero basis values at `t_j` and the index of
/// the first control point they apply to.
#[derive(Debug, Clone)]
pub struct SplineBasis {
    n_ctrl: usize,
    degree: usize,
    rows: Vec<(usize, Vec<f64>)>,
}

impl SplineBasis {
    pub fn new(n_ctrl: usize, cfg: SplineConfig) -> Result<Self> {
        cfg.validate()?;
        if n_ctrl < cfg.degree + 1 {
            return Err(Error::validation(format!(
                "{n_ctrl} control points cannot carry a degree-{} spline",
                cfg.degree
            )));
        }
        let p = cfg.degree;
        let knots = clamped_knots(n_ctrl, p);
        let t_max = (n_ctrl - p) as f64;
        let rows = (0..=cfg.samples)
            .map(|j| {
                let t = if j == cfg.samples {
                    t_max
                } else {
                    t_max * j as f64 / cfg.samples as f64
                };
                nonzero_at(n_ctrl, p, t, &knots)
            })
            .collect();
        Ok(Self {
            n_ctrl,
            degree: p,
            rows,
        })
    }

    pub fn control_count(&self) -> usize {
        self.n_ctrl
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn sample(&self, controls: &[Point3]) -> PathSample {
        debug_assert_eq!(controls.len(), self.n_ctrl);
        let points = self
            .rows
            .iter()
            .map(|(first, w)| {
                w.iter()
                    .zip(&controls[*first..])
                    .fold(Point3::default(), |acc, (&b, &c)| acc + c * b)
            })
            .collect();
        PathSample::new(points)
    }

    /// Samples the path defined by `genome` between `ends`.
    pub fn sample_genome(&self, genome: &ControlGenome, ends: &PathEndpoints) -> Result<PathSample> {
        if !genome.len().is_multiple_of(3) || genome.dop() + 2 != self.n_ctrl {
            return Err(Error::validation(format!(
                "genome has {} coordinates, expected {}",
                genome.len(),
                3 * (self.n_ctrl - 2)
            )));
        }
        let mut controls = Vec::with_capacity(self.n_ctrl);
        controls.push(ends.start);
        controls.extend(genome.points());
        controls.push(ends.target);
        Ok(self.sample(&controls))
    }
}

/// The `degree + 1` basis values that are non-zero at parameter `t` of the clamped
/// uniform spline with `n_ctrl` control points (`0 <= t <= n_ctrl - degree`),
/// with the index of the first control point they weight.
pub fn eval_basis(n_ctrl: usize, degree: usize, t: f64) -> (usize, Vec<f64>) {
    nonzero_at(n_ctrl, degree, t, &clamped_knots(n_ctrl, degree))
}

fn nonzero_at(n_ctrl: usize, p: usize, t: f64, knots: &[f64]) -> (usize, Vec<f64>) {
    // span with knots[span] <= t < knots[span+1]; the right end uses the last
    // non-empty span (left-limit convention)
    let span = ((t.max(0.0).floor() as usize) + p).min(n_ctrl - 1);
    (span - p, nonzero_basis(span, t, p, knots))
}

/// Triangular-table evaluation of the `p + 1` basis functions that are non-zero on
/// `span` (Piegl & Tiller, algorithm A2.2).
fn nonzero_basis(span: usize, t: f64, p: usize, knots: &[f64]) -> Vec<f64> {
    let mut n = vec![0.0; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    n[0] = 1.0;
    for j in 1..=p {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let temp = if den != 0.0 { n[r] / den } else { 0.0 };
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    n
}

/// One-shot sampling; prefer a cached [`SplineBasis`] when evaluating many genomes.
pub fn sample_path(genome: &ControlGenome, ends: &PathEndpoints, cfg: SplineConfig) -> Result<PathSample> {
    if !genome.len().is_multiple_of(3) || genome.is_empty() {
        return Err(Error::validation(format!(
            "genome length {} is not a positive multiple of 3",
            genome.len()
        )));
    }
    SplineBasis::new(genome.dop() + 2, cfg)?.sample_genome(genome, ends)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_is_indicator() {
        let knots = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(basis(1, 1, 1.5, &knots), 1.0);
        assert_eq!(basis(1, 1, 1.0, &knots), 1.0);
        assert_eq!(basis(1, 1, 2.0, &knots), 0.0);
        assert_eq!(basis(1, 1, 0.5, &knots), 0.0);
    }

    #[test]
    fn partition_of_unity_inside_domain() {
        let knots = clamped_knots(7, 3);
        for step in 0..40 {
            let t = 4.0 * step as f64 / 40.0;
            let s: f64 = (0..7).map(|i| basis(i, 4, t, &knots)).sum();
            assert!((s - 1.0).abs() < 1e-12, "t={t} sum={s}");
        }
    }

    #[test]
    fn knot_vector_shape() {
        assert_eq!(clamped_knots(4, 3), vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            clamped_knots(6, 2),
            vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0]
        );
    }

    #[test]
    fn table_matches_recursion() {
        let n_ctrl = 7;
        let basis_m = SplineBasis::new(n_ctrl, SplineConfig { degree: 3, samples: 33 }).unwrap();
        let knots = clamped_knots(n_ctrl, 3);
        for (j, (first, w)) in basis_m.rows.iter().enumerate().take(33) {
            let t = 4.0 * j as f64 / 33.0;
            for i in 0..n_ctrl {
                let expected = basis(i, 4, t, &knots);
                let got = if i >= *first && i <= first + 3 { w[i - first] } else { 0.0 };
                assert!((expected - got).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn straight_line_reproduction() {
        let ends = PathEndpoints::new(Point3::new(0.0, 0.0, 0.0), Point3::new(9.0, 3.0, 6.0)).unwrap();
        let dop = 4;
        let interior: Vec<Point3> = (1..=dop)
            .map(|i| ends.start + (ends.target - ends.start) * (i as f64 / (dop + 1) as f64))
            .collect();
        let path = sample_path(&ControlGenome::from_points(&interior), &ends, SplineConfig::default()).unwrap();
        assert_eq!(path.points().len(), 151);
        let dir = ends.target - ends.start;
        for p in path.points() {
            let v = *p - ends.start;
            // cross product with the direction vanishes on the segment
            let cx = v.y * dir.z - v.z * dir.y;
            let cy = v.z * dir.x - v.x * dir.z;
            let cz = v.x * dir.y - v.y * dir.x;
            assert!(cx.abs() < 1e-9 && cy.abs() < 1e-9 && cz.abs() < 1e-9);
        }
    }

    #[test]
    fn clamped_start_with_coincident_interior() {
        let start = Point3::new(1.0, 2.0, 3.0);
        let ends = PathEndpoints::new(start, Point3::new(5.0, 5.0, 5.0)).unwrap();
        let genome = ControlGenome::from_points(&[start, start]);
        let path = sample_path(&genome, &ends, SplineConfig::default()).unwrap();
        assert_eq!(path.points()[0], start);
        assert!(path.points()[150].distance(ends.target) < 1e-12);
    }

    #[test]
    fn genome_length_mismatch() {
        let ends = PathEndpoints::new(Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 1.0, 1.0)).unwrap();
        let b = SplineBasis::new(5, SplineConfig::default()).unwrap();
        let g = ControlGenome::new(vec![0.5; 6]);
        assert!(b.sample_genome(&g, &ends).is_err());
        assert!(sample_path(&ControlGenome::new(vec![0.5; 4]), &ends, SplineConfig::default()).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SplineConfig { degree: 0, samples: 10 }.validate().is_err());
        assert!(SplineConfig { degree: 3, samples: 3 }.validate().is_err());
        assert!(SplineConfig { degree: 3, samples: 4 }.validate().is_ok());
        assert!(SplineBasis::new(3, SplineConfig::default()).is_err());
    }
}
