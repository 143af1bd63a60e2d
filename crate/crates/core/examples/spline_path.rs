//! Samples a clamped cubic B-spline through three control points and prints it as CSV.

use moead_aawa::spline::{eval_basis, sample_path};
use moead_aawa::{ControlGenome, PathEndpoints, Point3, SplineConfig};

fn main() -> moead_aawa::Result<()> {
    let ends = PathEndpoints::new(Point3::new(0.0, 0.0, 1.0), Point3::new(10.0, 10.0, 1.0))?;
    let genome = ControlGenome::from_points(&[
        Point3::new(2.0, 6.0, 2.0),
        Point3::new(5.0, 5.0, 3.0),
        Point3::new(8.0, 4.0, 2.0),
    ]);
    let cfg = SplineConfig { samples: 20, ..SplineConfig::default() };
    let path = sample_path(&genome, &ends, cfg)?;

    // five control points, so the parameter runs over [0, 2]
    let (first, w) = eval_basis(5, 3, 1.0);
    println!("# basis at t = 1: controls {first}.. weights {w:?}");
    let mut out = std::io::stdout().lock();
    path.write_csv(&mut out)?;
    Ok(())
}
