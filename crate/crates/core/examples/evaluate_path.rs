//! Evaluates the straight line between the endpoints on the first catalog case,
//! raised by increasing fractions of the gap to the altitude ceiling.

use moead_aawa::bench::catalog;
use moead_aawa::{ControlGenome, Problem};

fn main() -> moead_aawa::Result<()> {
    let scenario = catalog("C1")?.build()?;
    let problem = scenario.problem()?;
    let ends = scenario.endpoints();
    let dop = scenario.config.dop();
    let top = scenario.config.bounds.hi(2);

    // Raising the control points alone does not clear the terrain: the spline leaves the
    // low start slowly and cuts through the first peaks, which the threat term punishes.
    for lift in [0.0, 0.05, 0.25, 1.0] {
        let points: Vec<_> = (1..=dop)
            .map(|k| {
                let f = k as f64 / (dop + 1) as f64;
                let mut p = ends.start * (1.0 - f) + ends.target * f;
                p.z += lift * (top - p.z);
                p
            })
            .collect();
        let genome = ControlGenome::from_points(&points);
        let (obj, v) = problem.evaluate(&genome)?;
        println!(
            "lift {lift:>4}: length {:.2} km, threat {:.2}, violations altitude {} turning {} climbing {} (total {:.3})",
            obj.length, obj.threat, v.altitude, v.turning, v.climbing, v.total
        );
    }
    Ok(())
}
