//! One areal weight adjustment on a hand-made population with a gap in its front.

use moead_aawa::aawa::{adjust, awa_weight, update_archive, EliteArchive, WeightRule};
use moead_aawa::moead::{Individual, ReferencePoint, Subproblem};
use moead_aawa::{ControlGenome, ObjectivePair, ViolationReport};

fn ind(f: [f64; 2]) -> Individual {
    Individual::new(ControlGenome::new(vec![]), ObjectivePair::new(f[0], f[1]), ViolationReport::feasible())
}

fn main() -> moead_aawa::Result<()> {
    let z = ReferencePoint::new(vec![0.0, 0.0]);
    // crowded at the ends, empty in the middle; each weight points at its incumbent
    let front = [[0.0, 1.0], [0.02, 0.9], [0.04, 0.85], [0.06, 0.8], [0.8, 0.06], [0.85, 0.04], [0.9, 0.02], [1.0, 0.0]];
    let mut subs = front
        .iter()
        .map(|f| Ok(Subproblem::new(awa_weight(f, &z)?, ind(*f), &z)))
        .collect::<moead_aawa::Result<Vec<_>>>()?;
    let mut archive = EliteArchive::for_population(front.len());
    update_archive(&mut archive, &[ind([0.3, 0.4]), ind([0.45, 0.3]), ind([0.2, 0.5])]);

    let swapped = adjust(&mut subs, &mut archive, 2, &z, WeightRule::Areal)?;
    println!("swapped {swapped} subproblems");
    for s in &subs {
        let [f1, f2] = s.incumbent.f();
        let w = s.weight.components();
        println!("f = ({f1:.2}, {f2:.2})  weight = ({:.3}, {:.3})", w[0], w[1]);
    }
    Ok(())
}
