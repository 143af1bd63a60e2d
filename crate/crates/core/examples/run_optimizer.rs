//! One MOEA/D-AAWA run on a small urban case; prints the final front.

use moead_aawa::bench::catalog;
use moead_aawa::{run, Algorithm, RunConfig};

fn main() -> moead_aawa::Result<()> {
    let scenario = catalog("C11")?.build()?;
    let problem = scenario.problem()?;
    let cfg = RunConfig::for_population(Algorithm::Aawa, 20, 3000, 42);
    let result = run(&problem, &cfg)?;
    println!(
        "{} evaluations, {} generations, {} adjustments, archive {}",
        result.evaluations,
        result.generations,
        result.adjustments,
        result.archive.len()
    );
    for m in &result.front {
        let [len, threat] = m.f();
        println!("length {len:>8.1} m  threat {threat:>8.3}");
    }
    Ok(())
}
