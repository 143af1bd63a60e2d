//! Runs the three algorithms on one case and ranks them by HV and PD.
//!
//! Usage: `compare_algorithms [case] [runs]` (defaults C11, 3).

use rayon::prelude::*;

use moead_aawa::bench::{catalog, derive_seed};
use moead_aawa::metrics::{case_metrics, score_and_rank};
use moead_aawa::{run, Algorithm, RunConfig};

fn main() -> moead_aawa::Result<()> {
    let mut args = std::env::args().skip(1);
    let case = args.next().unwrap_or_else(|| "C11".into());
    let runs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let scenario = catalog(&case)?.build()?;
    let problem = scenario.problem()?;
    let cells: Vec<(Algorithm, usize)> = Algorithm::ALL
        .iter()
        .flat_map(|&a| (0..runs).map(move |r| (a, r)))
        .collect();
    let fronts = cells
        .par_iter()
        .map(|&(alg, r)| {
            let cfg = RunConfig::for_population(alg, 20, scenario.spec.budget, derive_seed(0, &case, alg, r));
            let front = run(&problem, &cfg)?.front.iter().map(|i| i.f()).collect();
            Ok((alg.as_str().to_string(), r, front))
        })
        .collect::<moead_aawa::Result<Vec<_>>>()?;

    let ranking = score_and_rank(&case_metrics(&case, &fronts));
    for c in &ranking.cases {
        println!(
            "{:<8} HV {:.4} ± {:.4} (rank {})  PD {:.2} ± {:.2} (rank {})",
            c.algorithm, c.hv_mean, c.hv_std, c.hv_rank, c.pd_mean, c.pd_std, c.pd_rank
        );
    }
    Ok(())
}
