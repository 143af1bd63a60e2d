//! Command-line front end (`generate`, `run`, `metrics`, `export-paths`).

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::optimizer::Algorithm;

use super::plan::ExperimentPlan;
use super::runner::{cmd_metrics, export_paths, run_plan};
use super::scenario::{catalog, load_scenario_file};

#[derive(Debug, Parser)]
#[command(name = "aawa-bench", version, about = "UAV path-planning benchmark for MOEA/D-AAWA")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write terrain heightmaps and scenario descriptors.
    Generate {
        /// Catalog case ids (C1..C24).
        cases: Vec<String>,
        /// Scenario spec file to generate instead of (or besides) catalog cases.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "scenarios")]
        out: PathBuf,
        /// Terrain seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Execute an experiment plan.
    Run {
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Comma-separated subset of aawa,awa,cmoead.
        #[arg(long, value_delimiter = ',')]
        algorithms: Option<Vec<Algorithm>>,
        /// Comma-separated case ids or scenario files.
        #[arg(long, value_delimiter = ',')]
        scenarios: Option<Vec<String>>,
        /// Evaluation budget override.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Recompute metric tables from a result directory.
    Metrics {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export median-run fronts and shortest/safest paths from a result directory.
    ExportPaths {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs a parsed command, printing a short report to stdout.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { cases, spec, out, seed } => {
            let mut specs = cases.iter().map(|c| catalog(c)).collect::<Result<Vec<_>>>()?;
            if let Some(p) = spec {
                specs.push(load_scenario_file(&p)?);
            }
            if specs.is_empty() {
                return Err(Error::validation("nothing to generate: give case ids or --spec"));
            }
            for mut s in specs {
                if let Some(seed) = seed {
                    s.terrain_seed = seed;
                }
                let (grid, desc) = s.build()?.write_to(&out)?;
                println!("{}: {} {}", s.id, grid.display(), desc.display());
            }
        }
        Command::Run {
            plan,
            out,
            seed,
            runs,
            jobs,
            algorithms,
            scenarios,
            budget,
        } => {
            let mut p = match plan {
                Some(path) => ExperimentPlan::load(&path)?,
                None => ExperimentPlan::default(),
            };
            if let Some(s) = seed {
                p.base_seed = s;
            }
            if let Some(r) = runs {
                p.runs = r;
            }
            if let Some(a) = algorithms {
                p.algorithms = a;
            }
            if let Some(s) = scenarios {
                p.scenarios = s;
            }
            if budget.is_some() {
                p.eval_budget = budget;
            }
            let out = out.or_else(|| p.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
            let report = run_plan(&p, &out, jobs)?;
            println!("{} runs written to {}", report.records.len(), out.display());
            for f in &report.failures {
                eprintln!("failed: {f}");
            }
            for o in &report.ranking.overall {
                println!("{:<8} score {:>3}  rank {}", o.algorithm, o.score, o.rank);
            }
        }
        Command::Metrics { dir, out } => {
            let ranking = cmd_metrics(&dir, out.as_deref())?;
            for c in &ranking.cases {
                println!(
                    "{} {:<7} HV {:.4}±{:.4} ({})  PD {:.4}±{:.4} ({})",
                    c.case, c.algorithm, c.hv_mean, c.hv_std, c.hv_rank, c.pd_mean, c.pd_std, c.pd_rank
                );
            }
        }
        Command::ExportPaths { dir, out } => {
            let files = export_paths(&dir, out.as_deref())?;
            println!("{} plot files written", files.len());
        }
    }
    Ok(())
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main_entry() -> i32 {
    match execute(Cli::parse()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
