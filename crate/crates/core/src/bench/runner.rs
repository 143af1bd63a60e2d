//! Plan execution, result persistence and report generation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::ControlGenome;
use crate::metrics::{case_metrics, score_and_rank, write_csv, write_table_csv, MetricRow, Ranking};
use crate::optimizer::{run, Algorithm, RunConfig};
use crate::spline::{sample_path, PathEndpoints, SplineConfig};

use super::plan::{derive_seed, ExperimentPlan};
use super::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontMember {
    pub length: f64,
    pub threat: f64,
    pub genome: ControlGenome,
}

/// Everything persisted about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub generations: usize,
    pub adjustments: usize,
    pub endpoints: PathEndpoints,
    pub spline: SplineConfig,
    pub config: RunConfig,
    pub front: Vec<FrontMember>,
}

impl RunRecord {
    pub fn front_points(&self) -> Vec<[f64; 2]> {
        self.front.iter().map(|m| [m.length, m.threat]).collect()
    }

    fn file_name(&self) -> PathBuf {
        Path::new("results")
            .join(&self.scenario)
            .join(self.algorithm.as_str())
            .join(format!("run_{:02}.toml", self.run))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Outcome of [`run_plan`].
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub records: Vec<RunRecord>,
    pub failures: Vec<String>,
    pub ranking: Ranking,
}

/// Runs one (scenario, algorithm, run) cell.
pub fn run_cell(scenario: &Scenario, algorithm: Algorithm, run_index: usize, plan: &ExperimentPlan) -> Result<RunRecord> {
    let spec = &scenario.spec;
    let seed = derive_seed(plan.base_seed, &spec.id, algorithm, run_index);
    let cfg = RunConfig::for_population(algorithm, plan.population, plan.eval_budget.unwrap_or(spec.budget), seed);
    let problem = scenario.problem()?;
    let result = run(&problem, &cfg)?;
    Ok(RunRecord {
        scenario: spec.id.clone(),
        algorithm,
        run: run_index,
        seed,
        evaluations: result.evaluations,
        generations: result.generations,
        adjustments: result.adjustments,
        endpoints: scenario.config.endpoints,
        spline: scenario.config.spline,
        config: cfg,
        front: result
            .front
            .into_iter()
            .map(|i| FrontMember {
                length: i.objectives.length,
                threat: i.objectives.threat,
                genome: i.genome,
            })
            .collect(),
    })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Executes every cell of `plan` on `jobs` worker threads, persisting each run
/// under `out/results/` and writing the metric tables and plot data.
///
/// Failed cells are listed in `out/failures.log`; wall-clock times go to
/// `out/timing.log` so every other file is reproducible byte for byte.
pub fn run_plan(plan: &ExperimentPlan, out: &Path, jobs: usize) -> Result<PlanReport> {
    plan.validate()?;
    let started = Instant::now();
    let specs = plan.scenario_specs()?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_file(
        &out.join("plan.toml"),
        toml::to_string(plan).map_err(|e| Error::Format(e.to_string()))?.as_bytes(),
    )?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::validation(e.to_string()))?;

    let mut failures = Vec::new();
    let scenarios: Vec<Scenario> = pool.install(|| {
        specs
            .par_iter()
            .map(|s| s.build().map_err(|e| format!("{}: scenario build failed: {e}", s.id)))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .filter_map(|r| r.map_err(|e| failures.push(e)).ok())
    .collect();

    let cells: Vec<(&Scenario, Algorithm, usize)> = scenarios
        .iter()
        .flat_map(|s| {
            plan.algorithms
                .iter()
                .flat_map(move |&a| (0..plan.runs).map(move |r| (s, a, r)))
        })
        .collect();

    let outcomes: Vec<(String, Result<RunRecord>, f64)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(s, alg, r)| {
                let t0 = Instant::now();
                let label = format!("{} {} run {}", s.spec.id, alg, r);
                let rec = run_cell(s, alg, r, plan).and_then(|rec| {
                    write_file(&out.join(rec.file_name()), rec.to_toml()?.as_bytes())?;
                    Ok(rec)
                });
                (label, rec, t0.elapsed().as_secs_f64())
            })
            .collect()
    });

    let mut timing = String::new();
    let mut records = Vec::new();
    for (label, rec, secs) in outcomes {
        let _ = writeln!(timing, "{label}: {secs:.3} s");
        match rec {
            Ok(r) => records.push(r),
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    let failure_log: String = failures.iter().map(|f| format!("{f}\n")).collect();
    write_file(&out.join("failures.log"), failure_log.as_bytes())?;

    let ranking = write_reports(out, &records)?;
    let _ = writeln!(timing, "total: {:.3} s", started.elapsed().as_secs_f64());
    write_file(&out.join("timing.log"), timing.as_bytes())?;
    Ok(PlanReport {
        records,
        failures,
        ranking,
    })
}

fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut v: Vec<&RunRecord> = records.iter().collect();
    v.sort_by(|a, b| (&a.scenario, a.algorithm, a.run).cmp(&(&b.scenario, b.algorithm, b.run)));
    v
}

fn metric_rows(records: &[&RunRecord]) -> Vec<MetricRow> {
    let mut by_case: BTreeMap<&str, Vec<(String, usize, Vec<[f64; 2]>)>> = BTreeMap::new();
    for r in records {
        by_case
            .entry(&r.scenario)
            .or_default()
            .push((r.algorithm.as_str().to_string(), r.run, r.front_points()));
    }
    by_case
        .into_iter()
        .flat_map(|(case, fronts)| case_metrics(case, &fronts))
        .collect()
}

/// Writes `metrics.csv`, `summary.csv`, `table.csv`, `ranking.csv` and the plot
/// data under `out/plots/`.
pub fn write_reports(out: &Path, records: &[RunRecord]) -> Result<Ranking> {
    let records = sorted(records);
    let rows = metric_rows(&records);
    let ranking = score_and_rank(&rows);

    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    write_file(&out.join("metrics.csv"), &buf)?;
    buf.clear();
    write_csv(&ranking.cases, &mut buf)?;
    write_file(&out.join("summary.csv"), &buf)?;
    buf.clear();
    write_csv(&ranking.overall, &mut buf)?;
    write_file(&out.join("ranking.csv"), &buf)?;
    buf.clear();
    let mut algs: Vec<Algorithm> = records.iter().map(|r| r.algorithm).collect();
    algs.dedup();
    algs.sort();
    algs.dedup();
    let names: Vec<String> = algs.iter().map(|a| a.as_str().to_string()).collect();
    write_table_csv(&ranking, &names, &mut buf)?;
    write_file(&out.join("table.csv"), &buf)?;

    write_plots(out, &records, &ranking)?;
    Ok(ranking)
}

/// Per case and algorithm, the median run's front and its shortest (min f1) and
/// safest (min f2) paths. Returns the files written.
fn write_plots(out: &Path, records: &[&RunRecord], ranking: &Ranking) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for c in &ranking.cases {
        let Some(rec) = records
            .iter()
            .find(|r| r.scenario == c.case && r.algorithm.as_str() == c.algorithm && r.run == c.median_run)
        else {
            continue;
        };
        let dir = out.join("plots").join(&c.case);
        let mut buf = Vec::new();
        write_csv(
            &rec.front
                .iter()
                .map(|m| FrontPoint {
                    length: m.length,
                    threat: m.threat,
                })
                .collect::<Vec<_>>(),
            &mut buf,
        )?;
        let p = dir.join(format!("{}_front.csv", c.algorithm));
        write_file(&p, &buf)?;
        written.push(p);

        let shortest = rec.front.iter().min_by(|a, b| a.length.total_cmp(&b.length));
        let safest = rec.front.iter().min_by(|a, b| a.threat.total_cmp(&b.threat));
        for (tag, member) in [("shortest", shortest), ("safest", safest)] {
            let Some(m) = member else { continue };
            let mut buf = Vec::new();
            sample_path(&m.genome, &rec.endpoints, rec.spline)?.write_csv(&mut buf)?;
            let p = dir.join(format!("{}_{tag}.csv", c.algorithm));
            write_file(&p, &buf)?;
            written.push(p);
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct FrontPoint {
    length: f64,
    threat: f64,
}

fn run_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let root = dir.join("results");
    let mut files = Vec::new();
    let read = |p: &Path| -> Result<Vec<PathBuf>> {
        let mut v: Vec<PathBuf> = fs::read_dir(p)
            .map_err(|e| Error::io(p, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        v.sort();
        Ok(v)
    };
    if !root.is_dir() {
        return Ok(files);
    }
    for case in read(&root)?.into_iter().filter(|p| p.is_dir()) {
        for alg in read(&case)?.into_iter().filter(|p| p.is_dir()) {
            files.extend(
                read(&alg)?
                    .into_iter()
                    .filter(|p| p.extension().is_some_and(|e| e == "toml")),
            );
        }
    }
    Ok(files)
}

/// Loads every run record under `dir/results/`, skipping unreadable ones with a
/// warning on stderr.
pub fn load_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for path in run_files(dir)? {
        let parsed = fs::read_to_string(&path)
            .map_err(|e| Error::io(&path, e))
            .and_then(|t| RunRecord::from_toml(&t));
        match parsed {
            Ok(r) => records.push(r),
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
    }
    if records.is_empty() {
        return Err(Error::validation(format!("no run records found under {}", dir.display())));
    }
    Ok(records)
}

/// Recomputes all metric tables from the records under `dir`, writing them to
/// `out` (default `dir`).
pub fn cmd_metrics(dir: &Path, out: Option<&Path>) -> Result<Ranking> {
    let records = load_records(dir)?;
    write_reports(out.unwrap_or(dir), &records)
}

/// Re-exports the median-run fronts and shortest/safest paths from `dir` into
/// `out` (default `dir`).
pub fn export_paths(dir: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let records = load_records(dir)?;
    let sorted = sorted(&records);
    let ranking = score_and_rank(&metric_rows(&sorted));
    write_plots(out.unwrap_or(dir), &sorted, &ranking)
}
