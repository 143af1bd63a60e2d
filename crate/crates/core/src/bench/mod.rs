//! Benchmark harness: scenario catalog, experiment plans, seeded multi-run
//! execution, result persistence and metric tables.

pub mod cli;
mod plan;
mod runner;
mod scenario;

pub use plan::{derive_seed, ExperimentPlan};
pub use runner::{
    cmd_metrics, export_paths, load_records, run_cell, run_plan, write_reports, FrontMember, PlanReport, RunRecord,
};
pub use scenario::{
    catalog, catalog_ids, load_scenario_file, EnvironmentKind, Scenario, ScenarioDescriptor, ScenarioSpec,
    TerrainSource, CATALOG_SEED_BASE,
};
