//! Constrained bi-objective UAV path planning with MOEA/D and areal weight
//! adaptation (AAWA), plus the benchmark harness used to compare AAWA against
//! AWA and constrained MOEA/D.
//!
//! The pieces, bottom-up:
//!
//! - [`terrain`]: gridded height fields (synthetic mountain, urban, ESRI ASCII DEM).
//! - [`spline`]: clamped B-spline paths from a [`genome::ControlGenome`].
//! - [`problem`]: path length, threat degree and constraint violation.
//! - [`moead`]: weights, Tchebycheff aggregation, variation operators, CDP updates.
//! - [`aawa`]: sparsity levels, the elite archive and weight adjustment.
//! - [`optimizer`]: the full AAWA / AWA / CMOEA/D loop.
//! - [`metrics`]: hypervolume, pure diversity, normalisation and ranking.
//! - [`bench`]: scenario catalog, experiment plans and the CLI backend.

pub mod error;
pub mod aawa;
pub mod bench;
pub mod genome;
pub mod metrics;
pub mod moead;
pub mod optimizer;
pub mod geometry;
pub mod problem;
pub mod spline;
pub mod terrain;

pub use error::{Error, Result};
pub use genome::{Bounds, ControlGenome};
pub use geometry::Point3;
pub use problem::{ObjectivePair, Problem, ProblemConfig, UavProblem, ViolationReport};
pub use spline::{eval_basis, PathEndpoints, PathSample, SplineBasis, SplineConfig};
pub use terrain::TerrainGrid;
pub use moead::{Individual, ReferencePoint, WeightVector};
pub use optimizer::{run, Algorithm, RunConfig, RunResult};
