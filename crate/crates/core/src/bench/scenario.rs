//! The C1–C24 scenario catalog and scenario descriptors.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::Bounds;
use crate::geometry::Point3;
use crate::problem::{ProblemConfig, UavProblem};
use crate::spline::{PathEndpoints, SplineConfig};
use crate::terrain::{
    load_dem, random_mountain_spec, random_urban_spec, save_dem, synth_mountain, synth_urban, GridShape, MountainSpec,
    TerrainGrid, UrbanSpec,
};

/// Base for the default per-case terrain seed.
pub const CATALOG_SEED_BASE: u64 = 0x5EED_0000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvironmentKind {
    Mountain,
    Urban,
    Dem,
}

impl EnvironmentKind {
    /// Default obstacle height budget in map units.
    pub fn height_budget(self) -> f64 {
        match self {
            EnvironmentKind::Mountain => 5.0,
            EnvironmentKind::Urban => 200.0,
            EnvironmentKind::Dem => 1500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    pub kind: EnvironmentKind,
    /// Mountains or buildings; for DEM cases, obstacles of the synthetic stand-in.
    pub obstacles: usize,
    /// Heightmap to load instead of synthesising one (DEM cases).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dem_path: Option<PathBuf>,
    pub extent: [f64; 2],
    pub cell_size: f64,
    pub r_safe: f64,
    pub dop: usize,
    pub budget: usize,
    pub terrain_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Point3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Point3>,
}

/// Case ids in catalog order.
pub fn catalog_ids() -> Vec<String> {
    (1..=24).map(|n| format!("C{n}")).collect()
}

fn case_number(id: &str) -> Option<usize> {
    let n: usize = id.strip_prefix(['C', 'c'])?.parse().ok()?;
    (1..=24).contains(&n).then_some(n)
}

/// Catalog entry for `id` (`C1`..`C24`).
pub fn catalog(id: &str) -> Result<ScenarioSpec> {
    let n = case_number(id).ok_or_else(|| Error::validation(format!("unknown case id '{id}'")))?;
    // budget and DOP per group of cases within an environment
    let schedule = |i: usize| match i {
        1..=3 => (10_000, 2),
        4..=6 => (12_000, 3),
        7..=9 => (14_000, 4),
        _ => (16_000, 5),
    };
    let (kind, obstacles, extent, cell_size, r_safe, (budget, dop)) = match n {
        1..=10 => (EnvironmentKind::Mountain, 2 * n, 200.0, 0.2, 0.2, schedule(n)),
        11..=20 => (EnvironmentKind::Urban, 2 * (n - 10), 2000.0, 10.0, 10.0, schedule(n - 10)),
        _ => (EnvironmentKind::Dem, 3 * (n - 19), 10_000.0, 5.0, 20.0, (10_000, 4)),
    };
    Ok(ScenarioSpec {
        id: format!("C{n}"),
        kind,
        obstacles,
        dem_path: None,
        extent: [extent, extent],
        cell_size,
        r_safe,
        dop,
        budget,
        terrain_seed: CATALOG_SEED_BASE + n as u64,
        height_budget: None,
        start: None,
        target: None,
    })
}

/// How the terrain of a built scenario was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "source")]
pub enum TerrainSource {
    Mountain(MountainSpec),
    Urban(UrbanSpec),
    /// Loaded from an ASCII grid.
    File { path: PathBuf },
}

/// A scenario with its terrain materialised.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub grid: Arc<TerrainGrid>,
    pub terrain: TerrainSource,
    pub config: ProblemConfig,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) {
            return Err(Error::validation(format!("bad scenario id '{}'", self.id)));
        }
        if !(self.extent[0] > 0.0 && self.extent[1] > 0.0 && self.cell_size > 0.0 && self.r_safe > 0.0) {
            return Err(Error::validation("extent, cell size and r_safe must be positive"));
        }
        if self.dop < 2 {
            return Err(Error::validation("at least two interior control points are needed"));
        }
        Ok(())
    }

    fn height_budget_or_default(&self) -> f64 {
        self.height_budget.unwrap_or_else(|| self.kind.height_budget())
    }

    fn synthesize(&self) -> Result<(TerrainGrid, TerrainSource)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.terrain_seed);
        let shape = GridShape::covering(self.extent, self.cell_size);
        let budget = self.height_budget_or_default();
        match self.kind {
            EnvironmentKind::Urban => {
                let spec = random_urban_spec(self.obstacles, self.extent, budget, self.r_safe, &mut rng);
                Ok((synth_urban(&spec, shape, self.cell_size)?, TerrainSource::Urban(spec)))
            }
            EnvironmentKind::Mountain | EnvironmentKind::Dem => {
                let spec = random_mountain_spec(self.obstacles, self.extent, budget, &mut rng)
                    .with_scales(self.extent[0].max(self.extent[1]) / 100.0, budget / 50.0);
                Ok((synth_mountain(&spec, shape, self.cell_size)?, TerrainSource::Mountain(spec)))
            }
        }
    }

    /// Builds the terrain (loading `dem_path` when set) and the problem setup.
    pub fn build(&self) -> Result<Scenario> {
        self.validate()?;
        let (grid, terrain) = match &self.dem_path {
            Some(path) => (load_dem(path, None)?, TerrainSource::File { path: path.clone() }),
            None => self.synthesize()?,
        };
        let config = self.problem_config(&grid)?;
        Ok(Scenario {
            spec: self.clone(),
            grid: Arc::new(grid),
            terrain,
            config,
        })
    }

    fn problem_config(&self, grid: &TerrainGrid) -> Result<ProblemConfig> {
        let [ox, oy] = grid.origin();
        let [ex, ey] = grid.extent();
        let lift = |x: f64, y: f64| -> Result<Point3> {
            Ok(Point3::new(x, y, grid.elevation_at(x, y)? + 2.0 * self.r_safe))
        };
        let start = match self.start {
            Some(p) => p,
            None => lift(ox + 0.05 * ex, oy + 0.05 * ey)?,
        };
        let target = match self.target {
            Some(p) => p,
            None => lift(ox + 0.95 * ex, oy + 0.95 * ey)?,
        };
        let bounds = Bounds::for_points(
            self.dop,
            Point3::new(ox, oy, grid.min_elevation()),
            Point3::new(ox + ex, oy + ey, grid.max_elevation() + 4.0 * self.r_safe),
        )?;
        let mut cfg = ProblemConfig::new(self.r_safe, PathEndpoints::new(start, target)?, bounds);
        cfg.spline = SplineConfig::default();
        Ok(cfg)
    }
}

impl Scenario {
    pub fn problem(&self) -> Result<UavProblem> {
        UavProblem::new(Arc::clone(&self.grid), self.config.clone())
    }

    pub fn endpoints(&self) -> PathEndpoints {
        self.config.endpoints
    }

    /// Writes `<id>.asc` and the `<id>.toml` descriptor into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let grid_path = dir.join(format!("{}.asc", self.spec.id));
        save_dem(&self.grid, &grid_path)?;
        let descriptor = ScenarioDescriptor {
            heightmap: PathBuf::from(format!("{}.asc", self.spec.id)),
            start: self.config.endpoints.start,
            target: self.config.endpoints.target,
            scenario: self.spec.clone(),
            terrain: self.terrain.clone(),
        };
        let desc_path = dir.join(format!("{}.toml", self.spec.id));
        let text = toml::to_string(&descriptor).map_err(|e| Error::Format(e.to_string()))?;
        fs::write(&desc_path, text).map_err(|e| Error::io(&desc_path, e))?;
        Ok((grid_path, desc_path))
    }
}

/// On-disk record of a generated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDescriptor {
    /// Heightmap file, relative to the descriptor.
    pub heightmap: PathBuf,
    pub start: Point3,
    pub target: Point3,
    pub scenario: ScenarioSpec,
    pub terrain: TerrainSource,
}

/// Reads a scenario file: either a bare [`ScenarioSpec`] or a descriptor written
/// by `generate` (whose heightmap is then loaded instead of regenerated).
/// Relative heightmap paths resolve against the file's directory.
pub fn load_scenario_file(path: &Path) -> Result<ScenarioSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    if let Ok(d) = toml::from_str::<ScenarioDescriptor>(&text) {
        let mut spec = d.scenario;
        spec.dem_path = Some(base.join(d.heightmap));
        spec.start = Some(d.start);
        spec.target = Some(d.target);
        return Ok(spec);
    }
    let mut spec: ScenarioSpec = toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if let Some(p) = &spec.dem_path {
        if p.is_relative() {
            spec.dem_path = Some(base.join(p));
        }
    }
    Ok(spec)
}
