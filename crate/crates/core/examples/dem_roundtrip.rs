//! Writes a terrain as an ESRI ASCII grid, reads it back and checks it survived.

use moead_aawa::bench::catalog;
use moead_aawa::terrain::{load_dem, save_dem};

fn main() -> moead_aawa::Result<()> {
    let mut spec = catalog("C21")?;
    spec.extent = [500.0, 500.0];
    let scenario = spec.build()?;

    let dir = tempfile::tempdir().map_err(|e| moead_aawa::Error::Format(e.to_string()))?;
    let path = dir.path().join("terrain.asc");
    save_dem(&scenario.grid, &path)?;
    let loaded = load_dem(&path, None)?;

    let worst = scenario
        .grid
        .elevations()
        .iter()
        .zip(loaded.elevations())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "{}: {}x{} at {} m, {} bytes, max round-trip error {worst:.2e} m",
        path.display(),
        loaded.rows(),
        loaded.cols(),
        loaded.cell_size(),
        std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0)
    );
    Ok(())
}
