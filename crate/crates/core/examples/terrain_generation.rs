//! Synthesises a mountain and an urban terrain and prints a coarse height profile.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use moead_aawa::terrain::{random_mountain_spec, random_urban_spec, synth_mountain, synth_urban, GridShape};

fn main() -> moead_aawa::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let extent = [200.0, 200.0];
    let spec = random_mountain_spec(8, extent, 5.0, &mut rng).with_scales(2.0, 0.1);
    let mountains = synth_mountain(&spec, GridShape::covering(extent, 1.0), 1.0)?;
    println!(
        "mountain: {}x{} nodes, elevation {:.2}..{:.2} km",
        mountains.rows(),
        mountains.cols(),
        mountains.min_elevation(),
        mountains.max_elevation()
    );

    let city = random_urban_spec(10, [2000.0, 2000.0], 200.0, 10.0, &mut rng);
    let urban = synth_urban(&city, GridShape::covering([2000.0, 2000.0], 10.0), 10.0)?;
    let built = urban.elevations().iter().filter(|z| **z > 0.0).count();
    println!(
        "urban: {} prisms, {:.1}% of nodes built up, tallest {:.0} m",
        city.prisms.len(),
        100.0 * built as f64 / urban.elevations().len() as f64,
        urban.max_elevation()
    );

    // diagonal profile through the mountain map
    for k in 0..=10 {
        let s = 20.0 * k as f64;
        let z = mountains.elevation_at(s, s)?;
        println!("{s:>5.0} km  {:>6.2}  {}", z, "#".repeat((z.max(0.0) * 10.0) as usize));
    }
    Ok(())
}
