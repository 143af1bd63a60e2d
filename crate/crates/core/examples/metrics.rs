//! Hypervolume and pure diversity of two hand-made fronts under pooled normalisation.

use moead_aawa::metrics::{hypervolume_2d, normalize, pure_diversity};

fn main() {
    let even = vec![[1.0, 9.0], [3.0, 5.0], [5.0, 3.0], [9.0, 1.0]];
    let clumped = vec![[1.0, 9.0], [1.2, 8.5], [1.4, 8.0], [9.0, 1.0]];
    let normed = normalize(&[even, clumped]).expect("non-empty fronts");
    for (name, f) in ["even", "clumped"].iter().zip(&normed) {
        println!(
            "{name:>8}: HV {:.4}  PD {:.3}",
            hypervolume_2d(&f.points, [1.0, 1.0]),
            pure_diversity(&f.points)
        );
    }
}
