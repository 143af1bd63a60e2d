//! Property tests over the numeric building blocks.

use std::cmp::Ordering;

use proptest::prelude::*;

use moead_aawa::metrics::{hypervolume_2d, normalize, pure_diversity};
use moead_aawa::moead::{cdp_compare, dominates, tchebycheff, ws_transform, Individual, ReferencePoint, WS_EPSILON};
use moead_aawa::{ControlGenome, ObjectivePair, ViolationReport, WeightVector};

fn weight() -> impl Strategy<Value = WeightVector> {
    (0.0f64..=1.0).prop_map(|a| WeightVector::new(vec![a, 1.0 - a]).unwrap())
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [0.0f64..10.0, 0.0f64..10.0]
}

fn individual() -> impl Strategy<Value = Individual> {
    // small discrete grids so that ties and equal violations actually occur
    (0u8..5, 0u8..5, prop_oneof![Just(0.0), Just(0.5), Just(1.0)]).prop_map(|(a, b, g)| {
        Individual::new(
            ControlGenome::new(vec![]),
            ObjectivePair::new(a as f64, b as f64),
            ViolationReport::with_total(g),
        )
    })
}

proptest! {
    #[test]
    fn tchebycheff_scales_linearly(f in point(), w in weight(), s in 0.1f64..100.0) {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let base = tchebycheff(&f, &w, &z);
        let scaled = tchebycheff(&[f[0] * s, f[1] * s], &w, &z);
        prop_assert!((scaled - s * base).abs() <= 1e-9 * scaled.abs().max(1.0));
    }

    #[test]
    fn tchebycheff_respects_dominance(a in point(), b in point(), w in weight()) {
        let z = ReferencePoint::new(vec![-1e-7, -1e-7]);
        if dominates(&a, &b) {
            prop_assert!(tchebycheff(&a, &w, &z) <= tchebycheff(&b, &w, &z));
        }
    }

    #[test]
    fn ws_transform_is_scale_invariant(v in [0.01f64..10.0, 0.01f64..10.0], s in 0.01f64..100.0) {
        let a = ws_transform(&v).unwrap();
        let b = ws_transform(&[v[0] * s, v[1] * s]).unwrap();
        for (x, y) in a.components().iter().zip(b.components()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ws_transform_is_an_involution_up_to_scale(v in [0.01f64..10.0, 0.01f64..10.0]) {
        // applying the transform twice gives back the direction of v
        let once = ws_transform(&v).unwrap();
        let twice = ws_transform(once.components()).unwrap();
        let sum = v[0] + v[1];
        prop_assert!((twice.components()[0] - v[0] / sum).abs() < 1e-9);
        prop_assert!(once.components().iter().all(|c| *c >= WS_EPSILON / 2.0));
    }

    #[test]
    fn cdp_is_a_strict_partial_order(a in individual(), b in individual(), c in individual()) {
        prop_assert_eq!(cdp_compare(&a, &a), Ordering::Equal);
        prop_assert_eq!(cdp_compare(&a, &b), cdp_compare(&b, &a).reverse());
        if cdp_compare(&a, &b) == Ordering::Less && cdp_compare(&b, &c) == Ordering::Less {
            prop_assert_eq!(cdp_compare(&a, &c), Ordering::Less);
        }
    }

    #[test]
    fn feasible_always_precedes_infeasible(a in individual(), b in individual()) {
        if a.is_feasible() && !b.is_feasible() {
            prop_assert_eq!(cdp_compare(&a, &b), Ordering::Less);
        }
    }

    #[test]
    fn hypervolume_is_monotone(front in prop::collection::vec([0.0f64..1.0, 0.0f64..1.0], 0..12),
                               extra in [0.0f64..1.0, 0.0f64..1.0]) {
        let base = hypervolume_2d(&front, [1.0, 1.0]);
        let mut more = front.clone();
        more.push(extra);
        let grown = hypervolume_2d(&more, [1.0, 1.0]);
        prop_assert!(grown + 1e-12 >= base);
        prop_assert!(grown <= 1.0 + 1e-12);
    }

    #[test]
    fn hypervolume_ignores_dominated_points(front in prop::collection::vec([0.0f64..1.0, 0.0f64..1.0], 1..12)) {
        let base = hypervolume_2d(&front, [1.0, 1.0]);
        let mut more = front.clone();
        let p = front[0];
        more.push([(p[0] + 1.0) / 2.0, (p[1] + 1.0) / 2.0]);
        prop_assert!((hypervolume_2d(&more, [1.0, 1.0]) - base).abs() < 1e-12);
    }

    #[test]
    fn normalization_is_idempotent(fronts in prop::collection::vec(prop::collection::vec(point(), 1..8), 1..4)) {
        let once = normalize(&fronts).unwrap();
        let pts: Vec<Vec<[f64; 2]>> = once.iter().map(|f| f.points.clone()).collect();
        let twice = normalize(&pts).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            for (p, q) in a.points.iter().zip(&b.points) {
                for k in 0..2 {
                    // a degenerate dimension maps to 0 both times; otherwise the
                    // normalised extremes are already 0 and 1
                    prop_assert!((p[k] - q[k]).abs() < 1e-9);
                    prop_assert!((0.0..=1.0).contains(&p[k]));
                }
            }
        }
    }

    #[test]
    fn pure_diversity_is_order_free(mut pts in prop::collection::vec(point(), 0..9)) {
        let a = pure_diversity(&pts);
        pts.reverse();
        let b = pure_diversity(&pts);
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        prop_assert!(a >= 0.0);
    }
}
