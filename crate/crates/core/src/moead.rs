//! Decomposition machinery shared by every optimiser: weight vectors,
//! Tchebycheff aggregation, neighbourhoods, SBX / polynomial mutation and the
//! constraint-domination population update.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Bounds, ControlGenome};
use crate::problem::{ObjectivePair, ViolationReport};

/// Floor applied to solution-mapping components before reciprocation.
pub const WS_EPSILON: f64 = 1e-6;
/// Offset keeping the reference point strictly below every observed objective.
pub const REFERENCE_OFFSET: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Accepts non-negative components summing to 1 (within 1e-9).
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 || components.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(Error::validation("weights need >= 2 non-negative finite components"));
        }
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &WeightVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl AsRef<[f64]> for WeightVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Ideal-point estimate `z*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferencePoint(Vec<f64>);

impl ReferencePoint {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    /// Componentwise minimum of `objectives`, minus [`REFERENCE_OFFSET`].
    pub fn from_objectives<'a>(objectives: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut z: Option<Vec<f64>> = None;
        for f in objectives {
            match &mut z {
                None => z = Some(f.iter().map(|v| v - REFERENCE_OFFSET).collect()),
                Some(z) => {
                    for (zj, fj) in z.iter_mut().zip(f) {
                        if *zj > *fj {
                            *zj = fj - REFERENCE_OFFSET;
                        }
                    }
                }
            }
        }
        z.map(Self).ok_or_else(|| Error::validation("reference point needs at least one objective vector"))
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    /// Lowers `z*_j` to `f_j - 1e-7` wherever `f_j < z*_j`; returns whether anything moved.
    pub fn update(&mut self, f: &[f64]) -> bool {
        let mut moved = false;
        for (zj, fj) in self.0.iter_mut().zip(f) {
            if *zj > *fj {
                *zj = fj - REFERENCE_OFFSET;
                moved = true;
            }
        }
        moved
    }
}

/// `max_i lambda_i (f_i - z*_i)`.
pub fn tchebycheff(f: &[f64], weight: &WeightVector, z: &ReferencePoint) -> f64 {
    f.iter()
        .zip(weight.components())
        .zip(z.components())
        .map(|((fi, wi), zi)| wi * (fi - zi))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Maps a solution-mapping vector `F - z*` to the weight whose Tchebycheff
/// contour has its corner on that direction: `lambda_i = (1/v_i) / sum_j (1/v_j)`.
pub fn ws_transform(v: &[f64]) -> Result<WeightVector> {
    if v.len() < 2 || v.iter().any(|c| c.is_nan() || *c < 0.0) {
        return Err(Error::validation("solution-mapping vector must be non-negative"));
    }
    if v.iter().all(|c| *c == 0.0) {
        return Err(Error::validation("solution-mapping vector is all zero"));
    }
    let inv: Vec<f64> = v.iter().map(|c| 1.0 / c.max(WS_EPSILON)).collect();
    let sum: f64 = inv.iter().sum();
    Ok(WeightVector(inv.into_iter().map(|c| c / sum).collect()))
}

/// `n` weights from the WS-transform of a uniform simplex lattice.
///
/// For `m = 2` the lattice is `(i/(n-1), 1 - i/(n-1))`. For `m > 2`, `n` must be
/// a simplex-lattice size `C(H + m - 1, m - 1)`.
pub fn init_weights(n: usize, m: usize) -> Result<Vec<WeightVector>> {
    if m < 2 || n < m {
        return Err(Error::validation(format!("need n >= m >= 2, got n={n}, m={m}")));
    }
    let lattice = if m == 2 {
        (0..n)
            .map(|i| {
                let a = i as f64 / (n - 1) as f64;
                vec![a, 1.0 - a]
            })
            .collect()
    } else {
        let h = (1..)
            .take_while(|&h| binomial(h + m - 1, m - 1) <= n)
            .last()
            .filter(|&h| binomial(h + m - 1, m - 1) == n)
            .ok_or_else(|| Error::validation(format!("{n} is not a simplex-lattice size for m={m}")))?;
        let mut out = Vec::with_capacity(n);
        let mut cur = vec![0usize; m];
        lattice_points(h, 0, &mut cur, &mut out);
        out.into_iter()
            .map(|p| p.iter().map(|&c| c as f64 / h as f64).collect())
            .collect::<Vec<Vec<f64>>>()
    };
    lattice.iter().map(|v| ws_transform(v)).collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn lattice_points(left: usize, dim: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if dim == cur.len() - 1 {
        cur[dim] = left;
        out.push(cur.clone());
        return;
    }
    for c in 0..=left {
        cur[dim] = c;
        lattice_points(left - c, dim + 1, cur, out);
    }
}

/// Indices of the `t` closest weights to each weight (itself included), nearest
/// first; equal distances keep the lower index first.
pub fn build_neighborhoods(weights: &[WeightVector], t: usize) -> Result<Vec<Vec<usize>>> {
    if t == 0 || t > weights.len() {
        return Err(Error::validation(format!(
            "neighbourhood size {t} must lie in 1..={}",
            weights.len()
        )));
    }
    Ok(weights
        .iter()
        .map(|w| {
            let mut idx: Vec<(f64, usize)> =
                weights.iter().enumerate().map(|(j, o)| (w.distance(o), j)).collect();
            idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            idx.into_iter().take(t).map(|(_, j)| j).collect()
        })
        .collect())
}

/// Spread factor for a uniform draw `u` in `[0, 1)`.
pub fn sbx_beta(u: f64, eta_c: f64) -> f64 {
    let e = 1.0 / (1.0 + eta_c);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 - 2.0 * u)).powf(e)
    }
}

/// `0.5 [(1 + beta) a + (1 - beta) b]`.
pub fn sbx_child(a: f64, b: f64, beta: f64) -> f64 {
    0.5 * ((1.0 + beta) * a + (1.0 - beta) * b)
}

/// One SBX child, drawing an independent spread factor per coordinate.
pub fn sbx_crossover<R: Rng + ?Sized>(a: &ControlGenome, b: &ControlGenome, eta_c: f64, rng: &mut R) -> ControlGenome {
    debug_assert_eq!(a.len(), b.len());
    ControlGenome::new(
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(&x, &y)| sbx_child(x, y, sbx_beta(rng.random::<f64>(), eta_c)))
            .collect(),
    )
}

/// Polynomial-mutation perturbation in `[-1, 1]` for a uniform draw `u`.
pub fn mutation_delta(u: f64, eta_m: f64) -> f64 {
    let e = 1.0 / (eta_m + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(e)
    }
}

/// Mutates each coordinate with probability `p_mut` by `delta * (hi - lo)`, then
/// repairs.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    y: &ControlGenome,
    eta_m: f64,
    p_mut: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> ControlGenome {
    let mut out = y.clone();
    for (k, v) in out.coords_mut().iter_mut().enumerate() {
        if rng.random::<f64>() < p_mut {
            *v += mutation_delta(rng.random::<f64>(), eta_m) * bounds.width(k);
        }
    }
    repair(&mut out, bounds, rng);
    out
}

/// Replaces every out-of-bounds (or non-finite) coordinate with a uniform draw
/// inside its bounds.
pub fn repair<R: Rng + ?Sized>(genome: &mut ControlGenome, bounds: &Bounds, rng: &mut R) {
    for (k, v) in genome.coords_mut().iter_mut().enumerate() {
        if !(*v >= bounds.lo(k) && *v <= bounds.hi(k)) {
            *v = bounds.sample_coord(k, rng);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: ControlGenome,
    pub objectives: ObjectivePair,
    pub violation: ViolationReport,
}

impl Individual {
    pub fn new(genome: ControlGenome, objectives: ObjectivePair, violation: ViolationReport) -> Self {
        Self {
            genome,
            objectives,
            violation,
        }
    }

    pub fn f(&self) -> [f64; 2] {
        self.objectives.values()
    }

    pub fn is_feasible(&self) -> bool {
        self.violation.is_feasible()
    }

    pub fn aggregation(&self, weight: &WeightVector, z: &ReferencePoint) -> f64 {
        tchebycheff(&self.f(), weight, z)
    }
}

/// Pareto dominance for minimisation.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Constraint-domination: `Less` when `a` precedes `b`, `Greater` when `b`
/// precedes `a`, `Equal` when neither does.
pub fn cdp_compare(a: &Individual, b: &Individual) -> Ordering {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a
            .violation
            .total
            .partial_cmp(&b.violation.total)
            .unwrap_or(Ordering::Equal),
        (true, true) => {
            let (fa, fb) = (a.f(), b.f());
            if dominates(&fa, &fb) {
                Ordering::Less
            } else if dominates(&fb, &fa) {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
    }
}

/// Replacement rule: `candidate` beats `incumbent` on this subproblem when its
/// violation is smaller, or both are feasible and its aggregation is lower.
pub fn improves(candidate: &Individual, incumbent: &Individual, weight: &WeightVector, z: &ReferencePoint) -> bool {
    candidate.violation.total < incumbent.violation.total
        || (candidate.is_feasible()
            && incumbent.is_feasible()
            && candidate.aggregation(weight, z) < incumbent.aggregation(weight, z))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subproblem {
    pub weight: WeightVector,
    pub neighbors: Vec<usize>,
    pub incumbent: Individual,
    pub utility: f64,
    /// Aggregation value recorded at the last utility refresh.
    pub f_old: f64,
}

impl Subproblem {
    pub fn new(weight: WeightVector, incumbent: Individual, z: &ReferencePoint) -> Self {
        let f_old = incumbent.aggregation(&weight, z);
        Self {
            weight,
            neighbors: Vec::new(),
            incumbent,
            utility: 1.0,
            f_old,
        }
    }

    pub fn aggregation(&self, z: &ReferencePoint) -> f64 {
        self.incumbent.aggregation(&self.weight, z)
    }
}

/// Visits `scope` in random order, replacing incumbents that `y` improves on,
/// until `n_r` replacements. Returns the number made.
pub fn update_population<R: Rng + ?Sized>(
    y: &Individual,
    scope: &[usize],
    subproblems: &mut [Subproblem],
    n_r: usize,
    z: &ReferencePoint,
    rng: &mut R,
) -> usize {
    let mut order = scope.to_vec();
    order.shuffle(rng);
    let mut replaced = 0;
    for j in order {
        if replaced >= n_r {
            break;
        }
        let sp = &mut subproblems[j];
        if improves(y, &sp.incumbent, &sp.weight, z) {
            sp.incumbent = y.clone();
            replaced += 1;
        }
    }
    replaced
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn ind(f: [f64; 2], g: f64) -> Individual {
        Individual::new(
            ControlGenome::new(vec![f[0], f[1], g]),
            ObjectivePair::new(f[0], f[1]),
            ViolationReport::with_total(g),
        )
    }

    #[test]
    fn tchebycheff_examples() {
        let z = ReferencePoint::new(vec![1.0, 2.0]);
        assert_eq!(tchebycheff(&[2.0, 3.0], &w(&[0.5, 0.5]), &z), 0.5);
        assert_eq!(tchebycheff(&[3.0, 100.0], &w(&[1.0, 0.0]), &z), 2.0);
        assert_eq!(tchebycheff(&[1.0, 2.0], &w(&[0.3, 0.7]), &z), 0.0);
    }

    #[test]
    fn ws_examples() {
        assert_eq!(ws_transform(&[1.0, 1.0]).unwrap().components(), &[0.5, 0.5]);
        let v = ws_transform(&[1.0, 3.0]).unwrap();
        assert!((v.components()[0] - 0.75).abs() < 1e-15);
        assert!((v.components()[1] - 0.25).abs() < 1e-15);
        let b = ws_transform(&[0.0, 1.0]).unwrap();
        assert!((b.components()[0] - 1.0).abs() < 1e-6);
        assert!(ws_transform(&[0.0, 0.0]).is_err());
        assert!(ws_transform(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn init_weights_small() {
        let ws = init_weights(3, 2).unwrap();
        assert!((ws[0].components()[0] - 1.0).abs() < 1e-6);
        assert_eq!(ws[1].components(), &[0.5, 0.5]);
        assert!((ws[2].components()[1] - 1.0).abs() < 1e-6);
        let ws = init_weights(2, 2).unwrap();
        assert!(ws[0].components()[0] > 0.999_999 && ws[1].components()[1] > 0.999_999);
        for v in init_weights(20, 2).unwrap() {
            assert!((v.components().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn init_weights_three_objectives() {
        let ws = init_weights(10, 3).unwrap();
        assert_eq!(ws.len(), 10);
        assert!(init_weights(11, 3).is_err());
    }

    #[test]
    fn neighborhoods_on_a_line() {
        let ws: Vec<_> = (0..5).map(|i| w(&[i as f64 / 4.0, 1.0 - i as f64 / 4.0])).collect();
        let nb = build_neighborhoods(&ws, 3).unwrap();
        assert_eq!(nb[2], vec![2, 1, 3]);
        assert_eq!(nb[0], vec![0, 1, 2]);
        let all = build_neighborhoods(&ws, 5).unwrap();
        assert!(all.iter().all(|b| {
            let mut s = b.clone();
            s.sort();
            s == vec![0, 1, 2, 3, 4]
        }));
        let dup = vec![w(&[0.5, 0.5]), w(&[0.5, 0.5]), w(&[0.5, 0.5])];
        assert_eq!(build_neighborhoods(&dup, 2).unwrap()[2], vec![0, 1]);
    }

    #[test]
    fn sbx_examples() {
        assert_eq!(sbx_child(3.0, 7.0, 1.0), 3.0);
        assert_eq!(sbx_child(4.0, 4.0, 1.7), 4.0);
        assert_eq!(sbx_beta(0.5, 20.0), 1.0);
        assert!(sbx_beta(0.1, 20.0) < 1.0 && sbx_beta(0.9, 20.0) > 1.0);
    }

    #[test]
    fn mutation_examples() {
        assert_eq!(mutation_delta(0.5, 1.0), 0.0);
        assert_eq!(mutation_delta(0.0, 1.0), -1.0);
        let bounds = Bounds::new(vec![0.0; 6], vec![1.0; 6]).unwrap();
        let y = ControlGenome::new(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(polynomial_mutation(&y, 1.0, 0.0, &bounds, &mut rng), y);
        for _ in 0..200 {
            assert!(bounds.contains(&polynomial_mutation(&y, 1.0, 1.0, &bounds, &mut rng)));
        }
    }

    #[test]
    fn cdp_examples() {
        assert_eq!(cdp_compare(&ind([5.0, 5.0], 0.0), &ind([1.0, 1.0], 0.2)), Ordering::Less);
        assert_eq!(cdp_compare(&ind([5.0, 5.0], 0.1), &ind([1.0, 1.0], 0.3)), Ordering::Less);
        assert_eq!(cdp_compare(&ind([1.0, 2.0], 0.0), &ind([2.0, 1.0], 0.0)), Ordering::Equal);
        assert_eq!(cdp_compare(&ind([2.0, 2.0], 0.0), &ind([1.0, 2.0], 0.0)), Ordering::Greater);
    }

    fn subs(fs: &[([f64; 2], f64)]) -> (Vec<Subproblem>, ReferencePoint) {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let ws = init_weights(fs.len().max(2), 2).unwrap();
        let s = fs
            .iter()
            .zip(ws)
            .map(|(&(f, g), w)| Subproblem::new(w, ind(f, g), &z))
            .collect();
        (s, z)
    }

    #[test]
    fn update_rejects_worse_violation() {
        let (mut s, z) = subs(&[([1.0, 1.0], 0.1), ([2.0, 2.0], 0.2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(update_population(&ind([0.1, 0.1], 0.5), &[0, 1], &mut s, 2, &z, &mut rng), 0);
    }

    #[test]
    fn update_feasible_replaces_infeasible() {
        let (mut s, z) = subs(&[([1.0, 1.0], 0.1), ([2.0, 2.0], 0.2)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = ind([9.0, 9.0], 0.0);
        assert_eq!(update_population(&y, &[1], &mut s, 2, &z, &mut rng), 1);
        assert_eq!(s[1].incumbent, y);
    }

    #[test]
    fn update_caps_replacements() {
        let fs: Vec<_> = (0..5).map(|i| ([2.0 + i as f64, 6.0 - i as f64], 0.0)).collect();
        let (mut s, z) = subs(&fs);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = ind([0.5, 0.5], 0.0);
        assert_eq!(update_population(&y, &[0, 1, 2, 3, 4], &mut s, 2, &z, &mut rng), 2);
        assert_eq!(s.iter().filter(|sp| sp.incumbent == y).count(), 2);
    }

    #[test]
    fn reference_update() {
        let mut z = ReferencePoint::from_objectives([&[3.0, 4.0][..], &[2.0, 5.0][..]]).unwrap();
        assert_eq!(z.components(), &[2.0 - REFERENCE_OFFSET, 4.0 - REFERENCE_OFFSET]);
        assert!(!z.update(&[5.0, 5.0]));
        assert!(z.update(&[1.0, 5.0]));
        assert_eq!(z.components()[0], 1.0 - REFERENCE_OFFSET);
        let before = z.clone();
        z.update(&[1.0, 5.0]);
        assert_eq!(z, before);
    }
}
