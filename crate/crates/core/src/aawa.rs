//! Areal weight adjustment: vicinity-distance sparsity, the elite archive and
//! the delete-crowded / add-sparse cycle that reshapes the weight set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moead::{dominates, improves, ws_transform, Individual, ReferencePoint, Subproblem, WeightVector};

/// Nearest neighbours entering the sparsity level (equal to the objective count).
pub const K_NEAREST: usize = 2;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distances from `point` to every member of `set` except index `skip`, ascending.
fn sorted_distances<P: AsRef<[f64]>>(set: &[P], point: &[f64], skip: Option<usize>) -> Vec<f64> {
    let mut d: Vec<f64> = set
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != skip)
        .map(|(_, p)| euclid(point, p.as_ref()))
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Sparsity level of `point` against `set`: the product of its distances to the
/// `k` nearest members. Pass `skip = Some(i)` when `point` is `set[i]`.
pub fn sparsity_in<P: AsRef<[f64]>>(set: &[P], point: &[f64], skip: Option<usize>, k: usize) -> Result<f64> {
    let d = sorted_distances(set, point, skip);
    if d.len() < k {
        return Err(Error::validation(format!(
            "sparsity needs {k} neighbours, only {} available",
            d.len()
        )));
    }
    Ok(d[..k].iter().product())
}

/// Sparsity of every member of `set` against the others.
pub fn sparsity_levels<P: AsRef<[f64]>>(set: &[P], k: usize) -> Result<Vec<f64>> {
    (0..set.len())
        .map(|i| sparsity_in(set, set[i].as_ref(), Some(i), k))
        .collect()
}

/// First index of the minimum (or maximum, with `max = true`).
fn arg_extreme(values: &[f64], max: bool) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if (max && *v > values[b]) || (!max && *v < values[b]) => best = Some(i),
            _ => {}
        }
    }
    best
}

fn objectives(subs: &[Subproblem]) -> Vec<[f64; 2]> {
    subs.iter().map(|s| s.incumbent.f()).collect()
}

/// Removes the `nus` most crowded subproblems one at a time, recomputing sparsity
/// after each removal. Stops early if fewer than `K_NEAREST + 1` remain.
pub fn delete_crowded(subs: &mut Vec<Subproblem>, nus: usize) {
    for _ in 0..nus {
        let f = objectives(subs);
        let Ok(sl) = sparsity_levels(&f, K_NEAREST) else {
            return;
        };
        if let Some(i) = arg_extreme(&sl, false) {
            subs.remove(i);
        }
    }
}

/// Bounded set of feasible, mutually nondominated individuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteArchive {
    members: Vec<Individual>,
    capacity: usize,
}

impl EliteArchive {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::new(),
            capacity,
        }
    }

    /// Capacity `floor(1.5 n)` for population size `n`.
    pub fn for_population(n: usize) -> Self {
        Self::new(n * 3 / 2)
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Offers one individual without truncating. Returns whether it was admitted.
    pub fn insert(&mut self, ind: &Individual) -> bool {
        if !ind.is_feasible() {
            return false;
        }
        let f = ind.f();
        if self.members.iter().any(|m| dominates(&m.f(), &f)) {
            return false;
        }
        self.members.retain(|m| !dominates(&f, &m.f()));
        self.members.push(ind.clone());
        true
    }

    /// Drops minimum-sparsity members until the archive fits its capacity.
    pub fn truncate(&mut self) {
        while self.members.len() > self.capacity {
            let f: Vec<[f64; 2]> = self.members.iter().map(Individual::f).collect();
            let k = K_NEAREST.min(f.len() - 1);
            let sl = sparsity_levels(&f, k).expect("k < len");
            let i = arg_extreme(&sl, false).expect("non-empty");
            self.members.remove(i);
        }
    }

    /// Removes members dominated by any feasible individual in `pop`.
    pub fn prune_dominated_by<'a>(&mut self, pop: impl IntoIterator<Item = &'a Individual>) {
        let dominators: Vec<[f64; 2]> = pop.into_iter().filter(|p| p.is_feasible()).map(Individual::f).collect();
        self.members
            .retain(|m| !dominators.iter().any(|d| dominates(d, &m.f())));
    }
}

/// Inserts every feasible offspring, then truncates to capacity.
pub fn update_archive(archive: &mut EliteArchive, offspring: &[Individual]) {
    for o in offspring {
        archive.insert(o);
    }
    archive.truncate();
}

/// How a replacement subproblem's weight is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightRule {
    /// Centroid of the added point's `k` nearest population neighbours.
    Areal,
    /// The added point itself.
    Awa,
}

/// Weight from the centroid of the `k` population points nearest to `e`.
pub fn areal_weight<P: AsRef<[f64]>>(e: &[f64], pop: &[P], z: &ReferencePoint) -> Result<WeightVector> {
    if pop.len() < K_NEAREST {
        return Err(Error::validation("areal weight needs at least k population members"));
    }
    let mut idx: Vec<(f64, usize)> = pop.iter().enumerate().map(|(j, p)| (euclid(e, p.as_ref()), j)).collect();
    idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let m = e.len();
    let mut centroid = vec![0.0; m];
    for &(_, j) in &idx[..K_NEAREST] {
        for (c, v) in centroid.iter_mut().zip(pop[j].as_ref()) {
            *c += v / K_NEAREST as f64;
        }
    }
    awa_weight(&centroid, z)
}

/// `WS(F - z*)`.
pub fn awa_weight(f: &[f64], z: &ReferencePoint) -> Result<WeightVector> {
    let v: Vec<f64> = f.iter().zip(z.components()).map(|(a, b)| (a - b).max(0.0)).collect();
    ws_transform(&v)
}

/// Adds up to `nus` archive members, most isolated from the population first.
/// Each chosen member leaves the working copy; members duplicating a population
/// point (sparsity 0) are never chosen. Returns how many were added.
pub fn add_sparse(
    subs: &mut Vec<Subproblem>,
    archive: &EliteArchive,
    nus: usize,
    z: &ReferencePoint,
    rule: WeightRule,
) -> Result<usize> {
    let mut pool: Vec<Individual> = archive.members().to_vec();
    let mut added = 0;
    while added < nus && !pool.is_empty() {
        let f = objectives(subs);
        if f.len() < K_NEAREST {
            break;
        }
        let sl = pool
            .iter()
            .map(|e| sparsity_in(&f, &e.f(), None, K_NEAREST))
            .collect::<Result<Vec<f64>>>()?;
        let best = arg_extreme(&sl, true).expect("non-empty pool");
        if sl[best] <= 0.0 {
            break;
        }
        let e = pool.remove(best);
        let weight = match rule {
            WeightRule::Areal => areal_weight(&e.f(), &f, z)?,
            WeightRule::Awa => awa_weight(&e.f(), z)?,
        };
        subs.push(Subproblem::new(weight, e, z));
        added += 1;
    }
    Ok(added)
}

/// Replaces each incumbent by the best individual in population ∪ archive under
/// the replacement rule at that subproblem's weight.
pub fn refresh_incumbents(subs: &mut [Subproblem], archive: &EliteArchive, z: &ReferencePoint) {
    let candidates: Vec<Individual> = subs
        .iter()
        .map(|s| s.incumbent.clone())
        .chain(archive.members().iter().cloned())
        .collect();
    for s in subs.iter_mut() {
        for c in &candidates {
            if improves(c, &s.incumbent, &s.weight, z) {
                s.incumbent = c.clone();
            }
        }
    }
}

/// One full adjustment: incumbent refresh, then `nus` paired delete/add steps.
///
/// Deletions are only made when the archive can fund matching additions, so the
/// population size is preserved. Neighbourhoods are left for the caller to rebuild.
/// Returns the number of subproblems swapped.
pub fn adjust(
    subs: &mut Vec<Subproblem>,
    archive: &mut EliteArchive,
    nus: usize,
    z: &ReferencePoint,
    rule: WeightRule,
) -> Result<usize> {
    refresh_incumbents(subs, archive, z);
    let mut pairs = nus.min(subs.len().saturating_sub(K_NEAREST + 1));
    loop {
        if pairs == 0 {
            return Ok(0);
        }
        let mut trial = subs.clone();
        let mut pool = archive.clone();
        delete_crowded(&mut trial, pairs);
        pool.prune_dominated_by(trial.iter().map(|s| &s.incumbent));
        let added = add_sparse(&mut trial, &pool, pairs, z, rule)?;
        if added == pairs && trial.len() == subs.len() {
            *subs = trial;
            *archive = pool;
            return Ok(pairs);
        }
        pairs = added.min(pairs - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::ControlGenome;
    use crate::moead::init_weights;
    use crate::problem::{ObjectivePair, ViolationReport};

    fn ind(f: [f64; 2]) -> Individual {
        Individual::new(
            ControlGenome::new(vec![f[0], f[1]]),
            ObjectivePair::new(f[0], f[1]),
            ViolationReport::feasible(),
        )
    }

    fn subs(fs: &[[f64; 2]]) -> Vec<Subproblem> {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        init_weights(fs.len(), 2)
            .unwrap()
            .into_iter()
            .zip(fs)
            .map(|(w, f)| Subproblem::new(w, ind(*f), &z))
            .collect()
    }

    #[test]
    fn collinear_sparsity() {
        // gaps 1, 1, 3 along a line
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [5.0, 0.0]];
        let sl = sparsity_levels(&pts, 2).unwrap();
        assert_eq!(sl[1], 1.0);
        // nearest two of the third point are at 1 and 2, not its adjacent gaps 1 and 3
        assert_eq!(sl[2], 2.0);
        assert_eq!(sl[3], 12.0);
        assert!(sparsity_in(&pts, &[1.0, 0.0], None, 2).unwrap() == 0.0);
        assert!(sparsity_in(&pts[..1], &[1.0, 0.0], Some(0), 2).is_err());
        // k = n - 1: product of all distances
        assert_eq!(sparsity_in(&pts, &pts[0], Some(0), 3).unwrap(), 10.0);
    }

    #[test]
    fn crowded_point_is_deleted() {
        let mut s = subs(&[[0.0, 5.0], [1.0, 4.0], [1.5, 3.5], [5.0, 0.0]]);
        delete_crowded(&mut s, 1);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|x| x.incumbent.f() != [1.0, 4.0]));
        let mut s2 = subs(&[[0.0, 5.0], [1.0, 4.0], [1.5, 3.5], [5.0, 0.0]]);
        delete_crowded(&mut s2, 0);
        assert_eq!(s2.len(), 4);
    }

    #[test]
    fn evenly_spaced_keeps_endpoints() {
        let fs: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, 5.0 - i as f64]).collect();
        let mut s = subs(&fs);
        delete_crowded(&mut s, 1);
        let kept: Vec<_> = s.iter().map(|x| x.incumbent.f()).collect();
        assert!(kept.contains(&[0.0, 5.0]) && kept.contains(&[5.0, 0.0]));
    }

    #[test]
    fn archive_rules() {
        let mut a = EliteArchive::new(3);
        update_archive(&mut a, &[ind([1.0, 3.0]), ind([3.0, 1.0]), ind([2.0, 2.5])]);
        assert_eq!(a.len(), 3);
        update_archive(&mut a, &[ind([0.5, 0.5])]);
        assert_eq!(a.members().iter().map(Individual::f).collect::<Vec<_>>(), vec![[0.5, 0.5]]);
        let mut infeasible = ind([0.1, 0.1]);
        infeasible.violation = ViolationReport::with_total(0.5);
        update_archive(&mut a, &[infeasible]);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn duplicate_dropped_first() {
        let mut a = EliteArchive::new(3);
        update_archive(&mut a, &[ind([0.0, 4.0]), ind([2.0, 2.0]), ind([4.0, 0.0])]);
        update_archive(&mut a, &[ind([2.0, 2.0])]);
        assert_eq!(a.len(), 3);
        let fs: Vec<_> = a.members().iter().map(Individual::f).collect();
        assert!(fs.contains(&[0.0, 4.0]) && fs.contains(&[4.0, 0.0]) && fs.contains(&[2.0, 2.0]));
    }

    #[test]
    fn areal_weight_examples() {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let pop = [[1.0, 3.0], [3.0, 1.0], [10.0, 0.0]];
        let w = areal_weight(&[2.0, 2.0], &pop, &z).unwrap();
        assert_eq!(w.components(), &[0.5, 0.5]);
        // independent of the added point's own value
        assert_eq!(areal_weight(&[2.1, 1.9], &pop, &z).unwrap(), w);
        let same = [[1.0, 3.0], [1.0, 3.0]];
        assert_eq!(
            areal_weight(&[5.0, 5.0], &same, &z).unwrap(),
            awa_weight(&[1.0, 3.0], &z).unwrap()
        );
        let v = awa_weight(&[1.0, 3.0], &z).unwrap();
        assert!((v.components()[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn add_sparse_picks_most_isolated() {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let mut s = subs(&[[0.0, 10.0], [1.0, 9.0], [10.0, 0.0]]);
        let mut a = EliteArchive::new(10);
        update_archive(&mut a, &[ind([5.0, 5.0]), ind([1.5, 8.5])]);
        assert_eq!(add_sparse(&mut s, &a, 1, &z, WeightRule::Areal).unwrap(), 1);
        assert_eq!(s.last().unwrap().incumbent.f(), [5.0, 5.0]);
        assert_eq!(add_sparse(&mut s, &a, 0, &z, WeightRule::Areal).unwrap(), 0);
    }

    #[test]
    fn adjust_conserves_size() {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let fs: Vec<[f64; 2]> = (0..10).map(|i| [i as f64 * 0.1, 1.0 - i as f64 * 0.1]).collect();
        let mut s = subs(&fs);
        let mut empty = EliteArchive::new(15);
        assert_eq!(adjust(&mut s, &mut empty, 2, &z, WeightRule::Areal).unwrap(), 0);
        assert_eq!(s.len(), 10);
        let mut a = EliteArchive::new(15);
        update_archive(&mut a, &[ind([0.05, 0.96]), ind([0.55, 0.46])]);
        let swapped = adjust(&mut s, &mut a, 2, &z, WeightRule::Areal).unwrap();
        assert_eq!(s.len(), 10);
        assert!(swapped <= 2);
    }

    #[test]
    fn modes_differ_only_in_weights() {
        let z = ReferencePoint::new(vec![0.0, 0.0]);
        let fs: Vec<[f64; 2]> = (0..8).map(|i| [(i * i) as f64, (64 - i * 8) as f64]).collect();
        let mut a = EliteArchive::new(12);
        update_archive(&mut a, &[ind([3.0, 58.0]), ind([20.0, 30.0]), ind([40.0, 12.0])]);
        let (mut s1, mut s2) = (subs(&fs), subs(&fs));
        let (mut a1, mut a2) = (a.clone(), a);
        adjust(&mut s1, &mut a1, 2, &z, WeightRule::Areal).unwrap();
        adjust(&mut s2, &mut a2, 2, &z, WeightRule::Awa).unwrap();
        let inc = |s: &[Subproblem]| s.iter().map(|x| x.incumbent.f()).collect::<Vec<_>>();
        assert_eq!(inc(&s1), inc(&s2));
    }
}
