//! The optimiser loop shared by MOEA/D-AAWA, MOEA/D-AWA and constrained MOEA/D,
//! with utility-driven resource allocation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aawa::{adjust, update_archive, EliteArchive, WeightRule};
use crate::error::{Error, Result};
use crate::moead::{
    build_neighborhoods, dominates, init_weights, polynomial_mutation, sbx_crossover, update_population,
    Individual, ReferencePoint, Subproblem, WeightVector,
};
use crate::problem::Problem;

const OBJECTIVES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Aawa,
    Awa,
    Cmoead,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Aawa, Algorithm::Awa, Algorithm::Cmoead];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Aawa => "aawa",
            Algorithm::Awa => "awa",
            Algorithm::Cmoead => "cmoead",
        }
    }

    /// Name as printed in tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::Aawa => "MOEA/D-AAWA",
            Algorithm::Awa => "MOEA/D-AWA",
            Algorithm::Cmoead => "C-MOEA/D",
        }
    }

    fn weight_rule(self) -> Option<WeightRule> {
        match self {
            Algorithm::Aawa => Some(WeightRule::Areal),
            Algorithm::Awa => Some(WeightRule::Awa),
            Algorithm::Cmoead => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aawa" | "moead-aawa" => Ok(Algorithm::Aawa),
            "awa" | "moead-awa" => Ok(Algorithm::Awa),
            "cmoead" | "c-moead" => Ok(Algorithm::Cmoead),
            other => Err(Error::validation(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub population: usize,
    pub neighborhood: usize,
    /// Probability of mating within the neighbourhood.
    pub delta: f64,
    /// Maximum replacements per offspring.
    pub n_r: usize,
    /// Fraction of generations before the archive and adjustment start.
    pub r_evol: f64,
    /// Fraction of subproblems evolved per generation.
    pub r_pop: f64,
    /// Subproblems swapped per adjustment.
    pub nus: usize,
    /// Generations between utility refreshes.
    pub g_r: usize,
    /// Generations between weight adjustments.
    pub g_w: usize,
    pub eval_budget: usize,
    pub eta_c: f64,
    pub eta_m: f64,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::for_population(Algorithm::Aawa, 20, 10_000, 0)
    }
}

impl RunConfig {
    /// Standard settings for population size `n`: `T = nus = 0.1 n`.
    pub fn for_population(algorithm: Algorithm, n: usize, eval_budget: usize, seed: u64) -> Self {
        let tenth = (n / 10).max(1);
        Self {
            algorithm,
            population: n,
            neighborhood: tenth.max(2).min(n),
            delta: 0.9,
            n_r: 2,
            r_evol: 0.8,
            r_pop: 0.2,
            nus: tenth,
            g_r: 50,
            g_w: 100,
            eval_budget,
            eta_c: 20.0,
            eta_m: 1.0,
            seed,
            record_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.population;
        let bad = |m: &str| Err(Error::validation(m.to_string()));
        if n < OBJECTIVES + 1 {
            return bad("population must exceed the objective count");
        }
        if self.neighborhood == 0 || self.neighborhood > n {
            return bad("neighbourhood size must lie in 1..=N");
        }
        if !(self.r_evol > 0.0 && self.r_evol <= 1.0) || !(self.r_pop > 0.0 && self.r_pop <= 1.0) {
            return bad("r_evol and r_pop must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return bad("delta must lie in [0, 1]");
        }
        if self.nus > n / 2 {
            return bad("nus must not exceed N/2");
        }
        if self.evolving_count() < OBJECTIVES {
            return bad("floor(N r_pop) must cover the boundary subproblems");
        }
        if self.g_r == 0 || self.g_w == 0 {
            return bad("intervals must be positive");
        }
        if self.eval_budget < n {
            return bad("evaluation budget must cover the initial population");
        }
        Ok(())
    }

    /// `|I| = floor(N r_pop)`.
    pub fn evolving_count(&self) -> usize {
        (self.population as f64 * self.r_pop + 1e-9).floor() as usize
    }

    /// `ceil((budget - N) / |I|)`.
    pub fn max_generations(&self) -> usize {
        (self.eval_budget - self.population).div_ceil(self.evolving_count())
    }

    /// First generation at which archive updates and adjustment run; `None` when
    /// `r_evol = 1`.
    pub fn adjustment_start(&self) -> Option<usize> {
        (self.r_evol < 1.0).then(|| (self.r_evol * self.max_generations() as f64).ceil() as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: usize,
    pub feasible: usize,
    pub front_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub evaluations: usize,
    pub generations: usize,
    pub adjustments: usize,
    pub front: Vec<Individual>,
    pub population: Vec<Individual>,
    pub weights: Vec<WeightVector>,
    pub archive: Vec<Individual>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<GenerationStats>,
}

/// Feasible, mutually nondominated members with duplicate objective vectors
/// removed, sorted by `f1`.
pub fn front_of<'a>(individuals: impl IntoIterator<Item = &'a Individual>) -> Vec<Individual> {
    let feasible: Vec<&Individual> = individuals.into_iter().filter(|i| i.is_feasible()).collect();
    let mut front: Vec<Individual> = Vec::new();
    for (i, a) in feasible.iter().enumerate() {
        let fa = a.f();
        let beaten = feasible.iter().any(|b| dominates(&b.f(), &fa));
        let repeated = feasible[..i].iter().any(|b| b.f() == fa);
        if !beaten && !repeated {
            front.push((*a).clone());
        }
    }
    front.sort_by(|a, b| a.objectives.length.total_cmp(&b.objectives.length));
    front
}

/// Utility refresh: `U = 1` after a relative improvement above 0.001,
/// otherwise decays by `0.95 + 0.05 delta / 0.001`.
pub fn refresh_utilities(subs: &mut [Subproblem], z: &ReferencePoint) {
    for s in subs {
        let f = s.aggregation(z);
        s.utility = next_utility(s.utility, s.f_old, f);
        s.f_old = f;
    }
}

pub fn next_utility(utility: f64, f_old: f64, f_new: f64) -> f64 {
    let delta = if f_old > 0.0 { ((f_old - f_new) / f_old).max(0.0) } else { 0.0 };
    if delta > 0.001 {
        1.0
    } else {
        (0.95 + 0.05 * delta / 0.001) * utility
    }
}

/// Index of the weight with the largest component in each objective.
pub fn boundary_indices(weights: &[&WeightVector]) -> Vec<usize> {
    let m = weights.first().map_or(0, |w| w.dim());
    let mut out: Vec<usize> = Vec::with_capacity(m);
    for j in 0..m {
        let mut best = 0;
        for (i, w) in weights.iter().enumerate() {
            if w.components()[j] > weights[best].components()[j] {
                best = i;
            }
        }
        if !out.contains(&best) {
            out.push(best);
        }
    }
    out
}

/// Boundary subproblems plus 2-tournament picks on utility until `count` distinct
/// indices are chosen.
pub fn select_evolving<R: Rng + ?Sized>(subs: &[Subproblem], count: usize, rng: &mut R) -> Vec<usize> {
    let weights: Vec<&WeightVector> = subs.iter().map(|s| &s.weight).collect();
    let mut chosen = boundary_indices(&weights);
    chosen.truncate(count);
    let mut rest: Vec<usize> = (0..subs.len()).filter(|i| !chosen.contains(i)).collect();
    while chosen.len() < count && !rest.is_empty() {
        let a = rng.random_range(0..rest.len());
        let b = rng.random_range(0..rest.len());
        let pick = if subs[rest[b]].utility > subs[rest[a]].utility { b } else { a };
        chosen.push(rest.swap_remove(pick));
    }
    chosen
}

/// `refresh_utilities` then `select_evolving`.
pub fn allocate_resources<R: Rng + ?Sized>(
    subs: &mut [Subproblem],
    z: &ReferencePoint,
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    refresh_utilities(subs, z);
    select_evolving(subs, count, rng)
}

fn pick_parents<R: Rng + ?Sized>(scope: &[usize], n: usize, rng: &mut R) -> (usize, usize) {
    let r1 = scope[rng.random_range(0..scope.len())];
    let others: Vec<usize> = scope.iter().copied().filter(|&j| j != r1).collect();
    let r2 = if others.is_empty() {
        let mut j = rng.random_range(0..n - 1);
        if j >= r1 {
            j += 1;
        }
        j
    } else {
        others[rng.random_range(0..others.len())]
    };
    (r1, r2)
}

fn evaluate<P: Problem>(problem: &P, genome: crate::genome::ControlGenome) -> Result<Individual> {
    let (objectives, violation) = problem.evaluate(&genome)?;
    Ok(Individual::new(genome, objectives, violation))
}

fn rebuild_neighborhoods(subs: &mut [Subproblem], t: usize) -> Result<()> {
    let weights: Vec<WeightVector> = subs.iter().map(|s| s.weight.clone()).collect();
    for (s, nb) in subs.iter_mut().zip(build_neighborhoods(&weights, t)?) {
        s.neighbors = nb;
    }
    Ok(())
}

/// Runs one optimisation to the evaluation budget.
pub fn run<P: Problem>(problem: &P, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let bounds = problem.bounds();
    let n = cfg.population;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p_mut = 1.0 / bounds.len() as f64;

    let weights = init_weights(n, OBJECTIVES)?;
    let mut pop = Vec::with_capacity(n);
    for _ in 0..n {
        pop.push(evaluate(problem, bounds.sample(&mut rng))?);
    }
    let mut evaluations = n;
    let initial: Vec<[f64; 2]> = pop.iter().map(Individual::f).collect();
    let mut z = ReferencePoint::from_objectives(initial.iter().map(|f| &f[..]))?;
    let mut subs: Vec<Subproblem> = weights
        .into_iter()
        .zip(pop)
        .map(|(w, ind)| Subproblem::new(w, ind, &z))
        .collect();
    rebuild_neighborhoods(&mut subs, cfg.neighborhood)?;

    let rule = cfg.algorithm.weight_rule();
    let adjust_from = cfg.adjustment_start();
    let mut archive = EliteArchive::for_population(n);
    let count = cfg.evolving_count();
    let mut trace = Vec::new();
    let mut generation = 0;
    let mut adjustments = 0;

    while evaluations < cfg.eval_budget {
        if generation > 0 && generation % cfg.g_r == 0 {
            refresh_utilities(&mut subs, &z);
        }
        let selected = select_evolving(&subs, count, &mut rng);
        let archive_phase = rule.is_some() && adjust_from.is_some_and(|g0| generation >= g0);
        let mut offspring = Vec::new();

        for i in selected {
            if evaluations >= cfg.eval_budget {
                break;
            }
            let scope: Vec<usize> = if rng.random::<f64>() < cfg.delta {
                subs[i].neighbors.clone()
            } else {
                (0..subs.len()).collect()
            };
            let (r1, r2) = pick_parents(&scope, subs.len(), &mut rng);
            let child = sbx_crossover(&subs[r1].incumbent.genome, &subs[r2].incumbent.genome, cfg.eta_c, &mut rng);
            let child = polynomial_mutation(&child, cfg.eta_m, p_mut, bounds, &mut rng);
            let y = evaluate(problem, child)?;
            evaluations += 1;
            z.update(&y.f());
            update_population(&y, &scope, &mut subs, cfg.n_r, &z, &mut rng);
            if archive_phase {
                offspring.push(y);
            }
        }

        if let (true, Some(rule), Some(g0)) = (archive_phase, rule, adjust_from) {
            update_archive(&mut archive, &offspring);
            if (generation - g0) % cfg.g_w == 0 {
                adjust(&mut subs, &mut archive, cfg.nus, &z, rule)?;
                rebuild_neighborhoods(&mut subs, cfg.neighborhood)?;
                adjustments += 1;
            }
        }

        generation += 1;
        if cfg.record_trace {
            let incumbents = subs.iter().map(|s| &s.incumbent);
            trace.push(GenerationStats {
                generation,
                evaluations,
                feasible: subs.iter().filter(|s| s.incumbent.is_feasible()).count(),
                front_size: front_of(incumbents.chain(archive.members())).len(),
            });
        }
    }

    let population: Vec<Individual> = subs.iter().map(|s| s.incumbent.clone()).collect();
    let front = front_of(population.iter().chain(archive.members()));
    Ok(RunResult {
        algorithm: cfg.algorithm,
        seed: cfg.seed,
        evaluations,
        generations: generation,
        adjustments,
        front,
        population,
        weights: subs.into_iter().map(|s| s.weight).collect(),
        archive: archive.members().to_vec(),
        trace,
    })
}
