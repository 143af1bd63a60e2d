//! Front-quality indicators (hypervolume, pure diversity), pooled normalisation
//! and rank-sum scoring across algorithms.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sets up to this size get the exact subset recursion for pure diversity.
pub const PD_EXACT_LIMIT: usize = 16;

/// Ideal/nadir box used to map objective vectors into `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub ideal: [f64; 2],
    pub nadir: [f64; 2],
}

impl NormalizationBounds {
    /// Componentwise min/max over every point of every front; `None` if all are empty.
    pub fn pooled<'a>(fronts: impl IntoIterator<Item = &'a [[f64; 2]]>) -> Option<Self> {
        let mut out: Option<Self> = None;
        for p in fronts.into_iter().flatten() {
            let b = out.get_or_insert(Self { ideal: *p, nadir: *p });
            for j in 0..2 {
                b.ideal[j] = b.ideal[j].min(p[j]);
                b.nadir[j] = b.nadir[j].max(p[j]);
            }
        }
        out
    }

    /// Affine map to `[0, 1]`; a degenerate dimension maps to 0.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for j in 0..2 {
            let span = self.nadir[j] - self.ideal[j];
            out[j] = if span > 0.0 { ((p[j] - self.ideal[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedFront {
    pub points: Vec<[f64; 2]>,
    pub bounds: NormalizationBounds,
}

/// Normalises all fronts of one case with shared pooled bounds. Returns `None`
/// when every front is empty.
pub fn normalize(fronts: &[Vec<[f64; 2]>]) -> Option<Vec<NormalizedFront>> {
    let bounds = NormalizationBounds::pooled(fronts.iter().map(Vec::as_slice))?;
    Some(
        fronts
            .iter()
            .map(|f| NormalizedFront {
                points: f.iter().map(|p| bounds.apply(*p)).collect(),
                bounds,
            })
            .collect(),
    )
}

/// Exact area dominated by `points` and bounded by `reference`. Points not
/// strictly better than the reference in both objectives contribute nothing.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .copied()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// L0.1-based dissimilarity `(sum |a_i - b_i|^0.1)^10`.
pub fn dissimilarity(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().powf(0.1))
        .sum::<f64>()
        .powf(10.0)
}

fn dissimilarity_matrix(points: &[[f64; 2]]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| dissimilarity(a, b)).collect())
        .collect()
}

/// Pure diversity: `PD(X) = max_s PD(X - s) + d(s, X - s)` with `d` the minimum
/// dissimilarity to the rest, `PD` of a singleton 0. Exact for up to
/// [`PD_EXACT_LIMIT`] points, farthest-insertion greedy beyond.
pub fn pure_diversity(points: &[[f64; 2]]) -> f64 {
    if points.len() <= PD_EXACT_LIMIT {
        pure_diversity_exact(points)
    } else {
        pure_diversity_greedy(points)
    }
}

fn pure_diversity_exact(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let d = dissimilarity_matrix(points);
    let full = (1usize << n) - 1;
    let mut pd = vec![0.0f64; full + 1];
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut best = f64::NEG_INFINITY;
        for i in (0..n).filter(|i| mask & (1 << i) != 0) {
            let rest = mask & !(1 << i);
            let near = (0..n)
                .filter(|j| rest & (1 << j) != 0)
                .map(|j| d[i][j])
                .fold(f64::INFINITY, f64::min);
            best = best.max(pd[rest] + near);
        }
        pd[mask] = best;
    }
    pd[full]
}

/// Builds an insertion order greedily, each step adding the point farthest (by
/// minimum dissimilarity) from those already placed; best over all start points.
pub fn pure_diversity_greedy(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let d = dissimilarity_matrix(points);
    let mut best = 0.0f64;
    for start in 0..n {
        let mut placed = vec![false; n];
        placed[start] = true;
        let mut near: Vec<f64> = d[start].clone();
        let mut total = 0.0;
        for _ in 1..n {
            let mut pick = usize::MAX;
            for j in (0..n).filter(|&j| !placed[j]) {
                if pick == usize::MAX || near[j] > near[pick] {
                    pick = j;
                }
            }
            total += near[pick];
            placed[pick] = true;
            for j in 0..n {
                near[j] = near[j].min(d[pick][j]);
            }
        }
        best = best.max(total);
    }
    best
}

/// HV and PD of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub case: String,
    pub algorithm: String,
    pub run: usize,
    pub hv: f64,
    pub pd: f64,
}

/// Per-case statistics for one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case: String,
    pub algorithm: String,
    pub runs: usize,
    pub hv_mean: f64,
    pub hv_std: f64,
    pub hv_rank: usize,
    pub pd_mean: f64,
    pub pd_std: f64,
    pub pd_rank: usize,
    pub score: usize,
    /// Run whose within-algorithm rank score is the median.
    pub median_run: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallRank {
    pub algorithm: String,
    pub score: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub cases: Vec<CaseSummary>,
    pub overall: Vec<OverallRank>,
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Competition ranks, 1 = best; ties share the lower rank and the next is skipped.
pub fn competition_ranks(values: &[f64], larger_is_better: bool) -> Vec<usize> {
    values
        .iter()
        .map(|v| {
            1 + values
                .iter()
                .filter(|o| if larger_is_better { *o > v } else { *o < v })
                .count()
        })
        .collect()
}

fn median_run(rows: &[&MetricRow]) -> usize {
    let hv: Vec<f64> = rows.iter().map(|r| r.hv).collect();
    let pd: Vec<f64> = rows.iter().map(|r| r.pd).collect();
    let (hr, pr) = (competition_ranks(&hv, true), competition_ranks(&pd, true));
    let mut scored: Vec<(usize, usize)> = rows.iter().enumerate().map(|(i, r)| (hr[i] + pr[i], r.run)).collect();
    scored.sort();
    scored[(scored.len() - 1) / 2].1
}

/// Per-case mean/std and ranks for every algorithm, plus the overall ranking by
/// summed per-case scores.
pub fn score_and_rank(rows: &[MetricRow]) -> Ranking {
    let mut grouped: BTreeMap<&str, BTreeMap<&str, Vec<&MetricRow>>> = BTreeMap::new();
    for r in rows {
        grouped.entry(&r.case).or_default().entry(&r.algorithm).or_default().push(r);
    }
    let mut cases = Vec::new();
    let mut totals: BTreeMap<String, usize> = BTreeMap::new();
    for (case, algs) in &grouped {
        let stats: Vec<(&str, (f64, f64), (f64, f64), usize, usize)> = algs
            .iter()
            .map(|(alg, runs)| {
                let hv: Vec<f64> = runs.iter().map(|r| r.hv).collect();
                let pd: Vec<f64> = runs.iter().map(|r| r.pd).collect();
                (*alg, mean_std(&hv), mean_std(&pd), runs.len(), median_run(runs))
            })
            .collect();
        let hv_ranks = competition_ranks(&stats.iter().map(|s| s.1 .0).collect::<Vec<_>>(), true);
        let pd_ranks = competition_ranks(&stats.iter().map(|s| s.2 .0).collect::<Vec<_>>(), true);
        for (i, (alg, hv, pd, n, med)) in stats.into_iter().enumerate() {
            let score = hv_ranks[i] + pd_ranks[i];
            *totals.entry(alg.to_string()).or_default() += score;
            cases.push(CaseSummary {
                case: case.to_string(),
                algorithm: alg.to_string(),
                runs: n,
                hv_mean: hv.0,
                hv_std: hv.1,
                hv_rank: hv_ranks[i],
                pd_mean: pd.0,
                pd_std: pd.1,
                pd_rank: pd_ranks[i],
                score,
                median_run: med,
            });
        }
    }
    let scores: Vec<f64> = totals.values().map(|&s| s as f64).collect();
    let ranks = competition_ranks(&scores, false);
    let overall = totals
        .into_iter()
        .zip(ranks)
        .map(|((algorithm, score), rank)| OverallRank { algorithm, score, rank })
        .collect();
    Ranking { cases, overall }
}

/// HV/PD rows for one case: pooled normalisation across every supplied front,
/// then each front scored against reference (1, 1). Empty fronts score 0.
pub fn case_metrics(case: &str, fronts: &[(String, usize, Vec<[f64; 2]>)]) -> Vec<MetricRow> {
    let raw: Vec<Vec<[f64; 2]>> = fronts.iter().map(|f| f.2.clone()).collect();
    let normalized = normalize(&raw);
    fronts
        .iter()
        .enumerate()
        .map(|(i, (alg, run, _))| {
            let (hv, pd) = match &normalized {
                Some(nf) if !nf[i].points.is_empty() => {
                    (hypervolume_2d(&nf[i].points, [1.0, 1.0]), pure_diversity(&nf[i].points))
                }
                _ => (0.0, 0.0),
            };
            MetricRow {
                case: case.to_string(),
                algorithm: alg.clone(),
                run: *run,
                hv,
                pd,
            }
        })
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Serialises `rows` with a header derived from the field names.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

/// Table with one row per case and `HV`/`PD` cells `mean±std (rank)` per algorithm.
pub fn write_table_csv<W: Write>(ranking: &Ranking, algorithms: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["case".to_string()];
    for metric in ["HV", "PD"] {
        header.extend(algorithms.iter().map(|a| format!("{metric} {a}")));
    }
    w.write_record(&header).map_err(csv_err)?;
    let mut by_case: BTreeMap<&str, Vec<&CaseSummary>> = BTreeMap::new();
    for c in &ranking.cases {
        by_case.entry(&c.case).or_default().push(c);
    }
    for (case, rows) in by_case {
        let mut rec = vec![case.to_string()];
        let cell = |a: &String, hv: bool| {
            rows.iter().find(|r| &r.algorithm == a).map_or(String::new(), |r| {
                if hv {
                    format!("{:.4}±{:.4} ({})", r.hv_mean, r.hv_std, r.hv_rank)
                } else {
                    format!("{:.4}±{:.4} ({})", r.pd_mean, r.pd_std, r.pd_rank)
                }
            })
        };
        rec.extend(algorithms.iter().map(|a| cell(a, true)));
        rec.extend(algorithms.iter().map(|a| cell(a, false)));
        w.write_record(&rec).map_err(csv_err)?;
    }
    let mut rec = vec!["overall".to_string()];
    for _ in 0..2 {
        rec.extend(algorithms.iter().map(|a| {
            ranking
                .overall
                .iter()
                .find(|o| &o.algorithm == a)
                .map_or(String::new(), |o| format!("{} ({})", o.score, o.rank))
        }));
    }
    w.write_record(&rec).map_err(csv_err)?;
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hv_examples() {
        assert_eq!(hypervolume_2d(&[[0.5, 0.5]], [1.0, 1.0]), 0.25);
        assert!((hypervolume_2d(&[[0.2, 0.6], [0.6, 0.2]], [1.0, 1.0]) - 0.48).abs() < 1e-12);
        assert_eq!(hypervolume_2d(&[], [1.0, 1.0]), 0.0);
        assert_eq!(hypervolume_2d(&[[1.0, 0.5], [0.5, 1.2]], [1.0, 1.0]), 0.0);
        // dominated extras change nothing
        assert_eq!(hypervolume_2d(&[[0.5, 0.5], [0.7, 0.7]], [1.0, 1.0]), 0.25);
    }

    #[test]
    fn pd_examples() {
        assert_eq!(pure_diversity(&[[0.3, 0.3]]), 0.0);
        assert_eq!(pure_diversity(&[]), 0.0);
        let a = [0.0, 1.0];
        let b = [1.0, 0.0];
        assert!((pure_diversity(&[a, b]) - dissimilarity(&a, &b)).abs() < 1e-12);
        assert!((dissimilarity(&a, &b) - 1024.0).abs() < 1e-9);
        let set = [[0.0, 1.0], [0.4, 0.5], [1.0, 0.0]];
        let dup = [[0.0, 1.0], [0.4, 0.5], [1.0, 0.0], [0.4, 0.5]];
        assert!((pure_diversity(&set) - pure_diversity(&dup)).abs() < 1e-9);
    }

    #[test]
    fn normalization_examples() {
        let n = normalize(&[vec![[10.0, 1.0], [20.0, 3.0]]]).unwrap();
        assert_eq!(n[0].points, vec![[0.0, 0.0], [1.0, 1.0]]);
        let n = normalize(&[vec![[10.0, 2.0], [20.0, 2.0]]]).unwrap();
        assert_eq!(n[0].points[1], [1.0, 0.0]);
        assert!(normalize(&[vec![], vec![]]).is_none());
        let f = vec![[0.0, 1.0], [0.3, 0.4], [1.0, 0.0]];
        assert_eq!(normalize(std::slice::from_ref(&f)).unwrap()[0].points, f);
    }

    fn row(case: &str, alg: &str, run: usize, hv: f64, pd: f64) -> MetricRow {
        MetricRow {
            case: case.into(),
            algorithm: alg.into(),
            run,
            hv,
            pd,
        }
    }

    #[test]
    fn ranking_examples() {
        assert_eq!(competition_ranks(&[0.9, 0.8], true), vec![1, 2]);
        assert_eq!(competition_ranks(&[0.5, 0.9, 0.5], true), vec![2, 1, 2]);
        assert_eq!(competition_ranks(&[0.7, 0.7, 0.1], true), vec![1, 1, 3]);
        let rows = vec![
            row("C1", "a", 0, 0.9, 2.0),
            row("C1", "b", 0, 0.8, 3.0),
            row("C2", "a", 0, 0.9, 2.0),
            row("C2", "b", 0, 0.8, 1.0),
        ];
        let r = score_and_rank(&rows);
        assert_eq!(r.overall[0], OverallRank { algorithm: "a".into(), score: 5, rank: 1 });
        assert_eq!(r.overall[1], OverallRank { algorithm: "b".into(), score: 7, rank: 2 });
        let single = score_and_rank(&rows.iter().filter(|r| r.algorithm == "a").cloned().collect::<Vec<_>>());
        assert!(single.cases.iter().all(|c| c.hv_rank == 1 && c.pd_rank == 1));
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
    }

    #[test]
    fn median_run_is_middle_scorer() {
        let rows = vec![
            row("C1", "a", 0, 0.1, 0.1),
            row("C1", "a", 1, 0.5, 0.5),
            row("C1", "a", 2, 0.9, 0.9),
        ];
        assert_eq!(score_and_rank(&rows).cases[0].median_run, 1);
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![row("C1", "aawa", 0, 0.123456789012345, 1e-300), row("C1", "cmoead", 1, 0.0, 2.5)];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("case,algorithm,run,hv,pd\n"));
        let back: Vec<MetricRow> = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn case_metrics_empty_front_scores_zero() {
        let m = case_metrics(
            "C1",
            &[("a".into(), 0, vec![[1.0, 2.0], [2.0, 1.0]]), ("b".into(), 0, vec![])],
        );
        assert_eq!((m[1].hv, m[1].pd), (0.0, 0.0));
        assert!((m[0].hv - 0.0).abs() < 1e-15);
        assert!(m[0].pd > 0.0);
    }
}
