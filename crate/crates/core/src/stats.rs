//! Nonparametric model comparison: Friedman omnibus test, pairwise
//! Wilcoxon signed-rank tests and win-tie-loss tallies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};

/// Above this many nonzero differences the Wilcoxon p-value comes from the
/// normal approximation instead of the exact null distribution.
pub const EXACT_WILCOXON_MAX_N: usize = 25;

/// Accuracies of Tables 1 and 2 of the reference benchmark, bundled verbatim.
pub const PUBLISHED_TABLES_JSON: &str = include_str!("../data/published_tables.json");

/// Accuracy matrix: one row per feature configuration, one column per model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub models: Vec<String>,
    pub features: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl AccuracyTable {
    pub fn new(models: Vec<String>, features: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != features.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature names for {} rows",
                features.len(),
                values.len()
            )));
        }
        if let Some(row) = values.iter().find(|r| r.len() != models.len()) {
            return Err(Error::DimensionMismatch(format!(
                "row of {} values for {} models",
                row.len(),
                models.len()
            )));
        }
        Ok(Self {
            models,
            features,
            values,
        })
    }

    pub fn column(&self, model: &str) -> Result<Vec<f64>> {
        let j = self
            .models
            .iter()
            .position(|m| m == model)
            .ok_or_else(|| Error::InvalidInput(format!("no model named {model:?}")))?;
        Ok(self.values.iter().map(|r| r[j]).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
struct PublishedTask {
    accuracy: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
struct PublishedTables {
    models: Vec<String>,
    features: Vec<String>,
    tasks: BTreeMap<String, PublishedTask>,
}

/// Published accuracy table for `task` (`o_vs_s` or `z_vs_s`).
pub fn published_table(task: &str) -> Result<AccuracyTable> {
    let tables: PublishedTables = serde_json::from_str(PUBLISHED_TABLES_JSON)?;
    let t = tables
        .tasks
        .get(task)
        .ok_or_else(|| Error::InvalidInput(format!("no published table for task {task:?}")))?;
    AccuracyTable::new(tables.models, tables.features, t.accuracy.clone())
}

/// Ranks with 1 for the largest value; tied values share the mean of the
/// ranks they span.
pub fn fractional_ranks_desc(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Ranks of absolute values, smallest first, ties averaged.
fn fractional_ranks_asc(values: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    fractional_ranks_desc(&neg)
}

fn check_matrix(m: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = m.len();
    let k = m.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 rows and 2 columns, got {n}x{k}"
        )));
    }
    if m.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch("ragged accuracy matrix".into()));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("accuracy matrix".into()));
    }
    Ok((n, k))
}

/// Per-column average of the row-wise descending fractional ranks.
pub fn average_ranks(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (n, k) = check_matrix(m)?;
    let mut sums = vec![0.0; k];
    for row in m {
        for (s, r) in sums.iter_mut().zip(fractional_ranks_desc(row)) {
            *s += r;
        }
    }
    Ok(sums.into_iter().map(|s| s / n as f64).collect())
}

pub fn column_means(m: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (n, k) = check_matrix(m)?;
    Ok((0..k).map(|j| m.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect())
}

/// Upper tail of the χ² distribution, `Q(df/2, x/2)`.
pub fn chi2_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma_ur(df as f64 / 2.0, x / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi2: f64,
    pub df: usize,
    pub p_value: f64,
    pub critical_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub n: usize,
    pub k: usize,
}

/// Friedman test over an `N × k` accuracy matrix (rows are blocks).
pub fn friedman_test(m: &[Vec<f64>], alpha: f64) -> Result<FriedmanResult> {
    let (n, k) = check_matrix(m)?;
    let r = average_ranks(m)?;
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = r.iter().map(|x| x * x).sum();
    let chi2 = (12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0)).max(0.0);
    let df = k - 1;
    let p_value = chi2_sf(chi2, df);
    let critical_value = ChiSquared::new(df as f64)
        .map(|d| d.inverse_cdf(1.0 - alpha))
        .unwrap_or(f64::NAN);
    Ok(FriedmanResult {
        chi2,
        df,
        p_value,
        critical_value,
        reject: p_value < alpha,
        alpha,
        n,
        k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `max(W₊, W₋)`: the rank sum of the dominant direction.
    pub w_statistic: f64,
    /// Rank sum of pairs with `b > a`.
    pub w_plus: f64,
    /// Rank sum of pairs with `a > b`.
    pub w_minus: f64,
    /// One-sided exact (or approximate) tail `P(T ≤ min(W₊, W₋))`.
    pub p_value: f64,
    pub p_two_sided: f64,
    pub exact: bool,
    /// Standardized `W₊` under the null, with tie correction.
    pub z: f64,
    /// `w_statistic` over the maximal rank sum `N(N+1)/2` of all `N` pairs.
    pub effect_size_r: f64,
    /// `|z| / √n_effective`.
    pub effect_size_z: f64,
    pub n_effective: usize,
    pub n_total: usize,
    pub alpha: f64,
    pub n_comparisons: usize,
    pub significant_uncorrected: bool,
    pub significant_bonferroni: bool,
}

/// Number of sign assignments per doubled rank sum, for ranks given
/// doubled so midranks stay integral.
fn signed_rank_counts(doubled: &[usize]) -> Vec<f64> {
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

/// Wilcoxon signed-rank test of paired samples `a`, `b`. Zero differences
/// are dropped; tied magnitudes share midranks.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], n_comparisons: usize, alpha: f64) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "samples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("paired samples".into()));
    }
    if n_comparisons == 0 {
        return Err(Error::InvalidInput("n_comparisons must be positive".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Err(Error::NoNonzeroDifferences);
    }
    let ranks = fractional_ranks_asc(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_minus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let w_min = w_plus.min(w_minus);

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = if var > 0.0 { (w_plus - mean) / var.sqrt() } else { 0.0 };

    let exact = n <= EXACT_WILCOXON_MAX_N;
    let p_value = if exact {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let counts = signed_rank_counts(&doubled);
        let limit = (2.0 * w_min).round() as usize;
        let below: f64 = counts[..=limit.min(counts.len() - 1)].iter().sum();
        below / 2f64.powi(n as i32)
    } else {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let zc = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
        normal.cdf(-zc)
    };
    let n_total = a.len() as f64;
    let w_statistic = w_plus.max(w_minus);
    Ok(WilcoxonResult {
        w_statistic,
        w_plus,
        w_minus,
        p_value,
        p_two_sided: (2.0 * p_value).min(1.0),
        exact,
        z,
        effect_size_r: w_statistic / (n_total * (n_total + 1.0) / 2.0),
        effect_size_z: z.abs() / nf.sqrt(),
        n_effective: n,
        n_total: a.len(),
        alpha,
        n_comparisons,
        significant_uncorrected: p_value < alpha,
        significant_bonferroni: p_value < alpha / n_comparisons as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinTieLoss {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
    pub win_rate: f64,
    pub non_loss_rate: f64,
}

impl WinTieLoss {
    pub fn tally(&self) -> String {
        format!("{}-{}-{}", self.wins, self.ties, self.losses)
    }
}

/// Head-to-head count of `a` against `b`; differences within `tolerance`
/// are ties.
pub fn win_tie_loss(a: &[f64], b: &[f64], tolerance: f64) -> Result<WinTieLoss> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "samples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("nothing to compare".into()));
    }
    let (mut wins, mut ties, mut losses) = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        if d > tolerance {
            wins += 1;
        } else if d < -tolerance {
            losses += 1;
        } else {
            ties += 1;
        }
    }
    let total = a.len() as f64;
    Ok(WinTieLoss {
        wins,
        ties,
        losses,
        win_rate: 100.0 * wins as f64 / total,
        non_loss_rate: 100.0 * (wins + ties) as f64 / total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseWilcoxon {
    pub model_a: String,
    pub model_b: String,
    pub result: WilcoxonResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseWinTieLoss {
    pub model: String,
    pub baseline: String,
    pub tally: String,
    pub result: WinTieLoss,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub task: String,
    pub models: Vec<String>,
    pub features: Vec<String>,
    pub average_accuracy: Vec<f64>,
    pub average_rank: Vec<f64>,
    pub friedman: FriedmanResult,
    /// Every model pair `(i, j)` with `i < j` in column order. Pairs whose
    /// columns are identical are listed under `skipped`.
    pub wilcoxon: Vec<PairwiseWilcoxon>,
    pub skipped: Vec<(String, String)>,
    pub win_tie_loss: Vec<PairwiseWinTieLoss>,
}

/// Friedman, all pairwise Wilcoxon tests (Bonferroni over the number of
/// pairs) and win-tie-loss of `reference` against every other model.
pub fn stat_report(task: &str, table: &AccuracyTable, reference: &str, alpha: f64) -> Result<StatReport> {
    let friedman = friedman_test(&table.values, alpha)?;
    let k = table.models.len();
    let pairs = k * (k - 1) / 2;
    let mut wilcoxon = Vec::new();
    let mut skipped = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let a = table.column(&table.models[i])?;
            let b = table.column(&table.models[j])?;
            match wilcoxon_signed_rank(&a, &b, pairs, alpha) {
                Ok(result) => wilcoxon.push(PairwiseWilcoxon {
                    model_a: table.models[i].clone(),
                    model_b: table.models[j].clone(),
                    result,
                }),
                Err(Error::NoNonzeroDifferences) => skipped.push((table.models[i].clone(), table.models[j].clone())),
                Err(e) => return Err(e),
            }
        }
    }
    let reference_col = table.column(reference)?;
    let mut wtl = Vec::new();
    for m in table.models.iter().filter(|m| *m != reference) {
        let result = win_tie_loss(&reference_col, &table.column(m)?, 0.0)?;
        wtl.push(PairwiseWinTieLoss {
            model: reference.to_string(),
            baseline: m.clone(),
            tally: result.tally(),
            result,
        });
    }
    Ok(StatReport {
        task: task.to_string(),
        models: table.models.clone(),
        features: table.features.clone(),
        average_accuracy: column_means(&table.values)?,
        average_rank: average_ranks(&table.values)?,
        friedman,
        wilcoxon,
        skipped,
        win_tie_loss: wtl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Γ(k/2) for positive integer k, from Γ(1) = 1 and Γ(1/2) = √π.
    fn gamma_half(k: usize) -> f64 {
        let (mut g, mut x) = if k.is_multiple_of(2) {
            (1.0, 1.0)
        } else {
            (std::f64::consts::PI.sqrt(), 0.5)
        };
        while x < k as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }

    fn chi2_pdf(x: f64, k: usize) -> f64 {
        let h = k as f64 / 2.0;
        x.powf(h - 1.0) * (-x / 2.0).exp() / (2f64.powf(h) * gamma_half(k))
    }

    /// Composite Simpson integral of the density over `[x, x + 400]`.
    fn tail_by_quadrature(x: f64, k: usize) -> f64 {
        let steps = 200_000;
        let h = 400.0 / steps as f64;
        let mut s = chi2_pdf(x, k) + chi2_pdf(x + 400.0, k);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * chi2_pdf(x + i as f64 * h, k);
        }
        s * h / 3.0
    }

    #[test]
    fn chi2_tail_matches_quadrature() {
        assert_eq!(chi2_sf(0.0, 5), 1.0);
        for (i, x) in [0.5, 1.0, 2.0, 3.5, 5.0, 7.5, 11.07, 15.061, 20.796, 30.0]
            .iter()
            .enumerate()
        {
            let df = [2, 3, 5][i % 3];
            let oracle = tail_by_quadrature(*x, df);
            assert!((chi2_sf(*x, df) - oracle).abs() < 1e-6, "x={x} df={df}");
        }
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(
            fractional_ranks_desc(&[57.0, 63.0, 75.0, 81.0, 76.0, 84.0]),
            vec![6.0, 5.0, 4.0, 2.0, 3.0, 1.0]
        );
        assert_eq!(
            fractional_ranks_desc(&[58.0, 64.0, 75.0, 78.0, 76.0, 78.0]),
            vec![6.0, 5.0, 4.0, 1.5, 3.0, 1.5]
        );
    }

    #[test]
    fn friedman_published_tables() {
        let o = friedman_test(&published_table("o_vs_s").unwrap().values, 0.05).unwrap();
        assert!((o.chi2 - 20.796).abs() < 0.01 && (o.p_value - 0.0009).abs() < 0.0002);
        assert_eq!(o.df, 5);
        assert!((o.critical_value - 11.070).abs() < 1e-3);
        assert!(o.reject);
        let z = friedman_test(&published_table("z_vs_s").unwrap().values, 0.05).unwrap();
        assert!((z.chi2 - 15.061).abs() < 0.01 && (z.p_value - 0.0101).abs() < 0.001);
    }

    #[test]
    fn friedman_identical_columns() {
        let m = vec![vec![70.0; 4], vec![60.0; 4], vec![80.0; 4]];
        let f = friedman_test(&m, 0.05).unwrap();
        assert_eq!((f.chi2, f.p_value, f.reject), (0.0, 1.0, false));
        assert!(friedman_test(&[vec![1.0, f64::NAN], vec![1.0, 2.0]], 0.05).is_err());
        assert!(friedman_test(&[vec![1.0, 2.0]], 0.05).is_err());
    }

    fn brute_force_p(diffs: &[f64]) -> f64 {
        let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
        let ranks = fractional_ranks_asc(&nz.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let plus: f64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
        let minus: f64 = ranks.iter().sum::<f64>() - plus;
        let observed = plus.min(minus);
        let n = nz.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= observed + 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn published_pairwise_rows() {
        let t = published_table("o_vs_s").unwrap();
        let iu = t.column("IU-GEPSVM").unwrap();
        let expected = [
            ("GEPSVM", 27.0, 0.015625, 0.964),
            ("UTSVM", 27.0, 0.015625, 0.964),
            ("UTPMSVM", 27.0, 0.015625, 0.964),
            ("I-GEPSVM", 15.0, 0.03125, 0.536),
            ("U-GEPSVM", 28.0, 0.0078125, 1.0),
        ];
        for (model, w, p, r) in expected {
            let res = wilcoxon_signed_rank(&t.column(model).unwrap(), &iu, 15, 0.05).unwrap();
            assert_eq!(res.w_statistic, w, "{model}");
            assert_eq!(res.p_value, p, "{model}");
            assert!((res.effect_size_r - r).abs() < 0.005, "{model}");
            assert!(res.significant_uncorrected && !res.significant_bonferroni);
            assert_eq!(res.p_value * 128.0, (res.p_value * 128.0).round());
        }
    }

    #[test]
    fn published_win_tie_loss() {
        let t = published_table("o_vs_s").unwrap();
        let iu = t.column("IU-GEPSVM").unwrap();
        let expected = [
            ("GEPSVM", "6-0-1", 85.7, 85.7),
            ("UTSVM", "6-0-1", 85.7, 85.7),
            ("UTPMSVM", "6-0-1", 85.7, 85.7),
            ("I-GEPSVM", "5-2-0", 71.4, 100.0),
            ("U-GEPSVM", "7-0-0", 100.0, 100.0),
        ];
        for (model, tally, win, non_loss) in expected {
            let w = win_tie_loss(&iu, &t.column(model).unwrap(), 0.0).unwrap();
            assert_eq!(w.tally(), tally);
            assert!((w.win_rate - win).abs() < 0.05 && (w.non_loss_rate - non_loss).abs() < 0.05);
        }
        let same = win_tie_loss(&iu, &iu, 0.0).unwrap();
        assert_eq!(same.tally(), "0-7-0");
    }

    #[test]
    fn wilcoxon_degenerate() {
        assert!(matches!(
            wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0], 1, 0.05),
            Err(Error::NoNonzeroDifferences)
        ));
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0], 1, 0.05).is_err());
    }

    #[test]
    fn large_sample_uses_normal_tail() {
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40)
            .map(|i| i as f64 + if i % 4 == 0 { -0.5 } else { 1.0 + i as f64 * 0.01 })
            .collect();
        let r = wilcoxon_signed_rank(&a, &b, 1, 0.05).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-4 && r.z > 0.0);
    }

    #[test]
    fn report_covers_all_pairs() {
        let rep = stat_report("o_vs_s", &published_table("o_vs_s").unwrap(), "IU-GEPSVM", 0.05).unwrap();
        assert_eq!(rep.wilcoxon.len() + rep.skipped.len(), 15);
        assert_eq!(rep.win_tie_loss.len(), 5);
        let means = [58.857, 65.571, 73.714, 79.286, 72.143, 81.286];
        let ranks = [5.571, 4.429, 3.714, 2.286, 3.429, 1.571];
        for j in 0..6 {
            assert!((rep.average_accuracy[j] - means[j]).abs() < 0.001);
            assert!((rep.average_rank[j] - ranks[j]).abs() < 0.001);
        }
    }

    proptest! {
        #[test]
        fn wilcoxon_matches_enumeration(d in proptest::collection::vec(-4i32..=4, 1..13)) {
            prop_assume!(d.iter().any(|&x| x != 0));
            let a = vec![0.0; d.len()];
            let b: Vec<f64> = d.iter().map(|&x| x as f64).collect();
            let r = wilcoxon_signed_rank(&a, &b, 1, 0.05).unwrap();
            prop_assert!((r.p_value - brute_force_p(&b)).abs() < 1e-12);
            let n = r.n_effective as f64;
            prop_assert!(r.w_statistic >= 0.0 && r.w_statistic <= n * (n + 1.0) / 2.0);
            let swapped = wilcoxon_signed_rank(&b, &a, 1, 0.05).unwrap();
            prop_assert_eq!(swapped.w_statistic, r.w_statistic);
            prop_assert_eq!(swapped.p_value, r.p_value);
            prop_assert!((0.0..=1.0).contains(&r.effect_size_r));
        }

        #[test]
        fn friedman_rank_invariant(rows in proptest::collection::vec(proptest::collection::vec(0i32..20, 4), 3..8)) {
            let m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let t: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|v| v * v * v + 2.0 * v).collect()).collect();
            let a = friedman_test(&m, 0.05).unwrap();
            let b = friedman_test(&t, 0.05).unwrap();
            prop_assert_eq!(a.chi2, b.chi2);
            prop_assert!(a.chi2 >= 0.0 && (0.0..=1.0).contains(&a.p_value));
        }

        #[test]
        fn win_loss_mirror(pairs in proptest::collection::vec((0i32..5, 0i32..5), 1..20)) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let ab = win_tie_loss(&a, &b, 0.0).unwrap();
            let ba = win_tie_loss(&b, &a, 0.0).unwrap();
            prop_assert_eq!(ab.wins, ba.losses);
            prop_assert_eq!(ab.wins + ab.ties + ab.losses, a.len());
        }
    }
}
