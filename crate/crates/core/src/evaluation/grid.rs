use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{prepare_folds, run_prepared, CVReport, PreparedFolds};
use crate::classifiers::{Classifier, TrainSpec};
use crate::dataio::{FoldPlan, LabeledDataset};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// `10^lo, …, 10^hi`.
pub fn decades(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 10f64.powi(e)).collect()
}

/// `2^lo, …, 2^hi`.
pub fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|e| 2f64.powi(e)).collect()
}

/// Candidate values per hyperparameter. Absent lists are parameters the
/// classifier does not use; `sigma` present selects the RBF kernel.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub delta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub universum_size: Option<Vec<usize>>,
}

/// One grid cell: `(δ, ν, γ, ψ, σ, u)`, unused entries `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub delta: f64,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
    pub psi: Option<f64>,
    pub sigma: Option<f64>,
    pub universum_size: Option<usize>,
}

impl GridPoint {
    pub fn spec(&self, classifier: Classifier) -> Result<TrainSpec> {
        let mut spec = match classifier {
            Classifier::Gepsvm => TrainSpec::gepsvm(self.delta),
            Classifier::Igepsvm => TrainSpec::igepsvm(self.delta, self.nu.unwrap_or(0.0)),
            Classifier::Ugepsvm => TrainSpec::ugepsvm(self.delta),
            Classifier::Iugepsvm => TrainSpec::iugepsvm(self.delta, self.gamma.unwrap_or(0.0), self.psi.unwrap_or(0.0)),
        };
        if let Some(s) = self.sigma {
            spec = spec.with_kernel(KernelSpec::rbf(s)?);
        }
        Ok(spec)
    }
}

impl GridSpec {
    /// The full decade/dyadic ranges for `classifier`; `rbf` adds σ.
    pub fn full(classifier: Classifier, rbf: bool) -> Self {
        let d = decades(-5, 5);
        GridSpec {
            delta: d.clone(),
            nu: (classifier == Classifier::Igepsvm).then(|| d.clone()),
            gamma: (classifier == Classifier::Iugepsvm).then(|| d.clone()),
            psi: (classifier == Classifier::Iugepsvm).then(|| d.clone()),
            sigma: rbf.then(|| dyadic(-5, 5)),
            universum_size: classifier.uses_universum().then(|| (1..=10).map(|i| 10 * i).collect()),
        }
    }

    pub fn single(point: GridPoint) -> Self {
        GridSpec {
            delta: vec![point.delta],
            nu: point.nu.map(|v| vec![v]),
            gamma: point.gamma.map(|v| vec![v]),
            psi: point.psi.map(|v| vec![v]),
            sigma: point.sigma.map(|v| vec![v]),
            universum_size: point.universum_size.map(|v| vec![v]),
        }
    }

    /// Checks that exactly the lists `classifier` consumes are present and
    /// non-empty, and that all values are usable.
    pub fn validate_for(&self, classifier: Classifier) -> Result<()> {
        fn need<T>(name: &str, list: &Option<Vec<T>>, used: bool, c: Classifier) -> Result<()> {
            match (list, used) {
                (Some(v), true) if v.is_empty() => Err(Error::EmptyGrid),
                (None, true) => Err(Error::InvalidInput(format!("{c} grid needs {name} values"))),
                (Some(_), false) => Err(Error::InvalidInput(format!("{c} does not use {name}"))),
                _ => Ok(()),
            }
        }
        if self.delta.is_empty() {
            return Err(Error::EmptyGrid);
        }
        need("nu", &self.nu, classifier == Classifier::Igepsvm, classifier)?;
        need("gamma", &self.gamma, classifier == Classifier::Iugepsvm, classifier)?;
        need("psi", &self.psi, classifier == Classifier::Iugepsvm, classifier)?;
        need(
            "universum_size",
            &self.universum_size,
            classifier.uses_universum(),
            classifier,
        )?;
        if let Some(s) = &self.sigma {
            if s.is_empty() {
                return Err(Error::EmptyGrid);
            }
        }
        let reals = self
            .delta
            .iter()
            .chain(self.nu.iter().flatten())
            .chain(self.gamma.iter().flatten())
            .chain(self.psi.iter().flatten());
        for v in reals {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "grid value {v} must be finite and non-negative"
                )));
            }
        }
        for s in self.sigma.iter().flatten() {
            KernelSpec::rbf(*s)?;
        }
        Ok(())
    }

    pub fn cardinality(&self) -> usize {
        let len = |o: &Option<Vec<f64>>| o.as_ref().map_or(1, |v| sorted(v).len());
        sorted(&self.delta).len()
            * len(&self.nu)
            * len(&self.gamma)
            * len(&self.psi)
            * len(&self.sigma)
            * self.universum_size.as_ref().map_or(1, |v| sorted_usize(v).len())
    }

    /// All cells in lexicographic order of `(δ, ν, γ, ψ, σ, u)`, each list
    /// sorted ascending with duplicates removed.
    pub fn points(&self) -> Vec<GridPoint> {
        let opt = |o: &Option<Vec<f64>>| {
            o.as_ref()
                .map_or(vec![None], |v| sorted(v).into_iter().map(Some).collect())
        };
        let us: Vec<Option<usize>> = self
            .universum_size
            .as_ref()
            .map_or(vec![None], |v| sorted_usize(v).into_iter().map(Some).collect());
        let mut out = Vec::with_capacity(self.cardinality());
        for &delta in &sorted(&self.delta) {
            for &nu in &opt(&self.nu) {
                for &gamma in &opt(&self.gamma) {
                    for &psi in &opt(&self.psi) {
                        for &sigma in &opt(&self.sigma) {
                            for &universum_size in &us {
                                out.push(GridPoint {
                                    delta,
                                    nu,
                                    gamma,
                                    psi,
                                    sigma,
                                    universum_size,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

fn sorted_usize(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: TrainSpec,
    pub best_point: GridPoint,
    pub report: CVReport,
    /// Cross-validation runs executed, one per grid cell.
    pub cv_runs: usize,
    /// Mean accuracy per cell in grid order; `None` where training failed.
    pub evaluated: Vec<(GridPoint, Option<f64>)>,
    pub failures: usize,
}

/// Exhaustive search; the highest mean accuracy wins and ties go to the
/// earliest cell in lexicographic order. Cells run on the current rayon
/// pool. Cells whose training fails are skipped; if all fail the first
/// error is returned.
pub fn grid_search_prepared(prepared: &PreparedFolds, classifier: Classifier, grid: &GridSpec) -> Result<GridResult> {
    grid.validate_for(classifier)?;
    let available = prepared.universum_available();
    if let Some(u) = grid.universum_size.iter().flatten().find(|&&u| u > available) {
        return Err(Error::InvalidInput(format!(
            "Universum size {u} exceeds the {available} rows available"
        )));
    }
    let points = grid.points();
    let runs: Vec<Result<CVReport>> = points
        .par_iter()
        .map(|pt| run_prepared(prepared, &pt.spec(classifier)?, pt.universum_size.unwrap_or(0)))
        .collect();
    let cv_runs = runs.len();
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in runs.iter().enumerate() {
        if let Ok(rep) = r {
            if best.is_none_or(|(_, acc)| rep.mean_accuracy > acc) {
                best = Some((i, rep.mean_accuracy));
            }
        }
    }
    let evaluated: Vec<(GridPoint, Option<f64>)> = points
        .iter()
        .zip(&runs)
        .map(|(p, r)| (*p, r.as_ref().ok().map(|rep| rep.mean_accuracy)))
        .collect();
    let failures = evaluated.iter().filter(|(_, a)| a.is_none()).count();
    let mut runs = runs;
    match best {
        Some((i, _)) => {
            let report = runs.swap_remove(i)?;
            Ok(GridResult {
                best: report.best_params,
                best_point: points[i],
                report,
                cv_runs,
                evaluated,
                failures,
            })
        }
        None => Err(runs.into_iter().find_map(|r| r.err()).unwrap_or(Error::EmptyGrid)),
    }
}

/// Grid search on a featurized dataset; its Universum rows are the pool
/// the `universum_size` values take prefixes of.
pub fn grid_search(
    dataset: &LabeledDataset,
    folds: &FoldPlan,
    classifier: Classifier,
    grid: &GridSpec,
) -> Result<GridResult> {
    grid.validate_for(classifier)?;
    grid_search_prepared(&prepare_folds(dataset, folds)?, classifier, grid)
}
