//! Stratified cross-validation, exhaustive grid search and full benchmark
//! runs over tasks × feature sets × classifiers.
//!
//! Reported accuracies are cross-validation means in percent. Timing covers
//! prediction only, measured with a monotonic clock.

mod benchmark;
mod grid;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifiers::{accuracy, train, Classifier, Hyperparameters, TrainSpec};
use crate::dataio::{select_rows, FoldPlan, LabeledDataset};
use crate::error::{Error, Result};
use crate::features::{extract_dataset, FeatureConfig, Standardizer};
use crate::stats;
use crate::Matrix;

pub use benchmark::{
    accuracy_table, read_results_csv, run_benchmark, BenchmarkManifest, BenchmarkResults, BenchmarkSummary, DataSource,
    FeatureOptions, ResultRow, TaskSummary, RESULTS_COLUMNS,
};
pub use grid::{decades, dyadic, grid_search, grid_search_prepared, GridPoint, GridResult, GridSpec};

/// One cross-validation split with features already computed.
#[derive(Clone, Debug)]
pub struct FoldData {
    /// Training rows plus every Universum row available.
    pub train: LabeledDataset,
    pub test_x1: Matrix,
    pub test_x2: Matrix,
}

/// Record of what each fold's feature fit saw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakageAudit {
    /// Rows the feature transform was fit on, per fold (0 when the
    /// transform has nothing to fit).
    pub fit_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    /// Test rows that were part of a fit; always zero unless the harness
    /// is broken.
    pub test_rows_in_fit: usize,
    /// Whether folds were z-scored with training statistics.
    pub standardized: bool,
}

/// Folds ready for repeated training, shared across grid points.
#[derive(Clone, Debug)]
pub struct PreparedFolds {
    pub plan: FoldPlan,
    pub folds: Vec<FoldData>,
    pub audit: LeakageAudit,
}

impl PreparedFolds {
    /// Z-scores every fold with column statistics of its labeled training
    /// rows; Universum and test rows are mapped with the same statistics.
    pub fn standardized(mut self) -> Result<Self> {
        for (f, fold) in self.folds.iter_mut().enumerate() {
            let (labeled, _) = fold.train.stacked_labeled();
            let s = Standardizer::fit(&labeled).map_err(|e| Error::Fold {
                fold: f,
                source: Box::new(e),
            })?;
            fold.train = LabeledDataset::new(
                s.transform(&fold.train.x1)?,
                s.transform(&fold.train.x2)?,
                s.transform(&fold.train.u)?,
            )?;
            fold.test_x1 = s.transform(&fold.test_x1)?;
            fold.test_x2 = s.transform(&fold.test_x2)?;
            self.audit.fit_rows[f] = labeled.nrows();
        }
        self.audit.standardized = true;
        Ok(self)
    }

    /// Universum rows available to every training split.
    pub fn universum_available(&self) -> usize {
        self.folds.iter().map(|f| f.train.p()).min().unwrap_or(0)
    }
}

fn split(plan: &FoldPlan, fold: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>) {
    let (tr1, tr2) = plan.train_indices(fold);
    let (te1, te2) = plan.test_indices(fold);
    (tr1, tr2, te1, te2)
}

fn check_plan(dataset: &LabeledDataset, plan: &FoldPlan) -> Result<()> {
    if plan.class1.len() != dataset.m1() || plan.class2.len() != dataset.m2() {
        return Err(Error::DimensionMismatch(format!(
            "fold plan covers {}+{} rows, dataset has {}+{}",
            plan.class1.len(),
            plan.class2.len(),
            dataset.m1(),
            dataset.m2()
        )));
    }
    if plan.class1.iter().chain(&plan.class2).any(|&f| f >= plan.k) {
        return Err(Error::InvalidInput("fold index out of range".into()));
    }
    Ok(())
}

/// Splits a dataset whose features are already final.
pub fn prepare_folds(dataset: &LabeledDataset, plan: &FoldPlan) -> Result<PreparedFolds> {
    check_plan(dataset, plan)?;
    let mut folds = Vec::with_capacity(plan.k);
    let mut test_rows = Vec::with_capacity(plan.k);
    for f in 0..plan.k {
        let (tr1, tr2, te1, te2) = split(plan, f);
        folds.push(FoldData {
            train: LabeledDataset::new(
                select_rows(&dataset.x1, &tr1),
                select_rows(&dataset.x2, &tr2),
                dataset.u.clone(),
            )?,
            test_x1: select_rows(&dataset.x1, &te1),
            test_x2: select_rows(&dataset.x2, &te2),
        });
        test_rows.push(te1.len() + te2.len());
    }
    Ok(PreparedFolds {
        plan: plan.clone(),
        folds,
        audit: LeakageAudit {
            fit_rows: vec![0; plan.k],
            test_rows,
            test_rows_in_fit: 0,
            standardized: false,
        },
    })
}

/// Splits raw signals and fits `feature` separately on each fold's
/// labeled training rows; test rows and Universum rows only pass through
/// the fitted transform.
pub fn prepare_folds_raw(raw: &LabeledDataset, plan: &FoldPlan, feature: &FeatureConfig) -> Result<PreparedFolds> {
    if !feature.is_fitted() {
        let (features, _) = extract_dataset(feature, raw, None)?;
        return prepare_folds(&features, plan);
    }
    check_plan(raw, plan)?;
    let m1 = raw.m1();
    let mut folds = Vec::with_capacity(plan.k);
    let mut audit = LeakageAudit {
        fit_rows: Vec::new(),
        test_rows: Vec::new(),
        test_rows_in_fit: 0,
        standardized: false,
    };
    for f in 0..plan.k {
        let (tr1, tr2, te1, te2) = split(plan, f);
        let raw_train = LabeledDataset::new(select_rows(&raw.x1, &tr1), select_rows(&raw.x2, &tr2), raw.u.clone())?;
        let (train, t) = extract_dataset(feature, &raw_train, None).map_err(|e| Error::Fold {
            fold: f,
            source: Box::new(e),
        })?;
        // the fit saw exactly the stacked training rows of this fold
        let fitted: Vec<usize> = tr1.iter().copied().chain(tr2.iter().map(|i| m1 + i)).collect();
        let tested: Vec<usize> = te1.iter().copied().chain(te2.iter().map(|i| m1 + i)).collect();
        audit.test_rows_in_fit += tested.iter().filter(|i| fitted.contains(i)).count();
        if t.fit_rows != fitted.len() {
            audit.test_rows_in_fit += t.fit_rows.saturating_sub(fitted.len());
        }
        audit.fit_rows.push(t.fit_rows);
        audit.test_rows.push(tested.len());
        folds.push(FoldData {
            train,
            test_x1: t.transform(&select_rows(&raw.x1, &te1))?,
            test_x2: t.transform(&select_rows(&raw.x2, &te2))?,
        });
    }
    Ok(PreparedFolds {
        plan: plan.clone(),
        folds,
        audit,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub classifier: Classifier,
    pub task: Option<String>,
    pub feature: Option<String>,
    /// Percent correct on each held-out fold.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Prediction wall-clock summed over folds.
    pub test_time_seconds: f64,
    pub best_params: TrainSpec,
    pub hyperparameters: Hyperparameters,
    pub universum_size: usize,
    pub seed: u64,
    pub k: usize,
    /// Labeled rows predicted across all folds.
    pub predictions: usize,
    pub leakage: LeakageAudit,
}

impl CVReport {
    pub fn with_labels(mut self, task: impl Into<String>, feature: impl Into<String>) -> Self {
        self.task = Some(task.into());
        self.feature = Some(feature.into());
        self
    }
}

/// Cross-validates `spec` on prepared folds using the first
/// `universum_size` Universum rows of every training split.
pub fn run_prepared(prepared: &PreparedFolds, spec: &TrainSpec, universum_size: usize) -> Result<CVReport> {
    spec.validate()?;
    let u = if spec.classifier.uses_universum() {
        universum_size
    } else {
        0
    };
    let mut fold_accuracies = Vec::with_capacity(prepared.folds.len());
    let mut test_time = 0.0;
    let mut predictions = 0;
    for (f, fold) in prepared.folds.iter().enumerate() {
        let wrap = |e: Error| Error::Fold {
            fold: f,
            source: Box::new(e),
        };
        let train_set = fold.train.with_universum_prefix(u).map_err(wrap)?;
        let model = train(&train_set, spec).map_err(wrap)?;
        let start = Instant::now();
        let acc = accuracy(&model, &fold.test_x1, &fold.test_x2).map_err(wrap)?;
        test_time += start.elapsed().as_secs_f64();
        fold_accuracies.push(100.0 * acc);
        predictions += fold.test_x1.nrows() + fold.test_x2.nrows();
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;
    Ok(CVReport {
        classifier: spec.classifier,
        task: None,
        feature: None,
        fold_accuracies,
        mean_accuracy,
        test_time_seconds: test_time,
        best_params: *spec,
        hyperparameters: spec.hyperparameters(u),
        universum_size: u,
        seed: prepared.plan.seed,
        k: prepared.plan.k,
        predictions,
        leakage: prepared.audit.clone(),
    })
}

/// Cross-validates `spec` on a featurized dataset with all its Universum
/// rows in every training split.
pub fn run_cv(dataset: &LabeledDataset, folds: &FoldPlan, spec: &TrainSpec) -> Result<CVReport> {
    let prepared = prepare_folds(dataset, folds)?;
    run_prepared(&prepared, spec, dataset.p())
}

/// Average fractional ranks of the columns of a features × models
/// accuracy matrix, 1 for the most accurate.
pub fn rank_models(accuracy_matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    if accuracy_matrix.is_empty() || accuracy_matrix[0].is_empty() {
        return Err(Error::InvalidInput("empty accuracy matrix".into()));
    }
    if accuracy_matrix.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("accuracy matrix".into()));
    }
    let k = accuracy_matrix[0].len();
    if accuracy_matrix.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch("ragged accuracy matrix".into()));
    }
    let mut sums = vec![0.0; k];
    for row in accuracy_matrix {
        for (s, r) in sums.iter_mut().zip(stats::fractional_ranks_desc(row)) {
            *s += r;
        }
    }
    Ok(sums.into_iter().map(|s| s / accuracy_matrix.len() as f64).collect())
}

#[cfg(test)]
mod tests;
