use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{grid_search_prepared, GridSpec};
use super::{prepare_folds_raw, rank_models};
use crate::classifiers::{Classifier, Hyperparameters};
use crate::dataio::{assemble_task, load_sets, make_folds, recordings_to_matrix, Recording, SetLabel, Task};
use crate::error::{Error, Result};
use crate::features::{DwtLayout, FeatureConfig};
use crate::stats::AccuracyTable;
use crate::synthetic::synthetic_sets;
use crate::Matrix;

pub const RESULTS_COLUMNS: [&str; 7] = [
    "task",
    "feature",
    "classifier",
    "mean_acc",
    "fold_accs",
    "params_json",
    "test_time_s",
];

/// Marker written to `mean_acc` for cells that failed.
const ERROR_MARKER: &str = "ERROR";

fn default_folds() -> usize {
    5
}

fn default_workers() -> usize {
    1
}

/// Generated stand-in recordings, for runs without the real archive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub per_set: usize,
    pub samples: usize,
    pub seed: u64,
}

fn yes() -> bool {
    true
}

/// Overrides applied to every feature id in the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureOptions {
    /// Z-score each fold with its training statistics.
    #[serde(default = "yes")]
    pub standardize: bool,
    #[serde(default)]
    pub dwt_layout: Option<DwtLayout>,
    #[serde(default)]
    pub n_components: Option<usize>,
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub ica_seed: Option<u64>,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            standardize: true,
            dwt_layout: None,
            n_components: None,
            top_k: None,
            ica_seed: None,
        }
    }
}

impl FeatureOptions {
    pub fn apply(&self, id: &str) -> Result<FeatureConfig> {
        let mut c = FeatureConfig::from_id(id)?;
        if let Some(l) = self.dwt_layout {
            c = c.with_layout(l);
        }
        if let FeatureConfig::Ica {
            n_components, top_k, ..
        } = c
        {
            if let Some(seed) = self.ica_seed {
                c = FeatureConfig::Ica {
                    n_components,
                    top_k,
                    seed,
                };
            }
        }
        if let FeatureConfig::Pca { n_components, top_k }
        | FeatureConfig::Ica {
            n_components, top_k, ..
        } = c
        {
            c = c.with_components(self.n_components.unwrap_or(n_components), self.top_k.or(top_k));
        }
        Ok(c)
    }
}

/// Tasks × feature ids × classifiers, with one grid per classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkManifest {
    pub tasks: Vec<Task>,
    pub features: Vec<String>,
    pub classifiers: Vec<Classifier>,
    /// Keyed by classifier name in any spelling `Classifier` parses.
    pub grids: BTreeMap<String, GridSpec>,
    #[serde(default)]
    pub data_root: Option<PathBuf>,
    /// Takes precedence over `data_root` when present.
    #[serde(default)]
    pub synthetic: Option<DataSource>,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub feature_options: FeatureOptions,
}

impl BenchmarkManifest {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn grid_for(&self, classifier: Classifier) -> Result<&GridSpec> {
        self.grids
            .iter()
            .find(|(k, _)| k.parse::<Classifier>().ok() == Some(classifier))
            .map(|(_, g)| g)
            .ok_or_else(|| Error::InvalidInput(format!("no grid for {classifier}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() || self.features.is_empty() || self.classifiers.is_empty() {
            return Err(Error::InvalidInput(
                "manifest needs tasks, features and classifiers".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be positive".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidInput("folds must be at least 2".into()));
        }
        for key in self.grids.keys() {
            key.parse::<Classifier>()?;
        }
        for f in &self.features {
            self.feature_options.apply(f)?;
        }
        for &c in &self.classifiers {
            self.grid_for(c)?.validate_for(c)?;
        }
        if self.synthetic.is_none() && self.data_root.is_none() {
            return Err(Error::InvalidInput("manifest needs data_root or synthetic".into()));
        }
        Ok(())
    }

    /// Keeps only the listed entries; `None` keeps everything.
    pub fn filtered(
        &self,
        tasks: Option<&[Task]>,
        features: Option<&[String]>,
        classifiers: Option<&[Classifier]>,
    ) -> Result<Self> {
        let mut m = self.clone();
        if let Some(t) = tasks {
            m.tasks.retain(|x| t.contains(x));
        }
        if let Some(f) = features {
            let wanted: Vec<String> = f
                .iter()
                .map(|id| FeatureConfig::from_id(id).map(|c| c.id()))
                .collect::<Result<_>>()?;
            m.features
                .retain(|x| FeatureConfig::from_id(x).is_ok_and(|c| wanted.contains(&c.id())));
        }
        if let Some(c) = classifiers {
            m.classifiers.retain(|x| c.contains(x));
        }
        m.validate()?;
        Ok(m)
    }

    fn load_raw(&self) -> Result<BTreeMap<SetLabel, Matrix>> {
        let mut labels: Vec<SetLabel> = self.tasks.iter().flat_map(|t| t.required_sets()).collect();
        labels.sort();
        labels.dedup();
        let recordings: BTreeMap<SetLabel, Vec<Recording>> = match (&self.synthetic, &self.data_root) {
            (Some(s), _) => synthetic_sets(s.per_set, s.samples, s.seed)?
                .into_iter()
                .filter(|(l, _)| labels.contains(l))
                .map(|(l, recs)| Ok((l, recs.into_iter().map(Recording::truncated).collect::<Result<_>>()?)))
                .collect::<Result<_>>()?,
            (None, Some(root)) => load_sets(root, &labels)?,
            (None, None) => return Err(Error::InvalidInput("no data source".into())),
        };
        recordings
            .iter()
            .map(|(l, recs)| Ok((*l, recordings_to_matrix(recs)?)))
            .collect()
    }
}

/// One (task, feature, classifier) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub task: String,
    pub feature: String,
    pub classifier: String,
    /// `None` when the cell failed.
    pub mean_acc: Option<f64>,
    pub fold_accs: Vec<f64>,
    pub params: Option<Hyperparameters>,
    pub test_time_s: f64,
    pub error: Option<String>,
}

impl ResultRow {
    fn failed(task: Task, feature: &str, classifier: Classifier, e: &Error) -> Self {
        ResultRow {
            task: task.to_string(),
            feature: feature.to_string(),
            classifier: classifier.to_string(),
            mean_acc: None,
            fold_accs: Vec::new(),
            params: None,
            test_time_s: 0.0,
            error: Some(e.to_string()),
        }
    }

    fn params_json(&self) -> Result<String> {
        Ok(match (&self.params, &self.error) {
            (Some(p), _) => serde_json::to_string(p)?,
            (None, e) => serde_json::to_string(&serde_json::json!({ "error": e }))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task: String,
    pub classifiers: Vec<String>,
    /// Features with a result for every classifier; averages use these.
    pub features: Vec<String>,
    pub incomplete_features: Vec<String>,
    pub average_accuracy: Vec<f64>,
    pub average_rank: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub seed: u64,
    pub folds: usize,
    pub cells: usize,
    pub failed_cells: usize,
    pub cv_runs: usize,
    pub accuracy: String,
    pub timing: String,
    pub tasks: Vec<TaskSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResults {
    pub rows: Vec<ResultRow>,
    pub summary: BenchmarkSummary,
}

fn join_accs(v: &[f64]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
}

impl BenchmarkResults {
    /// Results table; `with_timing = false` blanks the timing column so
    /// repeated runs compare byte for byte.
    pub fn to_csv(&self, with_timing: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(RESULTS_COLUMNS)?;
        for r in &self.rows {
            let mean = r.mean_acc.map_or(ERROR_MARKER.to_string(), |a| a.to_string());
            let time = if with_timing {
                format!("{:.6}", r.test_time_s)
            } else {
                String::new()
            };
            w.write_record([
                r.task.as_str(),
                &r.feature,
                &r.classifier,
                &mean,
                &join_accs(&r.fold_accs),
                &r.params_json()?,
                &time,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn failed_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Parses a results table written by [`BenchmarkResults::to_csv`].
pub fn read_results_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != RESULTS_COLUMNS {
        return Err(Error::InvalidInput(format!(
            "results header must be {}",
            RESULTS_COLUMNS.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |s: &str, what: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad {what} value {s:?}")))
        };
        let failed = &rec[3] == ERROR_MARKER;
        let fold_accs = if rec[4].is_empty() {
            Vec::new()
        } else {
            rec[4]
                .split(';')
                .map(|s| num(s, "fold accuracy"))
                .collect::<Result<_>>()?
        };
        let (params, error) = if failed {
            let v: serde_json::Value = serde_json::from_str(&rec[5])?;
            (None, Some(v["error"].as_str().unwrap_or("unknown").to_string()))
        } else {
            (Some(serde_json::from_str(&rec[5])?), None)
        };
        rows.push(ResultRow {
            task: rec[0].to_string(),
            feature: rec[1].to_string(),
            classifier: rec[2].to_string(),
            mean_acc: if failed {
                None
            } else {
                Some(num(&rec[3], "mean accuracy")?)
            },
            fold_accs,
            params,
            test_time_s: if rec[6].is_empty() { 0.0 } else { num(&rec[6], "time")? },
            error,
        });
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("results table has no rows".into()));
    }
    Ok(rows)
}

/// Features × classifiers accuracy matrix of one task, keeping only the
/// features every classifier completed. Order follows first appearance.
pub fn accuracy_table(rows: &[ResultRow], task: &str) -> Result<(AccuracyTable, Vec<String>)> {
    let rows: Vec<&ResultRow> = rows.iter().filter(|r| r.task == task).collect();
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("no results for task {task}")));
    }
    let mut classifiers: Vec<String> = Vec::new();
    let mut features: Vec<String> = Vec::new();
    for r in &rows {
        if !classifiers.contains(&r.classifier) {
            classifiers.push(r.classifier.clone());
        }
        if !features.contains(&r.feature) {
            features.push(r.feature.clone());
        }
    }
    let cell = |f: &str, c: &str| {
        rows.iter()
            .find(|r| r.feature == f && r.classifier == c)
            .and_then(|r| r.mean_acc)
    };
    let mut values = Vec::new();
    let mut kept = Vec::new();
    let mut incomplete = Vec::new();
    for f in &features {
        let row: Option<Vec<f64>> = classifiers.iter().map(|c| cell(f, c)).collect();
        match row {
            Some(v) => {
                values.push(v);
                kept.push(f.clone());
            }
            None => incomplete.push(f.clone()),
        }
    }
    Ok((AccuracyTable::new(classifiers, kept, values)?, incomplete))
}

fn summarize(rows: &[ResultRow], manifest: &BenchmarkManifest, cv_runs: usize) -> Result<BenchmarkSummary> {
    let mut tasks = Vec::new();
    for t in &manifest.tasks {
        let (table, incomplete) = accuracy_table(rows, t.as_str())?;
        let (average_accuracy, average_rank) = if table.values.is_empty() {
            (Vec::new(), Vec::new())
        } else {
            let n = table.values.len() as f64;
            let means = (0..table.models.len())
                .map(|j| table.values.iter().map(|r| r[j]).sum::<f64>() / n)
                .collect();
            (means, rank_models(&table.values)?)
        };
        tasks.push(TaskSummary {
            task: t.to_string(),
            classifiers: table.models,
            features: table.features,
            incomplete_features: incomplete,
            average_accuracy,
            average_rank,
        });
    }
    Ok(BenchmarkSummary {
        seed: manifest.seed,
        folds: manifest.folds,
        cells: rows.len(),
        failed_cells: rows.iter().filter(|r| r.error.is_some()).count(),
        cv_runs,
        accuracy: format!(
            "mean of {}-fold stratified cross-validation accuracy, percent",
            manifest.folds
        ),
        timing: "prediction wall-clock summed over folds, seconds; excludes training and feature extraction".into(),
        tasks,
    })
}

/// Runs every cell of the manifest on a pool of `manifest.workers`
/// threads. Per-cell failures are recorded in the row; only data loading
/// and manifest problems abort the run. Accuracy cells do not depend on
/// the worker count.
pub fn run_benchmark(manifest: &BenchmarkManifest) -> Result<BenchmarkResults> {
    manifest.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| run_cells(manifest))
}

fn run_cells(manifest: &BenchmarkManifest) -> Result<BenchmarkResults> {
    let raw = manifest.load_raw()?;
    let pairs: Vec<(Task, &String)> = manifest
        .tasks
        .iter()
        .flat_map(|t| manifest.features.iter().map(move |f| (*t, f)))
        .collect();
    let blocks: Vec<Vec<(ResultRow, usize)>> = pairs
        .par_iter()
        .map(|(task, feature)| run_block(manifest, &raw, *task, feature))
        .collect();
    let cv_runs = blocks.iter().flatten().map(|(_, n)| n).sum();
    let rows: Vec<ResultRow> = blocks.into_iter().flatten().map(|(r, _)| r).collect();
    let summary = summarize(&rows, manifest, cv_runs)?;
    Ok(BenchmarkResults { rows, summary })
}

/// All classifiers for one (task, feature); features are extracted once
/// per fold and shared.
fn run_block(
    manifest: &BenchmarkManifest,
    raw: &BTreeMap<SetLabel, Matrix>,
    task: Task,
    feature: &str,
) -> Vec<(ResultRow, usize)> {
    let config = manifest.feature_options.apply(feature);
    let id = config.as_ref().map_or(feature.to_string(), |c| c.id());
    let prepared = config.and_then(|config| {
        let n_universum = raw.get(&task.universum_set()).map_or(0, |m| m.nrows());
        let dataset = assemble_task(task, raw, n_universum, manifest.seed)?;
        let plan = make_folds(&dataset, manifest.folds, manifest.seed)?;
        let prepared = prepare_folds_raw(&dataset, &plan, &config)?;
        if manifest.feature_options.standardize {
            prepared.standardized()
        } else {
            Ok(prepared)
        }
    });
    manifest
        .classifiers
        .iter()
        .map(|&c| {
            let result = prepared
                .as_ref()
                .map_err(|e| Error::InvalidInput(e.to_string()))
                .and_then(|p| {
                    let grid = manifest.grid_for(c)?;
                    grid_search_prepared(p, c, grid)
                });
            match result {
                Ok(g) => {
                    let rep = g.report;
                    log::info!("{task} {id} {c}: {:.2}%", rep.mean_accuracy);
                    (
                        ResultRow {
                            task: task.to_string(),
                            feature: id.clone(),
                            classifier: c.to_string(),
                            mean_acc: Some(rep.mean_accuracy),
                            fold_accs: rep.fold_accuracies,
                            params: Some(rep.hyperparameters),
                            test_time_s: rep.test_time_seconds,
                            error: None,
                        },
                        g.cv_runs,
                    )
                }
                Err(e) => {
                    log::warn!("{task} {id} {c}: {e}");
                    (ResultRow::failed(task, &id, c, &e), 0)
                }
            }
        })
        .collect()
}
