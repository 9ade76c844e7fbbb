//! Bonn-format ingestion, binary task assembly, and stratified fold plans.
//!
//! The Bonn corpus ships one directory per set (Z, O, N, F, S), one ASCII
//! file per recording and one integer amplitude per line. Each recording
//! becomes one sample; segments are truncated to [`SEGMENT_LEN`] so that
//! dyadic wavelet decompositions are exact.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Matrix;

/// Samples kept per recording (the raw files carry 4097).
pub const SEGMENT_LEN: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SetLabel {
    Z,
    O,
    N,
    F,
    S,
}

impl SetLabel {
    pub const ALL: [SetLabel; 5] = [SetLabel::Z, SetLabel::O, SetLabel::N, SetLabel::F, SetLabel::S];

    pub fn as_str(self) -> &'static str {
        match self {
            SetLabel::Z => "Z",
            SetLabel::O => "O",
            SetLabel::N => "N",
            SetLabel::F => "F",
            SetLabel::S => "S",
        }
    }
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetLabel {
    type Err = Error;

    /// Accepts both naming schemes (`Z`..`S` and the letter aliases `A`..`E`).
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "Z" | "A" => Ok(SetLabel::Z),
            "O" | "B" => Ok(SetLabel::O),
            "N" | "C" => Ok(SetLabel::N),
            "F" | "D" => Ok(SetLabel::F),
            "S" | "E" => Ok(SetLabel::S),
            other => Err(Error::InvalidInput(format!("unknown Bonn set {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Recording {
    pub set_label: SetLabel,
    pub samples: Vec<f64>,
    pub source_id: String,
}

impl Recording {
    /// Drops trailing samples so the length is exactly [`SEGMENT_LEN`].
    pub fn truncated(mut self) -> Result<Self> {
        if self.samples.len() < SEGMENT_LEN {
            return Err(Error::InvalidInput(format!(
                "recording {} has {} samples, need at least {SEGMENT_LEN}",
                self.source_id,
                self.samples.len()
            )));
        }
        self.samples.truncate(SEGMENT_LEN);
        Ok(self)
    }
}

/// Loads every file in `directory` as one recording, in lexicographic
/// filename order.
pub fn load_bonn_set(directory: &Path, set_label: SetLabel) -> Result<Vec<Recording>> {
    if !directory.is_dir() {
        return Err(Error::MissingDirectory(directory.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(directory).map_err(|e| Error::io(directory, e))? {
        let entry = entry.map_err(|e| Error::io(directory, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(Error::NoRecordings(directory.to_path_buf()));
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    files
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let samples = parse_amplitudes(&text, path)?;
            Ok(Recording {
                set_label,
                samples,
                source_id: path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            })
        })
        .collect()
}

fn parse_amplitudes(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: i64 = trimmed.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            content: trimmed.to_string(),
        })?;
        samples.push(value as f64);
    }
    if samples.is_empty() {
        return Err(Error::EmptyRecording(path.to_path_buf()));
    }
    Ok(samples)
}

/// Writes a recording in the Bonn ASCII layout. Samples must be integral.
pub fn write_recording(path: &Path, recording: &Recording) -> Result<()> {
    let mut out = String::with_capacity(recording.samples.len() * 6);
    for &s in &recording.samples {
        if !s.is_finite() || s.fract() != 0.0 {
            return Err(Error::InvalidInput(format!("sample {s} is not an integer amplitude")));
        }
        out.push_str(&format!("{}\n", s as i64));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "o_vs_s")]
    OVsS,
    #[serde(rename = "z_vs_s")]
    ZVsS,
}

impl Task {
    pub fn positive_set(self) -> SetLabel {
        match self {
            Task::OVsS => SetLabel::O,
            Task::ZVsS => SetLabel::Z,
        }
    }

    pub fn negative_set(self) -> SetLabel {
        SetLabel::S
    }

    pub fn universum_set(self) -> SetLabel {
        SetLabel::N
    }

    pub fn required_sets(self) -> [SetLabel; 3] {
        [self.positive_set(), self.negative_set(), self.universum_set()]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::OVsS => "o_vs_s",
            Task::ZVsS => "z_vs_s",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "o_vs_s" | "ovss" => Ok(Task::OVsS),
            "z_vs_s" | "zvss" => Ok(Task::ZVsS),
            other => Err(Error::InvalidInput(format!("unknown task {other:?}"))),
        }
    }
}

/// Class +1 rows, class -1 rows and Universum rows sharing one feature space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub x1: Matrix,
    pub x2: Matrix,
    pub u: Matrix,
}

impl LabeledDataset {
    pub fn new(x1: Matrix, x2: Matrix, u: Matrix) -> Result<Self> {
        let n = x1.ncols();
        if x2.ncols() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "column counts X1={}, X2={}, U={}",
                n,
                x2.ncols(),
                u.ncols()
            )));
        }
        if x1.nrows() == 0 || x2.nrows() == 0 {
            return Err(Error::InvalidInput("both classes need at least one row".into()));
        }
        for (name, m) in [("X1", &x1), ("X2", &x2), ("U", &u)] {
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(Self { x1, x2, u })
    }

    /// Dataset without Universum rows.
    pub fn labeled_only(x1: Matrix, x2: Matrix) -> Result<Self> {
        let n = x1.ncols();
        Self::new(x1, x2, Matrix::zeros(0, n))
    }

    pub fn n(&self) -> usize {
        self.x1.ncols()
    }

    pub fn m1(&self) -> usize {
        self.x1.nrows()
    }

    pub fn m2(&self) -> usize {
        self.x2.nrows()
    }

    pub fn p(&self) -> usize {
        self.u.nrows()
    }

    /// Keeps the first `u` Universum rows. Equivalent to re-assembling the
    /// task with the same seed and a smaller Universum size.
    pub fn with_universum_prefix(&self, u: usize) -> Result<Self> {
        if u > self.p() {
            return Err(Error::InvalidInput(format!(
                "requested {u} Universum rows, only {} available",
                self.p()
            )));
        }
        Ok(Self {
            x1: self.x1.clone(),
            x2: self.x2.clone(),
            u: self.u.rows(0, u).into_owned(),
        })
    }

    /// Class roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x1: self.x2.clone(),
            x2: self.x1.clone(),
            u: self.u.clone(),
        }
    }

    /// All labeled rows stacked as `[X1; X2]` with their ±1 labels.
    pub fn stacked_labeled(&self) -> (Matrix, Vec<i8>) {
        let rows = stack_rows(&[&self.x1, &self.x2]);
        let mut labels = vec![1i8; self.m1()];
        labels.extend(std::iter::repeat_n(-1i8, self.m2()));
        (rows, labels)
    }
}

/// Vertically concatenates matrices with equal column counts.
pub fn stack_rows(parts: &[&Matrix]) -> Matrix {
    let ncols = parts.first().map(|m| m.ncols()).unwrap_or(0);
    let nrows = parts.iter().map(|m| m.nrows()).sum();
    let mut out = Matrix::zeros(nrows, ncols);
    let mut offset = 0;
    for part in parts {
        out.rows_mut(offset, part.nrows()).copy_from(part);
        offset += part.nrows();
    }
    out
}

/// Rows of `m` at `indices`, in order.
pub fn select_rows(m: &Matrix, indices: &[usize]) -> Matrix {
    Matrix::from_fn(indices.len(), m.ncols(), |i, j| m[(indices[i], j)])
}

/// Assembles the binary task from per-set feature rows. The Universum is a
/// seeded shuffle of set N truncated to `universum_size` rows.
pub fn assemble_task(
    task: Task,
    feature_rows_by_set: &BTreeMap<SetLabel, Matrix>,
    universum_size: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    let get = |label: SetLabel| {
        feature_rows_by_set
            .get(&label)
            .ok_or_else(|| Error::MissingSet(label.to_string()))
    };
    let pos = get(task.positive_set())?;
    let neg = get(task.negative_set())?;
    let uni = get(task.universum_set())?;
    if pos.ncols() != neg.ncols() || pos.ncols() != uni.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "feature dimensions {}={}, {}={}, {}={}",
            task.positive_set(),
            pos.ncols(),
            task.negative_set(),
            neg.ncols(),
            task.universum_set(),
            uni.ncols()
        )));
    }
    if universum_size > uni.nrows() {
        return Err(Error::InvalidInput(format!(
            "Universum size {universum_size} exceeds the {} rows of set {}",
            uni.nrows(),
            task.universum_set()
        )));
    }
    let mut order: Vec<usize> = (0..uni.nrows()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.truncate(universum_size);
    LabeledDataset::new(pos.clone(), neg.clone(), select_rows(uni, &order))
}

/// Per-class fold assignment for stratified k-fold cross-validation.
/// Universum rows are not part of the plan: they join every training split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold index of each class +1 row.
    pub class1: Vec<usize>,
    /// Fold index of each class -1 row.
    pub class2: Vec<usize>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (
            indices_where(&self.class1, |f| f == fold),
            indices_where(&self.class2, |f| f == fold),
        )
    }

    pub fn train_indices(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (
            indices_where(&self.class1, |f| f != fold),
            indices_where(&self.class2, |f| f != fold),
        )
    }
}

fn indices_where(assign: &[usize], pred: impl Fn(usize) -> bool) -> Vec<usize> {
    assign
        .iter()
        .enumerate()
        .filter(|(_, &f)| pred(f))
        .map(|(i, _)| i)
        .collect()
}

/// Seeded per-class shuffle followed by round-robin fold assignment.
pub fn make_folds(dataset: &LabeledDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("fold count {k} must be at least 2")));
    }
    if dataset.m1() < k || dataset.m2() < k {
        return Err(Error::InvalidInput(format!(
            "fold count {k} exceeds class size (m1={}, m2={})",
            dataset.m1(),
            dataset.m2()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = |m: usize| {
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut rng);
        let mut folds = vec![0; m];
        for (pos, &row) in order.iter().enumerate() {
            folds[row] = pos % k;
        }
        folds
    };
    let class1 = assign(dataset.m1());
    let class2 = assign(dataset.m2());
    Ok(FoldPlan {
        k,
        seed,
        class1,
        class2,
    })
}

/// Metadata written next to an `X1.csv`/`X2.csv`/`U.csv` bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub task: Task,
    pub u: usize,
    pub seed: u64,
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub p: usize,
}

impl BundleManifest {
    pub fn describe(task: Task, seed: u64, dataset: &LabeledDataset) -> Self {
        Self {
            task,
            u: dataset.p(),
            seed,
            n: dataset.n(),
            m1: dataset.m1(),
            m2: dataset.m2(),
            p: dataset.p(),
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes a matrix as CSV with header `f0,f1,…`. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = (0..m.ncols()).map(|j| format!("f{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:?}", m[(i, j)]));
        }
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::MissingDirectory(path.to_path_buf()),
            _ => Error::Csv(e),
        })?;
    let ncols = reader.headers()?.len();
    let mut values = Vec::new();
    let mut nrows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}: row {} has {} fields, header has {ncols}",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        for field in record.iter() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                content: field.to_string(),
            })?;
            values.push(v);
        }
        nrows += 1;
    }
    Ok(Matrix::from_row_slice(nrows, ncols, &values))
}

pub fn write_bundle(dir: &Path, dataset: &LabeledDataset, manifest: &BundleManifest) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_matrix_csv(&dir.join("X1.csv"), &dataset.x1)?;
    write_matrix_csv(&dir.join("X2.csv"), &dataset.x2)?;
    write_matrix_csv(&dir.join("U.csv"), &dataset.u)?;
    let json = serde_json::to_string_pretty(manifest)?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))
}

pub fn read_bundle(dir: &Path) -> Result<(LabeledDataset, BundleManifest)> {
    if !dir.is_dir() {
        return Err(Error::MissingDirectory(dir.to_path_buf()));
    }
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: BundleManifest = serde_json::from_str(&text)?;
    let x1 = read_matrix_csv(&dir.join("X1.csv"))?;
    let x2 = read_matrix_csv(&dir.join("X2.csv"))?;
    let u = read_matrix_csv(&dir.join("U.csv"))?;
    let dataset = LabeledDataset::new(x1, x2, u)?;
    if dataset.n() != manifest.n
        || dataset.m1() != manifest.m1
        || dataset.m2() != manifest.m2
        || dataset.p() != manifest.p
    {
        return Err(Error::DimensionMismatch(format!(
            "bundle {} disagrees with its manifest",
            dir.display()
        )));
    }
    Ok((dataset, manifest))
}

/// Loads and truncates every set found under `data_root/<label>`.
pub fn load_sets(data_root: &Path, labels: &[SetLabel]) -> Result<BTreeMap<SetLabel, Vec<Recording>>> {
    if !data_root.is_dir() {
        return Err(Error::MissingDirectory(data_root.to_path_buf()));
    }
    let mut out = BTreeMap::new();
    for &label in labels {
        let dir =
            resolve_set_dir(data_root, label).ok_or_else(|| Error::MissingDirectory(data_root.join(label.as_str())))?;
        let recs = load_bonn_set(&dir, label)?
            .into_iter()
            .map(Recording::truncated)
            .collect::<Result<Vec<_>>>()?;
        out.insert(label, recs);
    }
    Ok(out)
}

/// Set directories may be named by either scheme, in either case.
fn resolve_set_dir(root: &Path, label: SetLabel) -> Option<std::path::PathBuf> {
    let alias = match label {
        SetLabel::Z => "A",
        SetLabel::O => "B",
        SetLabel::N => "C",
        SetLabel::F => "D",
        SetLabel::S => "E",
    };
    [label.as_str(), alias]
        .iter()
        .flat_map(|name| [name.to_string(), name.to_ascii_lowercase()])
        .map(|name| root.join(name))
        .find(|p| p.is_dir())
}

/// Stacks recordings into a sample matrix, one recording per row.
pub fn recordings_to_matrix(recordings: &[Recording]) -> Result<Matrix> {
    let len = recordings.first().map(|r| r.samples.len()).unwrap_or(0);
    if recordings.iter().any(|r| r.samples.len() != len) {
        return Err(Error::DimensionMismatch("recordings differ in length".into()));
    }
    Ok(Matrix::from_fn(recordings.len(), len, |i, j| recordings[i].samples[j]))
}
