use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde::Serialize;

use eigu_core::classifiers::accuracy;
use eigu_core::dataio::{
    assemble_task, load_sets, make_folds, read_bundle, recordings_to_matrix, write_bundle, BundleManifest,
};
use eigu_core::eigsolve::{rayleigh_quotient, smallest_eigpair_generalized, smallest_eigpair_standard, EigenSolution};
use eigu_core::evaluation::{
    accuracy_table, decades, grid_search_prepared, prepare_folds, read_results_csv, run_benchmark, run_prepared,
    BenchmarkManifest, GridSpec, PreparedFolds,
};
use eigu_core::features::{extract_dataset, DwtLayout, FeatureConfig, Standardizer};
use eigu_core::stats::{published_table, stat_report};
use eigu_core::{train, Classifier, Error, FoldPlan, KernelSpec, LabeledDataset, Task, TrainSpec};

use crate::runinfo::Clock;
use crate::{Cli, Command, Global};

/// Input or usage problem; exits with 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

/// Wraps a core error as an input problem regardless of its kind.
fn invalid(e: Error) -> anyhow::Error {
    anyhow!(Usage(e.to_string()))
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<Usage>().is_some() {
            return 2;
        }
        if let Some(core) = cause.downcast_ref::<Error>() {
            return match core {
                Error::SingularDenominator { .. }
                | Error::Residual { .. }
                | Error::DegeneratePlane(_)
                | Error::ZeroDenominator
                | Error::Fold { .. } => 1,
                _ => 2,
            };
        }
    }
    1
}

pub fn run(cli: &Cli) -> Result<u8> {
    if cli.global.workers == Some(0) {
        return Err(usage("--workers must be positive"));
    }
    let g = &cli.global;
    match &cli.command {
        Command::Ingest(a) => ingest(g, a),
        Command::Features(a) => features(g, a),
        Command::Cv(a) => cv(g, a),
        Command::Bench(a) => bench(g, a),
        Command::Stats(a) => stats(g, a),
        Command::Sweep(a) => sweep(g, a),
        Command::EigSelftest => eig_selftest(),
    }
}

impl Global {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

fn data_root(g: &Global) -> Result<PathBuf> {
    g.data_root
        .clone()
        .or_else(|| std::env::var_os("EIGU_DATA_ROOT").map(PathBuf::from))
        .ok_or_else(|| usage("no data root: pass --data-root or set EIGU_DATA_ROOT"))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `path` when given, else to stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_classifier(s: &str) -> Result<Classifier> {
    s.parse().map_err(invalid)
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Task: o_vs_s or z_vs_s
    #[arg(long)]
    pub task: String,
    /// Universum rows drawn from set N after a seeded shuffle
    #[arg(long, default_value_t = 100)]
    pub universum_size: usize,
    /// Bundle directory [default: <output-dir>/<task>]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn ingest(g: &Global, a: &IngestArgs) -> Result<u8> {
    let clock = Clock::start();
    let task: Task = a.task.parse().map_err(invalid)?;
    let root = data_root(g)?;
    let sets = load_sets(&root, &task.required_sets()).map_err(invalid)?;
    let raw: BTreeMap<_, _> = sets
        .iter()
        .map(|(l, r)| Ok((*l, recordings_to_matrix(r)?)))
        .collect::<eigu_core::Result<_>>()
        .map_err(invalid)?;
    let dataset = assemble_task(task, &raw, a.universum_size, g.seed()).map_err(invalid)?;
    let out = a.out.clone().unwrap_or_else(|| g.output_dir.join(task.as_str()));
    write_bundle(&out, &dataset, &BundleManifest::describe(task, g.seed(), &dataset))?;
    clock.write(&out, "ingest")?;
    println!(
        "{}: m1={} m2={} p={} n={}",
        out.display(),
        dataset.m1(),
        dataset.m2(),
        dataset.p(),
        dataset.n()
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct FeaturesArgs {
    /// Raw-signal bundle written by `ingest`
    #[arg(long)]
    pub bundle: PathBuf,
    /// Feature set: db1, db2, db4, db6, haar, pca or ica
    #[arg(long)]
    pub feature: String,
    /// Wavelet coefficient layout: full or subband_stats
    #[arg(long, default_value = "full")]
    pub layout: String,
    /// Wavelet level [default: 2 for db1/db6, 3 otherwise]
    #[arg(long)]
    pub level: Option<usize>,
    /// PCA/ICA components extracted
    #[arg(long, default_value_t = eigu_core::features::DEFAULT_COMPONENTS)]
    pub n_components: usize,
    /// PCA/ICA components kept after CDR ranking
    #[arg(long, default_value_t = eigu_core::features::DEFAULT_TOP_K)]
    pub top_k: usize,
    /// Output bundle [default: <output-dir>/<task>_<feature>]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_layout(s: &str) -> Result<DwtLayout> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| usage(format!("unknown layout {s:?}; expected full or subband_stats")))
}

fn features(g: &Global, a: &FeaturesArgs) -> Result<u8> {
    let clock = Clock::start();
    let (raw, manifest) = read_bundle(&a.bundle).map_err(invalid)?;
    let mut config = FeatureConfig::from_id(&a.feature)
        .map_err(invalid)?
        .with_layout(parse_layout(&a.layout)?)
        .with_components(a.n_components, Some(a.top_k));
    if let FeatureConfig::Ica {
        n_components, top_k, ..
    } = config
    {
        config = FeatureConfig::Ica {
            n_components,
            top_k,
            seed: g.seed(),
        };
    }
    if let (Some(l), FeatureConfig::Dwt { wavelet, layout, .. }) = (a.level, config) {
        config = FeatureConfig::Dwt {
            wavelet,
            level: l,
            layout,
        };
    }
    config.validate(raw.n()).map_err(invalid)?;
    let (dataset, transform) = extract_dataset(&config, &raw, None)?;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| g.output_dir.join(format!("{}_{}", manifest.task, config.id())));
    let mut m = manifest.clone();
    m.n = dataset.n();
    write_bundle(&out, &dataset, &m)?;
    write_text(
        &out.join("features.json"),
        &(serde_json::to_string_pretty(&transform)? + "\n"),
    )?;
    clock.write(&out, "features")?;
    println!("{}: {} features ({})", out.display(), dataset.n(), config);
    Ok(0)
}

/// Classifier hyperparameters shared by `cv` and `sweep`.
#[derive(Args, Debug)]
pub struct ModelArgs {
    /// GEPSVM, I-GEPSVM, U-GEPSVM or IU-GEPSVM (case and dashes ignored)
    #[arg(long)]
    pub classifier: String,
    /// Tikhonov term δ
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Class-2 weight ν (I-GEPSVM)
    #[arg(long, default_value_t = 0.1)]
    pub nu: f64,
    /// Opposite-class weight γ (IU-GEPSVM)
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Universum weight ψ (IU-GEPSVM)
    #[arg(long, default_value_t = 1e-3)]
    pub psi: f64,
    /// RBF width σ; the linear model is used when absent [default: none]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Universum rows used [default: all rows of the bundle]
    #[arg(long)]
    pub universum_size: Option<usize>,
    /// Cross-validation folds
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Skip per-fold z-scoring of the features
    #[arg(long, default_value_t = false)]
    pub no_standardize: bool,
}

impl ModelArgs {
    fn prepare(&self, data: &LabeledDataset, plan: &FoldPlan) -> Result<PreparedFolds> {
        let prepared = prepare_folds(data, plan).map_err(invalid)?;
        Ok(if self.no_standardize {
            prepared
        } else {
            prepared.standardized()?
        })
    }

    fn spec(&self) -> Result<TrainSpec> {
        let c = parse_classifier(&self.classifier)?;
        let mut spec = match c {
            Classifier::Gepsvm => TrainSpec::gepsvm(self.delta),
            Classifier::Igepsvm => TrainSpec::igepsvm(self.delta, self.nu),
            Classifier::Ugepsvm => TrainSpec::ugepsvm(self.delta),
            Classifier::Iugepsvm => TrainSpec::iugepsvm(self.delta, self.gamma, self.psi),
        };
        if let Some(s) = self.sigma {
            spec = spec.with_kernel(KernelSpec::rbf(s).map_err(invalid)?);
        }
        spec.validate().map_err(invalid)?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
pub struct CvArgs {
    /// Feature bundle
    #[arg(long)]
    pub bundle: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also train on every labeled row and save the model JSON here; the
    /// z-score statistics go next to it as <name>.scaler.json [default: none]
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Report path [default: stdout]
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn cv(g: &Global, a: &CvArgs) -> Result<u8> {
    let (full, manifest) = read_bundle(&a.bundle).map_err(invalid)?;
    let spec = a.model.spec()?;
    let u = a.model.universum_size.unwrap_or(full.p());
    let data = full.with_universum_prefix(u).map_err(invalid)?;
    let plan = make_folds(&data, a.model.folds, g.seed()).map_err(invalid)?;
    let prepared = a.model.prepare(&data, &plan)?;
    let report =
        run_prepared(&prepared, &spec, data.p())?.with_labels(manifest.task.as_str(), a.bundle.display().to_string());
    emit(a.report.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    if let Some(path) = &a.model_out {
        let (data, scaler) = if a.model.no_standardize {
            (data, None)
        } else {
            let s = Standardizer::fit(&data.stacked_labeled().0)?;
            let scaled = LabeledDataset::new(s.transform(&data.x1)?, s.transform(&data.x2)?, s.transform(&data.u)?)?;
            (scaled, Some(s))
        };
        let model = train(&data, &spec)?;
        let acc = accuracy(&model, &data.x1, &data.x2)?;
        if let Some(s) = scaler {
            let side = path.with_extension("scaler.json");
            write_text(&side, &(serde_json::to_string_pretty(&s)? + "\n"))?;
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        model.save(path)?;
        log::info!(
            "saved model to {} (training accuracy {:.2}%)",
            path.display(),
            100.0 * acc
        );
    }
    eprintln!("{} mean accuracy {:.2}%", spec.classifier, report.mean_accuracy);
    Ok(0)
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark manifest JSON
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated task filter [default: all in manifest]
    #[arg(long, value_delimiter = ',')]
    pub tasks: Option<Vec<String>>,
    /// Comma-separated feature filter [default: all in manifest]
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Comma-separated classifier filter [default: all in manifest]
    #[arg(long, value_delimiter = ',')]
    pub classifiers: Option<Vec<String>>,
    /// Output directory [default: <output-dir>/bench]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the timing column empty so repeated runs compare byte for byte
    #[arg(long, default_value_t = false)]
    pub no_timing: bool,
}

fn bench(g: &Global, a: &BenchArgs) -> Result<u8> {
    let clock = Clock::start();
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| usage(format!("cannot read manifest {}: {e}", a.manifest.display())))?;
    let mut manifest: BenchmarkManifest =
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid manifest {}: {e}", a.manifest.display())))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    manifest.data_root = match (&g.data_root, &manifest.data_root) {
        (Some(flag), _) => Some(flag.clone()),
        (None, Some(p)) if p.is_relative() => Some(base.join(p)),
        (None, Some(p)) => Some(p.clone()),
        (None, None) => std::env::var_os("EIGU_DATA_ROOT").map(PathBuf::from),
    };
    if let Some(w) = g.workers {
        manifest.workers = w;
    }
    if let Some(s) = g.seed {
        manifest.seed = s;
    }
    manifest.validate().map_err(invalid)?;
    if manifest.synthetic.is_none() {
        let root = manifest.data_root.as_ref().expect("validated");
        if !root.is_dir() {
            return Err(usage(format!("data root {} is not a directory", root.display())));
        }
    }
    let tasks: Option<Vec<Task>> = a
        .tasks
        .as_ref()
        .map(|v| v.iter().map(|t| t.parse().map_err(invalid)).collect())
        .transpose()?;
    let classifiers: Option<Vec<Classifier>> = a
        .classifiers
        .as_ref()
        .map(|v| v.iter().map(|c| parse_classifier(c)).collect())
        .transpose()?;
    let manifest = manifest
        .filtered(tasks.as_deref(), a.features.as_deref(), classifiers.as_deref())
        .map_err(invalid)?;
    let results = run_benchmark(&manifest).context("benchmark run failed")?;
    let out = a.out.clone().unwrap_or_else(|| g.output_dir.join("bench"));
    write_text(&out.join("results.csv"), &results.to_csv(!a.no_timing)?)?;
    write_text(
        &out.join("summary.json"),
        &(serde_json::to_string_pretty(&results.summary)? + "\n"),
    )?;
    clock.write(&out, "bench")?;
    for t in &results.summary.tasks {
        eprintln!("{}:", t.task);
        for (i, c) in t.classifiers.iter().enumerate() {
            if let (Some(acc), Some(rank)) = (t.average_accuracy.get(i), t.average_rank.get(i)) {
                eprintln!("  {c:<10} avg acc {acc:6.2}  avg rank {rank:.2}");
            }
        }
    }
    let failed = results.failed_cells();
    eprintln!(
        "{} cells, {failed} failed, results in {}",
        results.rows.len(),
        out.display()
    );
    Ok(0)
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Use the bundled published accuracy tables
    #[arg(long, conflicts_with = "results")]
    pub from_paper_tables: bool,
    /// Results CSV written by `bench`
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Task: o_vs_s or z_vs_s
    #[arg(long)]
    pub task: String,
    /// Model the win-tie-loss table compares against the others
    #[arg(long, default_value = "IU-GEPSVM")]
    pub reference: String,
    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Report path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn stats(_g: &Global, a: &StatsArgs) -> Result<u8> {
    let task: Task = a.task.parse().map_err(invalid)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage("--alpha must lie in (0, 1)"));
    }
    let table = match (&a.results, a.from_paper_tables) {
        (_, true) => published_table(task.as_str()).map_err(invalid)?,
        (Some(path), false) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let rows = read_results_csv(&text).map_err(invalid)?;
            let (table, incomplete) = accuracy_table(&rows, task.as_str()).map_err(invalid)?;
            if !incomplete.is_empty() {
                log::warn!("skipping features with failed cells: {}", incomplete.join(", "));
            }
            table
        }
        (None, false) => return Err(usage("pass --from-paper-tables or --results")),
    };
    let reference = if table.models.contains(&a.reference) {
        a.reference.clone()
    } else {
        let c = parse_classifier(&a.reference)?;
        if !table.models.contains(&c.to_string()) {
            return Err(usage(format!("reference model {} not in the table", a.reference)));
        }
        c.to_string()
    };
    let report = stat_report(task.as_str(), &table, &reference, a.alpha).map_err(invalid)?;
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Feature bundle
    #[arg(long)]
    pub bundle: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Smallest log10 γ
    #[arg(long, default_value_t = -5, allow_negative_numbers = true)]
    pub gamma_min: i32,
    /// Largest log10 γ
    #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
    pub gamma_max: i32,
    /// Smallest log10 ψ
    #[arg(long, default_value_t = -5, allow_negative_numbers = true)]
    pub psi_min: i32,
    /// Largest log10 ψ
    #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
    pub psi_max: i32,
    /// CSV path [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepRow {
    log10_gamma: i32,
    log10_psi: i32,
    mean_accuracy: f64,
}

fn sweep(g: &Global, a: &SweepArgs) -> Result<u8> {
    let classifier = parse_classifier(&a.model.classifier)?;
    if classifier != Classifier::Iugepsvm {
        return Err(usage(format!("{classifier} has no γ/ψ parameters to sweep")));
    }
    if a.gamma_min > a.gamma_max || a.psi_min > a.psi_max {
        return Err(usage("empty sweep range"));
    }
    let clock = Clock::start();
    let (full, _) = read_bundle(&a.bundle).map_err(invalid)?;
    let u = a.model.universum_size.unwrap_or(full.p());
    let data = full.with_universum_prefix(u).map_err(invalid)?;
    let plan = make_folds(&data, a.model.folds, g.seed()).map_err(invalid)?;
    let grid = GridSpec {
        delta: vec![a.model.delta],
        gamma: Some(decades(a.gamma_min, a.gamma_max)),
        psi: Some(decades(a.psi_min, a.psi_max)),
        sigma: a.model.sigma.map(|s| vec![s]),
        universum_size: Some(vec![u]),
        ..GridSpec::default()
    };
    let pool = rayon_pool(g.workers.unwrap_or(1))?;
    let prepared = a.model.prepare(&data, &plan)?;
    let result = pool.install(|| grid_search_prepared(&prepared, classifier, &grid))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for (point, acc) in &result.evaluated {
        w.serialize(SweepRow {
            log10_gamma: point.gamma.expect("swept").log10().round() as i32,
            log10_psi: point.psi.expect("swept").log10().round() as i32,
            mean_accuracy: acc.unwrap_or(f64::NAN),
        })?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| anyhow!(e.to_string()))?)?;
    emit(a.out.as_deref(), &text)?;
    if let Some(dir) = a.out.as_deref().and_then(Path::parent) {
        clock.write(
            if dir.as_os_str().is_empty() {
                Path::new(".")
            } else {
                dir
            },
            "sweep",
        )?;
    }
    let best = result.best_point;
    eprintln!(
        "{} cells; best {:.2}% at log10 γ = {}, log10 ψ = {}",
        result.cv_runs,
        result.report.mean_accuracy,
        best.gamma.unwrap_or(0.0).log10().round(),
        best.psi.unwrap_or(0.0).log10().round()
    );
    Ok(0)
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn check(name: &str, ok: bool, failures: &mut usize) {
    println!("{} {name}", if ok { "ok  " } else { "FAIL" });
    if !ok {
        *failures += 1;
    }
}

type M = eigu_core::Matrix;

fn bound_ok(a: &M, b: Option<&M>, s: &EigenSolution) -> bool {
    let b_fro = b.map_or(1.0, |b| (b + M::identity(b.nrows(), b.ncols()) * s.ridge).norm());
    s.residual <= EigenSolution::residual_bound(a, b_fro, s.eigenvalue)
}

fn eig_selftest() -> Result<u8> {
    let mut failures = 0;
    let diag = M::from_diagonal(&eigu_core::Vector::from_vec(vec![3.0, 1.0, 2.0]));
    let s = smallest_eigpair_standard(&diag)?;
    check(
        "standard diag(3,1,2) -> 1 at e2",
        (s.eigenvalue - 1.0).abs() < 1e-12 && (s.eigenvector[1] - 1.0).abs() < 1e-12,
        &mut failures,
    );
    let a = M::from_diagonal(&eigu_core::Vector::from_vec(vec![2.0, 8.0]));
    let s = smallest_eigpair_generalized(&a, &M::identity(2, 2), 0.0, "selftest")?;
    check(
        "generalized diag(2,8) with B = I -> 2",
        (s.eigenvalue - 2.0).abs() < 1e-12,
        &mut failures,
    );
    let b = M::from_diagonal(&eigu_core::Vector::from_vec(vec![1.0, 4.0]));
    let s = smallest_eigpair_generalized(&M::identity(2, 2), &b, 0.0, "selftest")?;
    check(
        "generalized I vs diag(1,4) -> 0.25 at e2",
        (s.eigenvalue - 0.25).abs() < 1e-12 && (s.eigenvector[1] - 1.0).abs() < 1e-12,
        &mut failures,
    );
    // fixed SPD pair, checked against a deterministic probe family
    let f = M::from_fn(5, 5, |i, j| ((3 * i + 7 * j + 1) as f64).sin());
    let g = M::from_fn(5, 5, |i, j| ((5 * i + 2 * j + 3) as f64).cos());
    let a = f.transpose() * &f + M::identity(5, 5) * 0.1;
    let b = g.transpose() * &g + M::identity(5, 5) * 0.1;
    let s = smallest_eigpair_generalized(&a, &b, 0.0, "selftest")?;
    let q = rayleigh_quotient(&a, Some(&b), &s.eigenvector)?;
    let mut minimal = true;
    for k in 0..2000 {
        let z = eigu_core::Vector::from_fn(5, |i, _| ((k * 5 + i) as f64 * 0.618).sin());
        if rayleigh_quotient(&a, Some(&b), &z)? < q - 1e-9 {
            minimal = false;
        }
    }
    check(
        "generalized 5x5 SPD pair is minimal over 2000 probes",
        minimal,
        &mut failures,
    );
    check(
        "generalized 5x5 residual within bound",
        bound_ok(&a, Some(&b), &s),
        &mut failures,
    );
    check(
        "Rayleigh quotient equals eigenvalue",
        (q - s.eigenvalue).abs() < 1e-9,
        &mut failures,
    );
    let singular = M::zeros(3, 3);
    let e = smallest_eigpair_generalized(&M::identity(3, 3), &singular, 0.0, "selftest");
    check(
        "zero right operand is regularized or rejected",
        e.map_or(true, |s| s.ridge > 0.0),
        &mut failures,
    );
    Ok(if failures == 0 { 0 } else { 1 })
}
