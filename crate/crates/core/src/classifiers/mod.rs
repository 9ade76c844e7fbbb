//! The four eigenvalue-based proximal classifiers and the nearest-plane
//! decision rule.
//!
//! Each model fits two nonparallel planes `wᵢᵀx + bᵢ = 0`, plane 1 close to
//! class +1 and plane 2 close to class −1. With `G`, `H`, `P` the Gram
//! matrices of the bias-augmented class and Universum rows:
//!
//! | model     | plane 1                              | plane 2                              |
//! |-----------|--------------------------------------|--------------------------------------|
//! | GEPSVM    | `(G+δI) z = λ H z`                   | `(H+δI) z = λ G z`                   |
//! | I-GEPSVM  | `(G+δI−νH) z = λ z`                  | `(H+δI−νG) z = λ z`                  |
//! | U-GEPSVM  | `(G+δI) z = λ (H+P) z`               | `(H+δI) z = λ (G+P) z`               |
//! | IU-GEPSVM | `(G+δI−γ₁H−ψ₁P) z = λ z`             | `(H+δI−γ₂G−ψ₂P) z = λ z`             |

mod kernel;
mod linear;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use kernel::{kernel_problems, train_kernel, KernelNormalization};
pub use linear::{augment, class_matrices, plane_problems, AugmentedClassMatrices, EigenProblem};

use crate::dataio::LabeledDataset;
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};
use crate::{Matrix, Vector};

pub const FORMAT_VERSION: u32 = 1;
/// Default limit on the augmented kernel system size.
pub const DEFAULT_GRAM_CAP: usize = 2048;
/// Plane normals shorter than this are rejected at training time.
pub const MIN_NORMAL_NORM: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String")]
pub enum Classifier {
    #[serde(rename = "GEPSVM")]
    Gepsvm,
    #[serde(rename = "I-GEPSVM")]
    Igepsvm,
    #[serde(rename = "U-GEPSVM")]
    Ugepsvm,
    #[serde(rename = "IU-GEPSVM")]
    Iugepsvm,
}

impl Classifier {
    pub const ALL: [Classifier; 4] = [
        Classifier::Gepsvm,
        Classifier::Igepsvm,
        Classifier::Ugepsvm,
        Classifier::Iugepsvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Classifier::Gepsvm => "GEPSVM",
            Classifier::Igepsvm => "I-GEPSVM",
            Classifier::Ugepsvm => "U-GEPSVM",
            Classifier::Iugepsvm => "IU-GEPSVM",
        }
    }

    pub fn uses_universum(self) -> bool {
        matches!(self, Classifier::Ugepsvm | Classifier::Iugepsvm)
    }

    /// Ratio forms solve a generalized problem; difference forms a standard one.
    pub fn is_ratio_form(self) -> bool {
        matches!(self, Classifier::Gepsvm | Classifier::Ugepsvm)
    }
}

impl TryFrom<String> for Classifier {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Classifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "gepsvm" => Ok(Classifier::Gepsvm),
            "igepsvm" => Ok(Classifier::Igepsvm),
            "ugepsvm" => Ok(Classifier::Ugepsvm),
            "iugepsvm" => Ok(Classifier::Iugepsvm),
            _ => Err(Error::InvalidInput(format!("unknown classifier {s:?}"))),
        }
    }
}

fn default_gram_cap() -> usize {
    DEFAULT_GRAM_CAP
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub classifier: Classifier,
    pub delta: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub psi1: f64,
    #[serde(default)]
    pub psi2: f64,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub kernel_normalization: KernelNormalization,
    #[serde(default = "default_gram_cap")]
    pub gram_cap: usize,
    /// Lets the Universum models train without Universum rows, which
    /// reduces them to their plain counterparts.
    #[serde(default)]
    pub allow_empty_universum: bool,
}

impl TrainSpec {
    fn base(classifier: Classifier, delta: f64) -> Self {
        TrainSpec {
            classifier,
            delta,
            nu: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            psi1: 0.0,
            psi2: 0.0,
            kernel: None,
            kernel_normalization: KernelNormalization::default(),
            gram_cap: DEFAULT_GRAM_CAP,
            allow_empty_universum: false,
        }
    }

    pub fn gepsvm(delta: f64) -> Self {
        Self::base(Classifier::Gepsvm, delta)
    }

    pub fn igepsvm(delta: f64, nu: f64) -> Self {
        TrainSpec {
            nu,
            ..Self::base(Classifier::Igepsvm, delta)
        }
    }

    pub fn ugepsvm(delta: f64) -> Self {
        Self::base(Classifier::Ugepsvm, delta)
    }

    /// One `(γ, ψ)` pair shared by both planes.
    pub fn iugepsvm(delta: f64, gamma: f64, psi: f64) -> Self {
        TrainSpec {
            gamma1: gamma,
            gamma2: gamma,
            psi1: psi,
            psi2: psi,
            ..Self::base(Classifier::Iugepsvm, delta)
        }
    }

    pub fn with_kernel(mut self, kernel: KernelSpec) -> Self {
        self.kernel = Some(kernel);
        self
    }

    pub fn with_normalization(mut self, n: KernelNormalization) -> Self {
        self.kernel_normalization = n;
        self
    }

    pub fn allowing_empty_universum(mut self) -> Self {
        self.allow_empty_universum = true;
        self
    }

    /// Same model with the class roles exchanged.
    pub fn swapped(&self) -> Self {
        TrainSpec {
            gamma1: self.gamma2,
            gamma2: self.gamma1,
            psi1: self.psi2,
            psi2: self.psi1,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("delta", self.delta),
            ("nu", self.nu),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("psi1", self.psi1),
            ("psi2", self.psi2),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} = {v} must be finite and non-negative"
                )));
            }
        }
        match self.classifier {
            Classifier::Gepsvm | Classifier::Ugepsvm if self.delta <= 0.0 => {
                return Err(Error::InvalidInput(format!("{} needs delta > 0", self.classifier)))
            }
            Classifier::Igepsvm if self.nu <= 0.0 => return Err(Error::InvalidInput("I-GEPSVM needs nu > 0".into())),
            _ => {}
        }
        if let Some(k) = &self.kernel {
            k.validate()?;
        }
        Ok(())
    }

    pub fn hyperparameters(&self, universum_size: usize) -> Hyperparameters {
        let c = self.classifier;
        Hyperparameters {
            delta: self.delta,
            nu: (c == Classifier::Igepsvm).then_some(self.nu),
            gamma1: (c == Classifier::Iugepsvm).then_some(self.gamma1),
            gamma2: (c == Classifier::Iugepsvm).then_some(self.gamma2),
            psi1: (c == Classifier::Iugepsvm).then_some(self.psi1),
            psi2: (c == Classifier::Iugepsvm).then_some(self.psi2),
            sigma: self.kernel.and_then(|k| k.sigma()),
            universum_size: c.uses_universum().then_some(universum_size),
        }
    }
}

/// Hyperparameters a model was trained with, as supplied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub delta: f64,
    pub nu: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub psi1: Option<f64>,
    pub psi2: Option<f64>,
    pub sigma: Option<f64>,
    pub universum_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelPlanes {
    pub kernel: KernelSpec,
    pub normalization: KernelNormalization,
    /// Training rows `[X1; X2; U]` the coefficients refer to.
    pub z: Matrix,
    pub alpha1: Vec<f64>,
    pub b1: f64,
    pub alpha2: Vec<f64>,
    pub b2: f64,
    /// `√(αᵢᵀ K_ZZ αᵢ)`, the feature-space length of each normal.
    pub norm1: f64,
    pub norm2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Planes {
    Linear {
        w1: Vec<f64>,
        b1: f64,
        w2: Vec<f64>,
        b2: f64,
    },
    Kernel(KernelPlanes),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplanePair {
    pub format_version: u32,
    pub classifier: Classifier,
    pub hyperparameters: Hyperparameters,
    pub eigenvalues: [f64; 2],
    pub planes: Planes,
}

impl HyperplanePair {
    pub fn is_kernel(&self) -> bool {
        matches!(self.planes, Planes::Kernel(_))
    }

    pub fn n_features(&self) -> usize {
        match &self.planes {
            Planes::Linear { w1, .. } => w1.len(),
            Planes::Kernel(k) => k.z.ncols(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: HyperplanePair = serde_json::from_str(text)?;
        if model.format_version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "model format version {} is not supported",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn check_data(data: &LabeledDataset, spec: &TrainSpec) -> Result<()> {
    spec.validate()?;
    if data.m1() == 0 || data.m2() == 0 {
        return Err(Error::InvalidInput("both classes need at least one row".into()));
    }
    if spec.classifier.uses_universum() && data.p() == 0 && !spec.allow_empty_universum {
        return Err(Error::InvalidInput(format!("{} needs Universum rows", spec.classifier)));
    }
    if [&data.x1, &data.x2, &data.u]
        .iter()
        .any(|m| m.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite("training data".into()));
    }
    Ok(())
}

/// Trains the model named by `spec.classifier`, in kernel form when
/// `spec.kernel` is set.
pub fn train(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    check_data(data, spec)?;
    match spec.kernel {
        Some(_) => train_kernel(data, spec),
        None => linear::train_linear(data, spec),
    }
}

fn train_as(expected: Classifier, data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    if spec.classifier != expected {
        return Err(Error::InvalidInput(format!(
            "spec is for {}, not {expected}",
            spec.classifier
        )));
    }
    train(data, spec)
}

pub fn train_gepsvm(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    train_as(Classifier::Gepsvm, data, spec)
}

pub fn train_igepsvm(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    train_as(Classifier::Igepsvm, data, spec)
}

pub fn train_ugepsvm(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    train_as(Classifier::Ugepsvm, data, spec)
}

pub fn train_iugepsvm(data: &LabeledDataset, spec: &TrainSpec) -> Result<HyperplanePair> {
    train_as(Classifier::Iugepsvm, data, spec)
}

/// Normalized distances `[d₁, d₂]` of each query row to the two planes.
pub fn plane_distances(model: &HyperplanePair, queries: &Matrix) -> Result<Vec<[f64; 2]>> {
    if queries.ncols() != model.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "model expects {} features, queries have {}",
            model.n_features(),
            queries.ncols()
        )));
    }
    if queries.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("query rows".into()));
    }
    let (f1, f2, n1, n2) = match &model.planes {
        Planes::Linear { w1, b1, w2, b2 } => {
            let w1 = Vector::from_column_slice(w1);
            let w2 = Vector::from_column_slice(w2);
            (
                queries * &w1 + Vector::from_element(queries.nrows(), *b1),
                queries * &w2 + Vector::from_element(queries.nrows(), *b2),
                w1.norm(),
                w2.norm(),
            )
        }
        Planes::Kernel(k) => {
            let kx = gram(queries, &k.z, &k.kernel)?;
            let a1 = Vector::from_column_slice(&k.alpha1);
            let a2 = Vector::from_column_slice(&k.alpha2);
            (
                &kx * &a1 + Vector::from_element(queries.nrows(), k.b1),
                &kx * &a2 + Vector::from_element(queries.nrows(), k.b2),
                k.norm1,
                k.norm2,
            )
        }
    };
    if !(n1 > 0.0 && n2 > 0.0) {
        return Err(Error::DegeneratePlane("stored model".into()));
    }
    Ok((0..queries.nrows())
        .map(|i| [f1[i].abs() / n1, f2[i].abs() / n2])
        .collect())
}

/// `+1` when plane 1 is nearer or the distances tie, `−1` otherwise.
pub fn predict(model: &HyperplanePair, queries: &Matrix) -> Result<Vec<i8>> {
    Ok(plane_distances(model, queries)?
        .into_iter()
        .map(|[d1, d2]| if d1 <= d2 { 1 } else { -1 })
        .collect())
}

/// Fraction of correctly labeled rows, with `x1` rows expected `+1`.
pub fn accuracy(model: &HyperplanePair, x1: &Matrix, x2: &Matrix) -> Result<f64> {
    let total = x1.nrows() + x2.nrows();
    if total == 0 {
        return Err(Error::InvalidInput("no rows to score".into()));
    }
    let hits = predict(model, x1)?.iter().filter(|&&l| l == 1).count()
        + predict(model, x2)?.iter().filter(|&&l| l == -1).count();
    Ok(hits as f64 / total as f64)
}
