//! Eigenvalue-based nonparallel-hyperplane classifiers with Universum data.
//!
//! The crate covers the whole experimental pipeline for binary EEG
//! classification:
//!
//! - [`dataio`]: Bonn-format ingestion, task assembly and stratified folds.
//! - [`features`]: periodic Daubechies DWT, PCA, FastICA and CDR ranking.
//! - [`eigsolve`]: dense symmetric standard/generalized smallest eigenpairs.
//! - [`kernels`]: linear and RBF Gram blocks.
//! - [`classifiers`]: GEPSVM, I-GEPSVM, U-GEPSVM and IU-GEPSVM (linear and kernel).
//! - [`evaluation`]: cross-validation, grid search and benchmark runs.
//! - [`stats`]: Friedman, Wilcoxon signed-rank and win-tie-loss comparisons.
//!
//! Matrices are [`nalgebra::DMatrix<f64>`] with one sample per row.

pub mod classifiers;
pub mod dataio;
pub mod eigsolve;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod kernels;
pub mod stats;
pub mod synthetic;

pub use classifiers::{predict, train, Classifier, HyperplanePair, TrainSpec};
pub use dataio::{FoldPlan, LabeledDataset, SetLabel, Task};
pub use error::{Error, Result};
pub use kernels::KernelSpec;

/// Dense row-major-by-convention sample matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense column vector.
pub type Vector = nalgebra::DVector<f64>;
