//! Fixtures shared by the criterion benches.

use eigu_core::synthetic::gaussian_blobs;
use eigu_core::LabeledDataset;

/// Two Gaussian classes of `per_class` rows in `n` dimensions plus a
/// centred Universum of `universum` rows.
pub fn blobs(per_class: usize, universum: usize, n: usize) -> LabeledDataset {
    gaussian_blobs(per_class, universum, n, 0.5, 42)
}

/// Feature dimensions used by the training-cost benches.
pub const DIMENSIONS: [usize; 4] = [16, 32, 64, 128];
