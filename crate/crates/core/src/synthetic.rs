//! Seeded toy datasets and a generator for Bonn-layout recordings, used by
//! tests, benches and smoke runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataio::{write_recording, LabeledDataset, Recording, SetLabel};
use crate::error::{Error, Result};
use crate::Matrix;

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("finite non-negative deviation")
}

/// Class +1 along `y = x`, class −1 along `y = −x`, `x ~ U(−1, 1)` with
/// Gaussian noise of deviation `noise` on `y`. No Universum rows.
pub fn cross_planes(per_class: usize, noise: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = normal(noise);
    let mut class = |slope: f64| {
        let mut m = Matrix::zeros(per_class, 2);
        for i in 0..per_class {
            let x: f64 = rng.random_range(-1.0..1.0);
            m[(i, 0)] = x;
            m[(i, 1)] = slope * x + n.sample(&mut rng);
        }
        m
    };
    let x1 = class(1.0);
    let x2 = class(-1.0);
    LabeledDataset::labeled_only(x1, x2).expect("finite toy data")
}

/// Universum band on the positive x-axis, between the two cross-planes
/// classes: `x ~ U(0.2, 1)`, `y ~ N(0, noise)`.
pub fn mid_band_universum(p: usize, noise: f64, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = normal(noise);
    Matrix::from_fn(p, 2, |_, j| {
        if j == 0 {
            rng.random_range(0.2..1.0)
        } else {
            n.sample(&mut rng)
        }
    })
}

/// Class +1 on the circle of radius `r1`, class −1 on radius `r2`, with
/// radial noise of deviation `noise`.
pub fn concentric_circles(per_class: usize, r1: f64, r2: f64, noise: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = normal(noise);
    let mut ring = |r: f64| {
        let mut m = Matrix::zeros(per_class, 2);
        for i in 0..per_class {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let rr = r + n.sample(&mut rng);
            m[(i, 0)] = rr * t.cos();
            m[(i, 1)] = rr * t.sin();
        }
        m
    };
    let x1 = ring(r1);
    let x2 = ring(r2);
    LabeledDataset::labeled_only(x1, x2).expect("finite toy data")
}

/// Gaussian blobs in `n` dimensions centred at `±offset` along every axis.
pub fn gaussian_blobs(per_class: usize, universum: usize, n: usize, offset: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = normal(1.0);
    let mut blob = |rows: usize, centre: f64| Matrix::from_fn(rows, n, |_, _| centre + unit.sample(&mut rng));
    let x1 = blob(per_class, offset);
    let x2 = blob(per_class, -offset);
    let u = blob(universum, 0.0);
    LabeledDataset::new(x1, x2, u).expect("finite toy data")
}

/// Sampling rate of the Bonn recordings, Hz.
pub const SAMPLING_RATE: f64 = 173.61;

struct SetProfile {
    rhythm_hz: f64,
    amplitude: f64,
    noise: f64,
    spikes: bool,
}

fn profile(label: SetLabel) -> SetProfile {
    match label {
        SetLabel::Z => SetProfile {
            rhythm_hz: 10.0,
            amplitude: 40.0,
            noise: 25.0,
            spikes: false,
        },
        SetLabel::O => SetProfile {
            rhythm_hz: 9.5,
            amplitude: 60.0,
            noise: 25.0,
            spikes: false,
        },
        SetLabel::N => SetProfile {
            rhythm_hz: 6.0,
            amplitude: 50.0,
            noise: 35.0,
            spikes: false,
        },
        SetLabel::F => SetProfile {
            rhythm_hz: 5.0,
            amplitude: 55.0,
            noise: 35.0,
            spikes: false,
        },
        SetLabel::S => SetProfile {
            rhythm_hz: 3.0,
            amplitude: 180.0,
            noise: 60.0,
            spikes: true,
        },
    }
}

/// One synthetic integer-valued recording with a set-specific rhythm,
/// first-order autoregressive background and, for set S, spike trains.
pub fn synthetic_recording(label: SetLabel, len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let pr = profile(label);
    let freq = pr.rhythm_hz * rng.random_range(0.85..1.15);
    let amp = pr.amplitude * rng.random_range(0.8..1.2);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let n = normal(pr.noise);
    let mut ar = 0.0;
    (0..len)
        .map(|t| {
            let time = t as f64 / SAMPLING_RATE;
            let angle = std::f64::consts::TAU * freq * time + phase;
            ar = 0.9 * ar + n.sample(rng) * 0.45;
            let mut v = amp * angle.sin() + ar;
            if pr.spikes {
                // sharp transient once per rhythm cycle
                v += 2.0 * amp * angle.cos().max(0.0).powi(12);
            }
            v.round()
        })
        .collect()
}

/// `per_set` synthetic recordings of `len` samples for each of the five
/// sets, untruncated.
pub fn synthetic_sets(per_set: usize, len: usize, seed: u64) -> Result<BTreeMap<SetLabel, Vec<Recording>>> {
    if per_set == 0 || len == 0 {
        return Err(Error::InvalidInput(
            "need at least one sample per recording and set".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    for label in SetLabel::ALL {
        let recs = (0..per_set)
            .map(|i| Recording {
                set_label: label,
                samples: synthetic_recording(label, len, &mut rng),
                source_id: format!("{}{:03}.txt", label.as_str(), i + 1),
            })
            .collect();
        out.insert(label, recs);
    }
    Ok(out)
}

/// Writes [`synthetic_sets`] under `root/<Z|O|N|F|S>/`, named like the
/// original archive.
pub fn write_synthetic_bonn(root: &Path, per_set: usize, len: usize, seed: u64) -> Result<()> {
    for (label, recs) in synthetic_sets(per_set, len, seed)? {
        let dir = root.join(label.as_str());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for rec in &recs {
            write_recording(&dir.join(&rec.source_id), rec)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::load_sets;

    #[test]
    fn toys_are_seeded() {
        assert_eq!(cross_planes(10, 0.05, 1), cross_planes(10, 0.05, 1));
        assert_ne!(cross_planes(10, 0.05, 1), cross_planes(10, 0.05, 2));
        let c = concentric_circles(20, 1.0, 3.0, 0.0, 4);
        for i in 0..20 {
            assert!((c.x1.row(i).norm() - 1.0).abs() < 1e-12);
            assert!((c.x2.row(i).norm() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bonn_layout_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write_synthetic_bonn(dir.path(), 3, 4100, 9).unwrap();
        let sets = load_sets(dir.path(), &SetLabel::ALL).unwrap();
        assert_eq!(sets.len(), 5);
        for recs in sets.values() {
            assert_eq!(recs.len(), 3);
            assert!(recs.iter().all(|r| r.samples.len() == 4096));
        }
    }
}
