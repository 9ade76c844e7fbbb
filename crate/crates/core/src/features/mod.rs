//! Feature extraction: wavelet coefficients, or PCA/ICA projections ranked
//! by class discriminatory ratio.
//!
//! DWT is a fixed per-row map. PCA and ICA are fitted, so they go through
//! [`fit_features`] on training rows and the resulting [`FeatureTransform`]
//! is applied to anything held out.

pub mod cdr;
pub mod dwt;
pub mod ica;
pub mod pca;
pub mod scale;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cdr::{cdr_rank, CdrScore};
pub use dwt::{dwt_features, dwt_inverse, Wavelet};
pub use ica::{ica_fit, ica_fit_transform, IcaBasis};
pub use pca::{pca_fit, pca_fit_transform, PcaBasis};
pub use scale::Standardizer;

use crate::dataio::{select_rows, stack_rows, LabeledDataset};
use crate::error::{Error, Result};
use crate::Matrix;

pub const DEFAULT_COMPONENTS: usize = 32;
pub const DEFAULT_TOP_K: usize = 16;
pub const DEFAULT_ICA_SEED: u64 = 0;

/// What a DWT feature row contains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwtLayout {
    /// Every coefficient, same length as the signal.
    #[default]
    Full,
    /// Four summary statistics per subband (see [`dwt::subband_stats`]).
    SubbandStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum FeatureConfig {
    Dwt {
        wavelet: Wavelet,
        level: usize,
        #[serde(default)]
        layout: DwtLayout,
    },
    Pca {
        n_components: usize,
        /// Components kept after CDR ranking; `None` keeps all.
        top_k: Option<usize>,
    },
    Ica {
        n_components: usize,
        top_k: Option<usize>,
        seed: u64,
    },
}

impl FeatureConfig {
    pub fn dwt(wavelet: Wavelet) -> Self {
        FeatureConfig::Dwt {
            wavelet,
            level: wavelet.default_level(),
            layout: DwtLayout::Full,
        }
    }

    pub fn pca() -> Self {
        FeatureConfig::Pca {
            n_components: DEFAULT_COMPONENTS,
            top_k: Some(DEFAULT_TOP_K),
        }
    }

    pub fn ica(seed: u64) -> Self {
        FeatureConfig::Ica {
            n_components: DEFAULT_COMPONENTS,
            top_k: Some(DEFAULT_TOP_K),
            seed,
        }
    }

    /// Parses a feature-set id: a wavelet name (optionally `dwt_`-prefixed),
    /// `pca` or `ica`, with default parameters.
    pub fn from_id(id: &str) -> Result<Self> {
        let key = id.trim().to_ascii_lowercase();
        match key.as_str() {
            "pca" => Ok(Self::pca()),
            "ica" => Ok(Self::ica(DEFAULT_ICA_SEED)),
            other => {
                let name = other.strip_prefix("dwt_").unwrap_or(other);
                Ok(Self::dwt(name.parse()?))
            }
        }
    }

    /// Short id used in result tables: `db1`…`haar`, `pca`, `ica`.
    pub fn id(&self) -> String {
        match self {
            FeatureConfig::Dwt { wavelet, .. } => wavelet.as_str().to_string(),
            FeatureConfig::Pca { .. } => "pca".into(),
            FeatureConfig::Ica { .. } => "ica".into(),
        }
    }

    pub fn with_layout(self, layout: DwtLayout) -> Self {
        match self {
            FeatureConfig::Dwt { wavelet, level, .. } => FeatureConfig::Dwt { wavelet, level, layout },
            other => other,
        }
    }

    pub fn with_components(self, n: usize, top: Option<usize>) -> Self {
        match self {
            FeatureConfig::Pca { .. } => FeatureConfig::Pca {
                n_components: n,
                top_k: top,
            },
            FeatureConfig::Ica { seed, .. } => FeatureConfig::Ica {
                n_components: n,
                top_k: top,
                seed,
            },
            other => other,
        }
    }

    /// True for transforms that learn from data.
    pub fn is_fitted(&self) -> bool {
        !matches!(self, FeatureConfig::Dwt { .. })
    }

    pub fn validate(&self, signal_len: usize) -> Result<()> {
        match *self {
            FeatureConfig::Dwt { level, .. } => {
                if level == 0 || level >= 32 || !signal_len.is_multiple_of(1usize << level) {
                    return Err(Error::InvalidInput(format!(
                        "level {level} does not divide signal length {signal_len}"
                    )));
                }
            }
            FeatureConfig::Pca { n_components, top_k }
            | FeatureConfig::Ica {
                n_components, top_k, ..
            } => {
                if n_components == 0 || n_components > signal_len {
                    return Err(Error::InvalidInput(format!(
                        "{n_components} components requested from length-{signal_len} signals"
                    )));
                }
                if top_k == Some(0) {
                    return Err(Error::InvalidInput("top_k must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for FeatureConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_id(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FittedBasis {
    None,
    Pca(PcaBasis),
    Ica(IcaBasis),
}

/// A feature map ready to apply to any rows. Immutable after fitting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureTransform {
    pub config: FeatureConfig,
    pub basis: FittedBasis,
    /// CDR scores of all extracted components, best first.
    pub ranking: Vec<CdrScore>,
    /// Component indices kept, in ranking order.
    pub selected: Vec<usize>,
    /// Number of rows the fit saw.
    pub fit_rows: usize,
}

impl FeatureTransform {
    pub fn transform(&self, rows: &Matrix) -> Result<Matrix> {
        match &self.basis {
            FittedBasis::None => dwt_rows(&self.config, rows),
            FittedBasis::Pca(b) => Ok(pick_columns(&b.transform(rows)?, &self.selected)),
            FittedBasis::Ica(b) => Ok(pick_columns(&b.transform(rows)?, &self.selected)),
        }
    }

    pub fn output_dim(&self, signal_len: usize) -> usize {
        match (&self.basis, self.config) {
            (
                FittedBasis::None,
                FeatureConfig::Dwt {
                    level,
                    layout: DwtLayout::SubbandStats,
                    ..
                },
            ) => 4 * (level + 1),
            (FittedBasis::None, _) => signal_len,
            _ => self.selected.len(),
        }
    }
}

fn pick_columns(m: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

fn dwt_rows(config: &FeatureConfig, rows: &Matrix) -> Result<Matrix> {
    let FeatureConfig::Dwt { wavelet, level, layout } = *config else {
        return Err(Error::InvalidInput(format!("{config} is not a wavelet transform")));
    };
    config.validate(rows.ncols())?;
    let out: Vec<Vec<f64>> = (0..rows.nrows())
        .into_par_iter()
        .map(|i| {
            let signal: Vec<f64> = rows.row(i).iter().copied().collect();
            let c = dwt_features(&signal, wavelet, level)?;
            Ok(match layout {
                DwtLayout::Full => c,
                DwtLayout::SubbandStats => dwt::subband_stats(&c, level),
            })
        })
        .collect::<Result<_>>()?;
    let width = match layout {
        DwtLayout::Full => rows.ncols(),
        DwtLayout::SubbandStats => 4 * (level + 1),
    };
    Ok(Matrix::from_fn(out.len(), width, |i, j| out[i][j]))
}

/// Fits `config` on labeled training rows (`labels[i] = ±1`). For DWT
/// this records nothing beyond the configuration.
pub fn fit_features(config: &FeatureConfig, train_rows: &Matrix, labels: &[i8]) -> Result<FeatureTransform> {
    config.validate(train_rows.ncols())?;
    let (basis, projected) = match *config {
        FeatureConfig::Dwt { .. } => {
            return Ok(FeatureTransform {
                config: *config,
                basis: FittedBasis::None,
                ranking: Vec::new(),
                selected: Vec::new(),
                fit_rows: train_rows.nrows(),
            })
        }
        FeatureConfig::Pca { n_components, .. } => {
            let n = n_components.min(train_rows.nrows());
            let (t, b) = pca_fit_transform(train_rows, n)?;
            (FittedBasis::Pca(b), t)
        }
        FeatureConfig::Ica { n_components, seed, .. } => {
            let n = n_components.min(train_rows.nrows());
            let (t, b) = ica_fit_transform(train_rows, n, seed)?;
            (FittedBasis::Ica(b), t)
        }
    };
    let ranking = cdr_rank(&projected, labels)?;
    let top = match *config {
        FeatureConfig::Pca { top_k, .. } | FeatureConfig::Ica { top_k, .. } => top_k,
        FeatureConfig::Dwt { .. } => None,
    };
    let keep = top.unwrap_or(ranking.len()).min(ranking.len());
    let selected = ranking[..keep].iter().map(|s| s.component).collect();
    Ok(FeatureTransform {
        config: *config,
        basis,
        ranking,
        selected,
        fit_rows: train_rows.nrows(),
    })
}

/// Fits on the labeled rows of `raw` and maps all three parts through the
/// result. `fit_on` optionally restricts the fit to a subset of labeled
/// rows, indexed into `X1` then `X2` stacked.
pub fn extract_dataset(
    config: &FeatureConfig,
    raw: &LabeledDataset,
    fit_on: Option<&[usize]>,
) -> Result<(LabeledDataset, FeatureTransform)> {
    let (labeled, labels) = raw.stacked_labeled();
    let (rows, labels) = match fit_on {
        Some(idx) => (
            select_rows(&labeled, idx),
            idx.iter().map(|&i| labels[i]).collect::<Vec<_>>(),
        ),
        None => (labeled, labels),
    };
    let t = fit_features(config, &rows, &labels)?;
    let x1 = t.transform(&raw.x1)?;
    let x2 = t.transform(&raw.x2)?;
    let u = if raw.p() > 0 {
        t.transform(&raw.u)?
    } else {
        Matrix::zeros(0, x1.ncols())
    };
    Ok((LabeledDataset::new(x1, x2, u)?, t))
}

/// Stacks features of several raw matrices with one transform.
pub fn transform_all(t: &FeatureTransform, parts: &[&Matrix]) -> Result<Matrix> {
    let mapped: Vec<Matrix> = parts.iter().map(|p| t.transform(p)).collect::<Result<_>>()?;
    Ok(stack_rows(&mapped.iter().collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ids_round_trip() {
        for id in ["db1", "db2", "db4", "db6", "haar", "pca", "ica"] {
            assert_eq!(FeatureConfig::from_id(id).unwrap().id(), id);
        }
        assert_eq!(
            FeatureConfig::from_id("dwt_db4").unwrap(),
            FeatureConfig::dwt(Wavelet::Db4)
        );
        assert!(FeatureConfig::from_id("sym4").is_err());
        let json = serde_json::to_string(&FeatureConfig::dwt(Wavelet::Db6)).unwrap();
        assert_eq!(json, r#"{"method":"dwt","wavelet":"db6","level":2,"layout":"full"}"#);
    }

    #[test]
    fn default_levels() {
        let levels: Vec<usize> = [Wavelet::Db1, Wavelet::Db6, Wavelet::Db2, Wavelet::Db4, Wavelet::Haar]
            .iter()
            .map(|w| w.default_level())
            .collect();
        assert_eq!(levels, vec![2, 2, 3, 3, 3]);
    }

    fn signals(m: usize, n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(m, n, |_, _| rng.random_range(-100.0..100.0))
    }

    #[test]
    fn fitted_transform_applies_to_held_out_rows() {
        let train = signals(30, 64, 1);
        let labels: Vec<i8> = (0..30).map(|i| if i < 15 { 1 } else { -1 }).collect();
        let cfg = FeatureConfig::Pca {
            n_components: 10,
            top_k: Some(4),
        };
        let t = fit_features(&cfg, &train, &labels).unwrap();
        assert_eq!(t.selected.len(), 4);
        assert_eq!(t.fit_rows, 30);
        let held = signals(5, 64, 2);
        assert_eq!(t.transform(&held).unwrap().shape(), (5, 4));
        let json = serde_json::to_string(&t).unwrap();
        let back: FeatureTransform = serde_json::from_str(&json).unwrap();
        assert_eq!(back.transform(&held).unwrap(), t.transform(&held).unwrap());
    }

    #[test]
    fn dwt_layouts() {
        let x = signals(3, 64, 4);
        let full = fit_features(&FeatureConfig::dwt(Wavelet::Db2), &x, &[1, -1, 1]).unwrap();
        assert_eq!(full.transform(&x).unwrap().shape(), (3, 64));
        let stats = fit_features(
            &FeatureConfig::dwt(Wavelet::Db2).with_layout(DwtLayout::SubbandStats),
            &x,
            &[1, -1, 1],
        )
        .unwrap();
        assert_eq!(stats.transform(&x).unwrap().shape(), (3, 16));
        assert_eq!(stats.output_dim(64), 16);
    }

    #[test]
    fn ica_on_one_dimension() {
        let x = Matrix::from_fn(50, 1, |i, _| (i as f64 * 0.37).sin() * 3.0 + 1.0);
        let (s, _) = ica_fit_transform(&x, 1, 3).unwrap();
        let ratio: Vec<f64> = (0..50)
            .filter(|&i| (x[(i, 0)] - 1.0).abs() > 1e-3)
            .map(|i| s[(i, 0)] / (x[(i, 0)] - x.mean()))
            .collect();
        for r in &ratio {
            assert!((r - ratio[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn pca_five_by_three() {
        let x = signals(5, 3, 8);
        let (t, basis) = pca_fit_transform(&x, 3).unwrap();
        let cov = t.transpose() * &t / 4.0;
        let max = cov.diagonal().max();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(cov[(i, j)].abs() <= 1e-8 * max);
                }
            }
            assert!((cov[(i, i)] - basis.explained_variance[i]).abs() <= 1e-8 * max);
        }
    }

    proptest! {
        #[test]
        fn dwt_conserves_energy(seed in 0u64..1000) {
            let x = signals(1, 256, seed);
            let sig: Vec<f64> = x.iter().copied().collect();
            for w in [Wavelet::Haar, Wavelet::Db2, Wavelet::Db4, Wavelet::Db6] {
                let c = dwt_features(&sig, w, w.default_level()).unwrap();
                let e_in: f64 = sig.iter().map(|v| v * v).sum::<f64>().sqrt();
                let e_out: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                prop_assert!((e_in - e_out).abs() <= 1e-9 * e_in);
                let back = dwt_inverse(&c, w, w.default_level()).unwrap();
                let err: f64 = back.iter().zip(&sig).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(err <= 1e-9 * e_in);
            }
        }

        #[test]
        fn cdr_affine_invariant(seed in 0u64..500, scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
            let m = signals(12, 4, seed);
            let labels: Vec<i8> = (0..12).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
            let a = cdr_rank(&m, &labels).unwrap();
            let scaled = m.map(|v| v * scale + shift);
            let b = cdr_rank(&scaled, &labels).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.ratio - y.ratio).abs() <= 1e-9 * x.ratio.max(1e-12));
            }
            let ia: Vec<usize> = a.iter().map(|s| s.component).collect();
            let ib: Vec<usize> = b.iter().map(|s| s.component).collect();
            prop_assert_eq!(ia, ib);
        }
    }
}
