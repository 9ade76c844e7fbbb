//! Periodic orthonormal discrete wavelet transform with Daubechies filters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

const DB2: [f64; 4] = [
    0.482_962_913_144_534_1,
    0.836_516_303_737_807_9,
    0.224_143_868_042_013_4,
    -0.129_409_522_551_260_4,
];

const DB4: [f64; 8] = [
    0.230_377_813_308_896_5,
    0.714_846_570_552_915_6,
    0.630_880_767_929_858_9,
    -0.027_983_769_416_859_854,
    -0.187_034_811_719_093_08,
    0.030_841_381_835_560_764,
    0.032_883_011_666_885_2,
    -0.010_597_401_785_069_032,
];

const DB6: [f64; 12] = [
    0.111_540_743_350_109_46,
    0.494_623_890_398_453_1,
    0.751_133_908_021_095_4,
    0.315_250_351_709_197_63,
    -0.226_264_693_965_439_82,
    -0.129_766_867_567_261_94,
    0.097_501_605_587_323_05,
    0.027_522_865_530_305_73,
    -0.031_582_039_317_486_03,
    0.000_553_842_201_161_496_1,
    0.004_777_257_510_945_511,
    -0.001_077_301_085_308_479_6,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    Db1,
    Db2,
    Db4,
    Db6,
}

impl Wavelet {
    /// Scaling (low-pass) filter, normalized to unit energy.
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar | Wavelet::Db1 => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
            Wavelet::Db6 => &DB6,
        }
    }

    /// Quadrature-mirror high-pass filter `g[j] = (-1)^j h[L-1-j]`.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let l = h.len();
        (0..l)
            .map(|j| if j % 2 == 0 { h[l - 1 - j] } else { -h[l - 1 - j] })
            .collect()
    }

    /// Decomposition depth used for the EEG feature sets.
    pub fn default_level(self) -> usize {
        match self {
            Wavelet::Db1 | Wavelet::Db6 => 2,
            Wavelet::Db2 | Wavelet::Db4 | Wavelet::Haar => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db1 => "db1",
            Wavelet::Db2 => "db2",
            Wavelet::Db4 => "db4",
            Wavelet::Db6 => "db6",
        }
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" => Ok(Wavelet::Haar),
            "db1" => Ok(Wavelet::Db1),
            "db2" => Ok(Wavelet::Db2),
            "db4" => Ok(Wavelet::Db4),
            "db6" => Ok(Wavelet::Db6),
            _ => Err(Error::UnsupportedWavelet(s.to_string())),
        }
    }
}

fn check_dyadic(len: usize, level: usize) -> Result<()> {
    if level == 0 || level >= usize::BITS as usize || len == 0 || !len.is_multiple_of(1usize << level) {
        return Err(Error::InvalidInput(format!(
            "length {len} is not divisible by 2^{level}"
        )));
    }
    Ok(())
}

/// One analysis step with circular extension:
/// `a[k] = Σⱼ h[j]·x[(2k+j) mod N]`, `d[k] = Σⱼ g[j]·x[(2k+j) mod N]`.
fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for k in 0..half {
        let mut sa = 0.0;
        let mut sd = 0.0;
        for j in 0..h.len() {
            let v = x[(2 * k + j) % n];
            sa += h[j] * v;
            sd += g[j] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
    (a, d)
}

fn synthesis_step(a: &[f64], d: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = 2 * a.len();
    let mut x = vec![0.0; n];
    for k in 0..a.len() {
        for j in 0..h.len() {
            x[(2 * k + j) % n] += h[j] * a[k] + g[j] * d[k];
        }
    }
    x
}

/// Multilevel DWT laid out as `[A_L ‖ D_L ‖ D_{L-1} ‖ … ‖ D_1]`; the output
/// has the same length (and, the filters being orthonormal, the same
/// energy) as the input.
pub fn dwt_features(signal: &[f64], wavelet: Wavelet, level: usize) -> Result<Vec<f64>> {
    check_dyadic(signal.len(), level)?;
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut approx = signal.to_vec();
    let mut details: Vec<Vec<f64>> = Vec::with_capacity(level);
    for _ in 0..level {
        let (a, d) = analysis_step(&approx, h, &g);
        approx = a;
        details.push(d);
    }
    let mut out = approx;
    for d in details.iter().rev() {
        out.extend_from_slice(d);
    }
    Ok(out)
}

/// Inverse of [`dwt_features`].
pub fn dwt_inverse(coeffs: &[f64], wavelet: Wavelet, level: usize) -> Result<Vec<f64>> {
    check_dyadic(coeffs.len(), level)?;
    let h = wavelet.lowpass();
    let g = wavelet.highpass();
    let mut len = coeffs.len() >> level;
    let mut approx = coeffs[..len].to_vec();
    let mut offset = len;
    for _ in 0..level {
        let detail = &coeffs[offset..offset + len];
        approx = synthesis_step(&approx, detail, h, &g);
        offset += len;
        len *= 2;
    }
    Ok(approx)
}

/// Lengths of the subbands in the [`dwt_features`] layout.
pub fn subband_lengths(len: usize, level: usize) -> Vec<usize> {
    let coarsest = len >> level;
    let mut out = vec![coarsest, coarsest];
    let mut l = coarsest;
    for _ in 1..level {
        l *= 2;
        out.push(l);
    }
    out
}

/// Per-subband summary: mean absolute value, standard deviation, maximum
/// absolute value and mean power, four numbers per subband.
pub fn subband_stats(coeffs: &[f64], level: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * (level + 1));
    let mut offset = 0;
    for len in subband_lengths(coeffs.len(), level) {
        let band = &coeffs[offset..offset + len];
        offset += len;
        let n = len as f64;
        let mean_abs = band.iter().map(|c| c.abs()).sum::<f64>() / n;
        let mean = band.iter().sum::<f64>() / n;
        let var = band.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / n;
        let max_abs = band.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let power = band.iter().map(|c| c * c).sum::<f64>() / n;
        out.extend_from_slice(&[mean_abs, var.sqrt(), max_abs, power]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn haar_constant_signal() {
        let out = dwt_features(&[1.0, 1.0, 1.0, 1.0], Wavelet::Haar, 1).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(out.as_slice(), [r2, r2, 0.0, 0.0].as_slice(), epsilon = 1e-15);
    }

    #[test]
    fn db1_is_haar() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-10.0..10.0)).collect();
        assert_eq!(
            dwt_features(&x, Wavelet::Db1, 3).unwrap(),
            dwt_features(&x, Wavelet::Haar, 3).unwrap()
        );
    }

    #[test]
    fn filters_are_orthonormal() {
        for w in [Wavelet::Haar, Wavelet::Db2, Wavelet::Db4, Wavelet::Db6] {
            let h = w.lowpass();
            let g = w.highpass();
            assert_abs_diff_eq!(h.iter().sum::<f64>(), std::f64::consts::SQRT_2, epsilon = 1e-14);
            for shift in (0..h.len()).step_by(2) {
                let hh: f64 = (0..h.len() - shift).map(|i| h[i] * h[i + shift]).sum();
                let gg: f64 = (0..h.len() - shift).map(|i| g[i] * g[i + shift]).sum();
                let expected = if shift == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(hh, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(gg, expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn layout_and_round_trip_4096() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<f64> = (0..4096).map(|_| rng.random_range(-500.0..500.0)).collect();
        assert_eq!(subband_lengths(4096, 3), vec![512, 512, 1024, 2048]);
        for w in [Wavelet::Haar, Wavelet::Db2, Wavelet::Db4, Wavelet::Db6] {
            let c = dwt_features(&x, w, 3).unwrap();
            assert_eq!(c.len(), 4096);
            let back = dwt_inverse(&c, w, 3).unwrap();
            let err: Vec<f64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
            assert!(norm(&err) <= 1e-9 * norm(&x));
            assert!((norm(&c) - norm(&x)).abs() <= 1e-9 * norm(&x));
        }
    }

    #[test]
    fn rejects_non_dyadic() {
        assert!(dwt_features(&[1.0; 12], Wavelet::Db2, 3).is_err());
        assert!(dwt_features(&[1.0; 8], Wavelet::Db2, 0).is_err());
        assert!(matches!("db3".parse::<Wavelet>(), Err(Error::UnsupportedWavelet(_))));
    }

    #[test]
    fn stats_shape() {
        let c = dwt_features(&[1.0; 64], Wavelet::Db4, 3).unwrap();
        let s = subband_stats(&c, 3);
        assert_eq!(s.len(), 16);
        // constant input: every detail band vanishes
        for band in 1..4 {
            assert_abs_diff_eq!(s[4 * band + 3], 0.0, epsilon = 1e-20);
        }
    }
}
