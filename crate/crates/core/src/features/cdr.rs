use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Matrix;

/// Class-separation score of one component: between-class scatter over
/// within-class scatter. A component with zero within-class scatter and
/// nonzero between-class scatter scores `+∞`; a constant one scores 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdrScore {
    pub component: usize,
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub ratio: f64,
}

fn ser_ratio<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("bad ratio {t:?}"))),
    }
}

/// Scores each column of `components` (samples × components) against the
/// `±1` labels and returns them sorted by decreasing ratio; ties keep the
/// original component order.
pub fn cdr_rank(components: &Matrix, labels: &[i8]) -> Result<Vec<CdrScore>> {
    if components.nrows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples but {} labels",
            components.nrows(),
            labels.len()
        )));
    }
    if labels.iter().any(|&l| l != 1 && l != -1) {
        return Err(Error::InvalidInput("labels must be +1 or -1".into()));
    }
    let pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let neg: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == -1).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::InvalidInput("both classes need at least one sample".into()));
    }
    let mut scores: Vec<CdrScore> = (0..components.ncols())
        .map(|c| {
            let col = components.column(c);
            let mean_of = |idx: &[usize]| idx.iter().map(|&i| col[i]).sum::<f64>() / idx.len() as f64;
            let global = col.mean();
            let (mp, mn) = (mean_of(&pos), mean_of(&neg));
            let between = (mp - global).powi(2) + (mn - global).powi(2);
            let within: f64 = pos.iter().map(|&i| (col[i] - mp).powi(2)).sum::<f64>()
                + neg.iter().map(|&i| (col[i] - mn).powi(2)).sum::<f64>();
            let ratio = if within > 0.0 {
                between / within
            } else if between > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            CdrScore { component: c, ratio }
        })
        .collect();
    scores.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    Ok(scores)
}
