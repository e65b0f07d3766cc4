use rayon::prelude::*;

use super::{CorrelationMatrix, DistanceMatrix, LabelledMatrix, TaxonomyError};
use crate::io::SeriesEnsemble;

/// `ln(p[i+1] / p[i])` for a strictly positive price series.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>, TaxonomyError> {
    if prices.len() < 2 {
        return Err(TaxonomyError::TooShort { needed: 2, found: prices.len() });
    }
    if let Some((index, &value)) = prices.iter().enumerate().find(|(_, &p)| !(p > 0.0 && p.is_finite())) {
        return Err(TaxonomyError::NonPositivePrice { index, value });
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Pearson correlation between every pair of series.
pub fn correlation(ensemble: &SeriesEnsemble) -> Result<CorrelationMatrix, TaxonomyError> {
    let labels = ensemble.labels().to_vec();
    if labels.len() < 2 {
        return Err(TaxonomyError::TooFewSeries(labels.len()));
    }

    // centered and scaled to unit norm, so each entry is a plain dot product
    let mut normalized = Vec::with_capacity(labels.len());
    for (label, s) in labels.iter().zip(ensemble.samples()) {
        let n = s.len() as f64;
        let mean = s.iter().sum::<f64>() / n;
        let centered: Vec<f64> = s.iter().map(|v| v - mean).collect();
        let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
        if s.iter().all(|&v| v == s[0]) || norm == 0.0 {
            return Err(TaxonomyError::ConstantSeries(label.clone()));
        }
        normalized.push(centered.into_iter().map(|v| v / norm).collect::<Vec<f64>>());
    }

    let n = labels.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let dot: f64 =
                        normalized[i].iter().zip(&normalized[j]).map(|(a, b)| a * b).sum();
                    dot.clamp(-1.0, 1.0)
                })
                .collect()
        })
        .collect();

    Ok(CorrelationMatrix(LabelledMatrix::from_fn(labels, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => upper[i][j - i - 1],
        std::cmp::Ordering::Greater => upper[j][i - j - 1],
    })))
}

/// `d = sqrt(2 (1 - c))` elementwise, with an exact zero diagonal.
pub fn ultrametric_distance(c: &CorrelationMatrix) -> DistanceMatrix {
    DistanceMatrix(LabelledMatrix::from_fn(c.labels.clone(), |i, j| {
        if i == j {
            0.0
        } else {
            (2.0 * (1.0 - c.get(i, j))).max(0.0).sqrt()
        }
    }))
}
