use serde::{Deserialize, Serialize};

use super::TaxonomyError;

pub const MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Estimated tail exponent.
    pub alpha: f64,
    /// Order statistics used.
    pub k: usize,
    /// Threshold: the (k+1)-th largest positive sample.
    pub xmin: f64,
    /// Kolmogorov-Smirnov distance between the k tail samples and the fitted Pareto.
    pub ks_stat: f64,
}

/// `floor(n^0.6)`, the default number of order statistics.
pub fn default_k(n: usize) -> usize {
    ((n as f64).powf(0.6) + 1e-9).floor() as usize
}

/// Hill estimator over the `k` largest positive samples.
pub fn tail_exponent(samples: &[f64], k: usize) -> Result<TailFit, TaxonomyError> {
    if samples.len() < MIN_SAMPLES {
        return Err(TaxonomyError::TooFewSamples { needed: MIN_SAMPLES, found: samples.len() });
    }
    let mut positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0 && x.is_finite()).collect();
    if k < 1 || k >= positive.len() {
        return Err(TaxonomyError::KOutOfRange { k, positive: positive.len() });
    }
    positive.sort_by(|a, b| b.total_cmp(a));
    let xmin = positive[k];
    let log_sum: f64 = positive[..k].iter().map(|&x| (x / xmin).ln()).sum();
    if log_sum <= 0.0 {
        return Err(TaxonomyError::DegenerateTail { k });
    }
    let alpha = k as f64 / log_sum;

    let kf = k as f64;
    let ks_stat = positive[..k]
        .iter()
        .rev()
        .enumerate()
        .map(|(i, &x)| {
            let fitted = 1.0 - (x / xmin).powf(-alpha);
            let above = (i + 1) as f64 / kf - fitted;
            let below = fitted - i as f64 / kf;
            above.max(below)
        })
        .fold(0.0f64, f64::max)
        .clamp(0.0, 1.0);

    Ok(TailFit { alpha, k, xmin, ks_stat })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_samples_are_degenerate() {
        let s = vec![2.5; 100];
        assert_eq!(tail_exponent(&s, 10).unwrap_err(), TaxonomyError::DegenerateTail { k: 10 });
    }

    #[test]
    fn range_checks() {
        let s: Vec<f64> = (1..=60).map(f64::from).collect();
        assert!(matches!(tail_exponent(&s[..49], 5), Err(TaxonomyError::TooFewSamples { .. })));
        assert!(matches!(tail_exponent(&s, 0), Err(TaxonomyError::KOutOfRange { .. })));
        assert!(matches!(tail_exponent(&s, 60), Err(TaxonomyError::KOutOfRange { .. })));
        let fit = tail_exponent(&s, 59).unwrap();
        assert_eq!(fit.xmin, 1.0);
        assert!(fit.alpha > 0.0 && (0.0..=1.0).contains(&fit.ks_stat));
    }

    #[test]
    fn hand_computed_hill() {
        // top two of {e^2, e, 1, ...}: alpha = 2 / (ln(e^2) + ln(e)) = 2 / 3
        let mut s = vec![0.5; 60];
        s[0] = std::f64::consts::E.powi(2);
        s[1] = std::f64::consts::E;
        s[2] = 1.0;
        let fit = tail_exponent(&s, 2).unwrap();
        assert!((fit.alpha - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(fit.xmin, 1.0);
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(100_000), 1000);
        assert_eq!(default_k(1), 1);
    }
}
