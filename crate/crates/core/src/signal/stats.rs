//! Scalar-series statistics used for envelope feature extraction.

use crate::error::{Error, Result};

/// Result of [`autocorrelation`]: values for lags `1..=max_lag`, plus a flag
/// marking zero-variance input (where correlation is undefined and the values
/// are reported as all zeros).
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Biased, mean-removed autocorrelation normalized by lag 0:
/// `r[l] = Σ (x[k]-μ)(x[k+l]-μ) / Σ (x[k]-μ)²` for `l = 1..=max_lag`.
/// Values lie in [-1, 1]. Requires `len ≥ 2·max_lag` and `max_lag ≥ 1`.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Autocorrelation> {
    if max_lag < 1 {
        return Err(Error::invalid("max_lag must be at least 1"));
    }
    if x.len() < 2 * max_lag {
        return Err(Error::invalid(format!(
            "need at least {} samples for max_lag {max_lag}, got {}",
            2 * max_lag,
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    // Relative threshold: constant series (up to rounding) count as degenerate.
    if var <= 1e-20 * (1.0 + mean * mean) {
        return Ok(Autocorrelation { values: vec![0.0; max_lag], degenerate: true });
    }
    let values = (1..=max_lag)
        .map(|lag| {
            let num: f64 = x[..x.len() - lag]
                .iter()
                .zip(&x[lag..])
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n;
            (num / var).clamp(-1.0, 1.0)
        })
        .collect();
    Ok(Autocorrelation { values, degenerate: false })
}
