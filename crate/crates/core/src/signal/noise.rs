//! Seeded additive white Gaussian noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{IqSample, IqWaveform};
use crate::error::{Error, Result};

/// Description of a zero-mean Gaussian noise process. The generator is
/// ChaCha8 seeded with `seed`, so an identical spec reproduces the identical
/// sample sequence on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Variance of each of the I and Q components, per sample.
    pub variance_per_component: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(variance_per_component: f64, seed: u64) -> Result<Self> {
        if !(variance_per_component >= 0.0) || !variance_per_component.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance must be nonnegative, got {variance_per_component}"
            )));
        }
        Ok(Self { variance_per_component, seed })
    }

    /// Noise that leaves waveforms untouched.
    pub fn off() -> Self {
        Self { variance_per_component: 0.0, seed: 0 }
    }
}

/// Add independent zero-mean Gaussian noise to each component of each sample.
/// Zero variance returns the input unchanged.
pub fn add_awgn(w: &IqWaveform, noise: &NoiseSpec) -> Result<IqWaveform> {
    if !(noise.variance_per_component >= 0.0) || !noise.variance_per_component.is_finite() {
        return Err(Error::invalid("noise variance must be nonnegative"));
    }
    if noise.variance_per_component == 0.0 {
        return Ok(w.clone());
    }
    let sigma = noise.variance_per_component.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = w
        .samples()
        .iter()
        .map(|s| {
            let ni: f64 = StandardNormal.sample(&mut rng);
            let nq: f64 = StandardNormal.sample(&mut rng);
            s + IqSample::new(sigma * ni, sigma * nq)
        })
        .collect();
    Ok(IqWaveform::from_parts(samples, w.sample_rate_hz()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_variance_is_identity() {
        let w = IqWaveform::new(vec![Complex64::new(0.5, -0.5); 64], 4e6).unwrap();
        let out = add_awgn(&w, &NoiseSpec::off()).unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn same_seed_reproduces_bit_identical_noise() {
        let w = IqWaveform::new(vec![Complex64::new(0.0, 0.0); 256], 4e6).unwrap();
        let spec = NoiseSpec::new(0.7, 0xDECAF).unwrap();
        let a = add_awgn(&w, &spec).unwrap();
        let b = add_awgn(&w, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_variance_matches_spec() {
        let n = 1_000_000;
        let w = IqWaveform::new(vec![Complex64::new(0.0, 0.0); n], 4e6).unwrap();
        let spec = NoiseSpec::new(1.0, 42).unwrap();
        let out = add_awgn(&w, &spec).unwrap();
        let var_i = out.samples().iter().map(|s| s.re * s.re).sum::<f64>() / n as f64;
        let var_q = out.samples().iter().map(|s| s.im * s.im).sum::<f64>() / n as f64;
        assert!((var_i - 1.0).abs() < 0.01, "I variance {var_i}");
        assert!((var_q - 1.0).abs() < 0.01, "Q variance {var_q}");
    }

    #[test]
    fn rejects_negative_variance() {
        assert!(NoiseSpec::new(-1.0, 0).is_err());
    }
}
