//! Complex-baseband sample containers and the generic DSP primitives shared
//! by the modulators, the collision channel, and the analysis models.
//!
//! All operations are pure: they take references and return new values, so
//! waveforms can be shared freely across threads.

mod fir;
mod noise;
mod resample;
mod stats;

pub use fir::{design_lowpass, low_pass_filter, low_pass_filter_with_taps, DEFAULT_LPF_TAPS};
pub use noise::{add_awgn, NoiseSpec};
pub use resample::resample;
pub use stats::{autocorrelation, Autocorrelation};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One complex baseband sample; `re` is the in-phase component, `im` the
/// quadrature component.
pub type IqSample = Complex64;

/// An ordered run of complex baseband samples at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqWaveform {
    samples: Vec<IqSample>,
    sample_rate_hz: f64,
}

impl IqWaveform {
    /// Wrap samples taken at `sample_rate_hz`. The rate must be positive and
    /// every component finite.
    pub fn new(samples: Vec<IqSample>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::invalid("waveform contains non-finite samples"));
        }
        Ok(Self { samples, sample_rate_hz })
    }

    /// A zero-length waveform at the given rate.
    pub fn empty(sample_rate_hz: f64) -> Self {
        Self { samples: Vec::new(), sample_rate_hz }
    }

    pub fn samples(&self) -> &[IqSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<IqSample> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_parts(samples: Vec<IqSample>, sample_rate_hz: f64) -> Self {
        debug_assert!(sample_rate_hz > 0.0);
        Self { samples, sample_rate_hz }
    }
}

/// Element-wise complex sum. The shorter waveform is zero-padded at its tail,
/// so the result has the length of the longer input. Rates must match.
pub fn add_waveforms(a: &IqWaveform, b: &IqWaveform) -> Result<IqWaveform> {
    if a.sample_rate_hz != b.sample_rate_hz {
        return Err(Error::RateMismatch { a_hz: a.sample_rate_hz, b_hz: b.sample_rate_hz });
    }
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.samples.clone();
    for (o, s) in out.iter_mut().zip(short.samples.iter()) {
        *o += s;
    }
    Ok(IqWaveform::from_parts(out, a.sample_rate_hz))
}

/// Multiply every sample by a complex gain.
pub fn scale(w: &IqWaveform, gain: IqSample) -> Result<IqWaveform> {
    if !gain.re.is_finite() || !gain.im.is_finite() {
        return Err(Error::invalid("gain must be finite"));
    }
    let samples = w.samples.iter().map(|s| s * gain).collect();
    Ok(IqWaveform::from_parts(samples, w.sample_rate_hz))
}

/// Multiply sample `n` by `exp(j 2π offset_hz n / fs)`, moving the waveform's
/// spectral content by `offset_hz` without touching per-sample magnitudes.
pub fn frequency_shift(w: &IqWaveform, offset_hz: f64) -> Result<IqWaveform> {
    if !offset_hz.is_finite() || offset_hz.abs() >= w.sample_rate_hz / 2.0 {
        return Err(Error::invalid(format!(
            "offset {offset_hz} Hz outside (-fs/2, fs/2) for fs {}",
            w.sample_rate_hz
        )));
    }
    let cycles_per_sample = offset_hz / w.sample_rate_hz;
    let samples = w
        .samples
        .iter()
        .enumerate()
        .map(|(n, s)| {
            // Keep the phase argument small so precision holds for long runs.
            let turns = (n as f64 * cycles_per_sample).rem_euclid(1.0);
            let phase = std::f64::consts::TAU * turns;
            s * Complex64::from_polar(1.0, phase)
        })
        .collect();
    Ok(IqWaveform::from_parts(samples, w.sample_rate_hz))
}

/// Per-sample instantaneous power `i² + q²` (linear, not dB).
pub fn rssi_series(w: &IqWaveform) -> Vec<f64> {
    w.samples.iter().map(|s| s.norm_sqr()).collect()
}

/// Mean of the per-sample power.
pub fn mean_power(w: &IqWaveform) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    w.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / w.len() as f64
}

/// Included angle between consecutive samples:
/// `out[k] = angle(s[k+1] · conj(s[k]))`, in `(-π, π]`. Length is input − 1.
pub fn phase_shift_series(w: &IqWaveform) -> Result<Vec<f64>> {
    if w.len() < 2 {
        return Err(Error::invalid("phase shifts need at least 2 samples"));
    }
    Ok(w.samples.windows(2).map(|p| (p[1] * p[0].conj()).arg()).collect())
}
