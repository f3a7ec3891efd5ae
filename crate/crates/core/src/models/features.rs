//! Per-window feature extraction: envelope statistics of the RSSI series and
//! phase-shift statistics, the measurable side of the interference models.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{autocorrelation, IqWaveform};
use crate::zigbee::SAMPLES_PER_SYMBOL;

/// Number of bins in the phase-shift histogram over (-π, π].
pub const PHASE_HIST_BINS: usize = 32;
/// Autocorrelation lag range searched for envelope periodicity. At 4 MHz this
/// covers both 802.11b symbol periods (0.5 µs and 1 µs) with ample margin.
pub const PERIODICITY_LAGS: Range<usize> = 2..129;

/// Features of one symbol range of a received baseband.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Mean per-sample RSSI (linear power). Carries the absolute level and is
    /// therefore excluded from gain-invariant decisions.
    pub rssi_mean: f64,
    /// RSSI variance normalized by squared mean.
    pub rssi_var_norm: f64,
    /// Maximum mean-removed autocorrelation of the RSSI over the candidate
    /// lags; zero for a flat envelope.
    pub rssi_periodicity: f64,
    /// Lag (in 4 MHz samples) where the maximum occurred; zero when flat.
    pub rssi_period_lag: usize,
    /// Variance of the deviation of each phase shift from the nearest ideal
    /// ±π/4 value.
    pub phase_dev_var: f64,
    /// Normalized histogram of phase shifts over (-π, π]; sums to one.
    pub phase_hist: [f64; PHASE_HIST_BINS],
}

/// Features over one contiguous symbol range of a frame-aligned 4 MHz
/// waveform (`body` starts at the frame start).
pub fn extract_features(body: &IqWaveform, symbols: Range<usize>) -> Result<FeatureVector> {
    extract_features_multi(body, std::slice::from_ref(&symbols))
}

/// Features over several symbol ranges, concatenated. RSSI samples are
/// concatenated across ranges; phase shifts are computed within each range
/// (no shift spans a seam) and then pooled.
pub fn extract_features_multi(body: &IqWaveform, ranges: &[Range<usize>]) -> Result<FeatureVector> {
    let mut rssi: Vec<f64> = Vec::new();
    let mut shifts: Vec<f64> = Vec::new();
    for r in ranges {
        if r.is_empty() {
            continue;
        }
        let start = r.start * SAMPLES_PER_SYMBOL;
        let end = r.end * SAMPLES_PER_SYMBOL;
        if end > body.len() {
            return Err(Error::WindowOutOfRange(format!(
                "symbols {r:?} need samples ..{end}, waveform has {}",
                body.len()
            )));
        }
        let x = body.samples();
        rssi.extend(x[start..end].iter().map(|s| s.norm_sqr()));
        // One sample past the window closes the last shift when available.
        let shift_end = (end + 1).min(body.len());
        shifts.extend(x[start..shift_end].windows(2).map(|p| (p[1] * p[0].conj()).arg()));
    }
    if rssi.is_empty() {
        return Err(Error::invalid("feature extraction needs a nonempty symbol range"));
    }
    Ok(features_from_series(&rssi, &shifts))
}

pub(crate) fn features_from_series(rssi: &[f64], shifts: &[f64]) -> FeatureVector {
    let n = rssi.len() as f64;
    let rssi_mean = rssi.iter().sum::<f64>() / n;
    let rssi_var = rssi.iter().map(|r| (r - rssi_mean) * (r - rssi_mean)).sum::<f64>() / n;
    let rssi_var_norm = rssi_var / rssi_mean.max(1e-30).powi(2);

    let max_lag = (PERIODICITY_LAGS.end - 1).min(rssi.len() / 2);
    let (rssi_periodicity, rssi_period_lag) = if max_lag >= PERIODICITY_LAGS.start {
        match autocorrelation(rssi, max_lag) {
            Ok(acf) if !acf.degenerate => {
                let mut best = (f64::MIN, 0usize);
                for lag in PERIODICITY_LAGS.start..=max_lag {
                    let v = acf.values[lag - 1];
                    if v > best.0 {
                        best = (v, lag);
                    }
                }
                best
            }
            _ => (0.0, 0),
        }
    } else {
        (0.0, 0)
    };

    let (phase_dev_var, phase_hist) = phase_statistics(shifts);

    FeatureVector {
        rssi_mean,
        rssi_var_norm,
        rssi_periodicity,
        rssi_period_lag,
        phase_dev_var,
        phase_hist,
    }
}

/// Signed deviation of a phase shift from the nearer of +π/4 and -π/4,
/// measured around the circle.
pub fn quarter_pi_deviation(shift: f64) -> f64 {
    let wrap = |a: f64| {
        let mut x = a.rem_euclid(std::f64::consts::TAU);
        if x > std::f64::consts::PI {
            x -= std::f64::consts::TAU;
        }
        x
    };
    let d_pos = wrap(shift - std::f64::consts::FRAC_PI_4);
    let d_neg = wrap(shift + std::f64::consts::FRAC_PI_4);
    if d_pos.abs() <= d_neg.abs() {
        d_pos
    } else {
        d_neg
    }
}

fn phase_statistics(shifts: &[f64]) -> (f64, [f64; PHASE_HIST_BINS]) {
    let mut hist = [0.0f64; PHASE_HIST_BINS];
    if shifts.is_empty() {
        return (0.0, hist);
    }
    let mut devs: Vec<f64> = Vec::with_capacity(shifts.len());
    for &s in shifts {
        devs.push(quarter_pi_deviation(s));
        let frac = (s + std::f64::consts::PI) / std::f64::consts::TAU;
        let bin = ((frac * PHASE_HIST_BINS as f64) as usize).min(PHASE_HIST_BINS - 1);
        hist[bin] += 1.0;
    }
    for h in &mut hist {
        *h /= shifts.len() as f64;
    }
    let n = devs.len() as f64;
    let mean = devs.iter().sum::<f64>() / n;
    let var = devs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n;
    (var, hist)
}

/// Total-variation distance between two phase histograms, in [0, 1].
pub fn hist_distance(a: &[f64; PHASE_HIST_BINS], b: &[f64; PHASE_HIST_BINS]) -> f64 {
    0.5 * a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>()
}
