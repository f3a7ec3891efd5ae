//! Windowed-sinc FIR low-pass filtering with group-delay compensation.

use super::{IqSample, IqWaveform};
use crate::error::{Error, Result};

/// Default tap count for receiver channel filters.
pub const DEFAULT_LPF_TAPS: usize = 63;

/// Design a linear-phase low-pass filter: sinc truncated by a Hamming window,
/// normalized to unit DC gain. `num_taps` must be odd so the group delay is an
/// integer number of samples.
pub fn design_lowpass(num_taps: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Vec<f64>> {
    if num_taps < 3 || num_taps % 2 == 0 {
        return Err(Error::invalid(format!("tap count must be odd and >= 3, got {num_taps}")));
    }
    if !(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0 {
        return Err(Error::invalid(format!(
            "cutoff {cutoff_hz} Hz outside (0, fs/2) for fs {sample_rate_hz}"
        )));
    }
    let fc = cutoff_hz / sample_rate_hz; // cycles per sample
    let mid = (num_taps - 1) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|n| {
            let x = n as f64 - mid;
            let sinc = if x == 0.0 {
                2.0 * fc
            } else {
                (std::f64::consts::TAU * fc * x).sin() / (std::f64::consts::PI * x)
            };
            let window = 0.54
                - 0.46 * (std::f64::consts::TAU * n as f64 / (num_taps - 1) as f64).cos();
            sinc * window
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }
    Ok(taps)
}

/// Low-pass filter with the default 63-tap design.
pub fn low_pass_filter(w: &IqWaveform, cutoff_hz: f64) -> Result<IqWaveform> {
    low_pass_filter_with_taps(w, cutoff_hz, DEFAULT_LPF_TAPS)
}

/// Low-pass filter I and Q independently. The group delay of the linear-phase
/// kernel is compensated, so `out[n]` aligns with `in[n]`; edges see the
/// kernel run off the (zero-padded) ends.
pub fn low_pass_filter_with_taps(
    w: &IqWaveform,
    cutoff_hz: f64,
    num_taps: usize,
) -> Result<IqWaveform> {
    let taps = design_lowpass(num_taps, cutoff_hz, w.sample_rate_hz())?;
    Ok(convolve_centered(w, &taps))
}

/// Convolve with an odd-length kernel, keeping the center of the full
/// convolution so the output aligns sample-for-sample with the input.
pub(crate) fn convolve_centered(w: &IqWaveform, taps: &[f64]) -> IqWaveform {
    let half = taps.len() / 2;
    let x = w.samples();
    let n = x.len();
    let mut out = vec![IqSample::new(0.0, 0.0); n];
    for (i, o) in out.iter_mut().enumerate() {
        // out[i] = sum_k taps[k] * x[i + half - k]
        let mut acc = IqSample::new(0.0, 0.0);
        let lo = (i + half).saturating_sub(n - 1);
        let hi = (i + half).min(taps.len() - 1);
        for k in lo..=hi {
            acc += taps[k] * x[i + half - k];
        }
        *o = acc;
    }
    IqWaveform::from_parts(out, w.sample_rate_hz())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{add_waveforms, mean_power, rssi_series};
    use num_complex::Complex64;

    fn tone(freq_hz: f64, rate_hz: f64, n: usize) -> IqWaveform {
        let samples = (0..n)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * freq_hz * k as f64 / rate_hz))
            .collect();
        IqWaveform::new(samples, rate_hz).unwrap()
    }

    #[test]
    fn dc_passes_with_unit_gain() {
        let w = IqWaveform::new(vec![Complex64::new(1.0, 0.0); 400], 22e6).unwrap();
        let out = low_pass_filter(&w, 2e6).unwrap();
        // Interior samples, past the edge transient of half a kernel.
        for s in &out.samples()[63..400 - 63] {
            assert!((s.re - 1.0).abs() < 0.01, "dc gain off: {}", s.re);
            assert!(s.im.abs() < 1e-12);
        }
    }

    #[test]
    fn tone_at_twice_cutoff_is_rejected() {
        let rate = 22e6;
        let cutoff = 2e6;
        let w = tone(2.0 * cutoff, rate, 4096);
        let out = low_pass_filter(&w, cutoff).unwrap();
        let p_in = mean_power(&w);
        let interior = &rssi_series(&out)[63..4096 - 63];
        let p_out = interior.iter().sum::<f64>() / interior.len() as f64;
        assert!(p_out < 0.01 * p_in, "stopband leak: {}", p_out / p_in);
    }

    #[test]
    fn filtering_is_linear() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let samples =
                (0..512).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            IqWaveform::new(samples, 22e6).unwrap()
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let lhs = low_pass_filter(&add_waveforms(&a, &b).unwrap(), 3e6).unwrap();
        let fa = low_pass_filter(&a, 3e6).unwrap();
        let fb = low_pass_filter(&b, 3e6).unwrap();
        let rhs = add_waveforms(&fa, &fb).unwrap();
        for (x, y) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_designs() {
        let w = IqWaveform::new(vec![Complex64::new(1.0, 0.0); 16], 22e6).unwrap();
        assert!(low_pass_filter(&w, 0.0).is_err());
        assert!(low_pass_filter(&w, 11e6).is_err());
        assert!(low_pass_filter_with_taps(&w, 2e6, 64).is_err());
    }
}
