//! Baseband waveform generators for the four interference sources:
//! WiFi 802.11b DSSS, WiFi 802.11g OFDM, Bluetooth GFSK, and a second ZigBee
//! transmitter. All generators emit unit mean power at the 22 MHz simulation
//! rate and are deterministic functions of their spec (seed included), so
//! collision-scene gains alone set the signal-to-interference ratio.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{resample, IqWaveform};
use crate::zigbee;

/// Common simulation rate: covers the 11 Mchip/s DSSS spread, the 20 MHz OFDM
/// occupancy (after 10→11 resampling), 1 Msym/s GFSK, and the 2 Mchip/s
/// ZigBee spread with integer or small-rational factors.
pub const SIM_SAMPLE_RATE_HZ: f64 = 22_000_000.0;

/// Interference source selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfererKind {
    Wifi11b,
    Wifi11g,
    Bluetooth,
    Zigbee,
    None,
}

impl InterfererKind {
    pub fn label(&self) -> &'static str {
        match self {
            InterfererKind::Wifi11b => "wifi11b",
            InterfererKind::Wifi11g => "wifi11g",
            InterfererKind::Bluetooth => "bluetooth",
            InterfererKind::Zigbee => "zigbee",
            InterfererKind::None => "none",
        }
    }
}

/// Declarative description of one interferer transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfererSpec {
    pub kind: InterfererKind,
    /// On-air duration; the emitted waveform has `round(duration_s · 22 MHz)`
    /// samples.
    pub duration_s: f64,
    /// Seeds the random payload bits.
    pub payload_seed: u64,
    /// Interferer center frequency minus victim center frequency. Applied by
    /// the collision mixer, not by the generators.
    pub center_offset_hz: f64,
    /// 802.11b rate selector: false = 1 Mbit/s DBPSK, true = 2 Mbit/s DQPSK.
    /// Both run at 1 Msym/s, so the envelope period is 1 µs either way.
    #[serde(default)]
    pub wifi11b_dqpsk: bool,
}

impl InterfererSpec {
    pub fn new(kind: InterfererKind, duration_s: f64, payload_seed: u64) -> Result<Self> {
        if !(duration_s > 0.0) || !duration_s.is_finite() {
            return Err(Error::invalid(format!("duration must be positive, got {duration_s}")));
        }
        Ok(Self { kind, duration_s, payload_seed, center_offset_hz: 0.0, wifi11b_dqpsk: false })
    }

    pub fn with_center_offset(mut self, offset_hz: f64) -> Self {
        self.center_offset_hz = offset_hz;
        self
    }

    fn sample_count(&self) -> usize {
        (self.duration_s * SIM_SAMPLE_RATE_HZ).round() as usize
    }

    fn check_kind(&self, expected: InterfererKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::invalid(format!(
                "generator for {} was handed a {} spec",
                expected.label(),
                self.kind.label()
            )));
        }
        Ok(())
    }
}

/// Generate the waveform for any spec. `None` yields an empty waveform.
pub fn generate(spec: &InterfererSpec) -> Result<IqWaveform> {
    match spec.kind {
        InterfererKind::Wifi11b => gen_wifi11b(spec),
        InterfererKind::Wifi11g => gen_wifi11g(spec),
        InterfererKind::Bluetooth => gen_bluetooth(spec),
        InterfererKind::Zigbee => gen_zigbee_interferer(spec),
        InterfererKind::None => Ok(IqWaveform::empty(SIM_SAMPLE_RATE_HZ)),
    }
}

/// The 11-chip Barker spreading sequence.
const BARKER: [f64; 11] = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0];

/// 802.11b DSSS: D(B/Q)PSK symbols at 1 Msym/s spread by the Barker code at
/// 11 Mchip/s, rectangular chips, two samples per chip.
pub fn gen_wifi11b(spec: &InterfererSpec) -> Result<IqWaveform> {
    spec.check_kind(InterfererKind::Wifi11b)?;
    let n = spec.sample_count();
    let samples_per_symbol = 22; // 11 chips × 2 samples
    let n_symbols = n.div_ceil(samples_per_symbol);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.payload_seed);
    let mut samples = Vec::with_capacity(n_symbols * samples_per_symbol);
    let mut phase: f64 = 0.0;
    for _ in 0..n_symbols {
        let increment = if spec.wifi11b_dqpsk {
            std::f64::consts::FRAC_PI_2 * rng.gen_range(0..4) as f64
        } else {
            std::f64::consts::PI * rng.gen_range(0..2) as f64
        };
        phase = (phase + increment).rem_euclid(std::f64::consts::TAU);
        let carrier = Complex64::from_polar(1.0, phase);
        for chip in BARKER {
            let value = carrier * chip;
            samples.push(value);
            samples.push(value);
        }
    }
    samples.truncate(n);
    Ok(IqWaveform::from_parts(samples, SIM_SAMPLE_RATE_HZ))
}

const OFDM_FFT: usize = 64;
const OFDM_CP: usize = 16;
/// Occupied subcarriers: ±1..±26 with pilots at ±7 and ±21.
const OFDM_PILOTS: [i32; 4] = [-21, -7, 7, 21];

/// One OFDM symbol (cyclic prefix included) at the native 20 MHz rate.
fn ofdm_symbol_20mhz(rng: &mut ChaCha8Rng, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    let ifft = planner.plan_fft_inverse(OFDM_FFT);
    let mut bins = vec![Complex64::new(0.0, 0.0); OFDM_FFT];
    for k in 1..=26i32 {
        for sign in [1i32, -1] {
            let sc = k * sign;
            let bin = if sc >= 0 { sc as usize } else { (OFDM_FFT as i32 + sc) as usize };
            bins[bin] = if OFDM_PILOTS.contains(&sc) {
                // Pilot polarity from the same stream; BPSK.
                Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
            } else {
                // Random QPSK data.
                let re = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let im = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(re, im) / 2f64.sqrt()
            };
        }
    }
    let mut time = bins;
    ifft.process(&mut time);
    let mut symbol = Vec::with_capacity(OFDM_FFT + OFDM_CP);
    symbol.extend_from_slice(&time[OFDM_FFT - OFDM_CP..]);
    symbol.extend_from_slice(&time);
    symbol
}

/// 802.11g OFDM: 64-point symbols with 48 random-QPSK data subcarriers and 4
/// pilots, 16-sample cyclic prefix, built at 20 MHz and resampled to 22 MHz,
/// then normalized to unit mean power.
pub fn gen_wifi11g(spec: &InterfererSpec) -> Result<IqWaveform> {
    spec.check_kind(InterfererKind::Wifi11g)?;
    let n_out = spec.sample_count();
    let n_20 = (spec.duration_s * 20e6).round() as usize;
    let n_symbols = n_20.div_ceil(OFDM_FFT + OFDM_CP).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.payload_seed);
    let mut planner = FftPlanner::new();
    let mut samples = Vec::with_capacity(n_symbols * (OFDM_FFT + OFDM_CP));
    for _ in 0..n_symbols {
        samples.extend(ofdm_symbol_20mhz(&mut rng, &mut planner));
    }
    let native = IqWaveform::from_parts(samples, 20e6);
    let upsampled = resample(&native, SIM_SAMPLE_RATE_HZ, 0.0, 0.0)?;
    let mut out = upsampled.into_samples();
    out.truncate(n_out);
    // Unit mean power over the emitted buffer.
    let p = out.iter().map(|s| s.norm_sqr()).sum::<f64>() / out.len().max(1) as f64;
    let g = 1.0 / p.sqrt();
    for s in &mut out {
        *s *= g;
    }
    Ok(IqWaveform::from_parts(out, SIM_SAMPLE_RATE_HZ))
}

/// Bluetooth GFSK: 1 Msym/s, Gaussian pulse shaping with bandwidth-time
/// product 0.5, modulation index 0.32 (peak deviation 160 kHz), constant
/// envelope.
pub fn gen_bluetooth(spec: &InterfererSpec) -> Result<IqWaveform> {
    spec.check_kind(InterfererKind::Bluetooth)?;
    let n = spec.sample_count();
    let samples_per_bit = 22;
    // Pad the bit stream so the Gaussian tail is settled over the whole output.
    let n_bits = n.div_ceil(samples_per_bit) + 8;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.payload_seed);
    let bits: Vec<f64> = (0..n_bits).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();

    // Gaussian filter for BT = 0.5 at 1 Msym/s: 3 dB bandwidth 500 kHz.
    let fs = SIM_SAMPLE_RATE_HZ;
    let b = 0.5e6;
    let alpha = 2.0 * std::f64::consts::PI * std::f64::consts::PI * b * b / (2.0f64).ln();
    let half = 2 * samples_per_bit; // ±2 bit periods
    let mut taps: Vec<f64> = (-(half as i64)..=half as i64)
        .map(|k| {
            let t = k as f64 / fs;
            (-alpha * t * t).exp()
        })
        .collect();
    // Unit DC gain: a long run of equal bits settles the trajectory at ±1.
    let dc: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }

    // NRZ at the sample rate, then Gaussian-filtered frequency trajectory.
    let lead = 4 * samples_per_bit; // discard the filter warm-up
    let total = n + lead + half;
    let nrz =
        |idx: usize| -> f64 { bits[(idx / samples_per_bit).min(bits.len() - 1)] };
    let mut freq = vec![0.0f64; total];
    for (i, f) in freq.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, tap) in taps.iter().enumerate() {
            let j = i as i64 + k as i64 - half as i64;
            if j >= 0 {
                acc += tap * nrz(j as usize);
            }
        }
        *f = acc;
    }

    let f_dev = 0.32 * 1e6 / 2.0; // modulation index 0.32 at 1 Msym/s
    let mut samples = Vec::with_capacity(n);
    let mut phase: f64 = 0.0;
    for f in freq.iter().skip(lead).take(n) {
        phase = (phase + std::f64::consts::TAU * f_dev * f / fs).rem_euclid(std::f64::consts::TAU);
        samples.push(Complex64::from_polar(1.0, phase));
    }
    Ok(IqWaveform::from_parts(samples, SIM_SAMPLE_RATE_HZ))
}

/// A second ZigBee transmitter: random payload frames, chip streams
/// concatenated and modulated at eleven samples per chip (22 MHz).
pub fn gen_zigbee_interferer(spec: &InterfererSpec) -> Result<IqWaveform> {
    spec.check_kind(InterfererKind::Zigbee)?;
    let n = spec.sample_count();
    let samples_per_chip = 11;
    let chips_needed = n.div_ceil(samples_per_chip);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.payload_seed);
    let mut chips = Vec::with_capacity(chips_needed + 32);
    while chips.len() < chips_needed {
        let payload: Vec<u8> = (0..100).map(|_| rng.gen()).collect();
        let frame = zigbee::ZigbeeFrame::build(&payload).expect("payload within limit");
        chips.extend(zigbee::frame_chips(&frame));
    }
    let w = zigbee::modulate_chips(&chips, samples_per_chip);
    let mut samples = w.into_samples();
    samples.truncate(n);
    Ok(IqWaveform::from_parts(samples, SIM_SAMPLE_RATE_HZ))
}
