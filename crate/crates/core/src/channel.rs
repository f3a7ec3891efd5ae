//! The collision channel: composes a scene into the waveform a victim
//! receiver sees, `Y[n] = H_X·X[n] + H_Z·Z[n] + W`, then runs the victim's
//! receive chain (2 MHz low-pass, fractional resampling to 4 MHz).
//!
//! Receiver sync errors are injected on the receive side as a sampling-phase
//! offset and a clock-rate skew in the resampler; they re-time the waveform
//! but never add energy. Ground-truth per-symbol labels are derived from the
//! scene geometry alongside the mixed waveform.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferers::{generate, InterfererKind, InterfererSpec, SIM_SAMPLE_RATE_HZ};
use crate::signal::{
    add_awgn, add_waveforms, frequency_shift, low_pass_filter, resample, scale, IqWaveform,
    NoiseSpec,
};
use crate::zigbee::{modulate_oversampled, ZigbeeFrame, CHIP_RATE_HZ, RX_SAMPLE_RATE_HZ};

/// Victim receive-filter cutoff.
pub const RX_FILTER_CUTOFF_HZ: f64 = 2_000_000.0;
/// Samples per chip at the simulation rate.
pub const SIM_SAMPLES_PER_CHIP: usize = 11;
/// Silence before the victim frame in the mixed buffer.
pub const LEAD_IN_S: f64 = 25e-6;
/// Silence kept after the last active sample.
pub const TAIL_S: f64 = 25e-6;

/// Declarative description of one air collision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionScene {
    pub victim_frame: ZigbeeFrame,
    /// Complex channel gain on the victim.
    pub h_z: Complex64,
    pub interferer: InterfererSpec,
    /// Complex channel gain on the interferer.
    pub h_x: Complex64,
    /// Start of the interferer relative to the victim frame start.
    pub interferer_delay_s: f64,
    pub noise: NoiseSpec,
    /// Victim sampling-phase error in chip periods, within [-0.5, 0.5].
    pub timing_offset_chips: f64,
    /// Slow receiver clock skew in parts per million.
    pub sampling_drift_ppm: f64,
}

impl CollisionScene {
    /// A collision-free scene: victim plus noise only.
    pub fn clean(victim_frame: ZigbeeFrame, noise: NoiseSpec) -> Self {
        Self {
            victim_frame,
            h_z: Complex64::new(1.0, 0.0),
            interferer: InterfererSpec {
                kind: InterfererKind::None,
                duration_s: 1e-6,
                payload_seed: 0,
                center_offset_hz: 0.0,
                wifi11b_dqpsk: false,
            },
            h_x: Complex64::new(0.0, 0.0),
            interferer_delay_s: 0.0,
            noise,
            timing_offset_chips: 0.0,
            sampling_drift_ppm: 0.0,
        }
    }

    /// Signal-to-interference ratio implied by the gains, in dB. `None` when
    /// the interferer gain is zero.
    pub fn sir_db(&self) -> Option<f64> {
        let hx = self.h_x.norm();
        if hx == 0.0 {
            None
        } else {
            Some(20.0 * (self.h_z.norm() / hx).log10())
        }
    }

    pub fn has_sync_error(&self) -> bool {
        self.timing_offset_chips != 0.0 || self.sampling_drift_ppm != 0.0
    }

    pub fn has_interferer(&self) -> bool {
        self.interferer.kind != InterfererKind::None && self.h_x.norm() > 0.0
    }

    fn validate(&self) -> Result<()> {
        if !(-0.5..=0.5).contains(&self.timing_offset_chips) {
            return Err(Error::invalid(format!(
                "timing offset {} outside [-0.5, 0.5] chips",
                self.timing_offset_chips
            )));
        }
        if self.interferer_delay_s < 0.0 || !self.interferer_delay_s.is_finite() {
            return Err(Error::invalid("interferer delay must be nonnegative"));
        }
        if !self.sampling_drift_ppm.is_finite() {
            return Err(Error::invalid("drift must be finite"));
        }
        for (name, g) in [("h_z", self.h_z), ("h_x", self.h_x)] {
            if !g.re.is_finite() || !g.im.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Ground truth for one victim symbol, from scene geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthLabel {
    /// No interferer energy in the window and no sync error anywhere.
    Clean,
    /// Sync error present, no interferer energy in the window.
    SyncErrorOnly,
    /// The interferer transmission overlaps this symbol's window.
    CtiOverlap(InterfererKind),
}

impl TruthLabel {
    pub fn is_cti(&self) -> bool {
        matches!(self, TruthLabel::CtiOverlap(_))
    }
}

/// The victim receiver's baseband output plus per-symbol ground truth.
#[derive(Debug, Clone)]
pub struct ReceivedBaseband {
    /// Post-filter, post-decimation waveform at 4 MHz.
    pub waveform: IqWaveform,
    /// One label per victim symbol.
    pub truth: Vec<TruthLabel>,
    /// Victim frame start in buffer time (transmit timeline).
    pub frame_start_s: f64,
}

/// Mix a scene: victim at 22 MHz, interferer shifted/delayed/scaled, noise,
/// receive filter, fractional resampling to 4 MHz, truth labels.
pub fn mix(scene: &CollisionScene) -> Result<ReceivedBaseband> {
    scene.validate()?;
    let victim = modulate_oversampled(&scene.victim_frame, SIM_SAMPLES_PER_CHIP);
    let lead = (LEAD_IN_S * SIM_SAMPLE_RATE_HZ).round() as usize;
    let delay = (scene.interferer_delay_s * SIM_SAMPLE_RATE_HZ).round() as usize;

    let interferer = if scene.has_interferer() {
        let raw = generate(&scene.interferer)?;
        Some(frequency_shift(&raw, scene.interferer.center_offset_hz)?)
    } else {
        None
    };

    let active_end = (lead + victim.len())
        .max(interferer.as_ref().map_or(0, |x| lead + delay + x.len()));
    let total = active_end + (TAIL_S * SIM_SAMPLE_RATE_HZ).round() as usize;

    let mut sum = vec![Complex64::new(0.0, 0.0); total];
    for (i, s) in victim.samples().iter().enumerate() {
        sum[lead + i] = scene.h_z * s;
    }
    if let Some(x) = &interferer {
        for (i, s) in x.samples().iter().enumerate() {
            sum[lead + delay + i] += scene.h_x * s;
        }
    }
    let mixed = IqWaveform::new(sum, SIM_SAMPLE_RATE_HZ)?;
    let noisy = add_awgn(&mixed, &scene.noise)?;
    let filtered = low_pass_filter(&noisy, RX_FILTER_CUTOFF_HZ)?;
    let rx = resample(
        &filtered,
        RX_SAMPLE_RATE_HZ,
        scene.timing_offset_chips / CHIP_RATE_HZ,
        scene.sampling_drift_ppm,
    )?;

    Ok(ReceivedBaseband {
        waveform: rx,
        truth: truth_labels(scene),
        frame_start_s: LEAD_IN_S,
    })
}

/// Per-symbol labels from the scene geometry alone. A symbol is CTI-overlapped
/// exactly when the interferer transmission intersects the symbol's on-air
/// window; the intersection is evaluated on the integer 22 MHz sample grid,
/// the same grid `mix` places energy on, so the label agrees with where
/// interferer samples actually land.
pub fn truth_labels(scene: &CollisionScene) -> Vec<TruthLabel> {
    let n_symbols = scene.victim_frame.symbol_count();
    let symbol_samples = (32 * SIM_SAMPLES_PER_CHIP) as i64;
    let cti = scene.has_interferer();
    let x_start = (scene.interferer_delay_s * SIM_SAMPLE_RATE_HZ).round() as i64;
    let x_end = x_start + (scene.interferer.duration_s * SIM_SAMPLE_RATE_HZ).round() as i64;
    (0..n_symbols as i64)
        .map(|k| {
            let s_start = k * symbol_samples;
            let s_end = s_start + symbol_samples;
            if cti && x_start < s_end && x_end > s_start {
                TruthLabel::CtiOverlap(scene.interferer.kind)
            } else if scene.has_sync_error() {
                TruthLabel::SyncErrorOnly
            } else {
                TruthLabel::Clean
            }
        })
        .collect()
}

/// How retransmission copies differ from the original scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetransmitRule {
    /// Fresh interferer payload seeds per copy (the retransmission premise:
    /// same victim samples, different interference).
    pub fresh_interferer_seeds: bool,
    /// Uniform jitter half-range applied to the interferer delay per copy.
    pub delay_jitter_s: f64,
    /// Fresh noise seeds per copy.
    pub fresh_noise_seeds: bool,
}

impl Default for RetransmitRule {
    fn default() -> Self {
        Self { fresh_interferer_seeds: true, delay_jitter_s: 8e-6, fresh_noise_seeds: true }
    }
}

impl RetransmitRule {
    /// Copies that repeat the identical interference in every transmission.
    pub fn correlated() -> Self {
        Self { fresh_interferer_seeds: false, delay_jitter_s: 0.0, fresh_noise_seeds: true }
    }
}

/// The scene for retransmission copy `index`; copy 0 is the scene itself.
pub fn retransmission_scene(scene: &CollisionScene, rule: &RetransmitRule, index: u32) -> CollisionScene {
    if index == 0 {
        return scene.clone();
    }
    let mut copy = scene.clone();
    let base = splitmix64(scene.noise.seed ^ 0x5EED_5EED_5EED_5EED);
    let salt = splitmix64(base.wrapping_add(index as u64));
    if rule.fresh_interferer_seeds {
        copy.interferer.payload_seed = splitmix64(scene.interferer.payload_seed ^ salt);
    }
    if rule.fresh_noise_seeds {
        copy.noise.seed = splitmix64(scene.noise.seed ^ salt.rotate_left(17));
    }
    if rule.delay_jitter_s > 0.0 {
        // Deterministic uniform in [-jitter, jitter], kept nonnegative.
        let u = splitmix64(salt.rotate_left(31)) as f64 / u64::MAX as f64;
        let jitter = (2.0 * u - 1.0) * rule.delay_jitter_s;
        copy.interferer_delay_s = (scene.interferer_delay_s + jitter).max(0.0);
    }
    copy
}

/// Mix `k` retransmissions of the same victim frame: identical victim samples
/// and gains, per-copy interference and noise per `rule`.
pub fn make_retransmissions(
    scene: &CollisionScene,
    k: u32,
    rule: &RetransmitRule,
) -> Result<Vec<ReceivedBaseband>> {
    if k < 1 {
        return Err(Error::invalid("need at least one retransmission"));
    }
    (0..k).map(|i| mix(&retransmission_scene(scene, rule, i))).collect()
}

/// SplitMix64 step; the documented seed-mixing primitive used everywhere a
/// derived seed is needed.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean power fraction of a unit-power interferer of `kind` at
/// `center_offset_hz` that survives the victim receive chain. Measured once
/// per (kind, offset) on a fixed-seed reference burst and cached; used to
/// express operating SIR in the victim's band.
pub fn inband_power_fraction(kind: InterfererKind, center_offset_hz: f64) -> f64 {
    if kind == InterfererKind::None {
        return 1.0;
    }
    static CACHE: Mutex<Option<HashMap<(InterfererKind, u64), f64>>> = Mutex::new(None);
    let key = (kind, center_offset_hz.to_bits());
    if let Some(v) = CACHE.lock().unwrap().get_or_insert_with(HashMap::new).get(&key) {
        return *v;
    }
    let spec = InterfererSpec {
        kind,
        duration_s: 2e-3,
        payload_seed: 0x1BAD_5EED,
        center_offset_hz,
        wifi11b_dqpsk: false,
    };
    let raw = generate(&spec).expect("reference burst");
    let shifted = frequency_shift(&raw, center_offset_hz).expect("offset below Nyquist");
    let filtered = low_pass_filter(&shifted, RX_FILTER_CUTOFF_HZ).expect("valid cutoff");
    let rx = resample(&filtered, RX_SAMPLE_RATE_HZ, 0.0, 0.0).expect("valid rate");
    // Trim the filter edges before measuring.
    let s = rx.samples();
    let guard = 32;
    let interior = &s[guard..s.len() - guard];
    let fraction =
        interior.iter().map(|v| v.norm_sqr()).sum::<f64>() / interior.len() as f64;
    CACHE.lock().unwrap().as_mut().unwrap().insert(key, fraction);
    fraction
}
