//! Half-sine O-QPSK modulation and the phase-shift chip demodulator.
//!
//! Chip-to-phase convention, shared by modulator and demodulator: chip 1
//! advances the carrier phase by +π/2 over its chip period, chip 0 retreats
//! by π/2. With half-sine pulses and the half-chip I/Q offset this is the
//! MSK form of the waveform: the envelope is constant and, at two samples
//! per chip, consecutive samples are ±π/4 apart. A chip decision is the sign
//! of the phase shift accumulated across its chip period, so any global
//! complex gain on the waveform cancels out of the decision.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::frame::{symbols_to_bytes, ZigbeeFrame};
use super::pn::{hamming, PnTable};
use crate::error::{Error, Result};
use crate::signal::IqWaveform;

/// Spreading chip rate of the 2.4 GHz PHY.
pub const CHIP_RATE_HZ: f64 = 2_000_000.0;
pub const CHIPS_PER_SYMBOL: usize = 32;
/// Receiver-side oversampling: two samples per chip.
pub const RX_SAMPLES_PER_CHIP: usize = 2;
/// Receiver baseband rate (two samples per chip).
pub const RX_SAMPLE_RATE_HZ: f64 = 4_000_000.0;
/// Samples per data symbol at the receiver rate.
pub const SAMPLES_PER_SYMBOL: usize = CHIPS_PER_SYMBOL * RX_SAMPLES_PER_CHIP;

/// Symbols in the synchronization header (preamble + SFD + length byte).
pub const HEADER_SYMBOLS: usize = 12;

/// Hard chip decisions for one symbol window plus the normalized magnitude
/// of each per-chip decision statistic.
#[derive(Debug, Clone)]
pub struct ChipDecision {
    pub chips: [u8; 32],
    pub soft_quality: [f64; 32],
}

/// Nearest spreading sequence for a chip decision: the decoded symbol, its
/// Hamming distance, and the distance gap to the runner-up sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDecode {
    pub symbol: u8,
    pub hamming: u8,
    pub runner_up_gap: u8,
}

/// Full-frame decode result.
#[derive(Debug, Clone)]
pub struct FrameDecode {
    /// Sample offset of the frame start within the input waveform.
    pub frame_start: usize,
    pub symbols: Vec<SymbolDecode>,
    /// Reassembled bytes (preamble through FCS), as far as decoded.
    pub bytes: Vec<u8>,
    /// Payload slice of `bytes`; empty when the frame was truncated.
    pub payload: Vec<u8>,
    pub fcs_ok: bool,
    /// True when the advertised length ran past the end of the waveform.
    pub truncated: bool,
}

/// Expand a frame to its on-air chip stream.
pub fn frame_chips(frame: &ZigbeeFrame) -> Vec<u8> {
    let table = PnTable::standard();
    let mut chips = Vec::with_capacity(frame.symbol_count() * CHIPS_PER_SYMBOL);
    for symbol in frame.symbols() {
        chips.extend_from_slice(table.sequence(symbol));
    }
    chips
}

/// Modulate a chip stream at `samples_per_chip` samples per chip. The output
/// carries one extra sample past the final chip boundary so the last chip has
/// a complete phase trajectory; its rate is `samples_per_chip × 2 MHz`.
pub fn modulate_chips(chips: &[u8], samples_per_chip: usize) -> IqWaveform {
    assert!(samples_per_chip >= 1);
    let step = std::f64::consts::FRAC_PI_2 / samples_per_chip as f64;
    let mut samples = Vec::with_capacity(chips.len() * samples_per_chip + 1);
    let mut phase: f64 = 0.0;
    samples.push(Complex64::new(1.0, 0.0));
    for &chip in chips {
        let dir = if chip != 0 { 1.0 } else { -1.0 };
        for _ in 0..samples_per_chip {
            phase = (phase + dir * step).rem_euclid(std::f64::consts::TAU);
            samples.push(Complex64::from_polar(1.0, phase));
        }
    }
    IqWaveform::from_parts(samples, CHIP_RATE_HZ * samples_per_chip as f64)
}

/// Modulate a frame at the receiver rate (two samples per chip, 64 samples
/// per symbol).
pub fn modulate(frame: &ZigbeeFrame) -> IqWaveform {
    modulate_chips(&frame_chips(frame), RX_SAMPLES_PER_CHIP)
}

/// Modulate a frame at an arbitrary integer oversampling, e.g. eleven samples
/// per chip for the 22 MHz simulation rate.
pub fn modulate_oversampled(frame: &ZigbeeFrame, samples_per_chip: usize) -> IqWaveform {
    modulate_chips(&frame_chips(frame), samples_per_chip)
}

/// Decide the 32 chips of symbol `symbol_index` from a frame-aligned 4 MHz
/// waveform (frame start at sample 0). Each chip is the sign of the summed
/// phase shifts across its chip period; `soft_quality` is the statistic's
/// magnitude normalized by its nominal π/2.
pub fn demodulate_chips(w: &IqWaveform, symbol_index: usize) -> Result<ChipDecision> {
    if (w.sample_rate_hz() - RX_SAMPLE_RATE_HZ).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "chip demodulation expects {RX_SAMPLE_RATE_HZ} Hz, got {}",
            w.sample_rate_hz()
        )));
    }
    let start = symbol_index * SAMPLES_PER_SYMBOL;
    let end = start + SAMPLES_PER_SYMBOL;
    if end > w.len() {
        return Err(Error::WindowOutOfRange(format!(
            "symbol {symbol_index} needs samples {start}..{end}, waveform has {}",
            w.len()
        )));
    }
    let x = w.samples();
    let mut chips = [0u8; 32];
    let mut soft_quality = [0.0f64; 32];
    for chip in 0..CHIPS_PER_SYMBOL {
        let mut acc = 0.0;
        for j in 0..RX_SAMPLES_PER_CHIP {
            let n = start + chip * RX_SAMPLES_PER_CHIP + j;
            // The final shift of the last chip needs the sample one past the
            // window; fall back to the available span at the buffer tail.
            if n + 1 < w.len() {
                acc += (x[n + 1] * x[n].conj()).arg();
            }
        }
        chips[chip] = u8::from(acc > 0.0);
        soft_quality[chip] = (acc.abs() / std::f64::consts::FRAC_PI_2).min(1.0);
    }
    Ok(ChipDecision { chips, soft_quality })
}

/// Exhaustive nearest-neighbor decode over the 16 spreading sequences.
/// Ties break toward the lowest symbol index.
pub fn decode_symbol(decision: &ChipDecision, table: &PnTable) -> SymbolDecode {
    let mut best_symbol = 0u8;
    let mut best = u8::MAX;
    let mut second = u8::MAX;
    for (symbol, seq) in table.sequences().iter().enumerate() {
        let d = hamming(&decision.chips, seq);
        if d < best {
            second = best;
            best = d;
            best_symbol = symbol as u8;
        } else if d < second {
            second = d;
        }
    }
    SymbolDecode { symbol: best_symbol, hamming: best, runner_up_gap: second - best }
}

/// Sample length of the preamble+SFD correlation template.
fn sync_template() -> &'static IqWaveform {
    use std::sync::OnceLock;
    static TEMPLATE: OnceLock<IqWaveform> = OnceLock::new();
    TEMPLATE.get_or_init(|| {
        let table = PnTable::standard();
        // Eight zero symbols of preamble plus the two SFD symbols (0x7, 0xA).
        let mut chips = Vec::new();
        for _ in 0..8 {
            chips.extend_from_slice(table.sequence(0));
        }
        chips.extend_from_slice(table.sequence(0x7));
        chips.extend_from_slice(table.sequence(0xA));
        modulate_chips(&chips, RX_SAMPLES_PER_CHIP)
    })
}

/// Normalized correlation floor below which no frame is declared.
const SYNC_THRESHOLD: f64 = 0.2;
/// Frame starts are searched within this many samples of the buffer head.
const SYNC_SEARCH_SPAN: usize = 1000;

/// Locate the frame start by correlating against the known preamble+SFD
/// waveform. Returns the sample offset of the peak, or [`Error::NoFrame`]
/// when the normalized correlation never clears the floor. The magnitude
/// correlation makes the search insensitive to any global complex gain.
pub fn align_preamble(w: &IqWaveform) -> Result<usize> {
    let template = sync_template();
    let t = template.samples();
    if w.len() < t.len() + 1 {
        return Err(Error::NoFrame(format!(
            "waveform of {} samples is shorter than the {}-sample sync template",
            w.len(),
            t.len()
        )));
    }
    let x = w.samples();
    let t_energy: f64 = t.iter().map(|s| s.norm_sqr()).sum();
    let last = (w.len() - t.len()).min(SYNC_SEARCH_SPAN);

    let mut best_offset = 0usize;
    let mut best_score = -1.0f64;
    // Rolling window energy for the normalization term.
    let mut w_energy: f64 = x[..t.len()].iter().map(|s| s.norm_sqr()).sum();
    for offset in 0..=last {
        if w_energy > 1e-12 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ti, xi) in t.iter().zip(&x[offset..offset + t.len()]) {
                acc += xi * ti.conj();
            }
            let score = acc.norm_sqr() / (t_energy * w_energy);
            if score > best_score {
                best_score = score;
                best_offset = offset;
            }
        }
        if offset < last {
            w_energy += x[offset + t.len()].norm_sqr() - x[offset].norm_sqr();
        }
    }
    if best_score < SYNC_THRESHOLD {
        return Err(Error::NoFrame(format!(
            "sync correlation peak {best_score:.3} below floor {SYNC_THRESHOLD}"
        )));
    }
    Ok(best_offset)
}

/// Decode every symbol of the frame found in `w`: align, walk the symbol
/// windows, reassemble bytes, and verify the FCS.
pub fn decode_frame(w: &IqWaveform) -> Result<FrameDecode> {
    let frame_start = align_preamble(w)?;
    decode_frame_at(w, frame_start)
}

/// [`decode_frame`] with the frame start already known.
pub fn decode_frame_at(w: &IqWaveform, frame_start: usize) -> Result<FrameDecode> {
    let table = PnTable::standard();
    let body = IqWaveform::from_parts(w.samples()[frame_start..].to_vec(), w.sample_rate_hz());

    let available = body.len() / SAMPLES_PER_SYMBOL;
    if available < HEADER_SYMBOLS {
        return Err(Error::WindowOutOfRange(format!(
            "only {available} symbol windows after the frame start; header needs {HEADER_SYMBOLS}"
        )));
    }
    let mut symbols = Vec::new();
    for k in 0..HEADER_SYMBOLS {
        symbols.push(decode_symbol(&demodulate_chips(&body, k)?, table));
    }
    // Length byte is symbols 10 (low nibble) and 11.
    let length_byte = (symbols[10].symbol | (symbols[11].symbol << 4)) as usize;
    let total_symbols = HEADER_SYMBOLS + 2 * length_byte;
    let truncated = total_symbols > available;
    let decode_to = total_symbols.min(available);
    for k in HEADER_SYMBOLS..decode_to {
        symbols.push(decode_symbol(&demodulate_chips(&body, k)?, table));
    }

    let nibbles: Vec<u8> = symbols.iter().map(|d| d.symbol).collect();
    let bytes = symbols_to_bytes(&nibbles);
    let (payload, fcs_ok) = if !truncated && length_byte >= 2 && bytes.len() >= 6 + length_byte {
        let payload = bytes[6..6 + length_byte - 2].to_vec();
        let fcs = u16::from_le_bytes([bytes[4 + length_byte], bytes[5 + length_byte]]);
        let ok = super::frame::crc16(&payload) == fcs;
        (payload, ok)
    } else {
        (Vec::new(), false)
    };

    Ok(FrameDecode { frame_start, symbols, bytes, payload, fcs_ok, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{phase_shift_series, rssi_series, scale, NoiseSpec};
    use rand::{Rng, SeedableRng};

    fn test_frame() -> ZigbeeFrame {
        ZigbeeFrame::build(b"hello interference world").unwrap()
    }

    #[test]
    fn modulated_frame_has_constant_envelope() {
        let w = modulate(&test_frame());
        let rssi = rssi_series(&w);
        let max = rssi.iter().cloned().fold(f64::MIN, f64::max);
        let min = rssi.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.000001, "envelope ratio {}", max / min);
    }

    #[test]
    fn modulated_frame_phase_shifts_are_quarter_pi() {
        let w = modulate(&test_frame());
        for shift in phase_shift_series(&w).unwrap() {
            assert!(
                (shift.abs() - std::f64::consts::FRAC_PI_4).abs() < 1e-6,
                "shift {shift}"
            );
        }
    }

    #[test]
    fn modulated_length_is_symbols_plus_tail() {
        let frame = test_frame();
        let w = modulate(&frame);
        assert_eq!(w.len(), frame.symbol_count() * SAMPLES_PER_SYMBOL + 1);
        let w11 = modulate_oversampled(&frame, 11);
        assert_eq!(w11.len(), frame.symbol_count() * CHIPS_PER_SYMBOL * 11 + 1);
        assert_eq!(w11.sample_rate_hz(), 22e6);
    }

    #[test]
    fn noiseless_loopback_recovers_every_chip() {
        let frame = test_frame();
        let w = modulate(&frame);
        let chips = frame_chips(&frame);
        for k in 0..frame.symbol_count() {
            let d = demodulate_chips(&w, k).unwrap();
            assert_eq!(&d.chips[..], &chips[k * 32..(k + 1) * 32], "symbol {k}");
            assert!(d.soft_quality.iter().all(|q| *q > 0.99));
        }
    }

    #[test]
    fn global_gain_leaves_chips_unchanged() {
        let frame = test_frame();
        let w = modulate(&frame);
        let inverted = scale(&w, Complex64::new(-1.0, 0.0)).unwrap();
        for k in 0..frame.symbol_count() {
            let a = demodulate_chips(&w, k).unwrap();
            let b = demodulate_chips(&inverted, k).unwrap();
            assert_eq!(a.chips, b.chips);
        }
    }

    #[test]
    fn window_out_of_range_is_rejected() {
        let w = modulate(&ZigbeeFrame::build(&[]).unwrap());
        let n_symbols = 16;
        assert!(demodulate_chips(&w, n_symbols - 1).is_ok());
        assert!(matches!(
            demodulate_chips(&w, n_symbols),
            Err(Error::WindowOutOfRange(_))
        ));
    }

    #[test]
    fn decode_symbol_exact_and_perturbed() {
        let table = PnTable::standard();
        let mut decision = ChipDecision { chips: *table.sequence(5), soft_quality: [1.0; 32] };
        let d = decode_symbol(&decision, table);
        assert_eq!((d.symbol, d.hamming), (5, 0));
        assert!(d.runner_up_gap as u32 >= table.min_distance() as u32);

        for i in 0..3 {
            decision.chips[i] = 1 - decision.chips[i];
        }
        let d = decode_symbol(&decision, table);
        assert_eq!((d.symbol, d.hamming), (5, 3));
    }

    #[test]
    fn decode_symbol_matches_brute_force_on_all_zero_chips() {
        let table = PnTable::standard();
        let decision = ChipDecision { chips: [0u8; 32], soft_quality: [0.0; 32] };
        let d = decode_symbol(&decision, table);
        // Independent exhaustive scan using popcount on packed chips.
        let pack = |seq: &[u8; 32]| -> u32 {
            seq.iter().enumerate().fold(0u32, |acc, (i, c)| acc | ((*c as u32) << i))
        };
        let received = 0u32;
        let (mut oracle_sym, mut oracle_dist) = (0u8, u32::MAX);
        for (s, seq) in table.sequences().iter().enumerate() {
            let dist = (pack(seq) ^ received).count_ones();
            if dist < oracle_dist {
                oracle_dist = dist;
                oracle_sym = s as u8;
            }
        }
        assert_eq!((d.symbol, d.hamming as u32), (oracle_sym, oracle_dist));
    }

    #[test]
    fn alignment_finds_prepended_offset() {
        let frame = test_frame();
        let w = modulate(&frame);
        let mut samples = vec![Complex64::new(0.0, 0.0); 100];
        samples.extend_from_slice(w.samples());
        let padded = IqWaveform::new(samples, RX_SAMPLE_RATE_HZ).unwrap();
        assert_eq!(align_preamble(&padded).unwrap(), 100);
    }

    #[test]
    fn alignment_rejects_pure_noise() {
        let silence = IqWaveform::new(vec![Complex64::new(0.0, 0.0); 4000], RX_SAMPLE_RATE_HZ).unwrap();
        let noise = crate::signal::add_awgn(&silence, &NoiseSpec::new(1.0, 7).unwrap()).unwrap();
        assert!(matches!(align_preamble(&noise), Err(Error::NoFrame(_))));
    }

    #[test]
    fn clean_frame_decodes_with_zero_distance() {
        let frame = test_frame();
        let decode = decode_frame(&modulate(&frame)).unwrap();
        assert!(decode.fcs_ok);
        assert!(!decode.truncated);
        assert_eq!(decode.payload, frame.payload());
        assert!(decode.symbols.iter().all(|s| s.hamming == 0));
    }

    #[test]
    fn noise_burst_breaks_the_fcs() {
        let frame = test_frame();
        let w = modulate(&frame);
        let mut samples = w.samples().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        // Overwrite one payload symbol window with noise.
        let k = 20;
        for s in samples.iter_mut().skip(k * SAMPLES_PER_SYMBOL).take(SAMPLES_PER_SYMBOL) {
            *s = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let corrupted = IqWaveform::new(samples, RX_SAMPLE_RATE_HZ).unwrap();
        let decode = decode_frame(&corrupted).unwrap();
        assert!(!decode.fcs_ok);
    }

    #[test]
    fn random_payload_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
        for _ in 0..20 {
            let len = rng.gen_range(0..=125);
            let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let frame = ZigbeeFrame::build(&payload).unwrap();
            let decode = decode_frame(&modulate(&frame)).unwrap();
            assert!(decode.fcs_ok);
            assert_eq!(decode.payload, payload);
        }
    }
}
