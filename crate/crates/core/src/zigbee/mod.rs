//! IEEE 802.15.4 (2.4 GHz) victim transceiver: framing, chip spreading,
//! half-sine O-QPSK modulation, and chip-level demodulation and decoding.

mod frame;
mod phy;
mod pn;

pub use frame::{
    bytes_to_symbols, crc16, from_hex, symbols_to_bytes, to_hex, ZigbeeFrame, MAX_PAYLOAD,
    PREAMBLE_BYTES, SFD,
};
pub use phy::{
    align_preamble, decode_frame, decode_frame_at, decode_symbol, demodulate_chips, frame_chips,
    modulate, modulate_chips, modulate_oversampled, ChipDecision, FrameDecode, SymbolDecode,
    CHIPS_PER_SYMBOL, CHIP_RATE_HZ, HEADER_SYMBOLS, RX_SAMPLES_PER_CHIP, RX_SAMPLE_RATE_HZ,
    SAMPLES_PER_SYMBOL,
};
pub use pn::{hamming, PnTable};
