//! Frame construction and the 16-bit frame check sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum payload accepted by [`ZigbeeFrame::build`].
pub const MAX_PAYLOAD: usize = 125;

/// Synchronization header: four zero bytes of preamble then the
/// start-of-frame delimiter.
pub const PREAMBLE_BYTES: usize = 4;
pub const SFD: u8 = 0xA7;

/// CRC-16 with the reversed CCITT polynomial (0x8408), zero initial value,
/// no final inversion — the PHY frame check sequence. Bits are processed
/// least-significant first.
pub fn crc16(data: &[u8]) -> u16 {
    let mut crc: u16 = 0;
    for &byte in data {
        crc ^= byte as u16;
        for _ in 0..8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ 0x8408 } else { crc >> 1 };
        }
    }
    crc
}

/// A PHY frame: preamble, SFD, length byte, payload, and the frame check
/// sequence over the payload. The length byte counts payload plus FCS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FrameRepr", into = "FrameRepr")]
pub struct ZigbeeFrame {
    payload: Vec<u8>,
    fcs: u16,
}

/// Hex-string form used in scene files and reports.
#[derive(Serialize, Deserialize)]
struct FrameRepr {
    payload_hex: String,
}

impl TryFrom<FrameRepr> for ZigbeeFrame {
    type Error = Error;
    fn try_from(r: FrameRepr) -> Result<Self> {
        ZigbeeFrame::from_payload_hex(&r.payload_hex)
    }
}

impl From<ZigbeeFrame> for FrameRepr {
    fn from(f: ZigbeeFrame) -> Self {
        FrameRepr { payload_hex: f.payload_hex() }
    }
}

impl ZigbeeFrame {
    /// Assemble a frame around `payload` (at most [`MAX_PAYLOAD`] bytes).
    pub fn build(payload: &[u8]) -> Result<Self> {
        if payload.len() > MAX_PAYLOAD {
            return Err(Error::invalid(format!(
                "payload of {} bytes exceeds the {MAX_PAYLOAD}-byte limit",
                payload.len()
            )));
        }
        Ok(Self { payload: payload.to_vec(), fcs: crc16(payload) })
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn fcs(&self) -> u16 {
        self.fcs
    }

    /// Payload length plus the two FCS bytes.
    pub fn length_byte(&self) -> u8 {
        (self.payload.len() + 2) as u8
    }

    /// True when the stored FCS matches a fresh CRC over the payload.
    pub fn verify_fcs(&self) -> bool {
        crc16(&self.payload) == self.fcs
    }

    /// All on-air bytes: preamble, SFD, length, payload, FCS (low byte first).
    pub fn bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(PREAMBLE_BYTES + 2 + self.payload.len() + 2);
        out.extend_from_slice(&[0u8; PREAMBLE_BYTES]);
        out.push(SFD);
        out.push(self.length_byte());
        out.extend_from_slice(&self.payload);
        out.extend_from_slice(&self.fcs.to_le_bytes());
        out
    }

    /// Data symbols (values 0..=15), two per byte with the low nibble first.
    pub fn symbols(&self) -> Vec<u8> {
        bytes_to_symbols(&self.bytes())
    }

    pub fn symbol_count(&self) -> usize {
        2 * (PREAMBLE_BYTES + 2 + self.payload.len() + 2)
    }

    pub fn payload_hex(&self) -> String {
        to_hex(&self.payload)
    }

    pub fn from_payload_hex(hex: &str) -> Result<Self> {
        Self::build(&from_hex(hex)?)
    }
}

/// Low nibble first, matching the on-air symbol order.
pub fn bytes_to_symbols(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len() * 2);
    for b in bytes {
        out.push(b & 0x0F);
        out.push(b >> 4);
    }
    out
}

/// Inverse of [`bytes_to_symbols`]; odd trailing symbols are dropped.
pub fn symbols_to_bytes(symbols: &[u8]) -> Vec<u8> {
    symbols.chunks_exact(2).map(|p| (p[0] & 0x0F) | (p[1] << 4)).collect()
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn from_hex(hex: &str) -> Result<Vec<u8>> {
    let cleaned: String = hex.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("odd-length hex string: {hex:?}")));
    }
    (0..cleaned.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&cleaned[i..i + 2], 16)
                .map_err(|_| Error::InvalidInput(format!("bad hex byte at offset {i} in {hex:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bitwise long-division CRC over the message followed by 16 zero bits,
    /// with input and output bit reflection. Independent of `crc16` above.
    fn crc16_reference(data: &[u8]) -> u16 {
        let mut bits: Vec<u8> = Vec::new();
        for byte in data {
            for i in 0..8 {
                bits.push((byte >> i) & 1); // LSB-first reflection
            }
        }
        bits.extend_from_slice(&[0u8; 16]);
        // Long division by x^16 + x^12 + x^5 + 1.
        let poly: u32 = 0x11021;
        let mut reg: u32 = 0;
        for bit in bits {
            reg = (reg << 1) | bit as u32;
            if reg & 0x10000 != 0 {
                reg ^= poly;
            }
        }
        // Reflect the 16-bit remainder.
        let mut out = 0u16;
        for i in 0..16 {
            out |= (((reg >> i) & 1) as u16) << (15 - i);
        }
        out
    }

    #[test]
    fn crc_check_value() {
        // Published check value for this CRC variant.
        assert_eq!(crc16(b"123456789"), 0x2189);
        assert_eq!(crc16_reference(b"123456789"), 0x2189);
    }

    #[test]
    fn crc_matches_long_division_reference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let len = rng.gen_range(0..64);
            let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            assert_eq!(crc16(&data), crc16_reference(&data));
        }
    }

    #[test]
    fn empty_payload_frame_structure() {
        let f = ZigbeeFrame::build(&[]).unwrap();
        assert_eq!(f.length_byte(), 2);
        assert_eq!(f.symbol_count(), 2 * (6 + 2));
        assert_eq!(f.bytes().len(), 8);
        assert!(f.verify_fcs());
    }

    #[test]
    fn known_payload_fcs() {
        let f = ZigbeeFrame::build(b"123456789").unwrap();
        assert_eq!(f.fcs(), 0x2189);
        assert!(f.verify_fcs());
    }

    #[test]
    fn rejects_oversize_payload() {
        assert!(ZigbeeFrame::build(&[0u8; 126]).is_err());
        assert!(ZigbeeFrame::build(&[0u8; 125]).is_ok());
    }

    #[test]
    fn symbols_round_trip_low_nibble_first() {
        let f = ZigbeeFrame::build(&[0xA7, 0x01]).unwrap();
        let syms = f.symbols();
        // Preamble is eight zero symbols, then SFD = 0xA7 -> low nibble 7 first.
        assert_eq!(&syms[..10], &[0, 0, 0, 0, 0, 0, 0, 0, 0x7, 0xA]);
        assert_eq!(symbols_to_bytes(&syms), f.bytes());
    }

    #[test]
    fn hex_round_trip() {
        let f = ZigbeeFrame::build(&[0xDE, 0xAD, 0xBE, 0xEF]).unwrap();
        let again = ZigbeeFrame::from_payload_hex(&f.payload_hex()).unwrap();
        assert_eq!(f, again);
        assert!(from_hex("0g").is_err());
        assert!(from_hex("abc").is_err());
    }
}
