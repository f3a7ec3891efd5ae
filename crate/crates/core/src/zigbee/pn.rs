//! The 16-entry symbol-to-chip spreading table of the 2.4 GHz O-QPSK PHY.

use std::sync::OnceLock;

/// Chip sequence for data symbol 0, chip c0 first. Symbols 1..=7 are right
/// rotations of this sequence by 4 chips per step; symbols 8..=15 repeat
/// 0..=7 with every odd-indexed chip inverted.
const SYMBOL_0: [u8; 32] = [
    1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 1, 0,
];

/// The symbol-to-chip map: 16 sequences of 32 chips, plus the minimum
/// pairwise Hamming distance computed by exhaustive pairing when the table is
/// first built.
#[derive(Debug)]
pub struct PnTable {
    sequences: [[u8; 32]; 16],
    min_distance: u8,
}

impl PnTable {
    /// The shared standard table. Construction checks the structural
    /// invariants once per process.
    pub fn standard() -> &'static PnTable {
        static TABLE: OnceLock<PnTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let mut sequences = [[0u8; 32]; 16];
            sequences[0] = SYMBOL_0;
            for s in 1..8 {
                // Right-rotate the previous sequence by 4 chips.
                for c in 0..32 {
                    sequences[s][c] = sequences[s - 1][(c + 28) % 32];
                }
            }
            for s in 0..8 {
                for c in 0..32 {
                    sequences[s + 8][c] = if c % 2 == 1 {
                        1 - sequences[s][c]
                    } else {
                        sequences[s][c]
                    };
                }
            }
            let min_distance = min_pairwise_distance(&sequences);
            assert!(
                min_distance > 6,
                "spreading table min distance {min_distance} too small; table corrupt"
            );
            PnTable { sequences, min_distance }
        })
    }

    pub fn sequence(&self, symbol: u8) -> &[u8; 32] {
        &self.sequences[symbol as usize & 0xF]
    }

    pub fn sequences(&self) -> &[[u8; 32]; 16] {
        &self.sequences
    }

    /// Minimum Hamming distance over all pairs of distinct sequences.
    pub fn min_distance(&self) -> u8 {
        self.min_distance
    }
}

fn min_pairwise_distance(sequences: &[[u8; 32]; 16]) -> u8 {
    let mut min = 32u8;
    for a in 0..16 {
        for b in a + 1..16 {
            let d = hamming(&sequences[a], &sequences[b]);
            min = min.min(d);
        }
    }
    min
}

/// Chip-wise Hamming distance between two 32-chip sequences.
pub fn hamming(a: &[u8; 32], b: &[u8; 32]) -> u8 {
    a.iter().zip(b.iter()).filter(|(x, y)| x != y).count() as u8
}
