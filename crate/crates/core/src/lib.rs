//! Complex-baseband laboratory for cross-technology interference on
//! IEEE 802.15.4 (ZigBee) receptions.
//!
//! The crate synthesizes collisions between a ZigBee victim frame and
//! WiFi 802.11b, WiFi 802.11g, Bluetooth, or ZigBee interferers, demodulates
//! the corrupted reception, and runs the three analysis models on it:
//! per-symbol corruption *detection* (with sync-error vs interference cause
//! separation), interference-source *differentiation*, and retransmission
//! *filtration*. A Monte-Carlo harness sweeps scenes over SIR/SNR grids and
//! emits plot-ready metrics and annotated packet reports.

pub mod channel;
pub mod error;
pub mod interferers;
pub mod models;
pub mod signal;
pub mod zigbee;

pub use error::{Error, Result};
