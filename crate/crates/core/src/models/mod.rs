//! The three interference models: per-symbol corruption detection with
//! sync-error/interference cause separation, interference-source
//! differentiation, and retransmission filtration.

mod features;

pub use features::{
    extract_features, extract_features_multi, hist_distance, quarter_pi_deviation, FeatureVector,
    PERIODICITY_LAGS, PHASE_HIST_BINS,
};
