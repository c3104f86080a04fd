//! Shared fixtures for the benchmarks.

use mpsbeam_core::{generate_statistical_channel, ChannelGenConfig, PolarizedChannel, PsiStats};

/// PSI of the reference LoS deployment (dB: 5.48, -6.26, 5.90).
pub fn reference_psi() -> PsiStats {
    PsiStats::from_db(5.48, -6.26, 5.90).expect("finite dB values")
}

pub fn reference_channel(n_subcarriers: usize, seed: u64) -> PolarizedChannel {
    generate_statistical_channel(&ChannelGenConfig::new(reference_psi(), n_subcarriers, seed))
        .expect("valid generator config")
}
