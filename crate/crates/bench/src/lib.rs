//! Benchmark fixtures shared by the criterion targets.

use wbl_core::engine::{GameConfig, Player};

/// Unbiased game with Breaker moving first on the default strict profile.
pub fn unbiased(n: usize, seed: u64) -> GameConfig {
    GameConfig::new(n, 1, Player::Breaker).with_seed(seed)
}
