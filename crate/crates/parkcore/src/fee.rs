use serde::{Deserialize, Serialize};

use crate::ParkError;

/// Tiered parking tariff in whole minutes and minor currency units.
///
/// Stays up to `grace_min` are free, stays up to `base_min` cost
/// `base_price`, and every started `block_min` block after that adds
/// `block_price`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateSchedule {
    pub grace_min: u64,
    pub base_min: u64,
    pub base_price: i64,
    pub block_min: u64,
    pub block_price: i64,
}

impl Default for RateSchedule {
    fn default() -> Self {
        Self {
            grace_min: 10,
            base_min: 60,
            base_price: 2000,
            block_min: 30,
            block_price: 1000,
        }
    }
}

impl RateSchedule {
    pub fn validate(&self) -> Result<(), ParkError> {
        let problem = if self.base_min <= self.grace_min {
            "base_min must exceed grace_min"
        } else if self.block_min == 0 {
            "block_min must be at least 1"
        } else if self.base_price < 0 || self.block_price < 0 {
            "prices must not be negative"
        } else {
            return Ok(());
        };
        Err(ParkError::InvalidSchedule(problem.into()))
    }
}

/// Fee for a stay of `duration_min` whole minutes.
pub fn compute_fee(duration_min: u64, s: &RateSchedule) -> i64 {
    if duration_min <= s.grace_min {
        0
    } else if duration_min <= s.base_min {
        s.base_price
    } else {
        let blocks = (duration_min - s.base_min).div_ceil(s.block_min);
        s.base_price + blocks as i64 * s.block_price
    }
}

/// Whole minutes between two timestamps in seconds, rounded up.
pub fn duration_minutes(entry_ts: i64, exit_ts: i64) -> u64 {
    ((exit_ts - entry_ts).max(0) as u64).div_ceil(60)
}
