//! Retry timing and rate limiting. Both are driven by caller-supplied time
//! so they can run against a virtual clock.

use core::time::Duration;

use serde::{Deserialize, Serialize};

use crate::digest::FieldHasher;

/// Exponential backoff with deterministic jitter.
///
/// The wait before attempt `n` (n ≥ 2) is `base * factor^(n-2)` stretched by
/// up to `jitter_permille / 1000` of itself. The jitter fraction is drawn
/// from a hash of `(jitter_seed, request key, n)`, so a replay of the same
/// run waits exactly as long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base: Duration,
    pub factor: u32,
    pub jitter_permille: u16,
    pub jitter_seed: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base: Duration::from_secs(1),
            factor: 2,
            jitter_permille: 500,
            jitter_seed: 0,
        }
    }
}

impl RetryPolicy {
    pub fn without_jitter(self) -> Self {
        Self {
            jitter_permille: 0,
            ..self
        }
    }

    /// Delay before `attempt` without jitter. Attempt 1 never waits.
    pub fn nominal_delay(&self, attempt: u32) -> Duration {
        if attempt <= 1 {
            return Duration::ZERO;
        }
        let mult = self.factor.checked_pow(attempt - 2).unwrap_or(u32::MAX);
        self.base.saturating_mul(mult)
    }

    /// Fraction of the maximum jitter applied, as a 64-bit fixed-point value.
    fn jitter_draw(&self, key: &str, attempt: u32) -> u64 {
        let mut h = FieldHasher::new("mcqa/retry-jitter/v1");
        h.bytes(&self.jitter_seed.to_le_bytes())
            .bytes(key.as_bytes())
            .u32(attempt);
        h.finish_u64()
    }

    /// Delay before `attempt` for the request identified by `key`.
    pub fn delay(&self, attempt: u32, key: &str) -> Duration {
        let nominal = self.nominal_delay(attempt);
        if self.jitter_permille == 0 || nominal.is_zero() {
            return nominal;
        }
        let draw = self.jitter_draw(key, attempt) as u128;
        let max_extra = nominal.as_nanos() * self.jitter_permille as u128 / 1000;
        let extra = (max_extra * draw) >> 64;
        nominal.saturating_add(Duration::from_nanos(extra.min(u64::MAX as u128) as u64))
    }

    pub fn allows(&self, attempt: u32) -> bool {
        attempt <= self.max_attempts
    }
}

/// Sustained rate plus burst allowance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateLimit {
    /// Back-to-back calls allowed from idle.
    pub burst: u32,
    /// Spacing between calls at the sustained rate.
    pub period: Duration,
}

impl RateLimit {
    /// `per_second` sustained calls per second.
    pub fn per_second(per_second: u32, burst: u32) -> Self {
        Self {
            burst: burst.max(1),
            period: Duration::from_secs(1) / per_second.max(1),
        }
    }

    /// Most calls admitted in any closed window of length `window`.
    pub fn budget(&self, window: Duration) -> u64 {
        let periods = if self.period.is_zero() {
            u64::MAX
        } else {
            (window.as_nanos() / self.period.as_nanos()) as u64
        };
        periods.saturating_add(self.burst as u64)
    }
}

/// Token bucket in its generic-cell-rate form: a single "theoretical arrival
/// time" instead of a fractional token count, so all arithmetic is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenBucket {
    limit: RateLimit,
    tat: Duration,
}

impl TokenBucket {
    pub fn new(limit: RateLimit) -> Self {
        Self {
            limit,
            tat: Duration::ZERO,
        }
    }

    pub fn limit(&self) -> RateLimit {
        self.limit
    }

    fn tolerance(&self) -> Duration {
        self.limit
            .period
            .saturating_mul(self.limit.burst.saturating_sub(1))
    }

    /// Takes a token at `now`, or returns how long to wait before retrying.
    pub fn try_acquire(&mut self, now: Duration) -> Result<(), Duration> {
        let tat = self.tat.max(now);
        let ahead = tat - now;
        let tolerance = self.tolerance();
        if ahead > tolerance {
            return Err(ahead - tolerance);
        }
        self.tat = tat + self.limit.period;
        Ok(())
    }
}
