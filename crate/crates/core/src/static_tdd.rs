//! Static-TDD reference scheme: prefixed slot allocation with single-rate
//! transmission, the baseline the dynamic schemes are measured against.
//!
//! Link 1 owns the first `mu * T` slots of the horizon, link 2 the rest.
//! Because each link is active only in its fraction of the slots, the
//! long-term power budget concentrates into that fraction: the active-slot
//! transmit power is the budget divided by the fraction.

use serde::{Deserialize, Serialize};

use crate::channel::capacity;
use crate::duplex::{LinkId, RateSet, SlotDecision};
use crate::error::{invalid, Result};

/// Static-TDD configuration: slot split and single-rate sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticTddConfig {
    /// Fraction of slots allocated to link 1.
    pub mu: f64,
    pub rates_1: RateSet,
    pub rates_2: RateSet,
}

impl StaticTddConfig {
    pub fn new(mu: f64, rates_1: RateSet, rates_2: RateSet) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid("mu", "must satisfy 0 <= mu <= 1"));
        }
        Ok(Self { mu, rates_1, rates_2 })
    }

    /// Active-slot fraction of the given link.
    pub fn fraction(&self, link: LinkId) -> f64 {
        match link {
            LinkId::U1 => self.mu,
            LinkId::U2 => 1.0 - self.mu,
        }
    }
}

/// Prefixed allocation: U1 transmits while t <= mu * T, then U2.
/// Slots are 1-based; the rate index is always 0 (single-rate scheme).
pub fn decide_static(config: &StaticTddConfig, t: u64, horizon: u64) -> SlotDecision {
    debug_assert!(t >= 1 && t <= horizon);
    let link = if (t as f64) <= config.mu * horizon as f64 {
        LinkId::U1
    } else {
        LinkId::U2
    };
    SlotDecision::Transmit { link, rate_index: 0 }
}

/// Decodability indicator of the static scheme with the power boost
/// P / mu_k applied to the active fraction.
///
/// `gamma_i` is the interference power; pass `None` to reproduce the
/// interference-free textbook form of the indicator, `Some(z)` to evaluate
/// it on the same interference-impaired capacity the dynamic schemes face.
pub fn static_outage_indicator(
    tx_power: f64,
    fraction: f64,
    gamma: f64,
    gamma_i: Option<f64>,
    rate: f64,
) -> u8 {
    debug_assert!(fraction > 0.0 && fraction <= 1.0);
    let boosted = tx_power / fraction;
    let cap = capacity(boosted, gamma, gamma_i.unwrap_or(0.0));
    u8::from(cap >= rate)
}
