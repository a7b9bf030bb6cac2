//! Per-slot state and rate selection when the interference (and hence the
//! true decodability of every rate) is known at the start of the slot.
//!
//! The rule maximizes the weighted throughput mu * R1 + (1 - mu) * R2 over
//! all feasible single-link assignments: each link's candidate is its best
//! decodable weighted rate, the larger candidate wins, and a tie goes to U1.
//! If neither link can decode any rate the slot is left silent.

use serde::{Deserialize, Serialize};

use crate::duplex::{LinkId, OutageFlags, RateSet, SlotDecision};
use crate::error::{invalid, Result};

/// Weight and rate sets for the known-interference scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownIciConfig {
    /// Throughput-region weight, in [0, 1]. U1 carries weight mu.
    pub mu: f64,
    pub rates_1: RateSet,
    pub rates_2: RateSet,
}

impl KnownIciConfig {
    pub fn new(mu: f64, rates_1: RateSet, rates_2: RateSet) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid("mu", "must satisfy 0 <= mu <= 1"));
        }
        Ok(Self { mu, rates_1, rates_2 })
    }
}

/// Best weighted decodable rate of one link: (rate index, weight * rate).
///
/// Flags form a prefix and rates increase strictly, so the argmax is the
/// highest decodable index; equal objective values can only be zeros.
#[inline]
fn best_candidate(weight: f64, rates: &RateSet, flags: &OutageFlags) -> Option<(usize, f64)> {
    flags
        .highest_decodable()
        .map(|idx| (idx, weight * rates.rate(idx)))
}

/// The known-interference selection rule.
///
/// `flags_1` / `flags_2` must be computed from the true slot capacities.
pub fn decide_known(config: &KnownIciConfig, flags_1: &OutageFlags, flags_2: &OutageFlags) -> SlotDecision {
    debug_assert_eq!(flags_1.len(), config.rates_1.len());
    debug_assert_eq!(flags_2.len(), config.rates_2.len());

    let cand_1 = best_candidate(config.mu, &config.rates_1, flags_1);
    let cand_2 = best_candidate(1.0 - config.mu, &config.rates_2, flags_2);

    let lambda_1 = cand_1.map_or(0.0, |(_, v)| v);
    let lambda_2 = cand_2.map_or(0.0, |(_, v)| v);

    if lambda_1 >= lambda_2 && lambda_1 > 0.0 {
        SlotDecision::Transmit {
            link: LinkId::U1,
            rate_index: cand_1.unwrap().0,
        }
    } else if lambda_2 > lambda_1 && lambda_2 > 0.0 {
        SlotDecision::Transmit {
            link: LinkId::U2,
            rate_index: cand_2.unwrap().0,
        }
    } else {
        SlotDecision::Silence
    }
}
