//! Shared duplexing vocabulary: discrete rate sets, per-slot decisions, and
//! decodability flags.
//!
//! The half-duplex constraint (at most one link active per slot) is encoded
//! in the [`SlotDecision`] type itself: a decision is one link with one rate,
//! or silence.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Hard cap on rate-set length; flags are stored as a 64-bit prefix mask.
pub const MAX_RATES: usize = 64;

/// Ordered set of discrete transmission rates for one link, bits/symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    rates: Vec<f64>,
}

impl RateSet {
    /// Builds a rate set; rates must be strictly increasing and positive.
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(invalid("rates", "must contain at least one rate"));
        }
        if rates.len() > MAX_RATES {
            return Err(invalid("rates", format!("at most {MAX_RATES} rates supported")));
        }
        if !rates[0].is_finite() || rates[0] <= 0.0 {
            return Err(invalid("rates", "rates must be positive and finite"));
        }
        for w in rates.windows(2) {
            if !(w[1].is_finite() && w[1] > w[0]) {
                return Err(invalid("rates", "rates must be strictly increasing"));
            }
        }
        Ok(Self { rates })
    }

    /// The uniform lattice {base, 2*base, ..., count*base} used throughout
    /// the numerical experiments.
    pub fn uniform(count: usize, base: f64) -> Result<Self> {
        if count == 0 {
            return Err(invalid("rates", "count must be >= 1"));
        }
        Self::new((1..=count).map(|k| k as f64 * base).collect())
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn rate(&self, index: usize) -> f64 {
        self.rates[index]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn max_rate(&self) -> f64 {
        *self.rates.last().unwrap()
    }

    /// Every rate scaled by a positive factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rates.iter().map(|r| r * factor).collect())
    }
}

/// Which of the two links a decision refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkId {
    U1,
    U2,
}

impl LinkId {
    pub fn other(self) -> Self {
        match self {
            LinkId::U1 => LinkId::U2,
            LinkId::U2 => LinkId::U1,
        }
    }
}

/// Per-slot scheduling outcome. Exactly one state per slot by construction.
///
/// `rate_index` is a zero-based index into the active link's [`RateSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotDecision {
    Silence,
    Transmit { link: LinkId, rate_index: usize },
}

impl SlotDecision {
    pub fn is_silence(&self) -> bool {
        matches!(self, SlotDecision::Silence)
    }

    pub fn active_link(&self) -> Option<LinkId> {
        match self {
            SlotDecision::Silence => None,
            SlotDecision::Transmit { link, .. } => Some(*link),
        }
    }
}

/// Decodability flags for every rate of one link in one slot, stored as a
/// bit mask over rate indices.
///
/// Because rates are strictly increasing and the indicator compares one
/// capacity against each rate, the set bits always form a prefix: if the
/// m-th rate is decodable, so is every smaller one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutageFlags {
    mask: u64,
    len: usize,
}

impl OutageFlags {
    /// Flag for rate index `i`: true means decodable (capacity >= rate).
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.mask >> i) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the largest decodable rate, if any.
    #[inline]
    pub fn highest_decodable(&self) -> Option<usize> {
        if self.mask == 0 {
            None
        } else {
            Some(63 - self.mask.leading_zeros() as usize)
        }
    }

    pub fn all_clear(&self) -> bool {
        self.mask == 0
    }
}

/// Decodability indicator for a single rate: 1 iff capacity >= rate
/// (the boundary is inclusive by convention).
#[inline]
pub fn outage_indicator(capacity: f64, rate: f64) -> u8 {
    debug_assert!(rate > 0.0);
    u8::from(capacity >= rate)
}

/// Element-wise decodability flags for a whole rate set.
#[inline]
pub fn flags_for(capacity: f64, rates: &RateSet) -> OutageFlags {
    // Rates are strictly increasing, so the decodable set is the prefix of
    // rates <= capacity.
    let count = rates.rates.partition_point(|&r| capacity >= r);
    let mask = if count == 0 { 0 } else { u64::MAX >> (64 - count) };
    OutageFlags {
        mask,
        len: rates.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_set_validation() {
        assert!(RateSet::new(vec![]).is_err());
        assert!(RateSet::new(vec![1.0, 1.0]).is_err());
        assert!(RateSet::new(vec![2.0, 1.0]).is_err());
        assert!(RateSet::new(vec![-1.0]).is_err());
        assert!(RateSet::new(vec![0.5, 1.5, 2.0]).is_ok());
        let u = RateSet::uniform(3, 0.5).unwrap();
        assert_eq!(u.rates(), &[0.5, 1.0, 1.5]);
    }

    #[test]
    fn indicator_boundary_inclusive() {
        assert_eq!(outage_indicator(1.0, 1.0), 1);
        assert_eq!(outage_indicator(0.999, 1.0), 0);
        assert_eq!(outage_indicator(2.5, 1.0), 1);
    }

    #[test]
    fn flags_match_examples() {
        let rates = RateSet::new(vec![1.0, 2.0, 3.0]).unwrap();

        let f = flags_for(1.5, &rates);
        assert!(f.get(0) && !f.get(1) && !f.get(2));
        assert_eq!(f.highest_decodable(), Some(0));

        let f = flags_for(0.0, &rates);
        assert!(f.all_clear());
        assert_eq!(f.highest_decodable(), None);

        let f = flags_for(10.0, &rates);
        assert!(f.get(0) && f.get(1) && f.get(2));
        assert_eq!(f.highest_decodable(), Some(2));
    }

    #[test]
    fn flags_agree_with_elementwise_indicator() {
        let rates = RateSet::new(vec![0.25, 0.5, 1.0, 2.0, 4.0]).unwrap();
        for &c in &[0.0, 0.25, 0.3, 0.5, 1.0, 1.9, 2.0, 5.0] {
            let f = flags_for(c, &rates);
            for i in 0..rates.len() {
                assert_eq!(u8::from(f.get(i)), outage_indicator(c, rates.rate(i)));
            }
        }
    }
}
