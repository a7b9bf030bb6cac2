//! The practical scheduler: per-slot selection from local fading knowledge
//! only, with an online recursion that tracks a per-link interference
//! estimate from 1-bit decode feedback.
//!
//! Each slot proceeds in two phases driven by the engine:
//!
//! 1. [`decide_unknown`] forms estimated capacities from the current
//!    interference estimates and picks a state/rate.
//! 2. After the outcome is known, [`update_estimator`] folds the feedback
//!    into the recursion state (gradient accumulator, multiplier, running
//!    error) and steps the interference estimates.
//!
//! The recursion is a stochastic gradient step on the throughput objective
//! with the running decode-error rate constrained to stay below a
//! configured budget `epsilon`; the multiplier `chi_e` prices violations of
//! that budget.

use serde::{Deserialize, Serialize};

use crate::duplex::{flags_for, LinkId, RateSet, SlotDecision};
use crate::error::{invalid, Error, Result};

/// Decaying step-size schedule `scale / t^exponent`.
///
/// Any positive exponent with `scale < 1` satisfies the recursion's
/// requirements (monotonically decaying, value below one at t = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Power { scale: f64, exponent: f64 },
}

impl StepSchedule {
    /// The default `1/(2t)` schedule.
    pub fn inverse_time() -> Self {
        StepSchedule::Power { scale: 0.5, exponent: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let StepSchedule::Power { scale, exponent } = *self;
        if !(scale > 0.0 && scale < 1.0) {
            return Err(invalid("step schedule", "scale must lie in (0, 1)"));
        }
        if !(exponent > 0.0) {
            return Err(invalid("step schedule", "exponent must be > 0"));
        }
        Ok(())
    }

    /// Step size at slot `t` (t >= 1).
    #[inline]
    pub fn value(&self, t: u64) -> f64 {
        let StepSchedule::Power { scale, exponent } = *self;
        let tf = t as f64;
        if exponent == 1.0 {
            scale / tf
        } else if exponent == 0.5 {
            scale / tf.sqrt()
        } else {
            scale / tf.powf(exponent)
        }
    }
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self::inverse_time()
    }
}

/// Configuration of the unknown-interference scheduler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnknownIciConfig {
    /// Throughput-region weight, in [0, 1]. U1 carries weight mu.
    pub mu: f64,
    pub rates_1: RateSet,
    pub rates_2: RateSet,
    /// Budget on the long-run average squared decode-prediction error.
    pub epsilon: f64,
    /// Step schedule for the interference estimates.
    pub gamma_step: StepSchedule,
    /// Step schedule for the constraint multiplier.
    pub chi_step: StepSchedule,
}

impl UnknownIciConfig {
    pub fn new(mu: f64, rates_1: RateSet, rates_2: RateSet) -> Result<Self> {
        let cfg = Self {
            mu,
            rates_1,
            rates_2,
            epsilon: 0.05,
            gamma_step: StepSchedule::default(),
            chi_step: StepSchedule::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    pub fn with_schedules(mut self, gamma_step: StepSchedule, chi_step: StepSchedule) -> Result<Self> {
        self.gamma_step = gamma_step;
        self.chi_step = chi_step;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(invalid("mu", "must satisfy 0 <= mu <= 1"));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid("epsilon", "must be > 0"));
        }
        self.gamma_step.validate()?;
        self.chi_step.validate()?;
        Ok(())
    }
}

/// Recursion state of one link's estimator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkEstimator {
    /// Interference estimate applied in the next slot's capacity estimate.
    pub gamma_i_e: f64,
    /// Running gradient accumulator.
    pub phi: f64,
    /// Constraint multiplier estimate.
    pub chi_e: f64,
    /// Running average of the squared decode-prediction error.
    pub eps_bar: f64,
    /// Estimated capacity of the previous slot, for the crossing test.
    pub prev_capacity_e: f64,
}

/// Full estimator state; all fields start at zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimatorState {
    pub link_1: LinkEstimator,
    pub link_2: LinkEstimator,
    /// Number of completed slots.
    pub slot_count: u64,
}

impl EstimatorState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn link(&self, id: LinkId) -> &LinkEstimator {
        match id {
            LinkId::U1 => &self.link_1,
            LinkId::U2 => &self.link_2,
        }
    }

    /// The pair of current interference estimates.
    pub fn interference_estimates(&self) -> (f64, f64) {
        (self.link_1.gamma_i_e, self.link_2.gamma_i_e)
    }
}

/// 1-bit decode feedback for a transmit slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotFeedback {
    /// True iff the receiver decoded the codeword (capacity reached the rate).
    pub decoded: bool,
}

/// Estimated capacity: same form as the true capacity, with the
/// interference estimate in place of the unknown interference power.
#[inline]
pub fn estimated_capacity(tx_power: f64, gamma: f64, gamma_i_e: f64) -> f64 {
    (1.0 + tx_power * gamma / (1.0 + gamma_i_e)).log2()
}

/// State/rate selection from local gains and the current estimates.
///
/// `slot` is the engine's 1-based slot clock; it must be the slot following
/// the last one folded into `state`, otherwise the recursion has
/// desynchronized and an error is returned.
///
/// The winner is the link with the larger weighted estimated capacity (ties
/// to U1). A winner with no estimated-decodable rate has nothing meaningful
/// to send; the slot falls back to the other link if that one has a
/// decodable rate, and is silent otherwise.
pub fn decide_unknown(
    config: &UnknownIciConfig,
    state: &EstimatorState,
    slot: u64,
    gamma_1: f64,
    gamma_2: f64,
    tx_power_1: f64,
    tx_power_2: f64,
) -> Result<SlotDecision> {
    if slot != state.slot_count + 1 {
        return Err(Error::EstimatorDesync {
            engine: slot,
            expected: state.slot_count + 1,
        });
    }

    let c1e = estimated_capacity(tx_power_1, gamma_1, state.link_1.gamma_i_e);
    let c2e = estimated_capacity(tx_power_2, gamma_2, state.link_2.gamma_i_e);
    let best_1 = flags_for(c1e, &config.rates_1).highest_decodable();
    let best_2 = flags_for(c2e, &config.rates_2).highest_decodable();

    let lambda_1 = config.mu * c1e;
    let lambda_2 = (1.0 - config.mu) * c2e;

    let winner = if lambda_1 >= lambda_2 && lambda_1 > 0.0 {
        Some(LinkId::U1)
    } else if lambda_2 > lambda_1 && lambda_2 > 0.0 {
        Some(LinkId::U2)
    } else {
        None
    };

    let decision = match winner {
        None => SlotDecision::Silence,
        Some(link) => {
            let (own, other) = match link {
                LinkId::U1 => (best_1, best_2),
                LinkId::U2 => (best_2, best_1),
            };
            match (own, other) {
                (Some(idx), _) => SlotDecision::Transmit { link, rate_index: idx },
                (None, Some(idx)) => SlotDecision::Transmit {
                    link: link.other(),
                    rate_index: idx,
                },
                (None, None) => SlotDecision::Silence,
            }
        }
    };
    Ok(decision)
}

/// Natural log of 2; the gradient's capacity derivative carries it.
const LN_2: f64 = std::f64::consts::LN_2;

/// Folds one completed slot into the recursion and steps the estimates.
///
/// Must be called exactly once per slot, after the decode outcome of that
/// slot's transmission (if any) is known. The active link's running error
/// and gradient get a new term; the idle link's running averages decay with
/// the same 1/t weighting; both links then step their multiplier and
/// interference estimate. Estimates are clamped at zero from below.
#[allow(clippy::too_many_arguments)]
pub fn update_estimator(
    config: &UnknownIciConfig,
    state: &mut EstimatorState,
    slot: u64,
    decision: SlotDecision,
    feedback: Option<SlotFeedback>,
    gamma_1: f64,
    gamma_2: f64,
    tx_power_1: f64,
    tx_power_2: f64,
) -> Result<()> {
    if slot != state.slot_count + 1 {
        return Err(Error::EstimatorDesync {
            engine: slot,
            expected: state.slot_count + 1,
        });
    }
    match (decision, feedback.is_some()) {
        (SlotDecision::Silence, true) => {
            return Err(Error::FeedbackContract("feedback present on a silent slot"))
        }
        (SlotDecision::Transmit { .. }, false) => {
            return Err(Error::FeedbackContract("feedback missing on a transmit slot"))
        }
        _ => {}
    }

    let t = slot as f64;
    let decay = (t - 1.0) / t;

    // Estimated capacities of this slot, with the pre-update estimates —
    // identical to what decide_unknown saw.
    let c1e = estimated_capacity(tx_power_1, gamma_1, state.link_1.gamma_i_e);
    let c2e = estimated_capacity(tx_power_2, gamma_2, state.link_2.gamma_i_e);

    let new_term = |link: &mut LinkEstimator,
                        active_rate: Option<f64>,
                        weight: f64,
                        gamma: f64,
                        tx_power: f64,
                        cap_e: f64| {
        match (active_rate, feedback) {
            (Some(rate), Some(fb)) => {
                let observed = if fb.decoded { 1.0 } else { 0.0 };
                let predicted = if cap_e >= rate { 1.0 } else { 0.0 };
                let err = observed - predicted;
                link.eps_bar = decay * link.eps_bar + err * err / t;

                // Crossing indicator: the selected rate lies between the
                // previous and current estimated capacities.
                let crossed = (rate - link.prev_capacity_e) * (rate - cap_e) <= 0.0;
                if crossed {
                    let numer = tx_power
                        * gamma
                        * (2.0 * link.chi_e * (predicted - observed) - weight * rate);
                    let denom = LN_2
                        * (1.0 + link.gamma_i_e + tx_power * gamma)
                        * (1.0 + link.gamma_i_e);
                    link.phi = decay * link.phi - numer / (denom * t);
                } else {
                    link.phi = decay * link.phi;
                }
            }
            _ => {
                // Idle link or silent slot: the additive terms vanish, the
                // running averages still decay.
                link.eps_bar = decay * link.eps_bar;
                link.phi = decay * link.phi;
            }
        }
    };

    let (rate_1, rate_2) = match decision {
        SlotDecision::Transmit { link: LinkId::U1, rate_index } => {
            (Some(config.rates_1.rate(rate_index)), None)
        }
        SlotDecision::Transmit { link: LinkId::U2, rate_index } => {
            (None, Some(config.rates_2.rate(rate_index)))
        }
        SlotDecision::Silence => (None, None),
    };

    new_term(&mut state.link_1, rate_1, config.mu, gamma_1, tx_power_1, c1e);
    new_term(&mut state.link_2, rate_2, 1.0 - config.mu, gamma_2, tx_power_2, c2e);

    let gamma_step = config.gamma_step.value(slot);
    let chi_step = config.chi_step.value(slot);
    for (link, cap_e) in [(&mut state.link_1, c1e), (&mut state.link_2, c2e)] {
        link.chi_e += chi_step * (link.eps_bar - config.epsilon).max(0.0);
        link.gamma_i_e = (link.gamma_i_e - gamma_step * link.phi).max(0.0);
        link.prev_capacity_e = cap_e;
    }
    state.slot_count = slot;
    Ok(())
}
