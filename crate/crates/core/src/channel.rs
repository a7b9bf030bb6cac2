//! Per-slot channel realizations: Rayleigh fading, Erlang-distributed
//! inter-cell interference, link capacities, and the path-loss model used to
//! derive mean channel gains.
//!
//! Fading is block fading: constant within a slot, independent across slots.
//! Interference is generated statistically (each marginal is the sum of K
//! i.i.d. exponential interferer contributions) rather than by simulating
//! explicit neighbour cells.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::RandomSource;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// First- and second-order statistics of one BS-user link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStatistics {
    /// Mean of the normalized squared fading gain, E{|h|^2} / sigma^2.
    pub mean_gain: f64,
    /// Receiver noise variance sigma^2, watts.
    pub noise_variance: f64,
    /// Transmit power used on this link, watts.
    pub tx_power: f64,
}

impl LinkStatistics {
    pub fn new(mean_gain: f64, noise_variance: f64, tx_power: f64) -> Result<Self> {
        let s = Self {
            mean_gain,
            noise_variance,
            tx_power,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_gain > 0.0) {
            return Err(invalid("mean_gain", "must be > 0"));
        }
        if !(self.noise_variance > 0.0) {
            return Err(invalid("noise_variance", "must be > 0"));
        }
        if !(self.tx_power >= 0.0) {
            return Err(invalid("tx_power", "must be >= 0"));
        }
        Ok(())
    }

    /// Same statistics with a different transmit power.
    pub fn with_tx_power(mut self, tx_power: f64) -> Self {
        self.tx_power = tx_power;
        self
    }
}

/// Dependence structure between the two links' interference powers.
///
/// The two modes bracket the (unspecified) physical copula: `Independent`
/// draws the margins separately, `Identical` applies one draw to both links,
/// which is also the exact model for subnetworks whose two receivers coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    Independent,
    Identical,
}

/// Statistical model of the aggregate inter-cell interference power.
///
/// Each marginal is Erlang(K, omega_i): the sum of `num_interferers`
/// independent exponential contributions with mean `per_interferer_mean`
/// (interferer transmit powers are absorbed into the per-interferer mean).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceModel {
    pub num_interferers: u32,
    pub per_interferer_mean: f64,
    pub correlation_mode: CorrelationMode,
}

impl InterferenceModel {
    pub fn new(num_interferers: u32, per_interferer_mean: f64, mode: CorrelationMode) -> Result<Self> {
        let m = Self {
            num_interferers,
            per_interferer_mean,
            correlation_mode: mode,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_interferers < 1 {
            return Err(invalid("num_interferers", "must be >= 1"));
        }
        if !(self.per_interferer_mean >= 0.0) {
            return Err(invalid("per_interferer_mean", "must be >= 0"));
        }
        Ok(())
    }

    /// Mean aggregate interference power K * omega_i.
    pub fn mean_power(&self) -> f64 {
        self.num_interferers as f64 * self.per_interferer_mean
    }

    fn draw_marginal(&self, rng: &mut RandomSource) -> f64 {
        let mut sum = 0.0;
        for _ in 0..self.num_interferers {
            sum += rng.exponential(self.per_interferer_mean);
        }
        sum
    }
}

/// One slot's fading gains, interference powers, and derived capacities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRealization {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_i1: f64,
    pub gamma_i2: f64,
    /// Capacity of the BS-U1 link, bits/symbol, with interference treated as noise.
    pub capacity_1: f64,
    /// Capacity of the BS-U2 link, bits/symbol, with interference treated as noise.
    pub capacity_2: f64,
}

impl SlotRealization {
    /// Draws one slot. Consumes a fixed number of RNG values regardless of
    /// the values drawn, so trajectories are reproducible slot for slot.
    pub fn sample(
        link_1: &LinkStatistics,
        link_2: &LinkStatistics,
        interference: &InterferenceModel,
        rng: &mut RandomSource,
    ) -> Self {
        let gamma_1 = sample_fading(link_1, rng);
        let gamma_2 = sample_fading(link_2, rng);
        let (gamma_i1, gamma_i2) = sample_interference(interference, rng);
        Self {
            gamma_1,
            gamma_2,
            gamma_i1,
            gamma_i2,
            capacity_1: capacity(link_1.tx_power, gamma_1, gamma_i1),
            capacity_2: capacity(link_2.tx_power, gamma_2, gamma_i2),
        }
    }
}

/// One draw of the normalized squared fading gain: exponential with mean
/// `stats.mean_gain` (Rayleigh envelope).
#[inline]
pub fn sample_fading(stats: &LinkStatistics, rng: &mut RandomSource) -> f64 {
    rng.exponential(stats.mean_gain)
}

/// One draw of the pair of interference powers.
///
/// `Independent` mode draws the two margins independently; `Identical` mode
/// returns the same draw for both links.
#[inline]
pub fn sample_interference(model: &InterferenceModel, rng: &mut RandomSource) -> (f64, f64) {
    let z1 = model.draw_marginal(rng);
    match model.correlation_mode {
        CorrelationMode::Independent => (z1, model.draw_marginal(rng)),
        CorrelationMode::Identical => (z1, z1),
    }
}

/// Shannon capacity with interference treated as noise:
/// log2(1 + P * gamma / (1 + gamma_i)), bits/symbol.
#[inline]
pub fn capacity(tx_power: f64, gamma: f64, gamma_i: f64) -> f64 {
    (1.0 + tx_power * gamma / (1.0 + gamma_i)).log2()
}

/// Carrier frequency, distance, and exponent of the standard path-loss model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Carrier frequency, hertz.
    pub carrier_freq: f64,
    /// Transmitter-receiver distance, meters.
    pub distance: f64,
    /// Path-loss exponent.
    pub exponent: f64,
}

impl PathLossParams {
    pub fn new(carrier_freq: f64, distance: f64, exponent: f64) -> Result<Self> {
        let p = Self {
            carrier_freq,
            distance,
            exponent,
        };
        if !(p.carrier_freq > 0.0) {
            return Err(invalid("carrier_freq", "must be > 0"));
        }
        if !(p.distance > 0.0) {
            return Err(invalid("distance", "must be > 0"));
        }
        if !(p.exponent >= 0.0) {
            return Err(invalid("exponent", "must be >= 0"));
        }
        Ok(p)
    }
}

/// Mean channel gain E{|h|^2} = (c / (4 pi f_c))^2 * d^(-beta).
pub fn compute_path_loss(params: &PathLossParams) -> f64 {
    let wavelength_term = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * params.carrier_freq);
    wavelength_term * wavelength_term * params.distance.powf(-params.exponent)
}
