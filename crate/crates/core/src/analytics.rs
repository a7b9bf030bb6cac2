//! Closed-form evaluators used as oracles against Monte Carlo: the Erlang
//! interference distribution and the high-SNR asymptotic outage
//! probabilities of the two dynamic schemes (both fall as P^-2, i.e. carry a
//! diversity gain of two).

use serde::{Deserialize, Serialize};

use crate::channel::{CorrelationMode, InterferenceModel};
use crate::error::{invalid, Result};

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Partial exponential sum e_n(x) = sum_{i=0..n} x^i / i!.
fn exp_partial_sum(x: f64, n: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..=n {
        term *= x / i as f64;
        sum += term;
    }
    sum
}

/// Erlang(K, omega) density: z^(K-1) e^(-z/omega) / (omega^K (K-1)!).
pub fn erlang_pdf(z: f64, k: u32, omega: f64) -> f64 {
    assert!(k >= 1 && omega > 0.0 && z >= 0.0);
    let x = z / omega;
    x.powi(k as i32 - 1) * (-x).exp() / (omega * factorial(k - 1))
}

/// Erlang(K, omega) distribution function:
/// 1 - e^(-z/omega) * sum_{n=0..K-1} (z/omega)^n / n!.
pub fn erlang_cdf(z: f64, k: u32, omega: f64) -> f64 {
    assert!(k >= 1 && omega > 0.0 && z >= 0.0);
    let x = z / omega;
    1.0 - (-x).exp() * exp_partial_sum(x, k - 1)
}

/// Cross moment E{(1 + gamma_i1)(1 + gamma_i2)} of the interference pair,
/// from the closed Erlang moments of the configured correlation mode.
pub fn omega_hat_i(model: &InterferenceModel) -> f64 {
    let k = model.num_interferers as f64;
    let oi = model.per_interferer_mean;
    match model.correlation_mode {
        // Independent margins: E{1+Z}^2.
        CorrelationMode::Independent => {
            let m = 1.0 + k * oi;
            m * m
        }
        // One common draw: E{(1+Z)^2} = 1 + 2 K oi + K (K+1) oi^2.
        CorrelationMode::Identical => 1.0 + 2.0 * k * oi + k * (k + 1.0) * oi * oi,
    }
}

/// Same cross moment estimated from sampled interference pairs, for
/// dependence structures with no closed form.
pub fn omega_hat_i_from_samples<I>(samples: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut sum = 0.0;
    let mut n = 0u64;
    for (z1, z2) in samples {
        sum += (1.0 + z1) * (1.0 + z2);
        n += 1;
    }
    assert!(n > 0, "omega_hat_i_from_samples needs at least one sample");
    sum / n as f64
}

/// Inputs of the asymptotic outage formulas.
///
/// `mean_gain` is the raw mean of the normalized squared fading gain (the
/// same first-order statistic on both links); `gamma_i1` / `gamma_i2` are
/// the converged interference-estimate constants and enter the
/// unknown-interference formula only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticInputs {
    /// Single transmission rate R0, bits/symbol.
    pub rate: f64,
    /// Per-transmission power P (both links).
    pub tx_power: f64,
    /// Mean normalized squared fading gain.
    pub mean_gain: f64,
    pub interference: InterferenceModel,
    /// Converged interference estimate of link 1.
    pub gamma_i1: f64,
    /// Converged interference estimate of link 2.
    pub gamma_i2: f64,
}

impl AsymptoticInputs {
    pub fn new(
        rate: f64,
        tx_power: f64,
        mean_gain: f64,
        interference: InterferenceModel,
        gamma_i1: f64,
        gamma_i2: f64,
    ) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(invalid("rate", "must be > 0"));
        }
        if !(tx_power > 0.0) {
            return Err(invalid("tx_power", "must be > 0"));
        }
        if !(mean_gain > 0.0) {
            return Err(invalid("mean_gain", "must be > 0"));
        }
        if gamma_i1 < 0.0 || gamma_i2 < 0.0 {
            return Err(invalid("gamma_i", "estimates must be >= 0"));
        }
        interference.validate()?;
        Ok(Self {
            rate,
            tx_power,
            mean_gain,
            interference,
            gamma_i1,
            gamma_i2,
        })
    }

    /// Outage threshold gamma_th = (2^R0 - 1) / P.
    pub fn gamma_th(&self) -> f64 {
        (self.rate.exp2() - 1.0) / self.tx_power
    }
}

/// Asymptotic outage of the known-interference scheme:
/// gamma_th^2 * E{(1+gamma_i1)(1+gamma_i2)} / mean_gain^2.
///
/// Valid for the symmetric single-rate setup (mu = 1/2, M = L = 1, equal
/// powers and rates); the cross moment follows the configured correlation
/// mode's closed form.
pub fn outage_known_ici_asymptotic(inputs: &AsymptoticInputs) -> f64 {
    outage_known_ici_asymptotic_with(inputs, omega_hat_i(&inputs.interference))
}

/// Known-interference asymptotic with an externally estimated cross moment
/// (for dependence structures outside the two closed-form modes).
pub fn outage_known_ici_asymptotic_with(inputs: &AsymptoticInputs, omega_hat: f64) -> f64 {
    let gth = inputs.gamma_th();
    gth * gth * omega_hat / (inputs.mean_gain * inputs.mean_gain)
}

/// The three additive components of the unknown-interference asymptotic:
/// (link-1 transmit-and-fail, link-2 transmit-and-fail, double silence).
///
/// The transmit-and-fail weights evaluate the exact high-SNR limits of the
/// scheme's event integrals,
///   omega_i * (1+g_other)/(1+g_self)
///     * sum_{n=0..K-1} e^-x [ e_n(x) + omega_i (n+1) e_{n+1}(x) ],
/// with x = g_self / omega_i and e_n the partial exponential sum; the
/// silence weight is (1 + g1)(1 + g2).
pub fn unknown_outage_components(inputs: &AsymptoticInputs) -> (f64, f64, f64) {
    let k = inputs.interference.num_interferers;
    let oi = inputs.interference.per_interferer_mean;
    let (g1, g2) = (inputs.gamma_i1, inputs.gamma_i2);

    let comm = |g_self: f64, g_other: f64| -> f64 {
        if oi == 0.0 {
            // No interference: a transmission the scheduler selects never
            // fails, the communication events vanish.
            return 0.0;
        }
        let x = g_self / oi;
        let e = (-x).exp();
        let mut sum = 0.0;
        for n in 0..k {
            sum += e * (exp_partial_sum(x, n) + oi * (n + 1) as f64 * exp_partial_sum(x, n + 1));
        }
        oi * (1.0 + g_other) / (1.0 + g_self) * sum
    };

    let silence = (1.0 + g1) * (1.0 + g2);
    (comm(g1, g2), comm(g2, g1), silence)
}

/// Asymptotic outage of the unknown-interference scheme at converged
/// estimates: gamma_th^2 / mean_gain^2 * (sum of the three event weights).
pub fn outage_unknown_ici_asymptotic(inputs: &AsymptoticInputs) -> f64 {
    let (c1, c2, s) = unknown_outage_components(inputs);
    let gth = inputs.gamma_th();
    gth * gth * (c1 + c2 + s) / (inputs.mean_gain * inputs.mean_gain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(k: u32, oi: f64, mode: CorrelationMode) -> InterferenceModel {
        InterferenceModel::new(k, oi, mode).unwrap()
    }

    #[test]
    fn erlang_cdf_special_cases() {
        // K = 1 is exponential.
        for &z in &[0.1, 0.5, 2.0] {
            let c = erlang_cdf(z, 1, 1.0);
            assert!((c - (1.0 - (-z).exp())).abs() < 1e-15);
        }
        assert_eq!(erlang_cdf(0.0, 4, 0.7), 0.0);
    }

    #[test]
    fn erlang_cdf_frozen_value() {
        // Quadrature of the density over [0, 2] (independent oracle).
        let c = erlang_cdf(2.0, 3, 0.5);
        assert!((c - 0.7618966944464557).abs() < 1e-12, "cdf {c}");
    }

    #[test]
    fn known_asymptotic_example() {
        // R0 = 1, P = 100, mean gain 1, K = 1, oi = 0.5, independent:
        // gamma_th = 0.01, omega_hat = 2.25, outage = 2.25e-4.
        let inputs = AsymptoticInputs::new(
            1.0,
            100.0,
            1.0,
            model(1, 0.5, CorrelationMode::Independent),
            0.0,
            0.0,
        )
        .unwrap();
        assert!((inputs.gamma_th() - 0.01).abs() < 1e-15);
        let out = outage_known_ici_asymptotic(&inputs);
        assert!((out - 2.25e-4).abs() < 1e-18, "outage {out}");
    }

    #[test]
    fn known_asymptotic_no_interference() {
        let inputs = AsymptoticInputs::new(
            2.0,
            50.0,
            0.7,
            model(3, 0.0, CorrelationMode::Independent),
            0.0,
            0.0,
        )
        .unwrap();
        let gth = inputs.gamma_th();
        let out = outage_known_ici_asymptotic(&inputs);
        assert!((out - gth * gth / (0.7 * 0.7)).abs() < 1e-18);
    }

    #[test]
    fn both_formulas_scale_as_inverse_power_squared() {
        let m = model(2, 0.5, CorrelationMode::Independent);
        let a = AsymptoticInputs::new(1.0, 100.0, 1.0, m, 1.0, 1.5).unwrap();
        let b = AsymptoticInputs::new(1.0, 200.0, 1.0, m, 1.0, 1.5).unwrap();
        let r_known = outage_known_ici_asymptotic(&a) / outage_known_ici_asymptotic(&b);
        let r_unknown = outage_unknown_ici_asymptotic(&a) / outage_unknown_ici_asymptotic(&b);
        assert_eq!(r_known, 4.0);
        assert_eq!(r_unknown, 4.0);
    }

    #[test]
    fn omega_hat_modes() {
        let indep = omega_hat_i(&model(4, 0.5, CorrelationMode::Independent));
        assert!((indep - 9.0).abs() < 1e-15);
        let ident = omega_hat_i(&model(4, 0.5, CorrelationMode::Identical));
        assert!((ident - 10.0).abs() < 1e-15);
    }

    #[test]
    fn omega_hat_from_samples_matches_closed_form() {
        let s = [(1.0, 2.0), (0.5, 0.5), (3.0, 0.0)];
        let v = omega_hat_i_from_samples(s);
        let expect = (2.0 * 3.0 + 1.5 * 1.5 + 4.0 * 1.0) / 3.0;
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn unknown_components_silence_term() {
        let inputs = AsymptoticInputs::new(
            1.0,
            100.0,
            1.0,
            model(2, 0.5, CorrelationMode::Independent),
            1.0,
            2.0,
        )
        .unwrap();
        let (_, _, silence) = unknown_outage_components(&inputs);
        assert_eq!(silence, 6.0);
    }

    #[test]
    fn unknown_asymptotic_frozen_value() {
        // K = 2, oi = 0.5, g1 = g2 = 1, R0 = 1, P = 100: frozen against an
        // independent evaluation of the event integrals.
        let inputs = AsymptoticInputs::new(
            1.0,
            100.0,
            1.0,
            model(2, 0.5, CorrelationMode::Independent),
            1.0,
            1.0,
        )
        .unwrap();
        let out = outage_unknown_ici_asymptotic(&inputs);
        assert!(
            ((out - 5.421020473984434e-4) / out).abs() < 1e-12,
            "outage {out:e}"
        );
    }

    #[test]
    fn unknown_total_dominates_silence_term() {
        for &(g1, g2) in &[(0.0, 0.0), (1.0, 2.0), (5.0, 5.0)] {
            let inputs = AsymptoticInputs::new(
                1.0,
                100.0,
                1.0,
                model(3, 0.8, CorrelationMode::Independent),
                g1,
                g2,
            )
            .unwrap();
            let (c1, c2, s) = unknown_outage_components(&inputs);
            assert!(c1 >= 0.0 && c2 >= 0.0 && s >= 1.0);
            let total = outage_unknown_ici_asymptotic(&inputs);
            let silence_only = inputs.gamma_th().powi(2) * s / 1.0;
            assert!(total >= silence_only);
        }
    }

    #[test]
    fn unknown_zero_interference_reduces_to_silence() {
        let inputs = AsymptoticInputs::new(
            1.0,
            100.0,
            1.0,
            model(2, 0.0, CorrelationMode::Independent),
            0.0,
            0.0,
        )
        .unwrap();
        let (c1, c2, s) = unknown_outage_components(&inputs);
        assert_eq!((c1, c2), (0.0, 0.0));
        assert_eq!(s, 1.0);
        let out = outage_unknown_ici_asymptotic(&inputs);
        let gth = inputs.gamma_th();
        assert!((out - gth * gth).abs() < 1e-18);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let m = model(1, 1.0, CorrelationMode::Independent);
        assert!(AsymptoticInputs::new(0.0, 1.0, 1.0, m, 0.0, 0.0).is_err());
        assert!(AsymptoticInputs::new(1.0, 0.0, 1.0, m, 0.0, 0.0).is_err());
        assert!(AsymptoticInputs::new(1.0, 1.0, 1.0, m, -0.1, 0.0).is_err());
        let bad = InterferenceModel {
            num_interferers: 0,
            per_interferer_mean: 1.0,
            correlation_mode: CorrelationMode::Independent,
        };
        assert!(AsymptoticInputs::new(1.0, 1.0, 1.0, bad, 0.0, 0.0).is_err());
    }
}
