//! Link-level simulator and analytics for dynamic time-frequency-division
//! duplex (D-TFDD) scheduling between a base station and two users sharing
//! one frequency band.
//!
//! The crate provides:
//!
//! - a block-fading channel model with Erlang-distributed inter-cell
//!   interference ([`channel`]),
//! - the per-slot selection rule with full interference knowledge
//!   ([`known`]) and the practical local-CSI scheduler with an online
//!   interference estimator driven by 1-bit decode feedback ([`unknown`]),
//! - the static-TDD reference scheme ([`static_tdd`]),
//! - closed-form asymptotic outage evaluators used as oracles against
//!   Monte Carlo ([`analytics`]),
//! - a seeded, reproducible slot-by-slot Monte Carlo engine with power
//!   calibration and throughput-region sweeps ([`engine`]).
//!
//! Runs are deterministic: one seed plus one stream id fix every draw, and
//! independent jobs use independent ChaCha streams.

pub mod analytics;
pub mod channel;
pub mod duplex;
pub mod engine;
pub mod error;
pub mod known;
pub mod rng;
pub mod static_tdd;
pub mod unknown;

pub use analytics::{
    erlang_cdf, erlang_pdf, omega_hat_i, omega_hat_i_from_samples, outage_known_ici_asymptotic,
    outage_known_ici_asymptotic_with, outage_unknown_ici_asymptotic, unknown_outage_components,
    AsymptoticInputs,
};
pub use channel::{
    capacity, compute_path_loss, sample_fading, sample_interference, CorrelationMode,
    InterferenceModel, LinkStatistics, PathLossParams, SlotRealization,
};
pub use duplex::{flags_for, outage_indicator, LinkId, OutageFlags, RateSet, SlotDecision};
pub use engine::{
    calibrate_power, run, sweep_region, CalibrationReport, EstimatorParams, EstimatorReport,
    PowerPolicy, RegionConfig, RegionPoint, RunConfig, RunMetrics, Scheme, TrajectorySample,
};
pub use error::{Error, Result};
pub use known::{decide_known, KnownIciConfig};
pub use rng::{stream_id, RandomSource};
pub use static_tdd::{decide_static, static_outage_indicator, StaticTddConfig};
pub use unknown::{
    decide_unknown, estimated_capacity, update_estimator, EstimatorState, LinkEstimator,
    SlotFeedback, StepSchedule, UnknownIciConfig,
};
