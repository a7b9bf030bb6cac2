//! Slot-driven Monte Carlo engine: draws realizations, queries the
//! configured scheduler, scores outcomes against the true capacities,
//! accumulates metrics, calibrates transmit powers to long-term budgets,
//! and sweeps the weight mu to trace throughput regions.
//!
//! A run is sequential in the slot index (the estimator is a recursion);
//! independent runs share no mutable state and may execute concurrently.

use serde::{Deserialize, Serialize};

use crate::channel::{capacity, InterferenceModel, LinkStatistics, SlotRealization};
use crate::duplex::{flags_for, LinkId, RateSet, SlotDecision};
use crate::error::{invalid, Result};
use crate::known::{decide_known, KnownIciConfig};
use crate::rng::{stream_id, RandomSource};
use crate::static_tdd::{decide_static, StaticTddConfig};
use crate::unknown::{
    decide_unknown, update_estimator, EstimatorState, SlotFeedback, StepSchedule, UnknownIciConfig,
};

/// Estimator knobs of the unknown-interference scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub epsilon: f64,
    pub gamma_step: StepSchedule,
    pub chi_step: StepSchedule,
    /// Resume from a previously converged state instead of zeros.
    #[serde(default)]
    pub warm_start: Option<EstimatorState>,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            gamma_step: StepSchedule::default(),
            chi_step: StepSchedule::default(),
            warm_start: None,
        }
    }
}

/// Which scheduler drives the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Scheme {
    DtfddKnown,
    DtfddUnknown(EstimatorParams),
    StaticTdd {
        /// Evaluate static-TDD outage on the interference-impaired capacity
        /// (the fair comparison); false reproduces the interference-free
        /// textbook indicator.
        include_interference: bool,
    },
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::DtfddKnown => "dtfdd_known",
            Scheme::DtfddUnknown(_) => "dtfdd_unknown",
            Scheme::StaticTdd { .. } => "static_tdd",
        }
    }
}

/// How per-transmission powers are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PowerPolicy {
    /// Use the powers in the link statistics as-is.
    Direct,
    /// Fixed-point calibration against long-term average-power budgets:
    /// pilot-run, measure each link's active-slot fraction f, set
    /// P = budget / f, repeat until f moves less than `tolerance`.
    ///
    /// With `pooled` set, the two budgets form one pool and both links get
    /// the same per-transmission power, pool / (f1 + f2). That is the
    /// natural reading when one node (the BS) transmits on both links and
    /// keeps the powers equal; per-link budgets can otherwise skew the
    /// powers sharply when a tie-break concentrates activity on one link.
    Budget {
        budget_1: f64,
        budget_2: f64,
        pilot_slots: u64,
        max_rounds: u32,
        tolerance: f64,
        #[serde(default)]
        pooled: bool,
    },
}

impl PowerPolicy {
    pub fn budget(budget_1: f64, budget_2: f64) -> Self {
        PowerPolicy::Budget {
            budget_1,
            budget_2,
            pilot_slots: 200_000,
            max_rounds: 10,
            tolerance: 0.01,
            pooled: false,
        }
    }

    pub fn budget_pooled(budget_1: f64, budget_2: f64) -> Self {
        match Self::budget(budget_1, budget_2) {
            PowerPolicy::Budget {
                budget_1,
                budget_2,
                pilot_slots,
                max_rounds,
                tolerance,
                ..
            } => PowerPolicy::Budget {
                budget_1,
                budget_2,
                pilot_slots,
                max_rounds,
                tolerance,
                pooled: true,
            },
            PowerPolicy::Direct => unreachable!(),
        }
    }
}

/// Full description of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    /// Number of simulated slots.
    pub slots: u64,
    /// Slots excluded from the reported tallies (the recursion still runs
    /// through them); zero measures the whole run.
    #[serde(default)]
    pub warmup_slots: u64,
    pub link_1: LinkStatistics,
    pub link_2: LinkStatistics,
    pub interference: InterferenceModel,
    pub rates_1: RateSet,
    pub rates_2: RateSet,
    /// Throughput-region weight carried by link 1.
    pub mu: f64,
    pub power: PowerPolicy,
    pub seed: u64,
    /// Substream of the seed; distinct jobs use distinct streams.
    #[serde(default)]
    pub stream: u64,
    /// Number of estimator-trajectory checkpoints to record (unknown runs).
    #[serde(default)]
    pub trajectory_points: u32,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slots < 1 {
            return Err(invalid("slots", "must be >= 1"));
        }
        if self.warmup_slots >= self.slots {
            return Err(invalid("warmup_slots", "must be < slots"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(invalid("mu", "must satisfy 0 <= mu <= 1"));
        }
        self.link_1.validate()?;
        self.link_2.validate()?;
        self.interference.validate()?;
        if let Scheme::StaticTdd { .. } = self.scheme {
            if self.rates_1.len() != 1 || self.rates_2.len() != 1 {
                return Err(invalid("rates", "static TDD is a single-rate scheme"));
            }
        }
        if let Scheme::DtfddUnknown(p) = &self.scheme {
            if !(p.epsilon > 0.0) {
                return Err(invalid("epsilon", "must be > 0"));
            }
            p.gamma_step.validate()?;
            p.chi_step.validate()?;
        }
        if let PowerPolicy::Budget {
            budget_1,
            budget_2,
            pilot_slots,
            max_rounds,
            tolerance,
            ..
        } = self.power
        {
            if !(budget_1 > 0.0 && budget_2 > 0.0) {
                return Err(invalid("budget", "budgets must be > 0"));
            }
            if pilot_slots < 1 || max_rounds < 1 || !(tolerance > 0.0) {
                return Err(invalid("power", "pilot_slots, max_rounds, tolerance must be positive"));
            }
        }
        Ok(())
    }
}

/// One recorded point of the interference-estimate trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub slot: u64,
    pub gamma_i1_e: f64,
    pub gamma_i2_e: f64,
}

/// Estimator outcome of an unknown-interference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub final_state: EstimatorState,
    pub trajectory: Vec<TrajectorySample>,
}

/// Power-calibration outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub tx_power_1: f64,
    pub tx_power_2: f64,
    pub rounds: u32,
    pub converged: bool,
    pub active_fraction_1: f64,
    pub active_fraction_2: f64,
}

/// Accumulated tallies of one run, measured after the warm-up window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub slots_measured: u64,
    /// Average throughput per slot of each link, bits/symbol.
    pub throughput_1: f64,
    pub throughput_2: f64,
    /// Fraction of measured slots in outage (transmit-and-fail or double
    /// silence).
    pub outage_rate: f64,
    pub outage_slots: u64,
    pub tx_fail_slots: u64,
    pub silent_slots: u64,
    pub tx_slots_1: u64,
    pub tx_slots_2: u64,
    pub active_fraction_1: f64,
    pub active_fraction_2: f64,
    /// Per-transmission powers actually used.
    pub tx_power_1: f64,
    pub tx_power_2: f64,
    /// Long-term average powers: active fraction times per-transmission power.
    pub realized_power_1: f64,
    pub realized_power_2: f64,
    pub estimator: Option<EstimatorReport>,
    pub calibration: Option<CalibrationReport>,
    pub seed: u64,
    pub stream: u64,
}

enum Scheduler {
    Known(KnownIciConfig),
    Unknown {
        config: UnknownIciConfig,
        state: EstimatorState,
    },
    Static(StaticTddConfig),
}

/// Runs one seeded simulation and returns its metrics.
pub fn run(config: &RunConfig) -> Result<RunMetrics> {
    config.validate()?;
    let (p1, p2, calibration) = match config.power {
        PowerPolicy::Direct => (config.link_1.tx_power, config.link_2.tx_power, None),
        PowerPolicy::Budget { .. } => {
            let report = calibrate_power(config)?;
            (report.tx_power_1, report.tx_power_2, Some(report))
        }
    };
    let mut metrics = simulate(config, p1, p2, config.stream, config.slots, config.warmup_slots)?;
    metrics.calibration = calibration;
    Ok(metrics)
}

/// Fixed-point power calibration against the long-term budgets.
///
/// Pilot rounds reuse one random stream, so the measured activity is a
/// deterministic function of the candidate powers and the fixed point is
/// reproducible. Returns the calibrated per-transmission powers; a link
/// whose activity vanishes (degenerate mu) keeps its raw budget.
pub fn calibrate_power(config: &RunConfig) -> Result<CalibrationReport> {
    let PowerPolicy::Budget {
        budget_1,
        budget_2,
        pilot_slots,
        max_rounds,
        tolerance,
        pooled,
    } = config.power
    else {
        return Err(invalid("power", "calibrate_power requires a budget policy"));
    };
    config.validate()?;

    const MIN_FRACTION: f64 = 1e-6;
    let pilot_stream = stream_id(&[config.stream, u64::from_le_bytes(*b"calpilot")]);

    let mut p1 = budget_1;
    let mut p2 = budget_2;
    let mut prev: Option<(f64, f64)> = None;
    let mut rounds = 0;
    let mut converged = false;
    let mut fractions = (0.0, 0.0);

    for round in 0..max_rounds {
        rounds = round + 1;
        let pilot = simulate(config, p1, p2, pilot_stream, pilot_slots, 0)?;
        let f1 = pilot.active_fraction_1;
        let f2 = pilot.active_fraction_2;
        fractions = (f1, f2);

        if pooled {
            let total = f1 + f2;
            let p = if total > MIN_FRACTION {
                (budget_1 + budget_2) / total
            } else {
                budget_1 + budget_2
            };
            p1 = p;
            p2 = p;
        } else {
            p1 = if f1 > MIN_FRACTION { budget_1 / f1 } else { budget_1 };
            p2 = if f2 > MIN_FRACTION { budget_2 / f2 } else { budget_2 };
        }

        if let Some((pf1, pf2)) = prev {
            let d1 = if pf1 > 0.0 { (f1 - pf1).abs() / pf1 } else { (f1 - pf1).abs() };
            let d2 = if pf2 > 0.0 { (f2 - pf2).abs() / pf2 } else { (f2 - pf2).abs() };
            if d1 < tolerance && d2 < tolerance {
                converged = true;
                break;
            }
        }
        prev = Some((f1, f2));
    }

    Ok(CalibrationReport {
        tx_power_1: p1,
        tx_power_2: p2,
        rounds,
        converged,
        active_fraction_1: fractions.0,
        active_fraction_2: fractions.1,
    })
}

fn simulate(
    config: &RunConfig,
    p1: f64,
    p2: f64,
    stream: u64,
    slots: u64,
    warmup: u64,
) -> Result<RunMetrics> {
    let link_1 = config.link_1.with_tx_power(p1);
    let link_2 = config.link_2.with_tx_power(p2);
    let mut rng = RandomSource::with_stream(config.seed, stream);

    let mut scheduler = match &config.scheme {
        Scheme::DtfddKnown => Scheduler::Known(KnownIciConfig::new(
            config.mu,
            config.rates_1.clone(),
            config.rates_2.clone(),
        )?),
        Scheme::DtfddUnknown(params) => {
            let ucfg = UnknownIciConfig::new(config.mu, config.rates_1.clone(), config.rates_2.clone())?
                .with_epsilon(params.epsilon)?
                .with_schedules(params.gamma_step, params.chi_step)?;
            Scheduler::Unknown {
                config: ucfg,
                state: params.warm_start.unwrap_or_default(),
            }
        }
        Scheme::StaticTdd { .. } => Scheduler::Static(StaticTddConfig::new(
            config.mu,
            config.rates_1.clone(),
            config.rates_2.clone(),
        )?),
    };
    let static_no_interference = matches!(
        config.scheme,
        Scheme::StaticTdd { include_interference: false }
    );

    let mut rate_sum_1 = 0.0;
    let mut rate_sum_2 = 0.0;
    let mut outage_slots = 0u64;
    let mut tx_fail_slots = 0u64;
    let mut silent_slots = 0u64;
    let mut tx_slots_1 = 0u64;
    let mut tx_slots_2 = 0u64;

    let traj_stride = if config.trajectory_points > 0 {
        (slots / config.trajectory_points as u64).max(1)
    } else {
        0
    };
    let mut trajectory = Vec::new();

    // The estimator state offset: a warm start continues an earlier clock.
    let clock_base = match &scheduler {
        Scheduler::Unknown { state, .. } => state.slot_count,
        _ => 0,
    };

    for t in 1..=slots {
        let real = SlotRealization::sample(&link_1, &link_2, &config.interference, &mut rng);
        let decision = match &mut scheduler {
            Scheduler::Known(cfg) => {
                let f1 = flags_for(real.capacity_1, &cfg.rates_1);
                let f2 = flags_for(real.capacity_2, &cfg.rates_2);
                decide_known(cfg, &f1, &f2)
            }
            Scheduler::Unknown { config: ucfg, state } => decide_unknown(
                ucfg,
                state,
                clock_base + t,
                real.gamma_1,
                real.gamma_2,
                p1,
                p2,
            )?,
            Scheduler::Static(cfg) => decide_static(cfg, t, slots),
        };

        let measuring = t > warmup;
        let mut feedback = None;
        match decision {
            SlotDecision::Silence => {
                if measuring {
                    silent_slots += 1;
                    outage_slots += 1;
                }
            }
            SlotDecision::Transmit { link, rate_index } => {
                let (true_cap, rate) = match link {
                    LinkId::U1 => {
                        let cap = if static_no_interference {
                            capacity(p1, real.gamma_1, 0.0)
                        } else {
                            real.capacity_1
                        };
                        (cap, config.rates_1.rate(rate_index))
                    }
                    LinkId::U2 => {
                        let cap = if static_no_interference {
                            capacity(p2, real.gamma_2, 0.0)
                        } else {
                            real.capacity_2
                        };
                        (cap, config.rates_2.rate(rate_index))
                    }
                };
                let decoded = true_cap >= rate;
                feedback = Some(SlotFeedback { decoded });
                match link {
                    LinkId::U1 => tx_slots_1 += u64::from(measuring),
                    LinkId::U2 => tx_slots_2 += u64::from(measuring),
                }
                if measuring {
                    if decoded {
                        match link {
                            LinkId::U1 => rate_sum_1 += rate,
                            LinkId::U2 => rate_sum_2 += rate,
                        }
                    } else {
                        tx_fail_slots += 1;
                        outage_slots += 1;
                    }
                }
            }
        }

        if let Scheduler::Unknown { config: ucfg, state } = &mut scheduler {
            update_estimator(
                ucfg,
                state,
                clock_base + t,
                decision,
                feedback,
                real.gamma_1,
                real.gamma_2,
                p1,
                p2,
            )?;
            if traj_stride > 0 && (t % traj_stride == 0 || t == slots) {
                trajectory.push(TrajectorySample {
                    slot: clock_base + t,
                    gamma_i1_e: state.link_1.gamma_i_e,
                    gamma_i2_e: state.link_2.gamma_i_e,
                });
            }
        }
    }

    let measured = slots - warmup;
    let estimator = match scheduler {
        Scheduler::Unknown { state, .. } => Some(EstimatorReport {
            final_state: state,
            trajectory,
        }),
        _ => None,
    };
    let f1 = tx_slots_1 as f64 / measured as f64;
    let f2 = tx_slots_2 as f64 / measured as f64;

    Ok(RunMetrics {
        slots_measured: measured,
        throughput_1: rate_sum_1 / measured as f64,
        throughput_2: rate_sum_2 / measured as f64,
        outage_rate: outage_slots as f64 / measured as f64,
        outage_slots,
        tx_fail_slots,
        silent_slots,
        tx_slots_1,
        tx_slots_2,
        active_fraction_1: f1,
        active_fraction_2: f2,
        tx_power_1: p1,
        tx_power_2: p2,
        realized_power_1: f1 * p1,
        realized_power_2: f2 * p2,
        estimator,
        calibration: None,
        seed: config.seed,
        stream,
    })
}

/// One point of a swept throughput region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub mu: f64,
    /// Single rate the point was run at (the grid optimum when a rate grid
    /// is supplied).
    pub rate: f64,
    pub throughput_1: f64,
    pub throughput_2: f64,
    pub metrics: RunMetrics,
}

/// Region-sweep description: a base run re-executed across a mu grid,
/// optionally optimizing a single transmission rate per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub base: RunConfig,
    pub mu_grid: Vec<f64>,
    /// Candidate single rates; each point keeps the candidate maximizing
    /// mu * T1 + (1 - mu) * T2. None runs the base rate sets unchanged.
    pub rate_grid: Option<Vec<f64>>,
    /// Reuse one random stream across all points (common random numbers)
    /// instead of a fresh stream per point.
    pub common_random_numbers: bool,
}

/// Sweeps mu (and optionally the rate) and returns one point per mu.
pub fn sweep_region(region: &RegionConfig) -> Result<Vec<RegionPoint>> {
    if region.mu_grid.is_empty() {
        return Err(invalid("mu_grid", "must be non-empty"));
    }
    for &mu in &region.mu_grid {
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid("mu_grid", "entries must lie in [0, 1]"));
        }
    }
    if let Some(grid) = &region.rate_grid {
        if grid.is_empty() {
            return Err(invalid("rate_grid", "must be non-empty when present"));
        }
    }

    let mut points = Vec::with_capacity(region.mu_grid.len());
    for (i, &mu) in region.mu_grid.iter().enumerate() {
        let candidates: Vec<Option<f64>> = match &region.rate_grid {
            Some(grid) => grid.iter().map(|&r| Some(r)).collect(),
            None => vec![None],
        };
        let mut best: Option<(f64, RegionPoint)> = None;
        for (j, cand) in candidates.iter().enumerate() {
            let mut cfg = region.base.clone();
            cfg.mu = mu;
            if let Some(rate) = cand {
                cfg.rates_1 = RateSet::uniform(1, *rate)?;
                cfg.rates_2 = RateSet::uniform(1, *rate)?;
            }
            cfg.stream = if region.common_random_numbers {
                region.base.stream
            } else {
                stream_id(&[region.base.stream, i as u64 + 1, j as u64 + 1])
            };
            let metrics = run(&cfg)?;
            let objective = mu * metrics.throughput_1 + (1.0 - mu) * metrics.throughput_2;
            let point = RegionPoint {
                mu,
                rate: cand.unwrap_or_else(|| region.base.rates_1.rate(0)),
                throughput_1: metrics.throughput_1,
                throughput_2: metrics.throughput_2,
                metrics,
            };
            if best.as_ref().map_or(true, |(obj, _)| objective > *obj) {
                best = Some((objective, point));
            }
        }
        points.push(best.unwrap().1);
    }
    Ok(points)
}
