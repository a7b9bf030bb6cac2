//! Experiment specifications: one TOML file describes a named experiment
//! (scheme list, SINR grid, slot count, replicates, channel, interference,
//! rates, power handling), which resolves into a deterministic job list.
//!
//! SINR convention: `sinr_db` is the ratio of the average received signal
//! power to interference-plus-noise power, in dB. A grid value maps to the
//! per-link power figure P = sinr_linear * (1 + K * omega_i) / mean_gain;
//! in `direct` power mode that is the per-transmission power, in the budget
//! modes it is the long-term average budget of each link (the calibrated
//! per-transmission power then concentrates the budget into each link's
//! active fraction).

use serde::{Deserialize, Serialize};

use dtfdd_core::{
    compute_path_loss, stream_id, CorrelationMode, EstimatorParams, InterferenceModel,
    LinkStatistics, PathLossParams, PowerPolicy, RateSet, RegionConfig, RunConfig, Scheme,
    StepSchedule,
};

use crate::error::{CliError, Result};

/// Scheme names accepted in spec files.
pub const SCHEME_NAMES: [&str; 3] = ["dtfdd_known", "dtfdd_unknown", "static_tdd"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub seed: u64,
    pub slots: u64,
    #[serde(default)]
    pub warmup_slots: u64,
    #[serde(default = "default_replicates")]
    pub replicates: u32,
    pub schemes: Vec<String>,
    pub sinr_db: Vec<f64>,
    pub channel: ChannelSpec,
    pub interference: InterferenceSpec,
    pub rates: RatesSpec,
    pub duplex: DuplexSpec,
    #[serde(default)]
    pub power: PowerSpec,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub static_tdd: StaticSpec,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    pub output: OutputSpec,
}

fn default_replicates() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Mean normalized squared fading gain; either given directly or
    /// derived from a path-loss block.
    #[serde(default)]
    pub mean_gain: Option<f64>,
    #[serde(default)]
    pub path_loss: Option<PathLossSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSpec {
    pub carrier_freq_hz: f64,
    pub distance_m: f64,
    pub exponent: f64,
    /// Receiver noise variance used to normalize the mean channel gain.
    pub noise_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferenceSpec {
    pub num_interferers: u32,
    pub per_interferer_mean: f64,
    #[serde(default = "default_mode")]
    pub mode: String,
}

fn default_mode() -> String {
    "independent".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSpec {
    /// Number of discrete rates per link.
    pub count: usize,
    /// Base rate: the lattice is {base, 2*base, ..., count*base}.
    #[serde(default)]
    pub base: Option<f64>,
    /// Alternative rule "total_over_count": base = total / count, which
    /// keeps the top rate fixed while refining the lattice.
    #[serde(default)]
    pub total: Option<f64>,
}

impl RatesSpec {
    pub fn base_rate(&self) -> Result<f64> {
        match (self.base, self.total) {
            (Some(b), None) => Ok(b),
            (None, Some(t)) => Ok(t / self.count as f64),
            _ => Err(CliError::validation(
                "rates: exactly one of `base` or `total` must be set",
            )),
        }
    }

    pub fn rate_set(&self) -> Result<RateSet> {
        RateSet::uniform(self.count, self.base_rate()?).map_err(Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DuplexSpec {
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    /// "direct", "budget", or "budget_pooled".
    pub mode: String,
    #[serde(default = "default_pilot_slots")]
    pub pilot_slots: u64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_pilot_slots() -> u64 {
    200_000
}
fn default_max_rounds() -> u32 {
    10
}
fn default_tolerance() -> f64 {
    0.01
}

impl Default for PowerSpec {
    fn default() -> Self {
        Self {
            mode: "budget_pooled".to_string(),
            pilot_slots: default_pilot_slots(),
            max_rounds: default_max_rounds(),
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub epsilon: f64,
    pub gamma_step: StepSpec,
    pub chi_step: StepSpec,
    #[serde(default)]
    pub trajectory_points: u32,
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            gamma_step: StepSpec { scale: 0.5, exponent: 1.0 },
            chi_step: StepSpec { scale: 0.5, exponent: 1.0 },
            trajectory_points: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub scale: f64,
    pub exponent: f64,
}

impl From<StepSpec> for StepSchedule {
    fn from(s: StepSpec) -> Self {
        StepSchedule::Power { scale: s.scale, exponent: s.exponent }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticSpec {
    pub include_interference: bool,
}

impl Default for StaticSpec {
    fn default() -> Self {
        Self { include_interference: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub scheme: String,
    pub sinr_db: f64,
    pub mu_grid: Vec<f64>,
    #[serde(default)]
    pub rate_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub common_random_numbers: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

/// One fully resolved simulation job.
#[derive(Debug, Clone)]
pub struct ResolvedJob {
    pub scheme: String,
    pub sinr_db: f64,
    pub replicate: u32,
    pub config: RunConfig,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| CliError::validation(format!("spec parse: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(CliError::validation("schemes: list must be non-empty"));
        }
        for s in &self.schemes {
            if !SCHEME_NAMES.contains(&s.as_str()) {
                return Err(CliError::validation(format!(
                    "schemes: unknown scheme `{s}` (expected one of {SCHEME_NAMES:?})"
                )));
            }
        }
        if self.sinr_db.is_empty() {
            return Err(CliError::validation("sinr_db: grid must be non-empty"));
        }
        if self.slots < 1 {
            return Err(CliError::validation("slots: must be >= 1"));
        }
        if self.warmup_slots >= self.slots {
            return Err(CliError::validation("warmup_slots: must be < slots"));
        }
        if self.replicates < 1 {
            return Err(CliError::validation("replicates: must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.duplex.mu) {
            return Err(CliError::validation("duplex.mu: must lie in [0, 1]"));
        }
        self.mean_gain()?;
        self.correlation_mode()?;
        self.rates.rate_set()?;
        match self.power.mode.as_str() {
            "direct" | "budget" | "budget_pooled" => {}
            other => {
                return Err(CliError::validation(format!(
                    "power.mode: unknown mode `{other}`"
                )))
            }
        }
        if let Some(region) = &self.region {
            if !SCHEME_NAMES.contains(&region.scheme.as_str()) {
                return Err(CliError::validation(format!(
                    "region.scheme: unknown scheme `{}`",
                    region.scheme
                )));
            }
            if region.mu_grid.is_empty() {
                return Err(CliError::validation("region.mu_grid: must be non-empty"));
            }
        }
        Ok(())
    }

    pub fn mean_gain(&self) -> Result<f64> {
        match (&self.channel.mean_gain, &self.channel.path_loss) {
            (Some(g), None) => {
                if *g > 0.0 {
                    Ok(*g)
                } else {
                    Err(CliError::validation("channel.mean_gain: must be > 0"))
                }
            }
            (None, Some(pl)) => {
                let params = PathLossParams::new(pl.carrier_freq_hz, pl.distance_m, pl.exponent)?;
                if !(pl.noise_variance > 0.0) {
                    return Err(CliError::validation("channel.path_loss.noise_variance: must be > 0"));
                }
                Ok(compute_path_loss(&params) / pl.noise_variance)
            }
            _ => Err(CliError::validation(
                "channel: exactly one of `mean_gain` or `path_loss` must be set",
            )),
        }
    }

    pub fn correlation_mode(&self) -> Result<CorrelationMode> {
        match self.interference.mode.as_str() {
            "independent" => Ok(CorrelationMode::Independent),
            "identical" => Ok(CorrelationMode::Identical),
            other => Err(CliError::validation(format!(
                "interference.mode: unknown mode `{other}`"
            ))),
        }
    }

    pub fn interference_model(&self) -> Result<InterferenceModel> {
        InterferenceModel::new(
            self.interference.num_interferers,
            self.interference.per_interferer_mean,
            self.correlation_mode()?,
        )
        .map_err(Into::into)
    }

    /// Power figure of one grid point: sinr_linear * (1 + K * omega_i) / mean_gain.
    pub fn power_figure(&self, sinr_db: f64) -> Result<f64> {
        let interference_floor =
            1.0 + self.interference.num_interferers as f64 * self.interference.per_interferer_mean;
        Ok(10f64.powf(sinr_db / 10.0) * interference_floor / self.mean_gain()?)
    }

    fn scheme_for(&self, name: &str) -> Result<Scheme> {
        Ok(match name {
            "dtfdd_known" => Scheme::DtfddKnown,
            "dtfdd_unknown" => Scheme::DtfddUnknown(EstimatorParams {
                epsilon: self.estimator.epsilon,
                gamma_step: self.estimator.gamma_step.into(),
                chi_step: self.estimator.chi_step.into(),
                warm_start: None,
            }),
            "static_tdd" => Scheme::StaticTdd {
                include_interference: self.static_tdd.include_interference,
            },
            other => return Err(CliError::validation(format!("unknown scheme `{other}`"))),
        })
    }

    fn run_config(&self, scheme_name: &str, sinr_db: f64, stream: u64) -> Result<RunConfig> {
        let mean_gain = self.mean_gain()?;
        let figure = self.power_figure(sinr_db)?;
        let (tx_power, power) = match self.power.mode.as_str() {
            "direct" => (figure, PowerPolicy::Direct),
            mode => (
                figure,
                PowerPolicy::Budget {
                    budget_1: figure,
                    budget_2: figure,
                    pilot_slots: self.power.pilot_slots,
                    max_rounds: self.power.max_rounds,
                    tolerance: self.power.tolerance,
                    pooled: mode == "budget_pooled",
                },
            ),
        };
        let rates = self.rates.rate_set()?;
        let scheme = self.scheme_for(scheme_name)?;
        let trajectory_points = match scheme {
            Scheme::DtfddUnknown(_) => self.estimator.trajectory_points,
            _ => 0,
        };
        Ok(RunConfig {
            scheme,
            slots: self.slots,
            warmup_slots: self.warmup_slots,
            link_1: LinkStatistics::new(mean_gain, 1.0, tx_power)?,
            link_2: LinkStatistics::new(mean_gain, 1.0, tx_power)?,
            interference: self.interference_model()?,
            rates_1: rates.clone(),
            rates_2: rates,
            mu: self.duplex.mu,
            power,
            seed: self.seed,
            stream,
            trajectory_points,
        })
    }

    /// The deterministic job list: one job per (scheme, grid point,
    /// replicate), each on its own random stream derived from the
    /// coordinates (never from scheduling order).
    pub fn resolve_jobs(&self) -> Result<Vec<ResolvedJob>> {
        self.validate()?;
        let mut jobs = Vec::new();
        for (si, scheme) in self.schemes.iter().enumerate() {
            for (pi, &sinr) in self.sinr_db.iter().enumerate() {
                for rep in 0..self.replicates {
                    let stream = stream_id(&[si as u64 + 1, pi as u64 + 1, rep as u64 + 1]);
                    jobs.push(ResolvedJob {
                        scheme: scheme.clone(),
                        sinr_db: sinr,
                        replicate: rep,
                        config: self.run_config(scheme, sinr, stream)?,
                    });
                }
            }
        }
        Ok(jobs)
    }

    /// The region sweep described by the `[region]` block.
    pub fn resolve_region(&self) -> Result<RegionConfig> {
        let region = self
            .region
            .as_ref()
            .ok_or_else(|| CliError::validation("region: spec has no [region] block"))?;
        let stream = stream_id(&[u64::from_le_bytes(*b"regionjb")]);
        let base = self.run_config(&region.scheme, region.sinr_db, stream)?;
        Ok(RegionConfig {
            base,
            mu_grid: region.mu_grid.clone(),
            rate_grid: region.rate_grid.clone(),
            common_random_numbers: region.common_random_numbers,
        })
    }
}
