//! Job execution: fans resolved jobs out over a worker pool and merges
//! results in job order (never completion order).

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::output::RunRow;
use crate::spec::{ExperimentSpec, ResolvedJob};

/// Environment variable fixing the worker count; unset uses all cores.
pub const WORKERS_ENV: &str = "DTFDD_WORKERS";

fn with_pool<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v.parse().map_err(|_| {
                CliError::validation(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))
            })?;
            if n == 0 {
                return Err(CliError::validation(format!("{WORKERS_ENV} must be >= 1")));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::runtime(e.to_string()))?;
            pool.install(f)
        }
        Err(_) => f(),
    }
}

/// Runs every job of the experiment; rows come back in job order.
pub fn run_jobs(jobs: Vec<ResolvedJob>, progress: bool) -> Result<Vec<RunRow>> {
    let total = jobs.len();
    let done = AtomicUsize::new(0);
    with_pool(move || {
        let results: Vec<Result<RunRow>> = jobs
            .par_iter()
            .map(|job| {
                let metrics = dtfdd_core::run(&job.config)?;
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                if progress {
                    eprintln!("[{n}/{total}] {} @ {} dB rep {}", job.scheme, job.sinr_db, job.replicate);
                }
                Ok(RunRow {
                    scheme: job.scheme.clone(),
                    sinr_db: job.sinr_db,
                    replicate: job.replicate,
                    metrics,
                })
            })
            .collect();
        results.into_iter().collect()
    })
}

/// Resolves and runs a whole experiment spec.
pub fn run_experiment(spec: &ExperimentSpec, progress: bool) -> Result<Vec<RunRow>> {
    run_jobs(spec.resolve_jobs()?, progress)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ExperimentSpec;

    const SPEC: &str = r#"
name = "runner-smoke"
seed = 3
slots = 2000
replicates = 2
schemes = ["dtfdd_known"]
sinr_db = [5.0, 10.0]

[channel]
mean_gain = 1.0

[interference]
num_interferers = 1
per_interferer_mean = 0.5

[rates]
count = 1
base = 1.0

[duplex]
mu = 0.5

[power]
mode = "direct"

[output]
dir = "unused"
"#;

    #[test]
    fn rows_are_ordered_and_reproducible() {
        let spec = ExperimentSpec::from_toml(SPEC).unwrap();
        let a = run_experiment(&spec, false).unwrap();
        let b = run_experiment(&spec, false).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.scheme, y.scheme);
            assert_eq!(x.sinr_db, y.sinr_db);
            assert_eq!(x.replicate, y.replicate);
            assert_eq!(x.metrics, y.metrics);
        }
        // Job order: grid-major then replicate.
        assert_eq!((a[0].sinr_db, a[0].replicate), (5.0, 0));
        assert_eq!((a[1].sinr_db, a[1].replicate), (5.0, 1));
        assert_eq!((a[2].sinr_db, a[2].replicate), (10.0, 0));
    }
}
