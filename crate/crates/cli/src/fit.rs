//! Diversity-order estimation: least-squares slope of log10(outage) against
//! log10(power) over the qualifying high-SNR tail of a measured curve.

use crate::error::{CliError, Result};
use crate::output::AggregateRow;

/// Which points enter the fit.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// A point needs at least this many observed outage events.
    pub min_events: f64,
    /// Points above this outage level are saturated and excluded.
    pub max_outage: f64,
    /// Minimum number of qualifying points per scheme.
    pub min_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            min_events: 100.0,
            max_outage: 0.25,
            min_points: 3,
        }
    }
}

/// Fitted slope of one scheme's curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSlope {
    pub scheme: String,
    /// d log10(outage) / d log10(power); the diversity gain is its negative.
    pub slope: f64,
    pub points_used: usize,
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    cov / var
}

/// Per-scheme diversity slope over the qualifying tail.
///
/// Points qualify when their outage estimate rests on at least
/// `min_events` events and sits below the saturation cutoff; the power
/// axis is each point's realized per-transmission power.
pub fn diversity_fit(rows: &[AggregateRow], opts: &FitOptions) -> Result<Vec<SchemeSlope>> {
    let mut schemes: Vec<String> = Vec::new();
    for r in rows {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme.clone());
        }
    }
    if schemes.is_empty() {
        return Err(CliError::runtime("fit: no rows"));
    }

    let mut out = Vec::new();
    for scheme in schemes {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.scheme == scheme)
            .filter(|r| {
                let events = r.outage_rate * r.slots as f64;
                r.outage_rate > 0.0 && r.outage_rate <= opts.max_outage && events >= opts.min_events
            })
            .map(|r| (r.tx_power_1.log10(), r.outage_rate.log10()))
            .collect();
        if pts.len() < opts.min_points {
            return Err(CliError::runtime(format!(
                "fit: scheme `{scheme}` has only {} qualifying points (need {})",
                pts.len(),
                opts.min_points
            )));
        }
        out.push(SchemeSlope {
            scheme,
            slope: least_squares_slope(&pts),
            points_used: pts.len(),
        });
    }
    Ok(out)
}

/// SINR (dB) at which a monotone outage curve crosses `level`, by
/// log-linear interpolation between the bracketing grid points.
pub fn sinr_at_outage_level(points: &[(f64, f64)], level: f64) -> Option<f64> {
    let mut sorted: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair in sorted.windows(2) {
        let (s0, o0) = pair[0];
        let (s1, o1) = pair[1];
        if (o0 >= level && o1 <= level) || (o0 <= level && o1 >= level) {
            if o0 == o1 {
                return Some(s0);
            }
            let t = (o0 / level).log10() / (o0 / o1).log10();
            return Some(s0 + t * (s1 - s0));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheme: &str, sinr_db: f64, power: f64, outage: f64, slots: u64) -> AggregateRow {
        AggregateRow {
            scheme: scheme.to_string(),
            sinr_db,
            outage_rate: outage,
            ci_halfwidth: 0.0,
            slots,
            replicates: 1,
            throughput_1: 0.0,
            throughput_2: 0.0,
            tx_power_1: power,
            tx_power_2: power,
        }
    }

    #[test]
    fn exact_power_laws() {
        let mut rows = Vec::new();
        for &p in &[10.0, 20.0, 40.0, 80.0] {
            rows.push(row("two", 0.0, p, 1.0 / (p * p), 1_000_000_000));
            rows.push(row("one", 0.0, p, 0.5 / p, 1_000_000_000));
        }
        let fits = diversity_fit(&rows, &FitOptions::default()).unwrap();
        let two = fits.iter().find(|f| f.scheme == "two").unwrap();
        let one = fits.iter().find(|f| f.scheme == "one").unwrap();
        assert!((two.slope + 2.0).abs() < 1e-9, "{}", two.slope);
        assert!((one.slope + 1.0).abs() < 1e-9, "{}", one.slope);
    }

    #[test]
    fn insufficient_points_is_an_error() {
        let rows = vec![
            row("x", 0.0, 10.0, 1e-3, 10_000_000),
            row("x", 2.0, 20.0, 1e-4, 10_000_000),
        ];
        assert!(diversity_fit(&rows, &FitOptions::default()).is_err());
    }

    #[test]
    fn qualifying_filter_drops_sparse_and_saturated_points() {
        let mut rows = Vec::new();
        for &p in &[10.0, 20.0, 40.0, 80.0] {
            rows.push(row("s", 0.0, p, 4.0 / (p * p), 1_000_000_000));
        }
        rows.push(row("s", 0.0, 1.0, 0.9, 1_000_000_000)); // saturated
        rows.push(row("s", 0.0, 160.0, 4.0 / (160.0 * 160.0), 100)); // too few events
        let fits = diversity_fit(&rows, &FitOptions::default()).unwrap();
        assert_eq!(fits[0].points_used, 4);
        assert!((fits[0].slope + 2.0).abs() < 1e-9);
    }

    #[test]
    fn crossing_interpolation() {
        let pts = vec![(0.0, 1e-1), (10.0, 1e-3)];
        // Log-linear: 1e-2 sits halfway in dB.
        let s = sinr_at_outage_level(&pts, 1e-2).unwrap();
        assert!((s - 5.0).abs() < 1e-12);
        assert!(sinr_at_outage_level(&pts, 1e-5).is_none());
    }
}
