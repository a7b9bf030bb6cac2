//! Distributional checks of the sampled channel against the closed forms.

mod common;

use common::{composite_simpson, ks_distance};
use dtfdd_core::{
    capacity, erlang_cdf, erlang_pdf, sample_interference, CorrelationMode, InterferenceModel,
    RandomSource,
};

#[test]
fn interference_marginal_matches_erlang_cdf() {
    let k = 3;
    let oi = 0.7;
    let model = InterferenceModel::new(k, oi, CorrelationMode::Independent).unwrap();
    let mut rng = RandomSource::new(2024);
    let n = 1_000_000;
    let mut samples: Vec<f64> = (0..n).map(|_| sample_interference(&model, &mut rng).0).collect();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = ks_distance(&samples, |z| erlang_cdf(z, k, oi));
    assert!(d < 0.005, "KS distance {d}");
}

#[test]
fn erlang_cdf_is_antiderivative_of_pdf() {
    // Spot check on a modest grid; the full high-precision sweep over
    // K = 1..6 runs in the acceptance suite.
    for k in [1u32, 2, 5] {
        let oi = 0.5;
        let zmax = 20.0 * k as f64 * oi;
        for step in 1..=8 {
            let z = zmax * step as f64 / 8.0;
            let quad = composite_simpson(&|x| erlang_pdf(x, k, oi), 0.0, z, 64, 1e-12);
            let closed = erlang_cdf(z, k, oi);
            assert!((quad - closed).abs() < 1e-9, "K={k} z={z}: {quad} vs {closed}");
        }
    }
}

#[test]
fn interference_cross_moments() {
    let n = 1_000_000;
    let k = 2;
    let oi = 0.5;

    let mut rng = RandomSource::new(7);
    let indep = InterferenceModel::new(k, oi, CorrelationMode::Independent).unwrap();
    let mut sum = 0.0;
    for _ in 0..n {
        let (z1, z2) = sample_interference(&indep, &mut rng);
        sum += (1.0 + z1) * (1.0 + z2);
    }
    let est = sum / n as f64;
    let expect = (1.0 + k as f64 * oi) * (1.0 + k as f64 * oi);
    assert!((est / expect - 1.0).abs() < 0.01, "independent: {est} vs {expect}");

    let ident = InterferenceModel::new(k, oi, CorrelationMode::Identical).unwrap();
    let mut sum = 0.0;
    for _ in 0..n {
        let (z1, z2) = sample_interference(&ident, &mut rng);
        sum += (1.0 + z1) * (1.0 + z2);
    }
    let est = sum / n as f64;
    let kf = k as f64;
    let expect = 1.0 + 2.0 * kf * oi + kf * (kf + 1.0) * oi * oi;
    assert!((est / expect - 1.0).abs() < 0.01, "identical: {est} vs {expect}");
}

#[test]
fn capacity_monotone_in_sampled_arguments() {
    let mut rng = RandomSource::new(5);
    for _ in 0..10_000 {
        let p = 10.0 * rng.uniform();
        let g = rng.exponential(1.0);
        let z = rng.exponential(1.0);
        let dg = rng.uniform();
        let dz = rng.uniform();
        let c = capacity(p, g, z);
        assert!(capacity(p, g + dg, z) >= c);
        assert!(capacity(p, g, z + dz) <= c);
    }
}
