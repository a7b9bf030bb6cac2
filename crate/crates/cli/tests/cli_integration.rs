//! End-to-end CLI checks: output schemas, manifest reproducibility, exit
//! codes, and the fitting/export subcommands.

use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_dtfdd");

fn smoke_spec(dir: &Path) -> String {
    format!(
        r#"
name = "cli-smoke"
seed = 11
slots = 5000
replicates = 2
schemes = ["dtfdd_known", "dtfdd_unknown", "static_tdd"]
sinr_db = [5.0, 10.0]

[channel]
mean_gain = 1.0

[interference]
num_interferers = 2
per_interferer_mean = 5.0

[rates]
count = 1
base = 1.0

[duplex]
mu = 0.5

[power]
mode = "budget_pooled"
pilot_slots = 2000

[estimator]
epsilon = 0.05
gamma_step = {{ scale = 0.5, exponent = 1.0 }}
chi_step = {{ scale = 0.5, exponent = 1.0 }}

[region]
scheme = "dtfdd_known"
sinr_db = 10.0
mu_grid = [0.0, 0.5, 1.0]

[output]
dir = "{}"
"#,
        dir.join("out").display()
    )
}

fn run_ok(args: &[&str]) -> String {
    let out = Command::new(BIN).args(args).output().expect("spawn dtfdd");
    assert!(
        out.status.success(),
        "dtfdd {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn run_writes_schema_stable_csvs_and_manifest_reruns_identically() {
    let tmp = TempDir::new().unwrap();
    let spec_path = tmp.path().join("exp.toml");
    fs::write(&spec_path, smoke_spec(tmp.path())).unwrap();

    run_ok(&["--quiet", "run", spec_path.to_str().unwrap()]);

    let out_dir = tmp.path().join("out");
    let runs = fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    let agg = fs::read_to_string(out_dir.join("aggregate.csv")).unwrap();
    assert!(runs.starts_with(dtfdd_cli::output::RUNS_HEADER));
    assert!(agg.starts_with(dtfdd_cli::output::AGGREGATE_HEADER));
    // 3 schemes x 2 points x 2 replicates.
    assert_eq!(runs.lines().count(), 1 + 12);
    assert_eq!(agg.lines().count(), 1 + 6);

    // Re-run from the manifest into a fresh directory: byte-identical CSVs.
    let manifest = out_dir.join("manifest.json");
    let redo = tmp.path().join("redo");
    run_ok(&[
        "--quiet",
        "run",
        manifest.to_str().unwrap(),
        "--out-dir",
        redo.to_str().unwrap(),
    ]);
    let runs2 = fs::read_to_string(redo.join("runs.csv")).unwrap();
    let agg2 = fs::read_to_string(redo.join("aggregate.csv")).unwrap();
    assert_eq!(runs, runs2);
    assert_eq!(agg, agg2);
}

#[test]
fn region_subcommand_writes_points() {
    let tmp = TempDir::new().unwrap();
    let spec_path = tmp.path().join("exp.toml");
    fs::write(&spec_path, smoke_spec(tmp.path())).unwrap();
    run_ok(&["--quiet", "region", spec_path.to_str().unwrap()]);
    let region = fs::read_to_string(tmp.path().join("out/region.csv")).unwrap();
    assert!(region.starts_with(dtfdd_cli::output::REGION_HEADER));
    assert_eq!(region.lines().count(), 1 + 3);
}

#[test]
fn validate_reports_job_counts_and_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let spec_path = tmp.path().join("exp.toml");
    fs::write(&spec_path, smoke_spec(tmp.path())).unwrap();
    let out = run_ok(&["validate", spec_path.to_str().unwrap()]);
    assert!(out.contains("12 jobs"), "{out}");

    // Validation failure: empty scheme list, exit code 1.
    let bad = smoke_spec(tmp.path()).replace(
        "schemes = [\"dtfdd_known\", \"dtfdd_unknown\", \"static_tdd\"]",
        "schemes = []",
    );
    let bad_path = tmp.path().join("bad.toml");
    fs::write(&bad_path, bad).unwrap();
    let out = Command::new(BIN)
        .args(["validate", bad_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Runtime failure: fitting a missing file, exit code 2.
    let out = Command::new(BIN)
        .args(["fit-diversity", tmp.path().join("nope.csv").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_and_export_roundtrip() {
    let tmp = TempDir::new().unwrap();
    // Synthetic aggregate with an exact inverse-square law.
    let mut csv = String::from(dtfdd_cli::output::AGGREGATE_HEADER);
    csv.push('\n');
    for &p in &[10.0, 20.0, 40.0, 80.0] {
        let outage = 1.0 / (p * p);
        csv.push_str(&format!(
            "synthetic,0,{outage},0,1000000000,1,0,0,{p},{p}\n"
        ));
    }
    let csv_path = tmp.path().join("agg.csv");
    fs::write(&csv_path, &csv).unwrap();

    let out = run_ok(&["fit-diversity", csv_path.to_str().unwrap()]);
    assert!(out.contains("synthetic,-2.0000,4"), "{out}");

    let dat_dir = tmp.path().join("dat");
    run_ok(&[
        "export-gnuplot",
        csv_path.to_str().unwrap(),
        "--out",
        dat_dir.to_str().unwrap(),
    ]);
    let dat = fs::read_to_string(dat_dir.join("synthetic.dat")).unwrap();
    assert!(dat.starts_with("# sinr_db"));
    assert_eq!(dat.lines().count(), 1 + 4);
}
