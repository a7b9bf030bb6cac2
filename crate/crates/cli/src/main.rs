//! `dtfdd` command line: run outage/throughput experiments, sweep
//! throughput regions, fit diversity slopes, and validate specs.
//!
//! Exit codes: 0 ok, 1 validation error, 2 runtime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dtfdd_cli::error::{CliError, Result};
use dtfdd_cli::{fit, output, runner, spec::ExperimentSpec, Manifest};

#[derive(Parser)]
#[command(name = "dtfdd", version, about = "Duplex scheduling simulator driver")]
struct Cli {
    /// Suppress the per-job progress counter.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecInput {
    /// Experiment spec (.toml) or a previously written manifest (.json).
    spec: PathBuf,

    /// Write outputs here instead of the spec's output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid and write runs.csv, aggregate.csv, manifest.json.
    Run(SpecInput),
    /// Run the spec's [region] sweep and write region.csv, manifest.json.
    Region(SpecInput),
    /// Parse and validate a spec (or manifest), printing a summary.
    Validate {
        spec: PathBuf,
    },
    /// Fit per-scheme diversity slopes from an aggregate CSV.
    FitDiversity {
        csv: PathBuf,
        /// Minimum outage events per qualifying point.
        #[arg(long, default_value_t = 100.0)]
        min_events: f64,
        /// Saturation cutoff; points with higher outage are excluded.
        #[arg(long, default_value_t = 0.25)]
        max_outage: f64,
    },
    /// Pivot an aggregate CSV into per-scheme gnuplot column files.
    ExportGnuplot {
        csv: PathBuf,
        /// Output directory for the .dat files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let spec = if path.extension().is_some_and(|e| e == "json") {
        Manifest::from_json(&text)?.spec
    } else {
        ExperimentSpec::from_toml(&text)?
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_run(input: &SpecInput, quiet: bool) -> Result<()> {
    let spec = load_spec(&input.spec)?;
    let rows = runner::run_experiment(&spec, !quiet)?;
    let dir = input
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&spec.output.dir));
    output::write_experiment_outputs(&dir, &spec, &rows)?;
    println!(
        "wrote {} runs to {}",
        rows.len(),
        dir.join(output::RUNS_CSV).display()
    );
    Ok(())
}

fn cmd_region(input: &SpecInput, _quiet: bool) -> Result<()> {
    let spec = load_spec(&input.spec)?;
    let region = spec.resolve_region()?;
    let points = dtfdd_core::sweep_region(&region)?;
    let dir = input
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&spec.output.dir));
    let block = spec.region.as_ref().expect("resolve_region checked this");
    output::write_region_outputs(&dir, &spec, &block.scheme, block.sinr_db, &points)?;
    println!(
        "wrote {} region points to {}",
        points.len(),
        dir.join(output::REGION_CSV).display()
    );
    Ok(())
}

fn cmd_validate(path: &Path) -> Result<()> {
    let spec = load_spec(path)?;
    let jobs = spec.resolve_jobs()?;
    println!(
        "ok: experiment `{}`, {} scheme(s) x {} grid point(s) x {} replicate(s) = {} jobs, {} slots each",
        spec.name,
        spec.schemes.len(),
        spec.sinr_db.len(),
        spec.replicates,
        jobs.len(),
        spec.slots
    );
    Ok(())
}

fn cmd_fit(csv: &Path, min_events: f64, max_outage: f64) -> Result<()> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", csv.display())))?;
    let rows = output::parse_aggregate_csv(&text)?;
    let fits = fit::diversity_fit(
        &rows,
        &fit::FitOptions {
            min_events,
            max_outage,
            min_points: 3,
        },
    )?;
    println!("scheme,slope,points_used");
    for f in fits {
        println!("{},{:.4},{}", f.scheme, f.slope, f.points_used);
    }
    Ok(())
}

fn cmd_export(csv: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(csv)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", csv.display())))?;
    let rows = output::parse_aggregate_csv(&text)?;
    let files = output::export_gnuplot(&rows, out)?;
    for f in files {
        println!("{}", out.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not errors.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match &cli.command {
        Command::Run(input) => cmd_run(input, cli.quiet),
        Command::Region(input) => cmd_region(input, cli.quiet),
        Command::Validate { spec } => cmd_validate(spec),
        Command::FitDiversity { csv, min_events, max_outage } => {
            cmd_fit(csv, *min_events, *max_outage)
        }
        Command::ExportGnuplot { csv, out } => cmd_export(csv, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
