use std::path::PathBuf;

use clap::Args as ClapArgs;
use rayon::prelude::*;
use serde::Serialize;

use shrubflow::field::{build_field, FieldBundle, SphereField};
use shrubflow::flow::{
    first_integral_drift, integrate, omega_estimate, sample_zero_set, seed_orbit, winding_summary, FlowError,
    OmegaEstimate,
};

use crate::config::{sha256_hex, RunConfig};
use crate::error::{emit, read, write, CliError};
use crate::plot;

#[derive(ClapArgs)]
pub struct Args {
    bundle: PathBuf,
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for per-seed files and the merged report.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds, run in parallel.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Integrate the field normalized to unit speed.
    #[arg(long)]
    unit_speed: bool,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    window_fraction: Option<f64>,
    #[arg(long)]
    zero_samples: Option<usize>,
    #[arg(long)]
    no_plot: bool,
}

#[derive(Serialize)]
struct Files {
    csv: String,
    omega: String,
    svg: Option<String>,
}

#[derive(Serialize)]
struct SeedRun {
    seed: u64,
    start: [f64; 3],
    samples: usize,
    end_time: f64,
    stalled: bool,
    truncated: bool,
    rejected: usize,
    max_norm_error: f64,
    winding: f64,
    tail_monotone: bool,
    drift: Option<f64>,
    omega: OmegaEstimate,
    files: Files,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Outcome {
    Done(Box<SeedRun>),
    Failed { seed: u64, start: [f64; 3], error: String },
}

#[derive(Serialize)]
struct Report {
    bundle_sha256: String,
    config_sha256: String,
    config: RunConfig,
    failures: usize,
    runs: Vec<Outcome>,
}

fn load_config(a: &Args) -> Result<RunConfig, CliError> {
    let mut c: RunConfig = match &a.config {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = a.seeds {
        c.seeds = v;
    }
    if let Some(v) = a.horizon {
        c.horizon = v;
    }
    if a.unit_speed {
        c.flow.unit_speed = true;
    }
    if let Some(v) = a.rtol {
        c.flow.rtol = v;
    }
    if let Some(v) = a.atol {
        c.flow.atol = v;
    }
    if let Some(v) = a.h_max {
        c.flow.h_max = Some(v);
    }
    if let Some(v) = a.radius {
        c.radius = v;
    }
    if let Some(v) = a.window_fraction {
        c.window_fraction = v;
    }
    if let Some(v) = a.zero_samples {
        c.zero_samples = v;
    }
    if a.no_plot {
        c.plot = false;
    }
    let c = c.resolved();
    c.validate().map_err(CliError::invalid)?;
    Ok(c)
}

fn run_seed(field: &SphereField, zs: &[[f64; 3]], c: &RunConfig, seed: u64) -> Result<(SeedRun, Vec<u8>, Option<String>), FlowError> {
    let start = seed_orbit(c.radius, seed);
    let traj = integrate(field, start, c.horizon, &c.flow)?;
    let (winding, tail_monotone) = winding_summary(&traj)?;
    let drift = first_integral_drift(&traj, zs, c.flow.guard).ok();
    let omega = omega_estimate(&traj, zs, c.window_fraction);
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).expect("writing to memory");
    let svg = c.plot.then(|| plot::svg(&traj.states, zs));
    let stem = format!("seed_{seed}");
    let run = SeedRun {
        seed,
        start,
        samples: traj.len(),
        end_time: *traj.times.last().expect("nonempty"),
        stalled: traj.stalled,
        truncated: traj.truncated,
        rejected: traj.rejected,
        max_norm_error: traj.max_norm_error(),
        winding,
        tail_monotone,
        drift,
        omega,
        files: Files {
            csv: format!("{stem}.csv"),
            omega: format!("{stem}.omega.json"),
            svg: c.plot.then(|| format!("{stem}.svg")),
        },
    };
    Ok((run, csv, svg))
}

pub fn run(a: Args) -> Result<(), CliError> {
    let c = load_config(&a)?;
    let text = read(&a.bundle)?;
    let bundle = FieldBundle::from_json(&text)?;
    let field = build_field(bundle.function()?);
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    let zs = sample_zero_set(&field.source, c.zero_samples);
    let seeds: Vec<u64> = (0..c.seeds as u64).map(|i| c.seed + i).collect();
    let results: Vec<_> = seeds.par_iter().map(|&s| (s, run_seed(&field, &zs, &c, s))).collect();

    let mut runs = Vec::new();
    let mut failures = 0;
    for (seed, r) in results {
        match r {
            Ok((run, csv, svg)) => {
                write(&a.out_dir.join(&run.files.csv), csv)?;
                let mut om = serde_json::to_string_pretty(&run.omega)?;
                om.push('\n');
                write(&a.out_dir.join(&run.files.omega), om)?;
                if let (Some(name), Some(svg)) = (&run.files.svg, svg) {
                    write(&a.out_dir.join(name), svg)?;
                }
                runs.push(Outcome::Done(Box::new(run)));
            }
            Err(e) => {
                failures += 1;
                eprintln!("seed {seed}: {e}");
                runs.push(Outcome::Failed { seed, start: seed_orbit(c.radius, seed), error: e.to_string() });
            }
        }
    }
    let report = Report {
        bundle_sha256: sha256_hex(text.as_bytes()),
        config_sha256: c.sha256(),
        config: c,
        failures,
        runs,
    };
    emit(&report, Some(&a.out_dir.join("report.json")))?;
    if failures > 0 {
        return Err(CliError::Numeric(anyhow::anyhow!("{failures} of {} seeds failed", seeds.len())));
    }
    println!("{}", a.out_dir.join("report.json").display());
    Ok(())
}
