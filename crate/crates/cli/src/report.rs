use std::path::PathBuf;

use clap::Args as ClapArgs;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use shrubflow::field::{build_field, eval_field, jacobian_at_south_pole, FieldBundle, SouthPoleJacobian, SphereField};
use shrubflow::flow::sample_zero_set;

use crate::error::{emit, read, CliError};

#[derive(ClapArgs)]
pub struct Args {
    bundle: PathBuf,
    /// Random unit vectors for the tangency check.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Zero-set samples for the magnitude check.
    #[arg(long, default_value_t = 1000)]
    zero_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
pub struct Tangency {
    pub samples: usize,
    /// Points skipped for lying within 1e−6 of an exceptional point.
    pub skipped: usize,
    /// Largest `|f·u| / (1 + ‖f‖)`.
    pub max_normalized: f64,
    pub max_field_norm: f64,
}

#[derive(Serialize)]
struct ZeroSet {
    samples: usize,
    skipped: usize,
    max_field_norm: f64,
    max_normalized_value: f64,
}

#[derive(Serialize)]
struct Report {
    bundle: String,
    factors: usize,
    exceptional_points: Vec<[f64; 3]>,
    tangency: Tangency,
    south_pole: SouthPoleJacobian,
    zero_set: ZeroSet,
}

fn near_exceptional(field: &SphereField, u: [f64; 3]) -> bool {
    field.source.exceptional_points.iter().any(|e| {
        let d = [u[0] - e[0], u[1] - e[1], u[2] - e[2]];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() < 1e-6
    })
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Uniform unit vectors by rejection from the cube.
pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = norm(v);
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

pub fn tangency(field: &SphereField, samples: usize, seed: u64) -> Result<Tangency, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut biggest, mut skipped) = (0.0f64, 0.0f64, 0);
    for _ in 0..samples {
        let u = random_unit(&mut rng);
        if near_exceptional(field, u) {
            skipped += 1;
            continue;
        }
        let f = eval_field(field, u)?;
        let n = norm(f);
        worst = worst.max((f[0] * u[0] + f[1] * u[1] + f[2] * u[2]).abs() / (1.0 + n));
        biggest = biggest.max(n);
    }
    Ok(Tangency { samples, skipped, max_normalized: worst, max_field_norm: biggest })
}

pub fn run(a: Args) -> Result<(), CliError> {
    let bundle = FieldBundle::from_json(&read(&a.bundle)?)?;
    let field = build_field(bundle.function()?);
    let t = tangency(&field, a.samples, a.seed)?;
    let south_pole = jacobian_at_south_pole(&field)?;
    let (mut fmax, mut vmax, mut skipped) = (0.0f64, 0.0f64, 0);
    let zs = sample_zero_set(&field.source, a.zero_samples);
    for u in &zs {
        if near_exceptional(&field, *u) {
            skipped += 1;
            continue;
        }
        fmax = fmax.max(norm(eval_field(&field, *u)?));
        vmax = vmax.max(field.source.normalized_value(*u));
    }
    let report = Report {
        bundle: a.bundle.display().to_string(),
        factors: bundle.factors.len(),
        exceptional_points: field.source.exceptional_points.clone(),
        tangency: t,
        south_pole,
        zero_set: ZeroSet { samples: zs.len(), skipped, max_field_norm: fmax, max_normalized_value: vmax },
    };
    emit(&report, a.out.as_deref())
}
