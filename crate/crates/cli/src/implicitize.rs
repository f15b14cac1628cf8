use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::{Args as ClapArgs, ValueEnum};
use serde::Serialize;

use shrubflow::curves::{cusps, implicitize_data, param_point};
use shrubflow::poly::{rational_to_text, RatPoly, Rational};

use crate::error::{emit, write, CliError};

#[derive(Clone, Copy, ValueEnum)]
pub enum Check {
    /// Compare k = 4 with `(x²+y²−16)³ + 432x²y²` on a 101×101 grid.
    Astroid,
}

#[derive(ClapArgs)]
pub struct Args {
    /// Number of cusps, at least 3.
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..=12))]
    k: u32,
    /// Write the curve (polynomial and its square components) here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    check: Option<Check>,
    /// Parametric samples for the residual statistics.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct CurveFile {
    k: u32,
    variables: [&'static str; 2],
    /// `F = Σ components²`
    polynomial: String,
    components: Vec<String>,
    sylvester_size: usize,
}

#[derive(Serialize)]
struct Residuals {
    samples: usize,
    max: f64,
    mean: f64,
}

#[derive(Serialize)]
struct GridCheck {
    grid: usize,
    exact_zeros: usize,
    zero_set_agrees: bool,
    /// `F / classical²` when that is a constant.
    ratio_to_classical_squared: Option<String>,
    float_disagreements: usize,
}

#[derive(Serialize)]
struct Report {
    k: u32,
    degree: u32,
    terms: usize,
    sylvester_size: usize,
    residual: Residuals,
    cusp_gradient_max: f64,
    value_at_origin: String,
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    astroid: Option<GridCheck>,
}

fn astroid_check(f: &RatPoly, squares: &[RatPoly]) -> Result<GridCheck, CliError> {
    let vars = ["x", "y"];
    let base = RatPoly::parse("1*x^2+1*y^2+-16", &vars).map_err(|e| CliError::invalid(e))?;
    let cross = RatPoly::parse("432*x^2*y^2", &vars).map_err(|e| CliError::invalid(e))?;
    let classical = base.pow(3).add(&cross).map_err(|e| CliError::invalid(e))?;
    let sq = classical.mul(&classical).map_err(|e| CliError::invalid(e))?;
    let ratio = f
        .div_exact(&sq)
        .map_err(|e| CliError::invalid(e))?
        .filter(|q| q.is_constant())
        .map(|q| rational_to_text(&q.constant_term()));
    let zero = Rational::from_integer(0.into());
    let relative = |ps: &[&RatPoly], x: &[f64]| -> f64 {
        ps.iter()
            .map(|p| {
                let (v, m) = p.compile().eval_with_magnitude(x);
                if m == 0.0 { 0.0 } else { v.abs() / m }
            })
            .fold(0.0, f64::max)
    };
    let comps: Vec<&RatPoly> = squares.iter().collect();
    let (mut zeros, mut agree, mut float_bad) = (0, true, 0);
    for i in -50i64..=50 {
        for j in -50i64..=50 {
            let p = [Rational::new(i.into(), 10.into()), Rational::new(j.into(), 10.into())];
            let a = classical.eval_exact(&p).map_err(|e| CliError::invalid(e))? == zero;
            let b = f.eval_exact(&p).map_err(|e| CliError::invalid(e))? == zero;
            zeros += a as usize;
            agree &= a == b;
            let pf = [i as f64 / 10.0, j as f64 / 10.0];
            if (relative(&comps, &pf) < 1e-10) != (relative(&[&classical], &pf) < 1e-10) {
                float_bad += 1;
            }
        }
    }
    Ok(GridCheck {
        grid: 101,
        exact_zeros: zeros,
        zero_set_agrees: agree,
        ratio_to_classical_squared: ratio,
        float_disagreements: float_bad,
    })
}

pub fn run(a: Args) -> Result<(), CliError> {
    let data = implicitize_data(a.k)?;
    let curve = data.to_curve();
    let n = a.samples.max(1);
    let (mut max, mut sum) = (0.0f64, 0.0);
    for i in 0..n {
        let p = param_point(a.k, TAU * (i as f64 + 0.5) / n as f64)?;
        let r = curve.normalized_residual(&p)?;
        max = max.max(r);
        sum += r;
    }
    let mut cusp_max = 0.0f64;
    for q in cusps(a.k)? {
        let (_, g) = curve.eval_grad(&q)?;
        cusp_max = cusp_max.max(g.iter().map(|v| v * v).sum::<f64>().sqrt() / curve.residual_scale(&q));
    }
    let origin = [Rational::from_integer(0.into()), Rational::from_integer(0.into())];
    let at_origin = curve.polynomial.eval_exact(&origin).map_err(|e| CliError::invalid(e))?;
    let astroid = match a.check {
        Some(Check::Astroid) if a.k != 4 => return Err(CliError::invalid("--check astroid needs --k 4")),
        Some(Check::Astroid) => Some(astroid_check(&curve.polynomial, &curve.squares)?),
        None => None,
    };
    if let Some(path) = &a.out {
        let file = CurveFile {
            k: a.k,
            variables: ["x", "y"],
            polynomial: curve.polynomial.to_text(),
            components: curve.squares.iter().map(|s| s.to_text()).collect(),
            sylvester_size: data.sylvester_size,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        write(path, text)?;
    }
    let report = Report {
        k: a.k,
        degree: curve.polynomial.degree().unwrap_or(0),
        terms: curve.polynomial.num_terms(),
        sylvester_size: data.sylvester_size,
        residual: Residuals { samples: n, max, mean: sum / n as f64 },
        cusp_gradient_max: cusp_max,
        value_at_origin: rational_to_text(&at_origin),
        out: a.out.as_ref().map(|p| p.display().to_string()),
        astroid,
    };
    emit(&report, a.report.as_deref())
}
