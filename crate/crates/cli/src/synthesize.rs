use std::path::PathBuf;

use clap::Args as ClapArgs;
use serde::Serialize;

use shrubflow::field::{
    build_field, compose_shrub_function, hypocycloid_frame_function, reference_bundles, FieldBundle, PunctureRecord,
    SynthesisOptions,
};
use shrubflow::shrub::{RootChoice, RootStyle, Shrub, Site};

use crate::error::{emit, read, write, CliError};
use crate::report::{tangency, Tangency};

#[derive(ClapArgs)]
pub struct Args {
    /// Shrub JSON file.
    #[arg(required_unless_present_any = ["builtin", "frame"])]
    shrub: Option<PathBuf>,
    /// A named field instead of a shrub file: equator, double_equator,
    /// deltoid_frame, or one of the sample shrubs.
    #[arg(long, conflicts_with_all = ["shrub", "frame"])]
    builtin: Option<String>,
    /// The k-cusped hypocycloid inside the unit-disk frame.
    #[arg(long, conflicts_with = "shrub")]
    frame: Option<u32>,
    /// Where ∞ goes: auto, canonical, frame:LEAF, or ray:SPRIG[:end0|end1].
    #[arg(long, default_value = "auto")]
    root: String,
    /// Bundle output path.
    #[arg(long)]
    out: PathBuf,
    /// Random unit vectors for the tangency spot check.
    #[arg(long, default_value_t = 1000)]
    spot_checks: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    source: String,
    out: String,
    factors: usize,
    punctures: Vec<PunctureRecord>,
    root: Option<RootStyle>,
    exceptional_points: Vec<[f64; 3]>,
    tangency: Tangency,
}

fn parse_root(s: &str) -> Result<RootChoice, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let index = |p: &str| p.parse::<usize>().map_err(|_| CliError::invalid(format!("bad piece index in --root {s}")));
    match parts.as_slice() {
        ["auto"] => Ok(RootChoice::Auto),
        ["canonical"] => Ok(RootChoice::Canonical),
        ["frame", n] => Ok(RootChoice::Frame(index(n)?)),
        ["ray", n] => Ok(RootChoice::Ray { sprig: index(n)?, infinite_end: Site::End1 }),
        ["ray", n, "end0"] => Ok(RootChoice::Ray { sprig: index(n)?, infinite_end: Site::End0 }),
        ["ray", n, "end1"] => Ok(RootChoice::Ray { sprig: index(n)?, infinite_end: Site::End1 }),
        _ => Err(CliError::invalid(format!("unknown --root {s}"))),
    }
}

pub fn run(a: Args) -> Result<(), CliError> {
    let (source, bundle) = if let Some(name) = &a.builtin {
        let found = reference_bundles()?.into_iter().find(|(n, _)| n == name);
        let (_, b) = found.ok_or_else(|| CliError::invalid(format!("no builtin field named {name}")))?;
        (format!("builtin:{name}"), b)
    } else if let Some(k) = a.frame {
        (format!("frame:{k}"), hypocycloid_frame_function(k)?)
    } else {
        let path = a.shrub.as_ref().expect("clap requires a source");
        let shrub = Shrub::from_json(&read(path)?)?;
        let opts = SynthesisOptions { root: parse_root(&a.root)? };
        (path.display().to_string(), compose_shrub_function(&shrub, &opts)?.bundle)
    };
    let text = bundle.to_json();
    let bundle = FieldBundle::from_json(&text)?;
    let field = build_field(bundle.function()?);
    let t = tangency(&field, a.spot_checks, 0)?;
    write(&a.out, format!("{text}\n"))?;
    let report = Report {
        source,
        out: a.out.display().to_string(),
        factors: bundle.factors.len(),
        punctures: bundle.punctures.clone(),
        root: bundle.root.clone(),
        exceptional_points: field.source.exceptional_points.clone(),
        tangency: t,
    };
    emit(&report, a.report.as_deref())
}
