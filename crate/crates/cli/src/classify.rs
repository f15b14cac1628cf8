use std::path::Path;

use serde::Serialize;

use shrubflow::shrub::{
    augment, check_certificate, classify_buds, find_odd_cactuses, is_very_simple, orient_all, parity_invariant,
    required_puncture_set, BudInfo, Cactus, CheckReport, OrientationCertificate, ParityInvariant, Puncture, Shrub,
};

use crate::error::{emit, read, CliError};

#[derive(Serialize)]
struct Report {
    pieces: usize,
    leaves: usize,
    sprigs: usize,
    junctions: usize,
    odd_buds: Vec<BudInfo>,
    odd_cactuses: Vec<Cactus>,
    punctures: Vec<Puncture>,
    very_simple: bool,
    /// Scaffolding sprigs added to odd cactuses before orienting, as the
    /// synthesizer does.
    virtual_pieces: Vec<usize>,
    parity: ParityInvariant,
    certificate: Option<OrientationCertificate>,
    check: Option<CheckReport>,
    failure: Option<String>,
}

pub fn run(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let shrub = Shrub::from_json(&read(path)?)?;
    let buds = classify_buds(&shrub);
    let (oriented, virt) = augment(&shrub)?;
    let (certificate, check, failure) = match orient_all(&oriented) {
        Ok(c) => {
            let r = check_certificate(&oriented, &c);
            let failure = (!r.ok).then(|| format!("certificate rejected: {}", r.problems.join("; ")));
            (Some(c), Some(r), failure)
        }
        Err(e) => (None, None, Some(e.to_string())),
    };
    let report = Report {
        pieces: shrub.num_pieces(),
        leaves: shrub.leaves().count(),
        sprigs: shrub.sprigs().count(),
        junctions: shrub.num_junctions(),
        odd_buds: buds.odd_buds().cloned().collect(),
        odd_cactuses: find_odd_cactuses(&shrub).into_iter().filter(|c| c.odd).collect(),
        punctures: required_puncture_set(&shrub),
        very_simple: is_very_simple(&shrub),
        virtual_pieces: virt.into_iter().collect(),
        parity: parity_invariant(&shrub),
        certificate,
        check,
        failure: failure.clone(),
    };
    emit(&report, out)?;
    match failure {
        Some(f) => Err(CliError::invalid(f)),
        None => Ok(()),
    }
}
