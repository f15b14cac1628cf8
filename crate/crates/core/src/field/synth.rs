use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::curves::{stereo_north_inverse_exact, Affine2, AffineRecord};
use crate::io::Exact;
use crate::poly::{rational_to_f64, Coeff, Rational};
use crate::shrub::{
    augment, layout_with, merged_segments, orient_all, required_puncture_set, Layout, LayoutOptions,
    MergedSegment, OrientationCertificate, Placement, PunctureKind, RootChoice, RootStyle, SegmentEnd, Shrub,
    ShrubGraph,
};

use super::{FactorSpec, FieldError, SphereFunction};

pub const BUNDLE_FORMAT: &str = "shrubflow-field/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PunctureRecord {
    pub kind: PunctureKind,
    /// Plane position; absent for ∞.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[Exact; 2]>,
    pub sphere: [f64; 3],
}

/// Everything needed to rebuild `F`: exact factors plus the puncture set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldBundle {
    pub format: String,
    pub factors: Vec<FactorSpec>,
    #[serde(default)]
    pub punctures: Vec<PunctureRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<RootStyle>,
    /// The laid-out shrub, geometry included.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<ShrubGraph>,
}

impl FieldBundle {
    pub fn from_factors(factors: Vec<FactorSpec>) -> FieldBundle {
        FieldBundle { format: BUNDLE_FORMAT.into(), factors, punctures: vec![], root: None, layout: None }
    }

    pub fn function(&self) -> Result<SphereFunction, FieldError> {
        SphereFunction::new(self.factors.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundles serialize")
    }

    pub fn from_json(text: &str) -> Result<FieldBundle, FieldError> {
        let b: FieldBundle = serde_json::from_str(text).map_err(|e| FieldError::Spec(e.to_string()))?;
        if b.format != BUNDLE_FORMAT {
            return Err(FieldError::Spec(format!("unknown bundle format `{}`", b.format)));
        }
        Ok(b)
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    pub root: RootChoice,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { root: RootChoice::Auto }
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub bundle: FieldBundle,
    pub function: SphereFunction,
    /// Layout of the shrub with scaffolding sprigs at odd-cactus points.
    pub layout: Layout,
    pub certificate: OrientationCertificate,
    pub segments: Vec<MergedSegment>,
}

fn ex2(p: &[Rational; 2]) -> [Exact; 2] {
    [Exact(p[0].clone()), Exact(p[1].clone())]
}

fn sphere_of(p: Option<&[Rational; 2]>) -> [f64; 3] {
    match p {
        Some(p) => stereo_north_inverse_exact(p).map(|c| rational_to_f64(&c)),
        None => [0.0, 0.0, 1.0],
    }
}

/// The shrub file of the original pieces with the layout's geometry.
fn strip_scaffolding(g: ShrubGraph, n: usize, virt: &BTreeSet<usize>) -> ShrubGraph {
    let mut g = g;
    g.pieces.truncate(n);
    for j in &mut g.junctions {
        j.at.retain(|r| !virt.contains(&r.piece));
    }
    g.junctions.retain(|j| !j.at.is_empty());
    g
}

/// `F` for a finite shrub: one factor per leaf and one per maximal straight
/// segment. The shrub is laid out with ∞ on a free tip when there is one,
/// otherwise inside a frame leaf, so the south pole sits in the orbit
/// region.
pub fn compose_shrub_function(shrub: &Shrub, opts: &SynthesisOptions) -> Result<Synthesis, FieldError> {
    let (aug, virt) = augment(shrub)?;
    let cert = orient_all(&aug)?;
    let layout = layout_with(&aug, &cert, &LayoutOptions { root: opts.root.clone(), virtual_pieces: virt.clone() })?;

    let mut factors = Vec::new();
    for p in &layout.placements {
        match p {
            Placement::Hypocycloid { k, affine } => {
                factors.push(FactorSpec::Hypocycloid { k: *k, affine: AffineRecord::from_affine(affine) })
            }
            Placement::Frame { radius, .. } => {
                let one = Rational::from_i64(1);
                let r2 = radius * radius;
                let z = Rational::from_i64(0);
                factors.push(FactorSpec::Affine {
                    coeffs: [Exact(z.clone()), Exact(z), Exact(&one + &r2), Exact(&one - &r2)],
                });
            }
            Placement::Segment { .. } | Placement::Ray { .. } | Placement::Virtual => {}
        }
    }
    let segments = merged_segments(&aug, &cert, &layout, &virt);
    for s in &segments {
        let spec = match (&s.start, &s.end) {
            (SegmentEnd::Point { at: a, .. }, SegmentEnd::Point { at: b, .. }) => {
                FactorSpec::Segment { from: ex2(a), to: ex2(b) }
            }
            (SegmentEnd::Point { at, .. }, SegmentEnd::Infinity { direction }) => {
                FactorSpec::Ray { from: ex2(at), direction: ex2(direction) }
            }
            _ => return Err(FieldError::Configuration("segment with both ends at ∞".into())),
        };
        factors.push(spec);
    }

    let mut punctures = Vec::new();
    for p in required_puncture_set(shrub) {
        let j = match p.kind {
            PunctureKind::OddBud => p.junction.expect("odd buds are junctions"),
            PunctureKind::CactusRepresentative => aug.site_of_leaf_cusp(p.piece, 0).expect("scaffolding junction"),
        };
        let pt = layout.points[j].as_ref();
        punctures.push(PunctureRecord { kind: p.kind, point: pt.map(ex2), sphere: sphere_of(pt) });
    }

    let function = SphereFunction::new(factors.clone())?;
    check_orbit_region(&function, &layout)?;
    for p in &punctures {
        if function.normalized_value(p.sphere) > 1e-8 {
            return Err(FieldError::Configuration(format!("puncture at {:?} falls inside the orbit region", p.sphere)));
        }
    }
    let graph = strip_scaffolding(layout.to_graph(&aug), shrub.num_pieces(), &virt);
    let bundle = FieldBundle {
        format: BUNDLE_FORMAT.into(),
        factors,
        punctures,
        root: Some(layout.root.clone()),
        layout: Some(graph),
    };
    Ok(Synthesis { bundle, function, layout, certificate: cert, segments })
}

fn check_orbit_region(f: &SphereFunction, layout: &Layout) -> Result<(), FieldError> {
    for (i, p) in layout.placements.iter().enumerate() {
        if let Placement::Hypocycloid { .. } = p {
            let poly = p.sample(64);
            if p.contains([0.0, 0.0], &poly) {
                return Err(FieldError::Configuration(format!("the south pole lies inside leaf {i}")));
            }
        }
    }
    if f.normalized_value([0.0, 0.0, -1.0]) < 1e-12 {
        return Err(FieldError::SouthPoleInZeroSet);
    }
    Ok(())
}

/// `F` for the standard k-cusped hypocycloid scaled into the unit disk; the
/// orbit region is its inside and the outside plays the frame.
pub fn hypocycloid_frame_function(k: u32) -> Result<FieldBundle, FieldError> {
    let a = Affine2::scaling(Rational::new(1.into(), (k as i64).into()))?;
    Ok(FieldBundle::from_factors(vec![FactorSpec::Hypocycloid { k, affine: AffineRecord::from_affine(&a) }]))
}

/// Small shrubs used as worked examples and test fixtures.
pub fn sample_shrubs() -> Vec<(&'static str, Shrub)> {
    use crate::shrub::{Piece, Site};
    let (leaf, sprig) = (Piece::leaf, Piece::sprig);
    let mut out = Vec::new();
    out.push(("lone_leaf", ShrubGraph { pieces: vec![leaf()], junctions: vec![] }));
    out.push(("arc", ShrubGraph { pieces: vec![sprig()], junctions: vec![] }));
    let mut g = ShrubGraph { pieces: vec![leaf(), sprig()], junctions: vec![] };
    g.join(&[(0, Site::Cusp(0)), (1, Site::End0)]);
    out.push(("prickly_cactus", g));
    let mut g = ShrubGraph { pieces: vec![sprig(), leaf(), sprig()], junctions: vec![] };
    g.join(&[(0, Site::End1), (1, Site::Cusp(0))]);
    g.join(&[(1, Site::Cusp(2)), (2, Site::End0)]);
    out.push(("chain", g));
    let mut g = ShrubGraph { pieces: vec![sprig(), sprig(), sprig()], junctions: vec![] };
    g.join(&[(0, Site::End0), (1, Site::End0), (2, Site::End0)]);
    out.push(("star", g));
    let mut g = ShrubGraph { pieces: vec![leaf(), leaf(), sprig(), sprig()], junctions: vec![] };
    g.join(&[(0, Site::Cusp(0)), (1, Site::Cusp(0))]);
    g.join(&[(0, Site::Cusp(2)), (2, Site::End0)]);
    g.join(&[(1, Site::Cusp(2)), (3, Site::End0)]);
    out.push(("twin_leaves", g));
    out.into_iter().map(|(n, g)| (n, Shrub::new(g).expect("sample shrubs are valid"))).collect()
}

/// Named fields for checks and demonstrations: the equator, its double, the
/// deltoid frame, and every sample shrub synthesized with default options.
pub fn reference_bundles() -> Result<Vec<(String, FieldBundle)>, FieldError> {
    let mut out = vec![
        ("equator".to_string(), FieldBundle::from_factors(vec![FactorSpec::affine(0.0, 0.0, 1.0, 0.0)])),
        ("double_equator".to_string(), FieldBundle::from_factors(vec![FactorSpec::affine(0.0, 0.0, 2.0, 0.0)])),
        ("deltoid_frame".to_string(), hypocycloid_frame_function(3)?),
    ];
    for (name, s) in sample_shrubs() {
        out.push((name.to_string(), compose_shrub_function(&s, &SynthesisOptions::default())?.bundle));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shrub::{Piece, Site};

    #[test]
    fn references_synthesize() {
        let names: Vec<String> = reference_bundles().unwrap().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names.len(), 9);
    }

    #[test]
    fn lone_leaf_gives_the_equator() {
        let s = Shrub::new(ShrubGraph { pieces: vec![Piece::leaf()], junctions: vec![] }).unwrap();
        let syn = compose_shrub_function(&s, &SynthesisOptions::default()).unwrap();
        assert_eq!(syn.bundle.factors, vec![FactorSpec::affine(0.0, 0.0, 2.0, 0.0)]);
        assert!(syn.bundle.punctures.is_empty());
    }

    #[test]
    fn arc_uses_a_ray() {
        let mut g = ShrubGraph { pieces: vec![Piece::sprig(), Piece::leaf(), Piece::sprig()], junctions: vec![] };
        g.join(&[(0, Site::End1), (1, Site::Cusp(0))]);
        g.join(&[(1, Site::Cusp(1)), (2, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        let syn = compose_shrub_function(&s, &SynthesisOptions::default()).unwrap();
        assert_eq!(syn.bundle.punctures.len(), 2);
        assert!(syn.bundle.factors.iter().any(|f| matches!(f, FactorSpec::Ray { .. })));
        let back = FieldBundle::from_json(&syn.bundle.to_json()).unwrap();
        assert_eq!(back, syn.bundle);
        assert_eq!(back.to_json(), syn.bundle.to_json());
    }

    #[test]
    fn prickly_cactus_gets_two_punctures() {
        let mut g = ShrubGraph { pieces: vec![Piece::leaf(), Piece::sprig()], junctions: vec![] };
        g.join(&[(0, Site::Cusp(1)), (1, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        let syn = compose_shrub_function(&s, &SynthesisOptions::default()).unwrap();
        assert_eq!(syn.bundle.punctures.len(), 2);
        let layout = syn.bundle.layout.unwrap();
        assert_eq!(layout.pieces.len(), 2);
    }

    #[test]
    fn canonical_leaf_covers_the_south_pole() {
        let s = Shrub::new(ShrubGraph { pieces: vec![Piece::leaf()], junctions: vec![] }).unwrap();
        let r = compose_shrub_function(&s, &SynthesisOptions { root: RootChoice::Canonical });
        assert!(matches!(r, Err(FieldError::Configuration(_))), "{r:?}");
    }
}
