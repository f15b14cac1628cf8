//! Shrubs: trees of hypocycloid leaves and segment sprigs meeting at buds.

mod analysis;
mod checker;
mod generate;
mod layout;
mod model;
mod orient;
mod skeleton;
mod twist;

use thiserror::Error;

pub use analysis::{
    boundary_graph, classify_buds, classify_piece, find_odd_cactuses, is_very_simple, p_a, parity_check,
    parity_invariant, required_puncture_set, BudClassification, BudInfo, Cactus, ParityInvariant, ParityReport,
    PieceClass, Puncture, PunctureKind, SimpleGraph,
};
pub use checker::{check_certificate, CheckReport};
pub use generate::{random_shrub, GenerateOptions};
pub use layout::{
    augment, check_overlaps, layout_shrub, layout_with, merged_segments, Layout, LayoutOptions, MergedSegment,
    Placement, RootChoice, RootStyle, SegmentEnd,
};
pub use model::{validate, Diagnostics, Junction, LeafSpec, Piece, Shrub, ShrubGraph, Site, SiteRef, SprigSpec};
pub use orient::{orient_all, Alternative, Element, Orientation, OrientationCertificate, SprigWitness};
pub use skeleton::{check_skeleton, skeleton_decompose, Skeleton, Stem};
pub use twist::{twist_map, TwistMap};

#[derive(Debug, Error)]
pub enum ShrubError {
    #[error("cannot parse shrub: {0}")]
    Parse(String),
    #[error("invalid shrub: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("piece {piece} does not meet junction {junction}")]
    NotIncident { junction: usize, piece: usize },
    #[error("not very simple: cactus with leaves {leaves:?} has an odd number of sprig ends")]
    NotVerySimple { leaves: Vec<usize> },
    #[error("{element} has {rigid} rigid elements, an odd number")]
    Unorientable { element: String, rigid: usize },
    #[error("chain broken: {0}")]
    BrokenChain(String),
    #[error("twist {0} is outside (-1/8, 1/8)")]
    TwistRange(f64),
    #[error("layout failed: {0}")]
    Layout(String),
}
