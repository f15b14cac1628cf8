use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::curves::AffineRecord;
use crate::io::Exact;

use super::ShrubError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LeafSpec {
    /// Minimum cusp count; cusp indices in junctions must stay below it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineRecord>,
    /// Set on laid-out leaves that are the exterior `{|z| ≥ r}` of a circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Exact>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SprigSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<[Exact; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<[Exact; 2]>,
    /// Set on laid-out sprigs that run from `from` to ∞ along this direction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<[Exact; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    Leaf(LeafSpec),
    Sprig(SprigSpec),
}

impl Piece {
    pub fn leaf() -> Piece {
        Piece::Leaf(LeafSpec::default())
    }

    pub fn sprig() -> Piece {
        Piece::Sprig(SprigSpec::default())
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Piece::Leaf(_))
    }
}

/// Where a junction sits on a piece: a cusp of a leaf or an end of a sprig.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Cusp(u32),
    End0,
    End1,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            Site::Cusp(i) => write!(f, "cusp {i}"),
            Site::End0 => f.write_str("end0"),
            Site::End1 => f.write_str("end1"),
        }
    }
}

impl Serialize for Site {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Site::Cusp(i) => s.serialize_u32(*i),
            Site::End0 => s.serialize_str("end0"),
            Site::End1 => s.serialize_str("end1"),
        }
    }
}

struct SiteVisitor;

impl Visitor<'_> for SiteVisitor {
    type Value = Site;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a cusp index or \"end0\"/\"end1\"")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Site, E> {
        u32::try_from(v).map(Site::Cusp).map_err(|_| E::custom("cusp index too large"))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Site, E> {
        u32::try_from(v).map(Site::Cusp).map_err(|_| E::custom("cusp index must be nonnegative"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Site, E> {
        match v {
            "end0" => Ok(Site::End0),
            "end1" => Ok(Site::End1),
            other => Err(E::custom(format!("unknown site `{other}`"))),
        }
    }
}

impl<'de> Deserialize<'de> for Site {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Site, D::Error> {
        d.deserialize_any(SiteVisitor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRef {
    pub piece: usize,
    pub site: Site,
}

/// A bud: the pieces meeting there, listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub bud: u64,
    pub at: Vec<SiteRef>,
}

/// The shrub file: pieces plus the junctions where they meet.
///
/// Sprig ends that appear in no junction are free tips; they get implicit
/// junctions when the graph is normalized.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShrubGraph {
    pub pieces: Vec<Piece>,
    #[serde(default)]
    pub junctions: Vec<Junction>,
}

impl ShrubGraph {
    pub fn from_json(text: &str) -> Result<ShrubGraph, ShrubError> {
        serde_json::from_str(text).map_err(|e| ShrubError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("shrub graphs serialize")
    }

    /// Adds a junction and returns its index.
    pub fn join(&mut self, at: &[(usize, Site)]) -> usize {
        let bud = self.junctions.iter().map(|j| j.bud + 1).max().unwrap_or(0);
        self.junctions.push(Junction {
            bud,
            at: at.iter().map(|&(piece, site)| SiteRef { piece, site }).collect(),
        });
        self.junctions.len() - 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub valid: bool,
    pub violations: Vec<String>,
}

/// Structural checks: site kinds, duplicate sites, and that the bipartite
/// piece–junction incidence graph (free tips included) is a tree.
pub fn validate(graph: &ShrubGraph) -> Diagnostics {
    let mut v = Vec::new();
    let n = graph.pieces.len();
    if n == 0 {
        v.push("shrub has no pieces".to_string());
    }
    for (i, p) in graph.pieces.iter().enumerate() {
        match p {
            Piece::Leaf(l) => {
                if let Some(k) = l.k {
                    if k < 4 || k % 2 == 1 {
                        v.push(format!("leaf {i}: cusp count {k} must be even and at least 4"));
                    }
                }
                if let Some(a) = &l.affine {
                    if a.to_affine().is_err() {
                        v.push(format!("leaf {i}: singular affine map"));
                    }
                }
            }
            Piece::Sprig(s) => {
                if let (Some(a), Some(b)) = (&s.from, &s.to) {
                    if a == b {
                        v.push(format!("sprig {i}: endpoints coincide"));
                    }
                }
            }
        }
    }
    let mut buds = BTreeSet::new();
    let mut seen: BTreeMap<(usize, Site), usize> = BTreeMap::new();
    let mut edges = 0usize;
    for (j, junction) in graph.junctions.iter().enumerate() {
        if !buds.insert(junction.bud) {
            v.push(format!("junction {j}: duplicate bud id {}", junction.bud));
        }
        if junction.at.is_empty() {
            v.push(format!("junction {j}: no pieces"));
        }
        for r in &junction.at {
            let Some(piece) = graph.pieces.get(r.piece) else {
                v.push(format!("junction {j}: piece {} does not exist", r.piece));
                continue;
            };
            match (piece, r.site) {
                (Piece::Leaf(l), Site::Cusp(c)) => {
                    if let Some(k) = l.k {
                        if c >= k {
                            v.push(format!("junction {j}: leaf {} has no cusp {c} (k = {k})", r.piece));
                        }
                    }
                }
                (Piece::Sprig(_), Site::End0 | Site::End1) => {}
                (Piece::Leaf(_), s) => v.push(format!("junction {j}: leaf {} has no site {s}", r.piece)),
                (Piece::Sprig(_), s) => v.push(format!("junction {j}: sprig {} has no site {s}", r.piece)),
            }
            if let Some(prev) = seen.insert((r.piece, r.site), j) {
                v.push(format!(
                    "piece {} {} is used by junctions {prev} and {j}",
                    r.piece, r.site
                ));
            }
            edges += 1;
        }
    }
    if !v.is_empty() {
        return Diagnostics { valid: false, violations: v };
    }

    // Free sprig ends become one-site junctions.
    let mut vertices = n + graph.junctions.len();
    for (i, p) in graph.pieces.iter().enumerate() {
        if !p.is_leaf() {
            for s in [Site::End0, Site::End1] {
                if !seen.contains_key(&(i, s)) {
                    vertices += 1;
                    edges += 1;
                }
            }
        }
    }
    let mut uf = UnionFind::new(n + graph.junctions.len());
    let mut cycle = false;
    for (j, junction) in graph.junctions.iter().enumerate() {
        for r in &junction.at {
            if !uf.union(r.piece, n + j) {
                cycle = true;
            }
        }
    }
    let root = uf.find(0);
    let connected = (0..n + graph.junctions.len()).all(|i| uf.find(i) == root);
    if cycle || (connected && edges + 1 != vertices) {
        v.push("incidence graph has a cycle (the shrub is not simply connected)".to_string());
    }
    if !connected {
        v.push("shrub is not connected".to_string());
    }
    Diagnostics { valid: v.is_empty(), violations: v }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// Returns false when the two were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// A validated shrub with explicit junctions for every sprig end.
#[derive(Clone, Debug)]
pub struct Shrub {
    graph: ShrubGraph,
    explicit_junctions: usize,
    piece_sites: Vec<Vec<(usize, Site)>>,
}

impl Shrub {
    pub fn new(graph: ShrubGraph) -> Result<Shrub, ShrubError> {
        let d = validate(&graph);
        if !d.valid {
            return Err(ShrubError::Invalid(d.violations));
        }
        let mut graph = graph;
        let explicit_junctions = graph.junctions.len();
        let used: BTreeSet<(usize, Site)> = graph
            .junctions
            .iter()
            .flat_map(|j| j.at.iter().map(|r| (r.piece, r.site)))
            .collect();
        for i in 0..graph.pieces.len() {
            if !graph.pieces[i].is_leaf() {
                for s in [Site::End0, Site::End1] {
                    if !used.contains(&(i, s)) {
                        graph.join(&[(i, s)]);
                    }
                }
            }
        }
        let mut piece_sites = vec![Vec::new(); graph.pieces.len()];
        for (j, junction) in graph.junctions.iter().enumerate() {
            for r in &junction.at {
                piece_sites[r.piece].push((j, r.site));
            }
        }
        for s in &mut piece_sites {
            s.sort_by_key(|&(_, site)| site);
        }
        Ok(Shrub { graph, explicit_junctions, piece_sites })
    }

    pub fn from_json(text: &str) -> Result<Shrub, ShrubError> {
        Shrub::new(ShrubGraph::from_json(text)?)
    }

    /// The normalized graph, implicit tip junctions included.
    pub fn graph(&self) -> &ShrubGraph {
        &self.graph
    }

    pub fn num_pieces(&self) -> usize {
        self.graph.pieces.len()
    }

    pub fn num_junctions(&self) -> usize {
        self.graph.junctions.len()
    }

    pub fn is_leaf(&self, p: usize) -> bool {
        self.graph.pieces[p].is_leaf()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_pieces()).filter(|&p| self.is_leaf(p))
    }

    pub fn sprigs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_pieces()).filter(|&p| !self.is_leaf(p))
    }

    pub fn is_implicit(&self, j: usize) -> bool {
        j >= self.explicit_junctions
    }

    pub fn bud(&self, j: usize) -> u64 {
        self.graph.junctions[j].bud
    }

    /// Junctions on a piece: by cusp index for leaves, `[end0, end1]` for sprigs.
    pub fn piece_sites(&self, p: usize) -> &[(usize, Site)] {
        &self.piece_sites[p]
    }

    pub fn piece_junctions(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.piece_sites[p].iter().map(|&(j, _)| j)
    }

    pub fn sprig_ends(&self, p: usize) -> [usize; 2] {
        debug_assert!(!self.is_leaf(p));
        [self.piece_sites[p][0].0, self.piece_sites[p][1].0]
    }

    /// Pieces at a junction in counterclockwise order.
    pub fn junction_pieces(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.junctions[j].at.iter().map(|r| r.piece)
    }

    pub fn junction_sites(&self, j: usize) -> &[SiteRef] {
        &self.graph.junctions[j].at
    }

    pub fn site_of(&self, p: usize, j: usize) -> Option<Site> {
        self.piece_sites[p].iter().find(|&&(jj, _)| jj == j).map(|&(_, s)| s)
    }

    /// Leaf incidences count twice: a cusp contributes two boundary arcs.
    pub fn star_order(&self, j: usize) -> usize {
        self.junction_pieces(j).map(|p| if self.is_leaf(p) { 2 } else { 1 }).sum()
    }

    pub fn on_leaf(&self, j: usize) -> bool {
        self.junction_pieces(j).any(|p| self.is_leaf(p))
    }

    /// Nodes disconnect the shrub: at least two pieces meet there.
    pub fn is_node(&self, j: usize) -> bool {
        self.graph.junctions[j].at.len() >= 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_json_forms() {
        let j: Junction = serde_json::from_str(
            r#"{"bud": 4, "at": [{"piece": 0, "site": 3}, {"piece": 1, "site": "end1"}]}"#,
        )
        .unwrap();
        assert_eq!(j.at[0].site, Site::Cusp(3));
        assert_eq!(j.at[1].site, Site::End1);
        let back = serde_json::to_string(&j).unwrap();
        assert_eq!(back, r#"{"bud":4,"at":[{"piece":0,"site":3},{"piece":1,"site":"end1"}]}"#);
        assert!(serde_json::from_str::<Site>(r#""middle""#).is_err());
    }

    #[test]
    fn piece_json_forms() {
        let g = ShrubGraph::from_json(
            r#"{"pieces": [{"leaf": {"k": 6}}, {"sprig": {"from": [0, 0], "to": ["1/2", 1]}}]}"#,
        )
        .unwrap();
        assert!(matches!(&g.pieces[0], Piece::Leaf(l) if l.k == Some(6)));
        assert!(matches!(&g.pieces[1], Piece::Sprig(s) if s.to.is_some()));
    }

    #[test]
    fn implicit_tips() {
        let mut g = ShrubGraph { pieces: vec![Piece::sprig()], junctions: vec![] };
        assert!(validate(&g).valid);
        let s = Shrub::new(g.clone()).unwrap();
        assert_eq!(s.num_junctions(), 2);
        assert!(s.is_implicit(0) && s.is_implicit(1));
        g.join(&[(0, Site::End0), (0, Site::End1)]);
        assert!(!validate(&g).valid);
    }

    #[test]
    fn site_kind_errors() {
        let mut g = ShrubGraph { pieces: vec![Piece::leaf(), Piece::sprig()], junctions: vec![] };
        g.join(&[(0, Site::End0), (1, Site::Cusp(0))]);
        let d = validate(&g);
        assert!(!d.valid);
        assert_eq!(d.violations.len(), 2);
    }

    #[test]
    fn disconnected_pieces() {
        let g = ShrubGraph { pieces: vec![Piece::leaf(), Piece::leaf()], junctions: vec![] };
        let d = validate(&g);
        assert!(!d.valid);
        assert!(d.violations[0].contains("not connected"));
    }
}
