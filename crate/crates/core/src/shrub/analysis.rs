use serde::{Deserialize, Serialize};

use super::model::{Shrub, Site, UnionFind};
use super::ShrubError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudInfo {
    pub junction: usize,
    pub bud: u64,
    /// Star order of the point in the shrub boundary.
    pub order: usize,
    pub on_leaf: bool,
    pub odd_bud: bool,
    pub node: bool,
    pub tip: bool,
}

/// Star orders and flags for every junction. Every junction of a finite shrub
/// is a star point, so the "not a star point" clause of the odd-bud
/// definition never fires here.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudClassification {
    pub buds: Vec<BudInfo>,
}

impl BudClassification {
    pub fn odd_buds(&self) -> impl Iterator<Item = &BudInfo> {
        self.buds.iter().filter(|b| b.odd_bud)
    }
}

pub fn classify_buds(shrub: &Shrub) -> BudClassification {
    let buds = (0..shrub.num_junctions())
        .map(|j| {
            let order = shrub.star_order(j);
            let on_leaf = shrub.on_leaf(j);
            let node = shrub.is_node(j);
            BudInfo {
                junction: j,
                bud: shrub.bud(j),
                order,
                on_leaf,
                odd_bud: !on_leaf && order % 2 == 1,
                node,
                tip: !on_leaf && !node,
            }
        })
        .collect();
    BudClassification { buds }
}

/// Maximal connected union of leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cactus {
    pub leaves: Vec<usize>,
    /// Number of sprig ends attached to the cactus.
    pub sprig_attachments: usize,
    pub odd: bool,
}

/// Cactuses of the sub-shrub made of the pieces with `mask[p]` set.
pub(crate) fn cactuses_within(shrub: &Shrub, mask: &[bool]) -> Vec<Cactus> {
    let n = shrub.num_pieces();
    let mut uf = UnionFind::new(n);
    let mut attach = vec![0usize; n];
    for j in 0..shrub.num_junctions() {
        let inside: Vec<usize> = shrub.junction_pieces(j).filter(|&p| mask[p]).collect();
        let leaves: Vec<usize> = inside.iter().copied().filter(|&p| shrub.is_leaf(p)).collect();
        for w in leaves.windows(2) {
            uf.union(w[0], w[1]);
        }
        if let Some(&first) = leaves.first() {
            attach[first] += inside.len() - leaves.len();
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Cactus> = Default::default();
    for p in 0..n {
        if mask[p] && shrub.is_leaf(p) {
            let r = uf.find(p);
            let c = by_root.entry(r).or_insert(Cactus { leaves: vec![], sprig_attachments: 0, odd: false });
            c.leaves.push(p);
            c.sprig_attachments += attach[p];
        }
    }
    let mut out: Vec<Cactus> = by_root.into_values().collect();
    for c in &mut out {
        c.odd = c.sprig_attachments % 2 == 1;
    }
    out.sort_by_key(|c| c.leaves[0]);
    out
}

/// All maximal cactuses, each flagged odd when an odd number of sprigs
/// emanate from it.
pub fn find_odd_cactuses(shrub: &Shrub) -> Vec<Cactus> {
    cactuses_within(shrub, &vec![true; shrub.num_pieces()])
}

pub fn is_very_simple(shrub: &Shrub) -> bool {
    find_odd_cactuses(shrub).iter().all(|c| !c.odd)
}

/// Nodes that are not odd buds.
pub fn p_a(shrub: &Shrub) -> Vec<usize> {
    classify_buds(shrub).buds.iter().filter(|b| b.node && !b.odd_bud).map(|b| b.junction).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctureKind {
    OddBud,
    CactusRepresentative,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Puncture {
    pub kind: PunctureKind,
    pub piece: usize,
    pub site: Site,
    /// The junction at this point, if there is one.
    pub junction: Option<usize>,
}

/// Odd buds plus cusp 0 of the lowest-index leaf of every odd cactus.
pub fn required_puncture_set(shrub: &Shrub) -> Vec<Puncture> {
    let mut out = Vec::new();
    for b in classify_buds(shrub).odd_buds() {
        let r = shrub.junction_sites(b.junction)[0];
        out.push(Puncture { kind: PunctureKind::OddBud, piece: r.piece, site: r.site, junction: Some(b.junction) });
    }
    for c in find_odd_cactuses(shrub).into_iter().filter(|c| c.odd) {
        let leaf = c.leaves[0];
        out.push(Puncture {
            kind: PunctureKind::CactusRepresentative,
            piece: leaf,
            site: Site::Cusp(0),
            junction: shrub.site_of_leaf_cusp(leaf, 0),
        });
    }
    out
}

impl Shrub {
    pub(crate) fn site_of_leaf_cusp(&self, leaf: usize, cusp: u32) -> Option<usize> {
        self.piece_sites(leaf).iter().find(|&&(_, s)| s == Site::Cusp(cusp)).map(|&(j, _)| j)
    }
}

/// Pieces reachable from `e` without passing through junction `j`.
pub(crate) fn branch(shrub: &Shrub, j: usize, e: usize) -> Vec<bool> {
    let mut mask = vec![false; shrub.num_pieces()];
    let mut stack = vec![e];
    mask[e] = true;
    while let Some(p) = stack.pop() {
        for jj in shrub.piece_junctions(p) {
            if jj == j {
                continue;
            }
            for q in shrub.junction_pieces(jj) {
                if !mask[q] {
                    mask[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    mask
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceClass {
    Rigid,
    /// Needs an infinite chain of leaves; never produced for finite shrubs.
    Flexible,
    Bland,
}

/// Rigid when `e` is a sprig or the part of the shrub beyond `j` through `e`
/// contains an odd cactus; bland otherwise.
pub fn classify_piece(shrub: &Shrub, j: usize, e: usize) -> Result<PieceClass, ShrubError> {
    if j >= shrub.num_junctions() || e >= shrub.num_pieces() || shrub.site_of(e, j).is_none() {
        return Err(ShrubError::NotIncident { junction: j, piece: e });
    }
    if !shrub.is_leaf(e) {
        return Ok(PieceClass::Rigid);
    }
    let mask = branch(shrub, j, e);
    if cactuses_within(shrub, &mask).iter().any(|c| c.odd) {
        Ok(PieceClass::Rigid)
    } else {
        Ok(PieceClass::Bland)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub sum_of_orders: usize,
    pub edges: usize,
    pub even: bool,
    /// Sum of orders equals twice the edge count.
    pub handshake: bool,
}

/// Sum of vertex orders (loops count twice) against twice the edge count.
pub fn parity_check(g: &SimpleGraph) -> ParityReport {
    let mut order = vec![0usize; g.vertices];
    for &(a, b) in &g.edges {
        order[a] += 1;
        order[b] += 1;
    }
    let sum: usize = order.iter().sum();
    ParityReport { sum_of_orders: sum, edges: g.edges.len(), even: sum % 2 == 0, handshake: sum == 2 * g.edges.len() }
}

/// The shrub boundary as a graph on junctions: sprigs are edges, and each leaf
/// boundary contributes the arcs between consecutive cusp junctions. A leaf
/// with no junctions gets an extra vertex carrying a loop.
pub fn boundary_graph(shrub: &Shrub) -> SimpleGraph {
    let mut g = SimpleGraph { vertices: shrub.num_junctions(), edges: vec![] };
    for p in 0..shrub.num_pieces() {
        let js: Vec<usize> = shrub.piece_junctions(p).collect();
        if !shrub.is_leaf(p) {
            g.edges.push((js[0], js[1]));
        } else if js.is_empty() {
            g.edges.push((g.vertices, g.vertices));
            g.vertices += 1;
        } else {
            for i in 0..js.len() {
                g.edges.push((js[i], js[(i + 1) % js.len()]));
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityInvariant {
    pub odd_buds: usize,
    pub odd_cactuses: usize,
    /// Odd-degree vertices of the sprig graph with every cactus contracted.
    pub contracted_odd_vertices: usize,
    pub consistent: bool,
    pub even: bool,
}

/// Compares `#odd buds + #odd cactuses` with a recount on the sprig graph
/// whose vertices are off-leaf junctions and contracted cactuses; the
/// handshake lemma makes the recount even.
pub fn parity_invariant(shrub: &Shrub) -> ParityInvariant {
    let odd_buds = classify_buds(shrub).odd_buds().count();
    let odd_cactuses = find_odd_cactuses(shrub).iter().filter(|c| c.odd).count();

    let n = shrub.num_pieces();
    let nj = shrub.num_junctions();
    // vertex ids: junction j, or n_j + root leaf for leaf-bearing junctions
    let mut uf = UnionFind::new(n);
    for j in 0..nj {
        let leaves: Vec<usize> = shrub.junction_pieces(j).filter(|&p| shrub.is_leaf(p)).collect();
        for w in leaves.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut vertex_of = vec![0usize; nj];
    for (j, v) in vertex_of.iter_mut().enumerate() {
        *v = match shrub.junction_pieces(j).find(|&p| shrub.is_leaf(p)) {
            Some(leaf) => nj + uf.find(leaf),
            None => j,
        };
    }
    let mut g = SimpleGraph { vertices: nj + n, edges: vec![] };
    for p in shrub.sprigs() {
        let [a, b] = shrub.sprig_ends(p);
        g.edges.push((vertex_of[a], vertex_of[b]));
    }
    let mut deg = vec![0usize; g.vertices];
    for &(a, b) in &g.edges {
        deg[a] += 1;
        deg[b] += 1;
    }
    let contracted_odd_vertices = deg.iter().filter(|&&d| d % 2 == 1).count();
    let report = parity_check(&g);
    ParityInvariant {
        odd_buds,
        odd_cactuses,
        contracted_odd_vertices,
        consistent: report.handshake && odd_buds + odd_cactuses == contracted_odd_vertices,
        even: (odd_buds + odd_cactuses) % 2 == 0,
    }
}
