use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::analysis::{classify_piece, find_odd_cactuses, p_a, PieceClass};
use super::model::Shrub;
use super::ShrubError;

/// A node (junction index) or a piece (piece index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Node(usize),
    Piece(usize),
}

/// Counterclockwise list of an even number `2r` of incident elements;
/// entries `i` and `i + r` are opposed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub element: Element,
    pub cyclic: Vec<Element>,
}

impl Orientation {
    pub fn contains(&self, e: Element) -> bool {
        self.cyclic.contains(&e)
    }

    pub fn opposed(&self, e: Element) -> Option<Element> {
        let r = self.cyclic.len() / 2;
        let i = self.cyclic.iter().position(|&x| x == e)?;
        Some(self.cyclic[(i + r) % self.cyclic.len()])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    /// No endpoint of the sprig is in `P_A`.
    #[serde(rename = "i")]
    NoNode,
    /// The sprig is a stub of a complete oriented chain.
    #[serde(rename = "ii")]
    Stub,
    /// The sprig is a link of a complete oriented chain.
    #[serde(rename = "iii")]
    Link,
}

/// Witness for one sprig. For `Stub` the chain starts at the node carrying
/// the sprig; a one-element chain is the degenerate case of a node whose
/// opposed pair is two stubs. `stubs` lists the stubs at the chain ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SprigWitness {
    pub sprig: usize,
    pub alternative: Alternative,
    pub chain: Vec<Element>,
    pub stubs: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationCertificate {
    pub orientations: Vec<Orientation>,
    pub sprigs: Vec<SprigWitness>,
}

impl OrientationCertificate {
    pub fn orientation_of(&self, e: Element) -> Option<&Orientation> {
        self.orientations.iter().find(|o| o.element == e)
    }
}

/// Rigid pieces at every node of `P_A`, in counterclockwise order.
pub(crate) fn rigid_at_nodes(shrub: &Shrub) -> Result<BTreeMap<usize, Vec<usize>>, ShrubError> {
    let mut out = BTreeMap::new();
    for v in p_a(shrub) {
        let mut rigid = Vec::new();
        for e in shrub.junction_pieces(v) {
            if classify_piece(shrub, v, e)? == PieceClass::Rigid {
                rigid.push(e);
            }
        }
        out.insert(v, rigid);
    }
    Ok(out)
}

/// Orientations for every orientable node and piece, with a witness for
/// each sprig. In a finite shrub nothing is flexible, so each orientation
/// is exactly the set of rigid elements.
pub fn orient_all(shrub: &Shrub) -> Result<OrientationCertificate, ShrubError> {
    if let Some(c) = find_odd_cactuses(shrub).into_iter().find(|c| c.odd) {
        return Err(ShrubError::NotVerySimple { leaves: c.leaves });
    }
    let rigid = rigid_at_nodes(shrub)?;
    let mut orient: BTreeMap<Element, Orientation> = BTreeMap::new();
    for (&v, r) in &rigid {
        if r.is_empty() {
            continue;
        }
        if r.len() % 2 == 1 {
            return Err(ShrubError::Unorientable { element: format!("node {v}"), rigid: r.len() });
        }
        let e = Element::Node(v);
        orient.insert(e, Orientation { element: e, cyclic: r.iter().map(|&p| Element::Piece(p)).collect() });
    }
    for p in 0..shrub.num_pieces() {
        let nodes: Vec<usize> = shrub.piece_junctions(p).filter(|v| rigid.contains_key(v)).collect();
        if !shrub.is_leaf(p) && nodes.len() < 2 {
            continue;
        }
        let rn: Vec<usize> = nodes
            .into_iter()
            .filter(|v| rigid[v].iter().filter(|&&q| q != p).count() % 2 == 1)
            .collect();
        if rn.is_empty() {
            continue;
        }
        if rn.len() % 2 == 1 {
            return Err(ShrubError::Unorientable { element: format!("piece {p}"), rigid: rn.len() });
        }
        let e = Element::Piece(p);
        orient.insert(e, Orientation { element: e, cyclic: rn.iter().map(|&v| Element::Node(v)).collect() });
    }

    let is_stub_from = |s: usize, v: usize| -> bool {
        let [a, b] = shrub.sprig_ends(s);
        let other = if a == v { b } else { a };
        !rigid.contains_key(&other)
    };
    // Follow opposed elements from the link `prev → cur` until a stub.
    let extend = |mut prev: Element, mut cur: Element| -> Result<(Vec<Element>, usize), ShrubError> {
        let mut out = Vec::new();
        for _ in 0..=2 * (shrub.num_pieces() + shrub.num_junctions()) {
            let f = orient.get(&cur).ok_or_else(|| ShrubError::BrokenChain(format!("{cur:?} has no orientation")))?;
            let nxt = f
                .opposed(prev)
                .ok_or_else(|| ShrubError::BrokenChain(format!("{prev:?} is not in the orientation of {cur:?}")))?;
            if let (Element::Node(v), Element::Piece(s)) = (cur, nxt) {
                if !shrub.is_leaf(s) && is_stub_from(s, v) {
                    return Ok((out, s));
                }
            }
            match orient.get(&nxt) {
                Some(g) if g.contains(cur) => {}
                _ => return Err(ShrubError::BrokenChain(format!("{nxt:?} is not oriented towards {cur:?}"))),
            }
            out.push(nxt);
            prev = cur;
            cur = nxt;
        }
        Err(ShrubError::BrokenChain("chain does not terminate".into()))
    };

    let mut sprigs = Vec::new();
    for s in shrub.sprigs() {
        let [a, b] = shrub.sprig_ends(s);
        let (ina, inb) = (rigid.contains_key(&a), rigid.contains_key(&b));
        let l = Element::Piece(s);
        let w = match (ina, inb) {
            (false, false) => SprigWitness { sprig: s, alternative: Alternative::NoNode, chain: vec![], stubs: vec![] },
            (true, false) | (false, true) => {
                let v = if ina { a } else { b };
                let (rest, stub) = extend(l, Element::Node(v))?;
                let mut chain = vec![Element::Node(v)];
                chain.extend(rest);
                SprigWitness { sprig: s, alternative: Alternative::Stub, chain, stubs: vec![s, stub] }
            }
            (true, true) => {
                let (back, sa) = extend(l, Element::Node(a))?;
                let (fwd, sb) = extend(l, Element::Node(b))?;
                let mut chain: Vec<Element> = back.into_iter().rev().collect();
                chain.extend([Element::Node(a), l, Element::Node(b)]);
                chain.extend(fwd);
                SprigWitness { sprig: s, alternative: Alternative::Link, chain, stubs: vec![sa, sb] }
            }
        };
        sprigs.push(w);
    }
    Ok(OrientationCertificate { orientations: orient.into_values().collect(), sprigs })
}

#[cfg(test)]
mod tests {
    use super::super::model::{Piece, ShrubGraph, Site};
    use super::*;

    #[test]
    fn two_dangling_sprigs() {
        let mut g = ShrubGraph { pieces: vec![Piece::sprig(), Piece::sprig()], junctions: vec![] };
        let v = g.join(&[(0, Site::End0), (1, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        let c = orient_all(&s).unwrap();
        assert_eq!(c.orientations.len(), 1);
        assert_eq!(c.orientations[0].cyclic, vec![Element::Piece(0), Element::Piece(1)]);
        for w in &c.sprigs {
            assert_eq!(w.alternative, Alternative::Stub);
            assert_eq!(w.chain, vec![Element::Node(v)]);
        }
    }

    #[test]
    fn sprig_between_nodes() {
        // tip – s0 – a – s1 – b – s2 – tip, with s3 also at b and s4 at a
        let mut g = ShrubGraph { pieces: vec![Piece::sprig(); 5], junctions: vec![] };
        let a = g.join(&[(0, Site::End1), (1, Site::End0), (4, Site::End0)]);
        let b = g.join(&[(1, Site::End1), (2, Site::End0), (3, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        // a and b have odd order 3 and are odd buds, so nothing is oriented
        let c = orient_all(&s).unwrap();
        assert!(c.orientations.is_empty());
        assert!(c.sprigs.iter().all(|w| w.alternative == Alternative::NoNode));
        let _ = (a, b);

        let mut g = ShrubGraph { pieces: vec![Piece::sprig(); 5], junctions: vec![] };
        let a = g.join(&[(0, Site::End1), (1, Site::End0)]);
        let b = g.join(&[(1, Site::End1), (2, Site::End0), (3, Site::End0), (4, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        let c = orient_all(&s).unwrap();
        let f = c.orientation_of(Element::Piece(1)).unwrap();
        assert_eq!(f.cyclic, vec![Element::Node(a), Element::Node(b)]);
        let w = &c.sprigs[1];
        assert_eq!(w.alternative, Alternative::Link);
        assert_eq!(w.chain, vec![Element::Node(a), Element::Piece(1), Element::Node(b)]);
        assert_eq!(w.stubs, vec![0, 3]);
    }

    #[test]
    fn odd_cactus_is_rejected() {
        let mut g = ShrubGraph { pieces: vec![Piece::leaf(), Piece::sprig()], junctions: vec![] };
        g.join(&[(0, Site::Cusp(0)), (1, Site::End0)]);
        let s = Shrub::new(g).unwrap();
        assert!(matches!(orient_all(&s), Err(ShrubError::NotVerySimple { .. })));
    }

    #[test]
    fn opposed_lookup() {
        let o = Orientation {
            element: Element::Node(0),
            cyclic: vec![Element::Piece(3), Element::Piece(5), Element::Piece(7), Element::Piece(9)],
        };
        assert_eq!(o.opposed(Element::Piece(5)), Some(Element::Piece(9)));
        assert_eq!(o.opposed(Element::Piece(1)), None);
    }
}
