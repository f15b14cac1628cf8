//! Independent verification of orientation certificates.
//!
//! Everything is recomputed from the raw junction lists: no helper from the
//! analysis or orientation code is reused.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::model::Shrub;
use super::orient::{Alternative, Element, Orientation, OrientationCertificate};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub problems: Vec<String>,
}

struct Raw {
    leaf: Vec<bool>,
    /// pieces at each junction, in file order
    at: Vec<Vec<usize>>,
    /// junctions on each piece, in site order
    on: Vec<Vec<usize>>,
}

impl Raw {
    fn new(shrub: &Shrub) -> Raw {
        let g = shrub.graph();
        let at: Vec<Vec<usize>> = g.junctions.iter().map(|j| j.at.iter().map(|r| r.piece).collect()).collect();
        let mut on: Vec<Vec<(super::model::Site, usize)>> = vec![Vec::new(); g.pieces.len()];
        for (j, junction) in g.junctions.iter().enumerate() {
            for r in &junction.at {
                on[r.piece].push((r.site, j));
            }
        }
        let on = on
            .into_iter()
            .map(|mut v| {
                v.sort();
                v.into_iter().map(|(_, j)| j).collect()
            })
            .collect();
        Raw { leaf: g.pieces.iter().map(|p| p.is_leaf()).collect(), at, on }
    }

    fn in_pa(&self, j: usize) -> bool {
        let pcs = &self.at[j];
        if pcs.len() < 2 {
            return false;
        }
        let leafy = pcs.iter().any(|&p| self.leaf[p]);
        leafy || pcs.len() % 2 == 0
    }

    /// Does the part beyond `v` through piece `e` contain a cactus with an
    /// odd number of sprig ends?
    fn odd_beyond(&self, v: usize, e: usize) -> bool {
        let mut reach: HashSet<usize> = HashSet::from([e]);
        let mut queue = vec![e];
        while let Some(p) = queue.pop() {
            for &j in &self.on[p] {
                if j != v {
                    for &q in &self.at[j] {
                        if reach.insert(q) {
                            queue.push(q);
                        }
                    }
                }
            }
        }
        let leaf_in = |p: usize| reach.contains(&p) && self.leaf[p];
        let mut seen: HashSet<usize> = HashSet::new();
        for &start in reach.iter().filter(|&&p| self.leaf[p]) {
            if !seen.insert(start) {
                continue;
            }
            // grow the cactus around `start` and tally its sprig ends
            let mut members = vec![start];
            let mut junctions: BTreeSet<usize> = BTreeSet::new();
            let mut i = 0;
            while i < members.len() {
                let p = members[i];
                i += 1;
                for &j in &self.on[p] {
                    junctions.insert(j);
                    for &q in &self.at[j] {
                        if leaf_in(q) && seen.insert(q) {
                            members.push(q);
                        }
                    }
                }
            }
            let sprigs: usize = junctions
                .iter()
                .map(|&j| self.at[j].iter().filter(|&&q| reach.contains(&q) && !self.leaf[q]).count())
                .sum();
            if sprigs % 2 == 1 {
                return true;
            }
        }
        false
    }
}

fn same_cyclic_order(got: &[Element], want: &[Element]) -> bool {
    if got.len() != want.len() {
        return false;
    }
    if got.is_empty() {
        return true;
    }
    let Some(s) = want.iter().position(|&x| x == got[0]) else { return false };
    (0..got.len()).all(|i| got[i] == want[(s + i) % want.len()])
}

pub fn check_certificate(shrub: &Shrub, cert: &OrientationCertificate) -> CheckReport {
    let raw = Raw::new(shrub);
    let mut problems = Vec::new();
    let nj = raw.at.len();
    let np = raw.leaf.len();

    let mut rigid_at: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in (0..nj).filter(|&v| raw.in_pa(v)) {
        let r: Vec<usize> = raw.at[v].iter().copied().filter(|&e| !raw.leaf[e] || raw.odd_beyond(v, e)).collect();
        rigid_at.insert(v, r);
    }

    let mut expected: BTreeMap<Element, Vec<Element>> = BTreeMap::new();
    for (&v, r) in &rigid_at {
        if !r.is_empty() {
            expected.insert(Element::Node(v), r.iter().map(|&p| Element::Piece(p)).collect());
        }
    }
    for p in 0..np {
        let nodes: Vec<usize> = raw.on[p].iter().copied().filter(|v| rigid_at.contains_key(v)).collect();
        if !raw.leaf[p] && nodes.len() != 2 {
            continue;
        }
        let rn: Vec<Element> = nodes
            .into_iter()
            .filter(|v| rigid_at[v].iter().filter(|&&q| q != p).count() % 2 == 1)
            .map(Element::Node)
            .collect();
        if !rn.is_empty() {
            expected.insert(Element::Piece(p), rn);
        }
    }

    let mut given: BTreeMap<Element, &Orientation> = BTreeMap::new();
    for o in &cert.orientations {
        if given.insert(o.element, o).is_some() {
            problems.push(format!("{:?} has two orientations", o.element));
        }
        if o.cyclic.len() < 2 || o.cyclic.len() % 2 == 1 {
            problems.push(format!("{:?}: orientation size {} is not even and positive", o.element, o.cyclic.len()));
        }
    }
    for (e, want) in &expected {
        match given.get(e) {
            None => problems.push(format!("{e:?} should be oriented by {want:?}")),
            Some(o) => {
                let mut a = o.cyclic.clone();
                let mut b = want.clone();
                a.sort();
                b.sort();
                if a != b {
                    problems.push(format!("{e:?}: orientation {:?} is not the rigid set {want:?}", o.cyclic));
                } else if !same_cyclic_order(&o.cyclic, want) {
                    problems.push(format!("{e:?}: orientation {:?} is not counterclockwise", o.cyclic));
                }
            }
        }
    }
    for e in given.keys() {
        if !expected.contains_key(e) {
            problems.push(format!("{e:?} is oriented but has no rigid elements"));
        }
    }

    let opp = |g: &Element, x: Element| -> Option<Element> {
        let o = given.get(g)?;
        let i = o.cyclic.iter().position(|&y| y == x)?;
        Some(o.cyclic[(i + o.cyclic.len() / 2) % o.cyclic.len()])
    };
    let holds = |g: &Element, x: Element| given.get(g).is_some_and(|o| o.cyclic.contains(&x));
    let linked = |a: Element, b: Element| match (a, b) {
        (Element::Node(v), Element::Piece(p)) | (Element::Piece(p), Element::Node(v)) => raw.on[p].contains(&v),
        _ => false,
    };
    let stub_at = |v: usize, x: Option<Element>| -> Option<usize> {
        let Some(Element::Piece(s)) = x else { return None };
        if raw.leaf[s] || !raw.on[s].contains(&v) {
            return None;
        }
        let other = raw.on[s].iter().copied().find(|&j| j != v)?;
        (!rigid_at.contains_key(&other)).then_some(s)
    };

    let sprigs: Vec<usize> = (0..np).filter(|&p| !raw.leaf[p]).collect();
    let mut witnessed = HashSet::new();
    for w in &cert.sprigs {
        let s = w.sprig;
        if s >= np || raw.leaf[s] {
            problems.push(format!("witness for non-sprig {s}"));
            continue;
        }
        witnessed.insert(s);
        let ends = &raw.on[s];
        let nodes_in = ends.iter().filter(|v| rigid_at.contains_key(v)).count();
        let chain = &w.chain;
        let bad = |msg: &str| format!("sprig {s} ({:?}): {msg}", w.alternative);
        match w.alternative {
            Alternative::NoNode => {
                if nodes_in != 0 {
                    problems.push(bad("an endpoint is in P_A"));
                }
                continue;
            }
            Alternative::Stub | Alternative::Link => {}
        }
        let distinct: HashSet<&Element> = chain.iter().collect();
        if chain.is_empty() || distinct.len() != chain.len() {
            problems.push(bad("chain is empty or repeats an element"));
            continue;
        }
        if chain.iter().any(|e| !given.contains_key(e)) {
            problems.push(bad("chain has an unoriented link"));
            continue;
        }
        if chain.windows(2).any(|p| !linked(p[0], p[1])) {
            problems.push(bad("consecutive links are not incident"));
            continue;
        }
        let n = chain.len();
        let (first, last) = (chain[0], chain[n - 1]);
        let (Element::Node(v0), Element::Node(v1)) = (first, last) else {
            problems.push(bad("chain does not start and end at nodes"));
            continue;
        };
        let ends_stubs = if n == 1 {
            // both members of one opposed pair at v0 are stubs
            let o = given[&first];
            let r = o.cyclic.len() / 2;
            (0..r)
                .filter_map(|i| Some((stub_at(v0, Some(o.cyclic[i]))?, stub_at(v0, Some(o.cyclic[i + r]))?)))
                .find(|&(a, b)| a == s || b == s)
        } else {
            let oriented = holds(&first, chain[1])
                && holds(&last, chain[n - 2])
                && (1..n - 1).all(|i| {
                    holds(&chain[i], chain[i - 1]) && opp(&chain[i], chain[i - 1]) == Some(chain[i + 1])
                });
            if !oriented {
                problems.push(bad("chain is not oriented"));
                continue;
            }
            match (stub_at(v0, opp(&first, chain[1])), stub_at(v1, opp(&last, chain[n - 2]))) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            }
        };
        let Some((sa, sb)) = ends_stubs else {
            problems.push(bad("chain is not complete"));
            continue;
        };
        let ok = match w.alternative {
            Alternative::Stub => sa == s || sb == s,
            Alternative::Link => n >= 3 && chain.contains(&Element::Piece(s)),
            Alternative::NoNode => unreachable!(),
        };
        if !ok {
            problems.push(bad("sprig plays no role in its chain"));
        }
        if w.stubs != [sa, sb] && w.stubs != [sb, sa] && n > 1 {
            problems.push(bad("recorded stubs differ from the chain ends"));
        }
    }
    for s in sprigs {
        if !witnessed.contains(&s) {
            problems.push(format!("sprig {s} has no alternative"));
        }
    }
    CheckReport { ok: problems.is_empty(), problems }
}

#[cfg(test)]
mod tests {
    use super::super::model::{Piece, ShrubGraph, Site};
    use super::super::orient::orient_all;
    use super::*;

    fn chain_shrub() -> Shrub {
        let mut g = ShrubGraph { pieces: vec![Piece::sprig(), Piece::leaf(), Piece::sprig()], junctions: vec![] };
        g.join(&[(0, Site::End1), (1, Site::Cusp(0))]);
        g.join(&[(1, Site::Cusp(1)), (2, Site::End0)]);
        Shrub::new(g).unwrap()
    }

    #[test]
    fn accepts_orient_all() {
        let s = chain_shrub();
        let c = orient_all(&s).unwrap();
        let r = check_certificate(&s, &c);
        assert!(r.ok, "{:?}", r.problems);
    }

    #[test]
    fn rejects_tampering() {
        let s = chain_shrub();
        let mut c = orient_all(&s).unwrap();
        c.orientations.pop();
        assert!(!check_certificate(&s, &c).ok);

        let mut c = orient_all(&s).unwrap();
        c.sprigs[0].alternative = Alternative::NoNode;
        assert!(!check_certificate(&s, &c).ok);

        let mut c = orient_all(&s).unwrap();
        c.sprigs.pop();
        assert!(!check_certificate(&s, &c).ok);

        let mut c = orient_all(&s).unwrap();
        c.orientations[0].cyclic.reverse();
        c.orientations[0].cyclic.push(Element::Piece(0));
        assert!(!check_certificate(&s, &c).ok);
    }
}
