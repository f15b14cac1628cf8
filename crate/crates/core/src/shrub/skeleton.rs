use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::model::Shrub;

/// A thick arc: pieces in order, consecutive ones sharing `joints[i]`.
/// `attach` is the junction where the stem meets earlier stems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stem {
    pub pieces: Vec<usize>,
    pub joints: Vec<usize>,
    pub attach: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    pub stems: Vec<Stem>,
}

/// Longest paths through pieces not yet covered, starting anywhere for
/// the first stem and at `start` (excluded from the path) afterwards.
/// Returns (pieces, joints), shortest lexicographic sequence on ties.
fn longest_from(shrub: &Shrub, covered: &[bool], first: usize, start: Option<usize>) -> (Vec<usize>, Vec<usize>) {
    let mut best: (Vec<usize>, Vec<usize>) = (vec![first], vec![]);
    let mut stack: Vec<(Vec<usize>, Vec<usize>)> = vec![(vec![first], vec![])];
    while let Some((pieces, joints)) = stack.pop() {
        if pieces.len() > best.0.len() || (pieces.len() == best.0.len() && pieces < best.0) {
            best = (pieces.clone(), joints.clone());
        }
        let last = *pieces.last().unwrap();
        let came = joints.last().copied().or(start);
        for j in shrub.piece_junctions(last) {
            if Some(j) == came {
                continue;
            }
            for q in shrub.junction_pieces(j) {
                if q != last && !covered[q] && !pieces.contains(&q) {
                    let mut p2 = pieces.clone();
                    p2.push(q);
                    let mut j2 = joints.clone();
                    j2.push(j);
                    stack.push((p2, j2));
                }
            }
        }
    }
    best
}

/// Stems by longest path first; each later stem starts at a junction on
/// the covered part and runs as far as possible. Ties go to the
/// lexicographically smallest piece sequence.
pub fn skeleton_decompose(shrub: &Shrub) -> Skeleton {
    let n = shrub.num_pieces();
    let mut covered = vec![false; n];
    let mut stems = Vec::new();

    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for p in 0..n {
        let cand = longest_from(shrub, &covered, p, None);
        let better = match &best {
            None => true,
            Some(b) => cand.0.len() > b.0.len() || (cand.0.len() == b.0.len() && cand.0 < b.0),
        };
        if better {
            best = Some(cand);
        }
    }
    let (pieces, joints) = best.expect("shrubs have pieces");
    for &p in &pieces {
        covered[p] = true;
    }
    stems.push(Stem { pieces, joints, attach: None });

    while covered.iter().any(|c| !c) {
        let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
        for j in 0..shrub.num_junctions() {
            if !shrub.junction_pieces(j).any(|p| covered[p]) {
                continue;
            }
            for p in shrub.junction_pieces(j).filter(|&p| !covered[p]) {
                let (pieces, joints) = longest_from(shrub, &covered, p, Some(j));
                let better = match &best {
                    None => true,
                    Some(b) => pieces.len() > b.1.len() || (pieces.len() == b.1.len() && (&pieces, j) < (&b.1, b.0)),
                };
                if better {
                    best = Some((j, pieces, joints));
                }
            }
        }
        let (j, pieces, joints) = best.expect("connected shrub");
        for &p in &pieces {
            covered[p] = true;
        }
        stems.push(Stem { pieces, joints, attach: Some(j) });
    }
    Skeleton { stems }
}

/// Checks that stems partition the pieces, each stem is a path, and every
/// stem after the first meets the earlier ones exactly at its attaching
/// endpoint.
pub fn check_skeleton(shrub: &Shrub, sk: &Skeleton) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    for (i, st) in sk.stems.iter().enumerate() {
        if st.pieces.is_empty() || st.joints.len() + 1 != st.pieces.len() {
            return Err(format!("stem {i} is malformed"));
        }
        for (k, &j) in st.joints.iter().enumerate() {
            let (a, b) = (st.pieces[k], st.pieces[k + 1]);
            if shrub.site_of(a, j).is_none() || shrub.site_of(b, j).is_none() {
                return Err(format!("stem {i}: pieces {a} and {b} do not meet at junction {j}"));
            }
            if k > 0 && st.joints[k - 1] == j {
                return Err(format!("stem {i}: piece {a} is entered and left at the same point"));
            }
        }
        let mine: BTreeSet<usize> = st.pieces.iter().flat_map(|&p| shrub.piece_junctions(p)).collect();
        let common: Vec<usize> = mine.intersection(&touched).copied().collect();
        match (i, st.attach) {
            (0, None) => {}
            (_, Some(j)) if common == [j] => {
                if shrub.site_of(st.pieces[0], j).is_none() || st.joints.first() == Some(&j) {
                    return Err(format!("stem {i} does not attach at an endpoint"));
                }
            }
            _ => return Err(format!("stem {i} meets earlier stems at {common:?}")),
        }
        for &p in &st.pieces {
            if !seen.insert(p) {
                return Err(format!("piece {p} is in two stems"));
            }
        }
        touched.extend(mine);
    }
    if seen.len() != shrub.num_pieces() {
        return Err("stems do not cover the shrub".into());
    }
    Ok(())
}
