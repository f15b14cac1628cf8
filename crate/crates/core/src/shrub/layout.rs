use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curves::{cusps, param_point, Affine2, AffineRecord};
use crate::io::Exact;
use crate::poly::{rational_from_f64, rational_to_f64, Coeff, Rational};

use super::model::{LeafSpec, Piece, Shrub, ShrubGraph, Site, SprigSpec};
use super::orient::{Alternative, Element, OrientationCertificate};
use super::ShrubError;

/// Where the piece containing ∞ goes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootChoice {
    /// First piece at a fixed place: standard hypocycloid or `[−1,1]×{0}`.
    Canonical,
    /// This leaf becomes the exterior of the unit circle.
    Frame(usize),
    /// This sprig runs from `(1,0)` to ∞; `infinite_end` must be a free tip.
    Ray { sprig: usize, infinite_end: Site },
    /// A ray on the lowest free tip of a real sprig, else a frame.
    Auto,
}

#[derive(Clone, Debug)]
pub struct LayoutOptions {
    pub root: RootChoice,
    /// Scaffolding pieces: oriented with the rest but never drawn.
    pub virtual_pieces: BTreeSet<usize>,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { root: RootChoice::Canonical, virtual_pieces: BTreeSet::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Placement {
    /// `affine` applied to the standard k-cusped hypocycloid.
    Hypocycloid { k: u32, affine: Affine2 },
    /// Exterior of the circle `|z| = radius` about the origin. Cusp `j` is
    /// the point at angle `−2πj/k`, so indices run along the positive
    /// boundary direction of the exterior region.
    Frame { k: u32, radius: Rational },
    Segment { from: [Rational; 2], to: [Rational; 2] },
    /// From `from` to ∞ along `direction`; `from` is the end0 point.
    Ray { from: [Rational; 2], direction: [Rational; 2] },
    Virtual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStyle {
    Canonical,
    Frame { leaf: usize },
    Ray { sprig: usize },
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub root: RootStyle,
    pub placements: Vec<Placement>,
    /// Junction positions; `None` for the tip at ∞.
    pub points: Vec<Option<[Rational; 2]>>,
    /// Per leaf: file cusp index to placed cusp index.
    pub cusp_maps: BTreeMap<usize, BTreeMap<u32, u32>>,
    /// Scale factor that passed the overlap check.
    pub shrink: f64,
}

fn ex(v: f64) -> Rational {
    rational_from_f64(v).expect("finite coordinate")
}

fn ex2(p: [f64; 2]) -> [Rational; 2] {
    [ex(p[0]), ex(p[1])]
}

fn fl2(p: &[Rational; 2]) -> [f64; 2] {
    [rational_to_f64(&p[0]), rational_to_f64(&p[1])]
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Point of the circle of radius `r` near angle `phi`, with exact rational
/// coordinates lying exactly on the circle.
fn circle_point(r: &Rational, phi: f64) -> [Rational; 2] {
    let one = Rational::from_i64(1);
    let two = Rational::from_i64(2);
    if (wrap(phi) - PI).abs() < 1e-9 || (wrap(phi) + PI).abs() < 1e-9 {
        return [-r.clone(), Rational::from_i64(0)];
    }
    let t = ex((phi / 2.0).tan());
    let d = &one + &t * &t;
    [r * (&one - &t * &t) / &d, r * &two * &t / &d]
}

impl Placement {
    /// Boundary samples; leaves are closed polylines through every cusp.
    pub fn sample(&self, per_cusp: usize) -> Vec<[f64; 2]> {
        match self {
            Placement::Hypocycloid { k, affine } => {
                let n = *k as usize * per_cusp;
                (0..n)
                    .map(|i| affine.apply(param_point(*k, TAU * i as f64 / n as f64).expect("k ≥ 3")))
                    .collect()
            }
            Placement::Frame { k, radius } => {
                let r = rational_to_f64(radius);
                let n = *k as usize * per_cusp;
                (0..n).map(|i| {
                    let a = -TAU * i as f64 / n as f64;
                    [r * a.cos(), r * a.sin()]
                })
                .collect()
            }
            Placement::Segment { from, to } => vec![fl2(from), fl2(to)],
            Placement::Ray { from, direction } => {
                let p = fl2(from);
                let d = fl2(direction);
                let n = d[0].hypot(d[1]);
                vec![p, [p[0] + 1e3 * d[0] / n, p[1] + 1e3 * d[1] / n]]
            }
            Placement::Virtual => vec![],
        }
    }

    fn is_region(&self) -> bool {
        matches!(self, Placement::Hypocycloid { .. } | Placement::Frame { .. })
    }

    /// Whether `p` is strictly inside the region of a leaf.
    pub fn contains(&self, p: [f64; 2], poly: &[[f64; 2]]) -> bool {
        match self {
            Placement::Frame { radius, .. } => p[0].hypot(p[1]) > rational_to_f64(radius),
            Placement::Hypocycloid { .. } => point_in_polygon(p, poly),
            _ => false,
        }
    }
}

pub(crate) fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn seg_seg_dist(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let cross = |o: [f64; 2], p: [f64; 2], q: [f64; 2]| (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
    let (d1, d2, d3, d4) = (cross(c, d, a), cross(c, d, b), cross(a, b, c), cross(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return 0.0;
    }
    let pt_seg = |p: [f64; 2], s: [f64; 2], e: [f64; 2]| {
        let v = [e[0] - s[0], e[1] - s[1]];
        let l2 = v[0] * v[0] + v[1] * v[1];
        let t = if l2 > 0.0 { (((p[0] - s[0]) * v[0] + (p[1] - s[1]) * v[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
        dist(p, [s[0] + t * v[0], s[1] + t * v[1]])
    };
    pt_seg(a, c, d).min(pt_seg(b, c, d)).min(pt_seg(c, a, b)).min(pt_seg(d, a, b))
}

struct LeafCusps {
    k: u32,
    by_junction: BTreeMap<usize, u32>,
}

/// Cusp numbers for a leaf: oriented nodes evenly spaced so opposed nodes
/// land on opposed cusps, other junctions spread through the gaps.
fn assign_cusps(shrub: &Shrub, leaf: usize, oriented: Option<&Vec<usize>>) -> Result<LeafCusps, ShrubError> {
    let sites: Vec<usize> = shrub.piece_junctions(leaf).collect();
    let min_k = match &shrub.graph().pieces[leaf] {
        Piece::Leaf(LeafSpec { k: Some(k), .. }) => *k,
        _ => 4,
    };
    let mut by_junction = BTreeMap::new();
    let even_up = |v: u32| v + v % 2;
    let k = match oriented {
        Some(o) if !o.is_empty() => {
            let two_r = o.len();
            let pos: Vec<usize> = o
                .iter()
                .map(|v| sites.iter().position(|s| s == v).expect("oriented node on leaf"))
                .collect();
            // gaps between consecutive oriented nodes in cusp order
            let start = pos[0];
            let mut gaps: Vec<Vec<usize>> = vec![Vec::new(); two_r];
            let mut t = 0usize;
            for step in 1..=sites.len() {
                let i = (start + step) % sites.len();
                if i == start {
                    break;
                }
                if t + 1 < two_r && i == pos[t + 1] {
                    t += 1;
                } else {
                    gaps[t].push(sites[i]);
                }
            }
            let g = gaps.iter().map(|x| x.len() as u32 + 1).max().unwrap_or(1);
            let mut g = g.max(1);
            while (two_r as u32 * g) < min_k.max(4) {
                g += 1;
            }
            let k = two_r as u32 * g;
            for (t, v) in o.iter().enumerate() {
                by_junction.insert(*v, t as u32 * g);
                let c = gaps[t].len() as u32;
                for (i, u) in gaps[t].iter().enumerate() {
                    by_junction.insert(*u, t as u32 * g + ((i as u32 + 1) * g) / (c + 1));
                }
            }
            k
        }
        _ => {
            let m = sites.len() as u32;
            let k = even_up(m.max(min_k).max(4));
            for (i, &s) in sites.iter().enumerate() {
                by_junction.insert(s, (i as u32 * k) / m.max(1));
            }
            k
        }
    };
    let distinct: BTreeSet<u32> = by_junction.values().copied().collect();
    if distinct.len() != by_junction.len() {
        return Err(ShrubError::Layout(format!("leaf {leaf}: cusp assignment collides")));
    }
    Ok(LeafCusps { k, by_junction })
}

/// Directions at a junction. `list` starts with the parent. Returns
/// `(angle, half-width)` for every entry after the parent.
fn assign_directions(
    list: &[usize],
    parent_angle: f64,
    footprint: f64,
    oriented: &[usize],
) -> Result<Vec<(f64, f64)>, String> {
    let m = list.len();
    let mut rel = vec![0.0; m];
    if oriented.is_empty() {
        if footprint > 0.0 {
            let span = TAU - 2.0 * footprint;
            for (i, r) in rel.iter_mut().enumerate().skip(1) {
                *r = footprint + span * i as f64 / m as f64;
            }
        } else {
            for (i, r) in rel.iter_mut().enumerate() {
                *r = TAU * i as f64 / m as f64;
            }
        }
    } else {
        let pos: Vec<usize> = oriented
            .iter()
            .map(|e| list.iter().position(|x| x == e).ok_or_else(|| format!("piece {e} is not at the junction")))
            .collect::<Result<_, _>>()?;
        let two_r = pos.len();
        let r = two_r / 2;
        let first = (0..two_r).min_by_key(|&t| pos[t]).expect("nonempty");
        for s in 0..two_r {
            let t = (first + s) % two_r;
            let nt = (first + s + 1) % two_r;
            if s + 1 < two_r && pos[nt] < pos[t] {
                return Err("orientation disagrees with the junction order".into());
            }
        }
        let slot = |t: usize| PI * ((t + two_r - first) % two_r) as f64 / r as f64;
        for t in 0..two_r {
            rel[pos[t]] = slot(t);
        }
        for t in 0..two_r {
            let nt = (t + 1) % two_r;
            let a = pos[t];
            let b = pos[nt];
            let between: Vec<usize> = (1..m).map(|d| (a + d) % m).take_while(|&i| i != b).collect();
            let g0 = slot(t);
            let mut g1 = slot(nt);
            if g1 <= g0 {
                g1 += TAU;
            }
            let (mut lo, mut hi) = (g0, g1);
            if footprint > 0.0 {
                if a == 0 {
                    lo = lo.max(g0 + footprint);
                }
                if b == 0 {
                    hi = hi.min(g1 - footprint);
                }
            }
            let c = between.len();
            if c > 0 && hi <= lo {
                return Err("no room between aligned pieces".into());
            }
            for (i, &idx) in between.iter().enumerate() {
                rel[idx] = lo + (hi - lo) * (i + 1) as f64 / (c + 1) as f64;
            }
        }
    }
    let anchor = parent_angle - rel[0];
    let ang: Vec<f64> = rel.iter().map(|r| r + anchor).collect();
    let mut out = Vec::with_capacity(m - 1);
    for i in 1..m {
        let mut gap = f64::INFINITY;
        for j in 0..m {
            if j != i {
                let mut d = wrap(ang[i] - ang[j]).abs();
                if j == 0 {
                    d -= footprint;
                }
                gap = gap.min(d);
            }
        }
        if gap <= 1e-6 {
            return Err("pieces would overlap at the junction".into());
        }
        out.push((ang[i], (0.4 * gap).min(1.2)));
    }
    Ok(out)
}

struct Builder<'a> {
    shrub: &'a Shrub,
    virt: &'a BTreeSet<usize>,
    node_pairs: BTreeMap<usize, Vec<usize>>,
    cusps: BTreeMap<usize, LeafCusps>,
    shrink: f64,
    placements: Vec<Option<Placement>>,
    points: Vec<Option<[Rational; 2]>>,
}

impl Builder<'_> {
    fn place_junction(&mut self, v: usize, parent: usize, parent_angle: f64, footprint: f64, budget: f64) -> Result<(), ShrubError> {
        let w = fl2(self.points[v].as_ref().expect("junction point set"));
        let at: Vec<usize> = self.shrub.junction_pieces(v).filter(|p| !self.virt.contains(p)).collect();
        let start = at.iter().position(|&p| p == parent).expect("parent at junction");
        let list: Vec<usize> = (0..at.len()).map(|i| at[(start + i) % at.len()]).collect();
        if list.len() == 1 {
            return Ok(());
        }
        let oriented = self.node_pairs.get(&v).cloned().unwrap_or_default();
        let dirs = assign_directions(&list, parent_angle, footprint, &oriented)
            .map_err(|e| ShrubError::Layout(format!("junction {v}: {e}")))?;
        for (c, (a, beta)) in list[1..].iter().zip(dirs) {
            self.place_piece(*c, v, w, a, beta, budget)?;
        }
        Ok(())
    }

    fn place_piece(&mut self, c: usize, v: usize, w: [f64; 2], a: f64, beta: f64, budget: f64) -> Result<(), ShrubError> {
        if self.placements[c].is_some() {
            return Err(ShrubError::Layout(format!("piece {c} reached twice")));
        }
        let dir = [a.cos(), a.sin()];
        if !self.shrub.is_leaf(c) {
            let [j0, j1] = self.shrub.sprig_ends(c);
            let u = if j0 == v { j1 } else { j0 };
            let len = 0.5 * budget;
            let end = ex2([w[0] + len * dir[0], w[1] + len * dir[1]]);
            self.points[u] = Some(end.clone());
            let here = self.points[v].clone().expect("set");
            self.placements[c] = Some(if j0 == v {
                Placement::Segment { from: here, to: end }
            } else {
                Placement::Segment { from: end, to: here }
            });
            let sub = self.shrink * (0.35 * len).min(0.6 * len * beta.sin());
            return self.place_junction(u, c, a + PI, 0.0, sub);
        }
        let lc = &self.cusps[&c];
        let k = lc.k;
        let c_in = lc.by_junction[&v];
        let kf = k as f64;
        let phi_in = TAU * c_in as f64 / kf;
        let eps = (0.8 * (0.8 * beta).tan() * (PI / kf).tan()).min(1.0);
        let rho = 0.45 * budget;
        // standard cusp c_in → (ρ, 0) with the squash along y, then turn
        // so that the centre lies in direction `a` from w
        let (c1, s1) = ((-phi_in).cos(), (-phi_in).sin());
        let sc = rho / kf;
        let m0 = [[sc * c1, -sc * s1], [sc * eps * s1, sc * eps * c1]];
        let psi = a - PI;
        let (c2, s2) = (psi.cos(), psi.sin());
        let m = [
            [c2 * m0[0][0] - s2 * m0[1][0], c2 * m0[0][1] - s2 * m0[1][1]],
            [s2 * m0[0][0] + c2 * m0[1][0], s2 * m0[0][1] + c2 * m0[1][1]],
        ];
        let t = [w[0] - c2 * rho, w[1] - s2 * rho];
        let affine = Affine2::from_f64(m, t).map_err(|e| ShrubError::Layout(e.to_string()))?;
        let std = cusps(k).expect("k ≥ 4");
        let placed: Vec<[f64; 2]> = std.iter().map(|&p| affine.apply(p)).collect();
        let (lin, _) = affine.to_f64();
        let mut todo = Vec::new();
        for (&u, &j) in &lc.by_junction {
            if u == v {
                continue;
            }
            let j = j as usize;
            let p = placed[j];
            let out = [lin[0][0] * std[j][0] + lin[0][1] * std[j][1], lin[1][0] * std[j][0] + lin[1][1] * std[j][1]];
            let into = out[1].atan2(out[0]) + PI;
            let nearest = placed.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, q)| dist(*q, p)).fold(f64::INFINITY, f64::min);
            let off = wrap((p[1] - w[1]).atan2(p[0] - w[0]) - a).abs();
            let to_cone = if off >= beta { 0.0 } else { dist(p, w) * (beta - off).sin() };
            let r = self.shrink * 0.2 * nearest.min(to_cone).min(budget - dist(p, w));
            if r <= 0.0 {
                return Err(ShrubError::Layout(format!("leaf {c}: no room at cusp {j}")));
            }
            self.points[u] = Some(ex2(p));
            todo.push((u, into, r));
        }
        self.placements[c] = Some(Placement::Hypocycloid { k, affine });
        for (u, into, r) in todo {
            self.place_junction(u, c, into, 0.0, r)?;
        }
        Ok(())
    }
}

/// Orientations at nodes with every pair that involves a virtual piece
/// removed; what is left is still an orientation of the remaining pieces.
fn reduced_node_pairs(cert: &OrientationCertificate, virt: &BTreeSet<usize>) -> BTreeMap<usize, Vec<usize>> {
    let mut out = BTreeMap::new();
    for o in &cert.orientations {
        if let Element::Node(v) = o.element {
            let pieces: Vec<usize> = o.cyclic.iter().map(|e| match e {
                Element::Piece(p) => *p,
                Element::Node(_) => unreachable!("node orientations hold pieces"),
            })
            .collect();
            let r = pieces.len() / 2;
            let keep: Vec<bool> = (0..pieces.len())
                .map(|i| !virt.contains(&pieces[i]) && !virt.contains(&pieces[(i + r) % pieces.len()]))
                .collect();
            let kept: Vec<usize> = pieces.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
            if !kept.is_empty() {
                out.insert(v, kept);
            }
        }
    }
    out
}

fn choose_root(shrub: &Shrub, virt: &BTreeSet<usize>) -> Vec<RootChoice> {
    for s in shrub.sprigs().filter(|s| !virt.contains(s)) {
        for (j, site) in shrub.piece_sites(s) {
            if !shrub.is_node(*j) {
                return vec![RootChoice::Ray { sprig: s, infinite_end: *site }];
            }
        }
    }
    shrub.leaves().map(RootChoice::Frame).collect()
}

fn build(shrub: &Shrub, cert: &OrientationCertificate, virt: &BTreeSet<usize>, root: &RootChoice, shrink: f64) -> Result<Layout, ShrubError> {
    let mut leaf_orient: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for o in &cert.orientations {
        if let Element::Piece(p) = o.element {
            if shrub.is_leaf(p) {
                leaf_orient.insert(
                    p,
                    o.cyclic.iter().map(|e| match e {
                        Element::Node(v) => *v,
                        Element::Piece(_) => unreachable!("piece orientations hold nodes"),
                    })
                    .collect(),
                );
            }
        }
    }
    let mut cusps_map = BTreeMap::new();
    for l in shrub.leaves() {
        cusps_map.insert(l, assign_cusps(shrub, l, leaf_orient.get(&l))?);
    }
    let mut b = Builder {
        shrub,
        virt,
        node_pairs: reduced_node_pairs(cert, virt),
        cusps: cusps_map,
        shrink,
        placements: vec![None; shrub.num_pieces()],
        points: vec![None; shrub.num_junctions()],
    };
    for &p in virt {
        b.placements[p] = Some(Placement::Virtual);
    }
    let style = match root {
        RootChoice::Canonical => {
            let c = 0;
            if shrub.is_leaf(c) {
                let lc = &b.cusps[&c];
                let k = lc.k;
                let std = cusps(k).expect("k ≥ 4");
                let budget = shrink * 0.2 * dist(std[0], std[1]);
                b.placements[c] = Some(Placement::Hypocycloid { k, affine: Affine2::identity() });
                let todo: Vec<(usize, u32)> = lc.by_junction.iter().map(|(&u, &j)| (u, j)).collect();
                for &(u, j) in &todo {
                    b.points[u] = Some(ex2(std[j as usize]));
                }
                for (u, j) in todo {
                    b.place_junction(u, c, TAU * j as f64 / k as f64 + PI, 0.0, budget)?;
                }
            } else {
                let [j0, j1] = shrub.sprig_ends(c);
                b.points[j0] = Some(ex2([-1.0, 0.0]));
                b.points[j1] = Some(ex2([1.0, 0.0]));
                b.placements[c] = Some(Placement::Segment { from: ex2([-1.0, 0.0]), to: ex2([1.0, 0.0]) });
                b.place_junction(j0, c, 0.0, 0.0, shrink * 0.35)?;
                b.place_junction(j1, c, PI, 0.0, shrink * 0.35)?;
            }
            RootStyle::Canonical
        }
        RootChoice::Frame(c) => {
            let c = *c;
            if c >= shrub.num_pieces() || !shrub.is_leaf(c) {
                return Err(ShrubError::Layout(format!("frame piece {c} is not a leaf")));
            }
            let lc = &b.cusps[&c];
            let k = lc.k;
            let one = Rational::from_i64(1);
            let todo: Vec<(usize, f64)> = lc.by_junction.iter().map(|(&u, &j)| (u, -TAU * j as f64 / k as f64)).collect();
            let mut pts = Vec::new();
            for &(u, phi) in &todo {
                let p = circle_point(&one, phi);
                pts.push(fl2(&p));
                b.points[u] = Some(p);
            }
            let mut budget: f64 = 0.3;
            for i in 0..pts.len() {
                for j in 0..i {
                    budget = budget.min(0.25 * dist(pts[i], pts[j]));
                }
            }
            b.placements[c] = Some(Placement::Frame { k, radius: one });
            for (u, phi) in todo {
                b.place_junction(u, c, phi, PI / 2.0 + 0.3, shrink * budget)?;
            }
            RootStyle::Frame { leaf: c }
        }
        RootChoice::Ray { sprig, infinite_end } => {
            let s = *sprig;
            if s >= shrub.num_pieces() || shrub.is_leaf(s) {
                return Err(ShrubError::Layout(format!("ray piece {s} is not a sprig")));
            }
            let [j0, j1] = shrub.sprig_ends(s);
            let (inf, fin) = if *infinite_end == Site::End0 { (j0, j1) } else { (j1, j0) };
            if shrub.is_node(inf) {
                return Err(ShrubError::Layout(format!("sprig {s}: the end sent to ∞ is not a free tip")));
            }
            let p = ex2([1.0, 0.0]);
            b.points[fin] = Some(p.clone());
            b.points[inf] = None;
            b.placements[s] = Some(Placement::Ray { from: p, direction: ex2([1.0, 0.0]) });
            b.place_junction(fin, s, 0.0, 0.0, shrink * 0.4)?;
            RootStyle::Ray { sprig: s }
        }
        RootChoice::Auto => unreachable!("resolved by the caller"),
    };
    let placements: Vec<Placement> = b
        .placements
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| ShrubError::Layout(format!("piece {i} was never reached"))))
        .collect::<Result<_, _>>()?;
    let mut cusp_maps = BTreeMap::new();
    for (l, lc) in &b.cusps {
        let mut m = BTreeMap::new();
        for &(j, site) in shrub.piece_sites(*l) {
            if let Site::Cusp(c) = site {
                m.insert(c, lc.by_junction[&j]);
            }
        }
        cusp_maps.insert(*l, m);
    }
    Ok(Layout { root: style, placements, points: b.points, cusp_maps, shrink })
}

/// Places every piece so that opposed nodes of a leaf sit at opposed cusps
/// and opposed pieces at a node leave it in opposite directions. Pieces
/// hanging off a junction are laid out at a smaller scale inside disjoint
/// cones; when the overlap check fails the scale is halved and the layout
/// redone.
pub fn layout_with(shrub: &Shrub, cert: &OrientationCertificate, opts: &LayoutOptions) -> Result<Layout, ShrubError> {
    let roots = match &opts.root {
        RootChoice::Auto => choose_root(shrub, &opts.virtual_pieces),
        r => vec![r.clone()],
    };
    let mut last = ShrubError::Layout("no root candidate".into());
    for root in &roots {
        let mut shrink = 1.0;
        for _ in 0..8 {
            match build(shrub, cert, &opts.virtual_pieces, root, shrink) {
                Ok(l) => match check_overlaps(shrub, &l) {
                    Ok(()) => return Ok(l),
                    Err(e) => last = e,
                },
                Err(e @ ShrubError::Layout(_)) if !e.to_string().contains("no room at cusp") => {
                    last = e;
                    break;
                }
                Err(e) => last = e,
            }
            shrink *= 0.5;
        }
    }
    Err(last)
}

pub fn layout_shrub(shrub: &Shrub, cert: &OrientationCertificate) -> Result<Layout, ShrubError> {
    layout_with(shrub, cert, &LayoutOptions::default())
}

/// Pieces may only meet at the junctions they share.
pub fn check_overlaps(shrub: &Shrub, layout: &Layout) -> Result<(), ShrubError> {
    let n = shrub.num_pieces();
    let samples: Vec<Vec<[f64; 2]>> = layout.placements.iter().map(|p| p.sample(48)).collect();
    let closed: Vec<bool> = layout.placements.iter().map(|p| p.is_region()).collect();
    let bbox: Vec<[f64; 4]> = samples
        .iter()
        .map(|s| {
            s.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, p| {
                [b[0].min(p[0]), b[1].min(p[1]), b[2].max(p[0]), b[3].max(p[1])]
            })
        })
        .collect();
    let size = |i: usize| (bbox[i][2] - bbox[i][0]).hypot(bbox[i][3] - bbox[i][1]);
    let edges = |i: usize| -> Vec<([f64; 2], [f64; 2])> {
        let s = &samples[i];
        let m = s.len();
        let count = if closed[i] { m } else { m.saturating_sub(1) };
        (0..count).map(|e| (s[e], s[(e + 1) % m])).collect()
    };
    for a in 0..n {
        if samples[a].is_empty() {
            continue;
        }
        for b in a + 1..n {
            if samples[b].is_empty() {
                continue;
            }
            let frame = matches!(layout.placements[a], Placement::Frame { .. }) || matches!(layout.placements[b], Placement::Frame { .. });
            let ray = matches!(layout.placements[a], Placement::Ray { .. }) || matches!(layout.placements[b], Placement::Ray { .. });
            let apart = bbox[a][0] > bbox[b][2] || bbox[b][0] > bbox[a][2] || bbox[a][1] > bbox[b][3] || bbox[b][1] > bbox[a][3];
            if apart && !frame && !ray {
                continue;
            }
            let shared: Vec<[f64; 2]> = shrub
                .piece_junctions(a)
                .filter(|j| shrub.site_of(b, *j).is_some())
                .filter_map(|j| layout.points[j].as_ref().map(fl2))
                .collect();
            let scale = size(a).min(size(b)).min(1.0);
            let r = 1e-2 * scale;
            let far = |p: [f64; 2]| shared.iter().all(|q| dist(p, *q) > r);
            let (ea, eb) = (edges(a), edges(b));
            for &(p, q) in ea.iter().filter(|(p, q)| far(*p) && far(*q)) {
                for &(s, t) in eb.iter().filter(|(s, t)| far(*s) && far(*t)) {
                    if seg_seg_dist(p, q, s, t) <= 1e-9 * scale {
                        return Err(ShrubError::Layout(format!("pieces {a} and {b} touch away from their junctions")));
                    }
                }
            }
            for (x, y) in [(a, b), (b, a)] {
                if closed[y] {
                    if let Some(p) = samples[x].iter().copied().find(|p| far(*p)) {
                        let probe = if closed[x] || samples[x].len() < 2 {
                            p
                        } else {
                            let q = samples[x][1];
                            [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
                        };
                        if layout.placements[y].contains(probe, &samples[y]) {
                            return Err(ShrubError::Layout(format!("piece {x} lies inside leaf {y}")));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

impl Layout {
    pub fn point(&self, j: usize) -> Option<[f64; 2]> {
        self.points[j].as_ref().map(fl2)
    }

    /// The shrub file with geometry filled in.
    pub fn to_graph(&self, shrub: &Shrub) -> ShrubGraph {
        let mut g = shrub.graph().clone();
        for (i, p) in self.placements.iter().enumerate() {
            g.pieces[i] = match p {
                Placement::Hypocycloid { k, affine } => Piece::Leaf(LeafSpec {
                    k: Some(*k),
                    affine: Some(AffineRecord::from_affine(affine)),
                    frame: None,
                }),
                Placement::Frame { k, radius } => Piece::Leaf(LeafSpec { k: Some(*k), affine: None, frame: Some(Exact(radius.clone())) }),
                Placement::Segment { from, to } => Piece::Sprig(SprigSpec {
                    from: Some([Exact(from[0].clone()), Exact(from[1].clone())]),
                    to: Some([Exact(to[0].clone()), Exact(to[1].clone())]),
                    ray: None,
                }),
                Placement::Ray { from, direction } => Piece::Sprig(SprigSpec {
                    from: Some([Exact(from[0].clone()), Exact(from[1].clone())]),
                    to: None,
                    ray: Some([Exact(direction[0].clone()), Exact(direction[1].clone())]),
                }),
                Placement::Virtual => g.pieces[i].clone(),
            };
        }
        for (l, m) in &self.cusp_maps {
            for junction in &mut g.junctions {
                for r in &mut junction.at {
                    if r.piece == *l {
                        if let Site::Cusp(c) = r.site {
                            r.site = Site::Cusp(m[&c]);
                        }
                    }
                }
            }
        }
        g
    }
}

/// End of a merged segment.
#[derive(Clone, Debug, PartialEq)]
pub enum SegmentEnd {
    Point { junction: usize, at: [Rational; 2] },
    Infinity { direction: [Rational; 2] },
}

/// Maximal straight piece of the zero set built from aligned sprigs and the
/// leaf diameters between them.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedSegment {
    pub sprigs: Vec<usize>,
    pub start: SegmentEnd,
    pub end: SegmentEnd,
}

/// One segment per complete chain (with its stubs), per degenerate
/// two-stub node and per sprig with no node of `P_A`.
pub fn merged_segments(shrub: &Shrub, cert: &OrientationCertificate, layout: &Layout, virt: &BTreeSet<usize>) -> Vec<MergedSegment> {
    let far_end = |s: usize, near: usize| -> SegmentEnd {
        if virt.contains(&s) {
            return SegmentEnd::Point { junction: near, at: layout.points[near].clone().expect("finite node") };
        }
        let [a, b] = shrub.sprig_ends(s);
        let other = if a == near { b } else { a };
        match &layout.points[other] {
            Some(p) => SegmentEnd::Point { junction: other, at: p.clone() },
            None => match &layout.placements[s] {
                Placement::Ray { direction, .. } => SegmentEnd::Infinity { direction: direction.clone() },
                _ => unreachable!("only rays reach ∞"),
            },
        }
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in &cert.sprigs {
        if virt.contains(&w.sprig) {
            continue;
        }
        let (mut sprigs, start, end) = match w.alternative {
            Alternative::NoNode => {
                let [a, _] = shrub.sprig_ends(w.sprig);
                let start = match &layout.points[a] {
                    Some(p) => SegmentEnd::Point { junction: a, at: p.clone() },
                    None => far_end(w.sprig, shrub.sprig_ends(w.sprig)[1]),
                };
                let end = far_end(w.sprig, a);
                let (start, end) = if matches!(start, SegmentEnd::Infinity { .. }) {
                    (end, start)
                } else {
                    (start, end)
                };
                (vec![w.sprig], start, end)
            }
            Alternative::Stub | Alternative::Link => {
                let first = match w.chain[0] {
                    Element::Node(v) => v,
                    _ => unreachable!("chains end at nodes"),
                };
                let last = match w.chain[w.chain.len() - 1] {
                    Element::Node(v) => v,
                    _ => unreachable!("chains end at nodes"),
                };
                let (sa, sb) = (w.stubs[0], w.stubs[1]);
                let mut sprigs: Vec<usize> = w
                    .chain
                    .iter()
                    .filter_map(|e| match e {
                        Element::Piece(p) if !shrub.is_leaf(*p) => Some(*p),
                        _ => None,
                    })
                    .collect();
                sprigs.extend([sa, sb].into_iter().filter(|s| !virt.contains(s)));
                (sprigs, far_end(sa, first), far_end(sb, last))
            }
        };
        sprigs.sort();
        sprigs.dedup();
        if sprigs.is_empty() || !seen.insert(sprigs.clone()) {
            continue;
        }
        let (start, end) = if matches!(start, SegmentEnd::Infinity { .. }) { (end, start) } else { (start, end) };
        out.push(MergedSegment { sprigs, start, end });
    }
    out
}

/// The shrub with a scaffolding sprig hung at every odd-cactus
/// representative, which makes it very simple. Junction indices of the
/// original shrub are kept; the returned set holds the added sprigs.
pub fn augment(shrub: &Shrub) -> Result<(Shrub, BTreeSet<usize>), ShrubError> {
    let mut g = shrub.graph().clone();
    let mut added = BTreeSet::new();
    for c in super::analysis::find_odd_cactuses(shrub).into_iter().filter(|c| c.odd) {
        let leaf = c.leaves[0];
        let s = g.pieces.len();
        g.pieces.push(Piece::sprig());
        added.insert(s);
        match shrub.site_of_leaf_cusp(leaf, 0) {
            Some(j) => g.junctions[j].at.push(super::model::SiteRef { piece: s, site: Site::End0 }),
            None => {
                g.join(&[(leaf, Site::Cusp(0)), (s, Site::End0)]);
            }
        }
    }
    Ok((Shrub::new(g)?, added))
}

#[cfg(test)]
mod tests {
    use super::super::model::{Piece, ShrubGraph};
    use super::super::orient::orient_all;
    use super::*;

    #[test]
    fn single_leaf_identity() {
        let s = Shrub::new(ShrubGraph { pieces: vec![Piece::leaf()], junctions: vec![] }).unwrap();
        let c = orient_all(&s).unwrap();
        let l = layout_shrub(&s, &c).unwrap();
        assert!(matches!(&l.placements[0], Placement::Hypocycloid { k: 4, affine } if affine.is_identity()));
    }

    #[test]
    fn directions_even_without_orientation() {
        let d = assign_directions(&[0, 1, 2, 3], 0.0, 0.0, &[]).unwrap();
        assert!((d[0].0 - PI / 2.0).abs() < 1e-12);
        assert!((d[1].0 - PI).abs() < 1e-12);
    }

    #[test]
    fn opposed_pieces_are_antipodal() {
        // parent 0 bland, pieces 1 and 3 opposed
        let d = assign_directions(&[0, 1, 2, 3], 0.3, 0.0, &[1, 3]).unwrap();
        assert!((wrap(d[0].0 - d[2].0).abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn frame_footprint() {
        let d = assign_directions(&[0, 1, 2], 0.0, PI / 2.0 + 0.3, &[]).unwrap();
        for (a, _) in d {
            assert!(wrap(a).abs() > PI / 2.0 + 0.3);
        }
        assert!(assign_directions(&[0, 1, 2], 0.0, PI / 2.0, &[1, 2]).is_err());
    }

    #[test]
    fn circle_points_are_exact() {
        let one = Rational::from_i64(1);
        for phi in [0.3, -2.0, PI, 3.0] {
            let p = circle_point(&one, phi);
            assert_eq!(&p[0] * &p[0] + &p[1] * &p[1], one);
        }
    }
}
