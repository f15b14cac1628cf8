use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shrubflow::poly::{Coeff, Rational};
use shrubflow::shrub::*;

fn arc() -> Shrub {
    let mut g = ShrubGraph { pieces: vec![Piece::sprig(), Piece::leaf(), Piece::sprig()], junctions: vec![] };
    g.join(&[(0, Site::End1), (1, Site::Cusp(0))]);
    g.join(&[(1, Site::Cusp(2)), (2, Site::End0)]);
    Shrub::new(g).unwrap()
}

/// All ways to pick an even-sized ccw-ordered subset (size ≥ 2) of `items`,
/// or none.
fn choices(items: &[Element]) -> Vec<Option<Vec<Element>>> {
    let mut out = vec![None];
    let n = items.len();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() % 2 == 0 {
            out.push(Some((0..n).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect()));
        }
    }
    out
}

/// Brute force over every assignment of orientations to the elements of the
/// node–leaf–node chain with two end sprigs, keeping those where every
/// rigid element is included and every sprig is a stub or link of a
/// complete chain. Only the all-rigid choice survives.
#[test]
fn brute_force_orientations_of_chain() {
    let s = arc();
    let (v0, v1) = (0usize, 1usize);
    let elems = [Element::Node(v0), Element::Piece(1), Element::Node(v1)];
    let incident: Vec<Vec<Element>> = vec![
        vec![Element::Piece(0), Element::Piece(1)],
        vec![Element::Node(v0), Element::Node(v1)],
        vec![Element::Piece(1), Element::Piece(2)],
    ];
    let mut good = Vec::new();
    for a in choices(&incident[0]) {
        for b in choices(&incident[1]) {
            for c in choices(&incident[2]) {
                let orient: Vec<Orientation> = elems
                    .iter()
                    .zip([&a, &b, &c])
                    .filter_map(|(e, f)| f.as_ref().map(|f| Orientation { element: *e, cyclic: f.clone() }))
                    .collect();
                // both sprigs are rigid at their nodes, so they must be present
                let has = |e: Element, x: Element| orient.iter().any(|o| o.element == e && o.contains(x));
                if !has(Element::Node(v0), Element::Piece(0)) || !has(Element::Node(v1), Element::Piece(2)) {
                    continue;
                }
                // a complete chain from s0 must run through the leaf to s2
                let through = has(Element::Piece(1), Element::Node(v0))
                    && has(Element::Piece(1), Element::Node(v1))
                    && has(Element::Node(v0), Element::Piece(1))
                    && has(Element::Node(v1), Element::Piece(1));
                if through {
                    good.push(orient);
                }
            }
        }
    }
    assert_eq!(good.len(), 1);
    let cert = orient_all(&s).unwrap();
    let mut mine = cert.orientations.clone();
    mine.sort_by_key(|o| o.element);
    let mut want = good.pop().unwrap();
    want.sort_by_key(|o| o.element);
    assert_eq!(mine, want);
    assert!(cert.sprigs.iter().all(|w| w.alternative == Alternative::Stub));
    assert!(check_certificate(&s, &cert).ok);
}

#[test]
fn generated_shrubs_orient_and_lay_out() {
    let opts = GenerateOptions { pieces: 7, ..Default::default() };
    for seed in 0..50 {
        let s = random_shrub(seed, &opts);
        assert!(is_very_simple(&s));
        let cert = orient_all(&s).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let r = check_certificate(&s, &cert);
        assert!(r.ok, "seed {seed}: {:?}", r.problems);
        assert_eq!(cert.sprigs.len(), s.sprigs().count());
        let l = layout_with(&s, &cert, &LayoutOptions { root: RootChoice::Auto, ..Default::default() })
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        check_overlaps(&s, &l).unwrap();
        let l = layout_shrub(&s, &cert).unwrap_or_else(|e| panic!("seed {seed} canonical: {e}"));
        check_overlaps(&s, &l).unwrap();
    }
}

#[test]
fn augmented_shrubs_lay_out_with_segments_ending_at_punctures() {
    let opts = GenerateOptions { pieces: 7, very_simple: false, ..Default::default() };
    for seed in 0..50 {
        let s = random_shrub(seed, &opts);
        let (a, virt) = augment(&s).unwrap();
        assert!(is_very_simple(&a));
        let cert = orient_all(&a).unwrap();
        assert!(check_certificate(&a, &cert).ok);
        let l = layout_with(&a, &cert, &LayoutOptions { root: RootChoice::Auto, virtual_pieces: virt.clone() })
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let punct: BTreeSet<usize> = required_puncture_set(&s).iter().filter_map(|p| p.junction).collect();
        let reps: BTreeSet<usize> = virt.iter().map(|&v| a.sprig_ends(v)[0]).collect();
        for m in merged_segments(&a, &cert, &l, &virt) {
            for e in [&m.start, &m.end] {
                if let SegmentEnd::Point { junction, .. } = e {
                    assert!(punct.contains(junction) || reps.contains(junction), "seed {seed}: segment ends at {junction}");
                }
            }
        }
    }
}

#[test]
fn aligned_sprigs_merge_into_one_segment() {
    let mut g = ShrubGraph { pieces: vec![Piece::sprig(), Piece::sprig()], junctions: vec![] };
    g.join(&[(0, Site::End1), (1, Site::End0)]);
    let s = Shrub::new(g).unwrap();
    let cert = orient_all(&s).unwrap();
    let l = layout_shrub(&s, &cert).unwrap();
    let segs = merged_segments(&s, &cert, &l, &BTreeSet::new());
    assert_eq!(segs.len(), 1);
    assert_eq!(segs[0].sprigs, vec![0, 1]);
    let (Placement::Segment { from: a0, to: a1 }, Placement::Segment { from: b0, to: b1 }) = (&l.placements[0], &l.placements[1])
    else {
        panic!("sprigs are segments")
    };
    assert_eq!(a1, b0);
    // collinear: cross product of the two directions vanishes up to rounding
    let f = |r: &Rational| r.to_f64().unwrap();
    let d1 = [f(&a1[0]) - f(&a0[0]), f(&a1[1]) - f(&a0[1])];
    let d2 = [f(&b1[0]) - f(&b0[0]), f(&b1[1]) - f(&b0[1])];
    assert!((d1[0] * d2[1] - d1[1] * d2[0]).abs() < 1e-12);
    assert!(d1[0] * d2[0] + d1[1] * d2[1] > 0.0);
}

#[test]
fn opposed_sprigs_sit_on_a_diameter() {
    let s = arc();
    let cert = orient_all(&s).unwrap();
    let l = layout_with(&s, &cert, &LayoutOptions { root: RootChoice::Auto, ..Default::default() }).unwrap();
    let map = &l.cusp_maps[&1];
    let Placement::Hypocycloid { k, affine } = &l.placements[1] else { panic!("leaf") };
    assert_eq!((map[&2] + k - map[&0]) % k, k / 2);
    let p = |j| l.point(j).unwrap();
    let c = affine.apply([0.0, 0.0]);
    let (a, b) = (p(0), p(1));
    let cross = (a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]);
    assert!(cross.abs() < 1e-9);
    let segs = merged_segments(&s, &cert, &l, &BTreeSet::new());
    assert_eq!(segs.len(), 1);
    assert_eq!(segs[0].sprigs, vec![0, 2]);
}

/// Random tree graphs with random star orders: the sum of orders is twice
/// the number of edges.
#[test]
fn parity_of_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=20);
        let mut edges = Vec::new();
        for v in 1..n {
            edges.push((rng.gen_range(0..v), v));
        }
        for _ in 0..rng.gen_range(0..n) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b));
            }
        }
        let r = parity_check(&SimpleGraph { vertices: n, edges: edges.clone() });
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        assert_eq!(r.sum_of_orders, deg.iter().sum::<usize>());
        assert_eq!(r.sum_of_orders, 2 * edges.len());
        assert!(r.even && r.handshake);
    }
}

#[test]
fn parity_invariant_on_generated_shrubs() {
    for seed in 0..200 {
        let s = random_shrub(seed, &GenerateOptions { pieces: 8, very_simple: seed % 2 == 0, ..Default::default() });
        let p = parity_invariant(&s);
        assert!(p.consistent && p.even, "seed {seed}: {p:?}");
    }
}

#[test]
fn skeletons_of_generated_shrubs() {
    for seed in 0..100 {
        let s = random_shrub(seed, &GenerateOptions { pieces: 8, very_simple: false, ..Default::default() });
        let sk = skeleton_decompose(&s);
        check_skeleton(&s, &sk).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
}

#[test]
fn twist_round_trip_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = twist_map(Rational::new(3.into(), 40.into())).unwrap();
    for _ in 0..10_000 {
        let p = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let q = g.apply_inverse(g.apply(p));
        assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    }
    // exact on rationals
    for i in -200..200 {
        let t = Rational::new(i.into(), 401.into());
        let back = g.tau_inverse(&g.tau(&t));
        assert_eq!(back, t);
    }
    let _ = Rational::from_i64(0);
}

proptest! {
    #[test]
    fn twist_is_monotone(a in -499i64..499, b in -499i64..499) {
        let g = twist_map(Rational::new((-1).into(), 20.into())).unwrap();
        let (ta, tb) = (Rational::new(a.into(), 1000.into()), Rational::new(b.into(), 1000.into()));
        let (ga, gb) = (g.tau(&ta), g.tau(&tb));
        prop_assert_eq!(a < b, ga < gb);
    }
}
