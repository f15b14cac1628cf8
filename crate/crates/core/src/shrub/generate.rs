use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::analysis::find_odd_cactuses;
use super::model::{Piece, Shrub, ShrubGraph, Site, SiteRef};

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    pub pieces: usize,
    pub leaf_probability: f64,
    /// Add free sprigs until every cactus has an even number of sprig ends.
    pub very_simple: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { pieces: 6, leaf_probability: 0.4, very_simple: true }
    }
}

struct Grower {
    g: ShrubGraph,
    next_cusp: Vec<u32>,
    /// sprig ends not yet in a junction
    free_ends: Vec<(usize, Site)>,
}

impl Grower {
    fn add_piece(&mut self, leaf: bool) -> (usize, Site) {
        let p = self.g.pieces.len();
        if leaf {
            self.g.pieces.push(Piece::leaf());
            self.next_cusp.push(1);
            (p, Site::Cusp(0))
        } else {
            self.g.pieces.push(Piece::sprig());
            self.next_cusp.push(0);
            self.free_ends.push((p, Site::End1));
            (p, Site::End0)
        }
    }

    /// Hangs a new piece on an existing junction or on a fresh site.
    fn attach(&mut self, rng: &mut ChaCha8Rng, leaf: bool) {
        let n = self.g.pieces.len();
        let use_junction = !self.g.junctions.is_empty() && rng.gen_bool(0.35);
        let (p, site) = self.add_piece(leaf);
        if use_junction {
            let j = rng.gen_range(0..self.g.junctions.len());
            let at = &mut self.g.junctions[j].at;
            let pos = rng.gen_range(0..=at.len());
            at.insert(pos, SiteRef { piece: p, site });
            return;
        }
        let host = rng.gen_range(0..n);
        let host_site = if self.g.pieces[host].is_leaf() {
            let c = self.next_cusp[host];
            self.next_cusp[host] += 1;
            Some(Site::Cusp(c))
        } else {
            self.free_ends
                .iter()
                .position(|&(q, _)| q == host)
                .map(|i| self.free_ends.swap_remove(i).1)
        };
        match host_site {
            Some(hs) => {
                self.g.join(&[(host, hs), (p, site)]);
            }
            None => {
                // both ends of the host are taken; fall back to the first leaf or junction
                if let Some(j) = (0..self.g.junctions.len()).next() {
                    self.g.junctions[j].at.push(SiteRef { piece: p, site });
                } else {
                    unreachable!("a sprig with no free end sits in a junction");
                }
            }
        }
    }
}

/// A random valid shrub from a seed. With `very_simple`, each odd cactus
/// gets one extra free sprig at a fresh cusp of its first leaf.
pub fn random_shrub(seed: u64, opts: &GenerateOptions) -> Shrub {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gr = Grower { g: ShrubGraph::default(), next_cusp: Vec::new(), free_ends: Vec::new() };
    let first_leaf = rng.gen_bool(opts.leaf_probability);
    gr.add_piece(first_leaf);
    for _ in 1..opts.pieces.max(1) {
        let leaf = rng.gen_bool(opts.leaf_probability);
        gr.attach(&mut rng, leaf);
    }
    let mut shrub = Shrub::new(gr.g.clone()).expect("grown shrubs are trees");
    if opts.very_simple {
        for c in find_odd_cactuses(&shrub).into_iter().filter(|c| c.odd) {
            let leaf = c.leaves[0];
            let cusp = gr.next_cusp[leaf];
            gr.next_cusp[leaf] += 1;
            let (p, site) = gr.add_piece(false);
            gr.g.join(&[(leaf, Site::Cusp(cusp)), (p, site)]);
        }
        shrub = Shrub::new(gr.g).expect("grown shrubs are trees");
    }
    shrub
}
