//! Random curves with involution, built orbit by orbit so that they validate.

use std::collections::BTreeMap;

use prymdeg::curve::{ComponentSpec, CurveSpec, CurveWithInvolution, InvolutionSpec, LoopType, NodeSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy)]
enum Unit {
    Fixed(usize),
    /// Indices of the two exchanged components.
    Pair(usize, usize),
}

struct Builder {
    comps: Vec<String>,
    vmap: BTreeMap<String, String>,
    nodes: Vec<NodeSpec>,
    emap: BTreeMap<String, String>,
}

impl Builder {
    fn id(&self) -> String {
        format!("n{:02}", self.nodes.len())
    }

    fn fixed_node(&mut self, t: usize, h: usize, loop_type: Option<LoopType>) {
        let id = self.id();
        self.nodes.push(NodeSpec { id, tail: self.comps[t].clone(), head: self.comps[h].clone(), fixed_loop_type: loop_type });
    }

    fn pair(&mut self, (t, h): (usize, usize), (it, ih): (usize, usize)) {
        let a = self.id();
        self.nodes.push(NodeSpec { id: a.clone(), tail: self.comps[t].clone(), head: self.comps[h].clone(), fixed_loop_type: None });
        let b = self.id();
        self.nodes.push(NodeSpec { id: b.clone(), tail: self.comps[it].clone(), head: self.comps[ih].clone(), fixed_loop_type: None });
        self.emap.insert(a.clone(), b.clone());
        self.emap.insert(b, a);
    }

    fn image(&self, v: usize) -> usize {
        let id = &self.comps[v];
        self.vmap.get(id).map_or(v, |w| self.comps.iter().position(|c| c == w).unwrap())
    }

    /// A node orbit joining two units (possibly the same one).
    fn join(&mut self, rng: &mut StdRng, a: Unit, b: Unit) {
        match (a, b) {
            (Unit::Fixed(f), Unit::Fixed(g)) if f == g => match rng.random_range(0..3) {
                0 => self.fixed_node(f, f, Some(LoopType::Branchwise)),
                1 => self.fixed_node(f, f, Some(LoopType::Swapping)),
                _ => self.pair((f, f), (f, f)),
            },
            (Unit::Fixed(f), Unit::Fixed(g)) => {
                if rng.random_bool(0.5) {
                    self.fixed_node(f, g, None)
                } else {
                    self.pair((f, g), (f, g))
                }
            }
            (Unit::Fixed(f), Unit::Pair(x, y)) | (Unit::Pair(x, y), Unit::Fixed(f)) => self.pair((f, x), (f, y)),
            (Unit::Pair(x, y), Unit::Pair(u, _)) if x == u => match rng.random_range(0..3) {
                0 => self.fixed_node(x, y, None),
                1 => self.pair((x, y), (y, x)),
                _ => self.pair((x, x), (y, y)),
            },
            (Unit::Pair(x, _), Unit::Pair(u, _)) => {
                let w = if rng.random_bool(0.5) { u } else { self.image(u) };
                let (ix, iw) = (self.image(x), self.image(w));
                self.pair((x, w), (ix, iw))
            }
        }
    }
}

/// A random validated curve with at most `max_orbits` node orbits beyond a
/// connecting skeleton. Returns `None` when the draw is rejected (for
/// instance a disconnected exchanged pair); callers draw again.
pub fn try_random_curve(seed: u64, max_orbits: usize) -> Option<CurveWithInvolution> {
    let mut rng = StdRng::seed_from_u64(seed);
    let nf = rng.random_range(0..=2usize);
    let np = rng.random_range(if nf == 0 { 1 } else { 0 }..=2usize);
    let mut b = Builder { comps: Vec::new(), vmap: BTreeMap::new(), nodes: Vec::new(), emap: BTreeMap::new() };
    let mut units = Vec::new();
    for i in 0..nf {
        b.comps.push(format!("F{i}"));
        units.push(Unit::Fixed(b.comps.len() - 1));
    }
    for i in 0..np {
        b.comps.push(format!("A{i}"));
        b.comps.push(format!("B{i}"));
        let (x, y) = (b.comps.len() - 2, b.comps.len() - 1);
        b.vmap.insert(b.comps[x].clone(), b.comps[y].clone());
        b.vmap.insert(b.comps[y].clone(), b.comps[x].clone());
        units.push(Unit::Pair(x, y));
    }
    // skeleton: a random tree on the units
    for i in 1..units.len() {
        let j = rng.random_range(0..i);
        b.join(&mut rng, units[i], units[j]);
    }
    let extra = rng.random_range(0..=max_orbits);
    for _ in 0..extra {
        let u = units[rng.random_range(0..units.len())];
        let w = units[rng.random_range(0..units.len())];
        b.join(&mut rng, u, w);
    }
    if b.nodes.len() > 10 {
        return None;
    }

    // decorations: Riemann-Hurwitz needs an even fixed-point count f and
    // genus 2g' - 1 + f/2
    let mut preimages = vec![0u32; b.comps.len()];
    for n in &b.nodes {
        let t = b.comps.iter().position(|c| *c == n.tail).unwrap();
        let h = b.comps.iter().position(|c| *c == n.head).unwrap();
        let fixed = !b.emap.contains_key(&n.id);
        let swapping = n.fixed_loop_type == Some(LoopType::Swapping) || (t != h && b.image(t) == h);
        if fixed && !swapping {
            preimages[t] += 1;
            preimages[h] += 1;
        }
    }
    let mut components = Vec::new();
    let mut pair_genus = BTreeMap::new();
    for (i, id) in b.comps.iter().enumerate() {
        let moved = b.image(i) != i;
        if moved {
            let key = i.min(b.image(i));
            let g = *pair_genus.entry(key).or_insert_with(|| rng.random_range(0..=1u32));
            components.push(ComponentSpec { id: id.clone(), genus: g, smooth_fixed_points: 0, involution_nontrivial: true });
        } else {
            let s = preimages[i] % 2 + 2 * rng.random_range(0..=1u32);
            let f = s + preimages[i];
            let gq = rng.random_range(if f == 0 { 1 } else { 0 }..=1u32);
            let genus = 2 * gq + f / 2 - 1;
            components.push(ComponentSpec { id: id.clone(), genus, smooth_fixed_points: s, involution_nontrivial: true });
        }
    }
    let spec = CurveSpec {
        name: Some(format!("random {seed}")),
        components,
        nodes: b.nodes,
        involution: InvolutionSpec { vertices: b.vmap, edges: b.emap },
    };
    CurveWithInvolution::from_spec(spec).ok()?.validate_and_classify().ok()
}

/// First accepted curve from consecutive seeds.
pub fn random_curve(seed: u64, max_orbits: usize) -> CurveWithInvolution {
    (0..1000u64)
        .find_map(|k| try_random_curve(seed.wrapping_mul(1000).wrapping_add(k), max_orbits))
        .expect("some draw validates")
}
