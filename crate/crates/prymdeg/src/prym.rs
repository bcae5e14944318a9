//! Curve-level invariants of the Prym: components of the norm kernel,
//! polarization type, extendability of the Prym map, half-shifts and the
//! comparison map between the middle Prym and the compactified Jacobian.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::envelope::reduce_mod;
use crate::cells::{CellError, DicingWitness};
use crate::conditions::{middle_prym_condition, minus_delaunay, prym_dicing_condition, sliced_decomposition};
use crate::curve::{CurveWithInvolution, NodeClass};
use crate::lattice::{IntegerLattice, InvolutionLattices, YMinus};
use crate::linalg::{self, IMat, Int, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrymError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("vertex {0} has odd degree in the branchwise-fixed subgraph")]
    OddDegree(String),
    #[error("shift is not half of an invariant integral cycle")]
    ShiftNotHalfIntegral,
    #[error(transparent)]
    Cells(#[from] CellError),
}

/// A connected component of the graph on fixed components joined by
/// branchwise fixed nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BComponent {
    pub components: Vec<String>,
    pub branchwise_nodes: Vec<String>,
    pub smooth_fixed_points: u32,
    /// Some member carries a swapping self-node.
    pub has_swapping_node: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPartAnalysis {
    pub b_components: Vec<BComponent>,
    /// Components without smooth fixed points.
    pub n_b: usize,
    pub l_b: usize,
    /// Swapping nodes on the fixed part; the component count is then
    /// only a reading of the branchwise graph.
    pub needs_review: bool,
}

pub fn fixed_part_analysis(c: &CurveWithInvolution) -> FixedPartAnalysis {
    let cl = c.classification();
    let nv = c.num_components();
    let fixed: Vec<usize> = (0..nv).filter(|&i| cl.vertex_map[i] == i).collect();
    // union-find over fixed components along branchwise edges
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for (j, &(t, h)) in cl.orientation.iter().enumerate() {
        if cl.node_class[j] == NodeClass::BranchwiseFixed {
            let (a, b) = (find(&mut parent, t), find(&mut parent, h));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, BComponent> = BTreeMap::new();
    for &i in &fixed {
        let r = find(&mut parent, i);
        let g = groups.entry(r).or_insert_with(|| BComponent {
            components: Vec::new(),
            branchwise_nodes: Vec::new(),
            smooth_fixed_points: 0,
            has_swapping_node: false,
        });
        g.components.push(c.spec.components[i].id.clone());
        g.smooth_fixed_points += c.spec.components[i].smooth_fixed_points;
    }
    for (j, &(t, h)) in cl.orientation.iter().enumerate() {
        match cl.node_class[j] {
            NodeClass::BranchwiseFixed => {
                let r = find(&mut parent, t);
                groups.get_mut(&r).unwrap().branchwise_nodes.push(c.spec.nodes[j].id.clone());
            }
            NodeClass::Swapping if t == h && cl.vertex_map[t] == t => {
                let r = find(&mut parent, t);
                groups.get_mut(&r).unwrap().has_swapping_node = true;
            }
            _ => {}
        }
    }
    let b_components: Vec<BComponent> = groups.into_values().collect();
    let n_b = b_components.iter().filter(|b| b.smooth_fixed_points == 0).count();
    let needs_review = b_components.iter().any(|b| b.has_swapping_node);
    FixedPartAnalysis { l_b: b_components.len() - n_b, n_b, b_components, needs_review }
}

/// Number of connected components of the kernel of the norm map.
pub fn component_count(a: &FixedPartAnalysis) -> u128 {
    1u128 << a.n_b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationSummary {
    /// Every fixed block has at most two smooth fixed points.
    pub dagger: bool,
    /// Entries equal to 1 in the polarization type.
    pub ones_count: u32,
    /// Dimension of the abelian part of the Prym.
    pub abelian_dim: u32,
    /// `(ones, twos)`.
    pub polarization_type: (u32, u32),
}

pub fn dagger_check(c: &CurveWithInvolution, a: &FixedPartAnalysis) -> PolarizationSummary {
    let dagger = a.b_components.iter().all(|b| b.smooth_fixed_points <= 2);
    let ones_count = a
        .b_components
        .iter()
        .map(|b| (b.smooth_fixed_points / 2).saturating_sub(1))
        .sum();
    let abelian_dim = abelian_dimension(c);
    PolarizationSummary {
        dagger,
        ones_count,
        abelian_dim,
        polarization_type: (ones_count, abelian_dim.saturating_sub(ones_count)),
    }
}

/// `sum g` over exchanged pairs plus `sum (g - g')` over fixed components.
pub fn abelian_dimension(c: &CurveWithInvolution) -> u32 {
    let cl = c.classification();
    let mut dim = 0;
    for (i, comp) in c.spec.components.iter().enumerate() {
        match cl.quotient_genus[i] {
            Some(gq) => dim += comp.genus - gq,
            None if i < cl.vertex_map[i] => dim += comp.genus,
            None => {}
        }
    }
    dim
}

/// Two invariant weight vectors with different `Delta^-`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightWitness {
    pub alpha_a: Vec<Int>,
    pub alpha_b: Vec<Int>,
    pub maximal_cells_a: usize,
    pub maximal_cells_b: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrymVerdict {
    pub toric_rank: usize,
    pub component_count: u128,
    pub dagger: bool,
    pub ones_count: u32,
    pub star: bool,
    pub star_witness: Option<DicingWitness>,
    /// The curve is outside the admissible class, so `star` is only the
    /// dicing property of the functionals.
    pub star_is_dicing_only: bool,
    pub star_star: Option<bool>,
    pub star_star_witness: Option<DicingWitness>,
    pub star_star_reason: Option<String>,
    pub prym_map_extendable: bool,
    pub middle_equals_pp: Option<bool>,
    pub nonuniqueness_witness: Option<WeightWitness>,
    pub needs_review: bool,
}

/// Cap on weight vectors tried by the witness search.
pub const WEIGHT_SEARCH_CAP: usize = 20_000;

pub fn prym_map_verdict(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    ym: &YMinus,
    max_weight: Int,
) -> Result<PrymVerdict, PrymError> {
    let fixed = fixed_part_analysis(c);
    let pol = dagger_check(c, &fixed);
    let star = prym_dicing_condition(lat)?;
    let ss = middle_prym_condition(c, lat, ym)?;
    let star_holds = star.verdict.holds();
    let star_witness = match &star.verdict {
        crate::cells::DicingVerdict::NotDicing(w) => Some(w.clone()),
        crate::cells::DicingVerdict::Dicing => None,
    };
    let (star_star_witness, star_star_reason) = match &ss {
        crate::conditions::MiddlePrymVerdict::Fails(w) => (Some(w.clone()), None),
        crate::conditions::MiddlePrymVerdict::NotApplicable(why) => (None, Some(why.clone())),
        crate::conditions::MiddlePrymVerdict::Holds => (None, None),
    };
    let admissible = c.count_class(NodeClass::Swapping) == 0 && c.total_smooth_fixed_points() == 0;
    let nonuniqueness_witness = if star_holds { None } else { weight_witness(c, lat, max_weight)? };
    Ok(PrymVerdict {
        toric_rank: lat.x_minus.rank(),
        component_count: component_count(&fixed),
        dagger: pol.dagger,
        ones_count: pol.ones_count,
        star: star_holds,
        star_witness,
        star_is_dicing_only: !admissible,
        star_star: ss.as_option(),
        star_star_witness,
        star_star_reason,
        prym_map_extendable: star_holds,
        middle_equals_pp: ss.as_option(),
        nonuniqueness_witness,
        needs_review: fixed.needs_review,
    })
}

/// Orbits of `iota` on edges, each as a sorted index list, in order of first edge.
pub fn edge_orbits(c: &CurveWithInvolution) -> Vec<Vec<usize>> {
    let cl = c.classification();
    let mut seen = vec![false; c.num_nodes()];
    let mut out = Vec::new();
    for j in 0..c.num_nodes() {
        if seen[j] {
            continue;
        }
        let k = cl.edge_map[j];
        seen[j] = true;
        seen[k] = true;
        out.push(if k == j { vec![j] } else { vec![j.min(k), j.max(k)] });
    }
    out
}

/// Invariant weights in lexicographic order of orbit weights, starting at all ones.
fn invariant_weights(c: &CurveWithInvolution, max_weight: Int) -> impl Iterator<Item = Vec<Int>> + '_ {
    let orbits = edge_orbits(c);
    let n = c.num_nodes();
    let mut w = vec![1 as Int; orbits.len()];
    let mut done = max_weight < 1;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut alpha = vec![0; n];
        for (o, x) in orbits.iter().zip(&w) {
            for &j in o {
                alpha[j] = *x;
            }
        }
        let mut k = w.len();
        loop {
            if k == 0 {
                done = true;
                break;
            }
            k -= 1;
            w[k] += 1;
            if w[k] <= max_weight {
                break;
            }
            w[k] = 1;
        }
        Some(alpha)
    })
}

/// First invariant weight vector whose `Delta^-` differs from the one for
/// all weights 1.
pub fn weight_witness(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    max_weight: Int,
) -> Result<Option<WeightWitness>, PrymError> {
    if lat.x_minus.rank() == 0 {
        return Ok(None);
    }
    let base_alpha = vec![1; c.num_nodes()];
    let base = minus_delaunay(lat, &base_alpha)?;
    let base_keys = base.vertex_keys();
    for alpha in invariant_weights(c, max_weight).take(WEIGHT_SEARCH_CAP) {
        let d = minus_delaunay(lat, &alpha)?;
        if d.vertex_keys() != base_keys {
            return Ok(Some(WeightWitness {
                maximal_cells_a: base.maximal_cell_count(),
                maximal_cells_b: d.maximal_cell_count(),
                alpha_a: base_alpha,
                alpha_b: alpha,
            }));
        }
    }
    Ok(None)
}

/// A vector `v` with `2v` an integral cycle, stored doubled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfShift {
    pub doubled: Vec<Int>,
}

impl HalfShift {
    pub fn zero(n: usize) -> Self {
        HalfShift { doubled: vec![0; n] }
    }

    pub fn value(&self) -> Vec<Rat> {
        self.doubled.iter().map(|x| Rat::new(*x, 2)).collect()
    }
}

/// Half of an oriented Eulerian circuit through every branchwise fixed edge.
/// `seed` shuffles the traversal order.
pub fn maximal_half_shift(c: &CurveWithInvolution, seed: u64) -> Result<HalfShift, PrymError> {
    let smooth = c.total_smooth_fixed_points();
    let swapping = c.count_class(NodeClass::Swapping);
    if smooth > 0 || swapping > 0 {
        return Err(PrymError::HypothesisViolated(format!(
            "{smooth} smooth fixed points and {swapping} swapping nodes; only branchwise fixed nodes may be fixed"
        )));
    }
    let cl = c.classification();
    let nv = c.num_components();
    let ne = c.num_nodes();
    let plus: Vec<usize> = (0..ne).filter(|&j| cl.node_class[j] == NodeClass::BranchwiseFixed).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for &j in &plus {
        let (t, h) = cl.orientation[j];
        adj[t].push(j);
        adj[h].push(j);
    }
    for (v, a) in adj.iter().enumerate() {
        if a.len() % 2 == 1 {
            return Err(PrymError::OddDegree(c.spec.components[v].id.clone()));
        }
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for a in adj.iter_mut() {
        a.shuffle(&mut rng);
    }
    let mut used = vec![false; ne];
    let mut doubled = vec![0 as Int; ne];
    let mut next = vec![0usize; nv];
    for start in 0..nv {
        // Hierholzer: every closed trail found is traversed consistently,
        // which is all the sign bookkeeping needs.
        let mut stack = vec![start];
        while let Some(&v) = stack.last() {
            while next[v] < adj[v].len() && used[adj[v][next[v]]] {
                next[v] += 1;
            }
            if next[v] == adj[v].len() {
                stack.pop();
                continue;
            }
            let j = adj[v][next[v]];
            used[j] = true;
            let (t, h) = cl.orientation[j];
            let (w, s) = if t == v { (h, 1) } else { (t, -1) };
            doubled[j] = s;
            stack.push(w);
        }
    }
    Ok(HalfShift { doubled })
}

/// `X ∩ <branchwise fixed edges>`, the cycles of the branchwise-fixed subgraph.
pub fn branchwise_cycles(c: &CurveWithInvolution) -> IntegerLattice {
    let cl = c.classification();
    let ne = c.num_nodes();
    let support: Vec<usize> = (0..ne).filter(|&j| cl.node_class[j] == NodeClass::BranchwiseFixed).collect();
    cycles_on(c, &support)
}

fn cycles_on(c: &CurveWithInvolution, support: &[usize]) -> IntegerLattice {
    let cs = crate::homology::chain_space(c);
    let ne = c.num_nodes();
    let cols: IMat = cs.boundary.iter().map(|row| support.iter().map(|&j| row[j]).collect()).collect();
    let ker = linalg::int_kernel(&cols, support.len());
    let gens: IMat = ker
        .iter()
        .map(|k| {
            let mut v = vec![0; ne];
            for (x, &j) in k.iter().zip(support) {
                v[j] = *x;
            }
            v
        })
        .collect();
    IntegerLattice::new(&gens, 1, ne)
}

/// `(1 + iota) X` in edge coordinates.
pub fn norm_image(c: &CurveWithInvolution, lat: &InvolutionLattices) -> IntegerLattice {
    let gens: IMat = lat
        .cycles
        .basis
        .iter()
        .map(|b| b.iter().zip(c.iota1(b)).map(|(x, y)| x + y).collect())
        .collect();
    IntegerLattice::new(&gens, 1, c.num_nodes())
}

/// Whether the branchwise cycles surject onto the torsion of `X/(1+iota)X`,
/// i.e. `H_1(Gamma^+) + (1+iota)X = [X]^+`.
pub fn generic_injectivity_check(c: &CurveWithInvolution, lat: &InvolutionLattices) -> bool {
    let sum = branchwise_cycles(c).sum(&norm_image(c, lat));
    sum.contains(&lat.x_plus)
}

/// Result of the comparison of one `[Delta]^-` cell with its Jacobian cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMapReport {
    /// Vertices of the cell in `X^-` coordinates.
    pub cell: Vec<Vec<Int>>,
    pub dim: usize,
    /// Edges along which the Jacobian cell is a unit interval.
    pub jacobian_support: Vec<String>,
    pub group_surjective: bool,
    /// Degrees `1..=d0` at which the graded pieces were compared.
    pub checked_degrees: u32,
    /// First degree where the semigroup map misses something.
    pub semigroup_failure: Option<u32>,
    /// Enumeration exceeded the point cap at this degree; nothing above it was checked.
    pub truncated_at: Option<u32>,
}

/// Points enumerated per cell and degree before giving up.
pub const CELL_POINT_CAP: usize = 200_000;

/// The comparison of `[Delta]^-` with the Jacobian decomposition shifted by `v`,
/// one report per orbit of faces.
pub fn cell_map_analysis(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    v: &HalfShift,
    degree_bound: u32,
) -> Result<Vec<CellMapReport>, PrymError> {
    let ne = c.num_nodes();
    check_shift(c, lat, v)?;
    let sliced = sliced_decomposition(lat)?;
    let norm = norm_image(c, lat);
    // (1+iota)X inside [X]^+, in [X]^+ coordinates
    let norm_in_plus: IMat = linalg::hnf(
        &norm.basis.iter().map(|b| lat.x_plus.coords_of(b, 1).expect("(1+iota)X lies in [X]^+")).collect::<IMat>(),
        lat.x_plus.rank(),
    );
    let fibre = 1usize << lat.profile.k;
    let vval = v.value();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for cell in &sliced.cells {
        for face in cell.polytope.faces() {
            let pts: Vec<Vec<Int>> = face.indices().into_iter().map(|i| cell.points[i].clone()).collect();
            if !seen.insert(crate::cells::envelope::canonical_key(&sliced.period, &pts)) {
                continue;
            }
            let n = Rat::from_integer(pts.len() as Int);
            let mut center = vec![Rat::zero(); ne];
            for p in &pts {
                for (o, x) in center.iter_mut().zip(lat.x_minus.point(p)) {
                    *o += x / n;
                }
            }
            let p: Vec<Rat> = center.iter().zip(&vval).map(|(a, b)| a + b).collect();
            let lo: Vec<Int> = p.iter().map(|x| x.floor().to_integer()).collect();
            let hi: Vec<Int> = p.iter().map(|x| x.ceil().to_integer()).collect();
            let free: Vec<usize> = (0..ne).filter(|&j| lo[j] != hi[j]).collect();
            let l_delta = cycles_on(c, &free);
            let group_surjective = group_check(c, lat, &l_delta, &norm, &pts);
            let mut report = CellMapReport {
                cell: {
                    let mut vs: Vec<Vec<Int>> = cell
                        .polytope
                        .vertices()
                        .into_iter()
                        .filter(|&i| face.get(i))
                        .map(|i| cell.points[i].clone())
                        .collect();
                    vs.sort();
                    vs
                },
                dim: crate::cells::polytope::affine_rank(&pts),
                jacobian_support: free.iter().map(|&j| c.spec.nodes[j].id.clone()).collect(),
                group_surjective,
                checked_degrees: 0,
                semigroup_failure: None,
                truncated_at: None,
            };
            for d in 1..=degree_bound {
                match semigroup_degree(lat, &lo, &hi, &vval, &pts, d, &norm_in_plus, fibre) {
                    None => {
                        report.truncated_at = Some(d);
                        break;
                    }
                    Some(ok) => {
                        report.checked_degrees = d;
                        if !ok {
                            report.semigroup_failure = Some(d);
                            break;
                        }
                    }
                }
            }
            out.push(report);
        }
    }
    Ok(out)
}

fn check_shift(c: &CurveWithInvolution, lat: &InvolutionLattices, v: &HalfShift) -> Result<(), PrymError> {
    let ok = v.doubled.len() == c.num_nodes()
        && c.iota1(&v.doubled) == v.doubled
        && lat.x.contains_scaled(&v.doubled, 1);
    if ok {
        Ok(())
    } else {
        Err(PrymError::ShiftNotHalfIntegral)
    }
}

/// `R delta ∩ X -> (R delta^- ∩ X^-) + torsion` is onto iff every `x in X`
/// with `pi^-(x)` parallel to the face lies in `L_delta + (1+iota)X`.
fn group_check(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    l_delta: &IntegerLattice,
    norm: &IntegerLattice,
    face: &[Vec<Int>],
) -> bool {
    let ne = c.num_nodes();
    let r = lat.cycles.rank();
    // directions of the face, doubled edge coordinates
    let dirs: Vec<Vec<Rat>> = face
        .iter()
        .skip(1)
        .map(|p| {
            let d: Vec<Int> = p.iter().zip(&face[0]).map(|(a, b)| a - b).collect();
            lat.x_minus.point(&d)
        })
        .collect();
    // N with kernel = span(dirs)
    let n_rows: Vec<Vec<Rat>> = if dirs.is_empty() {
        (0..ne).map(|i| (0..ne).map(|j| Rat::from_integer(Int::from(i == j))).collect()).collect()
    } else {
        linalg::nullspace_rat(&dirs, ne)
    };
    // (1 - iota) on the cycle basis, columns = basis vectors
    let diff: Vec<Vec<Int>> = lat
        .cycles
        .basis
        .iter()
        .map(|b| b.iter().zip(c.iota1(b)).map(|(x, y)| x - y).collect())
        .collect();
    let m: Vec<Vec<Rat>> = n_rows
        .iter()
        .map(|nr| diff.iter().map(|d| nr.iter().zip(d).map(|(a, b)| a * Rat::from_integer(*b)).sum()).collect())
        .collect();
    let den = m.iter().flat_map(|row| row.iter()).fold(1, |acc, x| num_integer::lcm(acc, *x.denom()));
    let mi: IMat = m.iter().map(|row| row.iter().map(|x| (x * den).to_integer()).collect()).collect();
    let ker = linalg::int_kernel(&mi, r);
    let gens: IMat = ker.iter().map(|k| lat.cycles.to_chain(k)).collect();
    let b = IntegerLattice::new(&gens, 1, ne);
    l_delta.sum(norm).contains(&b)
}

/// Degree-`d` comparison; `None` when the enumeration cap is hit.
#[allow(clippy::too_many_arguments)]
fn semigroup_degree(
    lat: &InvolutionLattices,
    lo: &[Int],
    hi: &[Int],
    v: &[Rat],
    face: &[Vec<Int>],
    d: u32,
    norm_in_plus: &IMat,
    fibre: usize,
) -> Option<bool> {
    let di = Int::from(d);
    let dr = Rat::from_integer(di);
    let cyc = &lat.cycles;
    let r = cyc.rank();
    let ranges: Vec<(Int, Int)> = cyc.non_tree_edges.iter().map(|&j| (di * lo[j], di * hi[j])).collect();
    let total: usize = ranges.iter().map(|(a, b)| (b - a + 1) as usize).product();
    if total > CELL_POINT_CAP {
        return None;
    }
    // source: classes of X ∩ d delta, grouped by pi^-
    let mut classes: BTreeMap<Vec<Int>, (Vec<Int>, BTreeSet<Vec<Int>>)> = BTreeMap::new();
    let mut coords: Vec<Int> = ranges.iter().map(|(a, _)| *a).collect();
    let within = |x: &[Int]| x.iter().enumerate().all(|(j, y)| di * lo[j] <= *y && *y <= di * hi[j]);
    loop {
        let x = cyc.to_chain(&coords);
        if within(&x) {
            let ix = linalg::mat_vec(&lat.involution.iota1, &x);
            let key: Vec<Int> = x.iter().zip(&ix).map(|(a, b)| a - b).collect();
            let entry = classes.entry(key).or_insert_with(|| (x.clone(), BTreeSet::new()));
            let diff: Vec<Int> = x.iter().zip(&entry.0).map(|(a, b)| a - b).collect();
            let pc = lat.x_plus.coords_of(&diff, 1).expect("same projection means difference in [X]^+");
            entry.1.insert(if norm_in_plus.is_empty() { pc } else { reduce_mod(norm_in_plus, &pc) });
        }
        let mut k = 0;
        loop {
            if k == r {
                return Some(check_targets(lat, lo, hi, v, face, dr, &classes, fibre));
            }
            coords[k] += 1;
            if coords[k] <= ranges[k].1 {
                break;
            }
            coords[k] = ranges[k].0;
            k += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_targets(
    lat: &InvolutionLattices,
    lo: &[Int],
    hi: &[Int],
    v: &[Rat],
    face: &[Vec<Int>],
    d: Rat,
    classes: &BTreeMap<Vec<Int>, (Vec<Int>, BTreeSet<Vec<Int>>)>,
    fibre: usize,
) -> bool {
    let rm = lat.x_minus.rank();
    let di = d.to_integer();
    let mins: Vec<Int> = (0..rm).map(|i| face.iter().map(|p| p[i]).min().unwrap_or(0) * di).collect();
    let maxs: Vec<Int> = (0..rm).map(|i| face.iter().map(|p| p[i]).max().unwrap_or(0) * di).collect();
    let mut y = mins.clone();
    loop {
        let pt = lat.x_minus.point(&y);
        let inside = pt.iter().zip(v).enumerate().all(|(j, (a, b))| {
            let z = a + b * d;
            z >= Rat::from_integer(di * lo[j]) && z <= Rat::from_integer(di * hi[j])
        });
        if inside {
            // key used on the source side is x - iota x = 2 pi^-(x)
            let key: Vec<Int> = pt.iter().map(|a| (a * Rat::from_integer(2)).to_integer()).collect();
            match classes.get(&key) {
                Some((_, cls)) if cls.len() == fibre => {}
                _ => return false,
            }
        }
        let mut k = 0;
        loop {
            if k == rm {
                return true;
            }
            y[k] += 1;
            if y[k] <= maxs[k] {
                break;
            }
            y[k] = mins[k];
            k += 1;
        }
    }
}
