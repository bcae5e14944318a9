//! Chains, cycles and the involution on `H_1` of the dual graph.

use std::collections::VecDeque;

use thiserror::Error;

use crate::curve::CurveWithInvolution;
use crate::linalg::{IMat, Int};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("the involution does not preserve the cycle space (image of cycle {0})")]
    ConjugationFailure(usize),
}

/// Edge coordinates and the boundary map `C_1 -> C_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSpace {
    pub edge_order: Vec<String>,
    pub vertex_order: Vec<String>,
    /// `boundary[v][e]`; `d(e) = head - tail`.
    pub boundary: IMat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBasis {
    /// Rows in edge coordinates.
    pub basis: IMat,
    pub tree_edges: Vec<usize>,
    /// `basis[i]` is the fundamental cycle of `non_tree_edges[i]`.
    pub non_tree_edges: Vec<usize>,
}

impl CycleBasis {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a cycle in this basis (read off the non-tree edges).
    pub fn coords(&self, cycle: &[Int]) -> Vec<Int> {
        self.non_tree_edges.iter().map(|&j| cycle[j]).collect()
    }

    pub fn to_chain(&self, coords: &[Int]) -> Vec<Int> {
        let n = self.basis.first().map_or(0, |b| b.len());
        let mut out = vec![0; n];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }
}

/// Chain-level and cycle-level involution. `iota_x` acts on row vectors:
/// row `i` holds the coordinates of the image of `basis[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionOnH1 {
    pub iota1: IMat,
    pub iota_x: IMat,
}

pub fn chain_space(c: &CurveWithInvolution) -> ChainSpace {
    let cl = c.classification();
    let nv = c.num_components();
    let ne = c.num_nodes();
    let mut boundary = vec![vec![0; ne]; nv];
    for (j, &(t, h)) in cl.orientation.iter().enumerate() {
        boundary[h][j] += 1;
        boundary[t][j] -= 1;
    }
    ChainSpace {
        edge_order: c.spec.nodes.iter().map(|n| n.id.clone()).collect(),
        vertex_order: c.spec.components.iter().map(|v| v.id.clone()).collect(),
        boundary,
    }
}

/// Fundamental cycles of a BFS spanning tree rooted at the lexicographically
/// first component id.
pub fn cycle_basis(c: &CurveWithInvolution) -> CycleBasis {
    let cl = c.classification();
    let nv = c.num_components();
    let ne = c.num_nodes();
    let root = (0..nv)
        .min_by(|&a, &b| c.spec.components[a].id.cmp(&c.spec.components[b].id))
        .expect("at least one component");
    let mut incident = vec![Vec::new(); nv];
    for (j, &(t, h)) in cl.orientation.iter().enumerate() {
        incident[t].push(j);
        if h != t {
            incident[h].push(j);
        }
    }
    // path[v] is a chain with boundary v - root
    let mut path: Vec<Option<Vec<Int>>> = vec![None; nv];
    path[root] = Some(vec![0; ne]);
    let mut in_tree = vec![false; ne];
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &j in &incident[v] {
            let (t, h) = cl.orientation[j];
            let (w, s) = if t == v { (h, 1) } else { (t, -1) };
            if path[w].is_none() {
                let mut p = path[v].clone().unwrap();
                p[j] += s;
                path[w] = Some(p);
                in_tree[j] = true;
                queue.push_back(w);
            }
        }
    }
    let mut basis = Vec::new();
    let mut non_tree = Vec::new();
    for j in 0..ne {
        if in_tree[j] {
            continue;
        }
        let (t, h) = cl.orientation[j];
        let ph = path[h].as_ref().expect("connected graph");
        let pt = path[t].as_ref().expect("connected graph");
        let mut cyc: Vec<Int> = ph.iter().zip(pt).map(|(a, b)| b - a).collect();
        cyc[j] += 1;
        basis.push(cyc);
        non_tree.push(j);
    }
    CycleBasis {
        basis,
        tree_edges: (0..ne).filter(|&j| in_tree[j]).collect(),
        non_tree_edges: non_tree,
    }
}

/// Signed permutation matrix of `iota_1`; column `j` is the image of `e_j`.
pub fn involution_on_chains(c: &CurveWithInvolution) -> IMat {
    let cl = c.classification();
    let ne = c.num_nodes();
    let mut m = vec![vec![0; ne]; ne];
    for j in 0..ne {
        m[cl.edge_map[j]][j] = Int::from(cl.edge_sign[j]);
    }
    m
}

pub fn involution_on_h1(
    c: &CurveWithInvolution,
    basis: &CycleBasis,
) -> Result<InvolutionOnH1, HomologyError> {
    let mut iota_x = Vec::new();
    for (i, b) in basis.basis.iter().enumerate() {
        let img = c.iota1(b);
        let coords = basis.coords(&img);
        if basis.to_chain(&coords) != img {
            return Err(HomologyError::ConjugationFailure(i));
        }
        iota_x.push(coords);
    }
    Ok(InvolutionOnH1 { iota1: involution_on_chains(c), iota_x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::parse_curve;
    use crate::linalg::mat_vec;

    #[test]
    fn cycles_are_closed() {
        let txt = r#"{"components":[{"id":"a","genus":0,"involution_nontrivial":false},
            {"id":"b","genus":0,"involution_nontrivial":false},{"id":"c","genus":0,"involution_nontrivial":false}],
            "nodes":[{"id":"e1","tail":"a","head":"b"},{"id":"e2","tail":"b","head":"c"},
                     {"id":"e3","tail":"c","head":"a"},{"id":"e4","tail":"a","head":"c"}]}"#;
        let c = parse_curve(txt).unwrap().validate_and_classify().unwrap();
        let cs = chain_space(&c);
        let cb = cycle_basis(&c);
        assert_eq!(cb.rank(), 2);
        for b in &cb.basis {
            assert!(mat_vec(&cs.boundary, b).iter().all(|x| *x == 0));
        }
    }
}
