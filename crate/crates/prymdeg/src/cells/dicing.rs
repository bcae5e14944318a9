//! Hyperplane arrangements `{g_j = n}` and the dicing test.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::decomposition::{CellError, PeriodicDecomposition, DELAUNAY_RANK_CAP};
use super::envelope::HeightFunction;
use crate::linalg::{self, IMat, Int, RMat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DicingWitness {
    /// `g_S(vertex) = e_k` for the functionals indexed by `subset`.
    VertexOutsideLattice {
        subset: Vec<usize>,
        #[serde(with = "crate::qser::vec")]
        vertex: Vec<Rat>,
    },
    /// A lattice point at which the integral-valued functionals do not span.
    LatticePointNotVertex { point: Vec<Int> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DicingVerdict {
    Dicing,
    NotDicing(DicingWitness),
}

impl DicingVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, DicingVerdict::Dicing)
    }
}

fn nonzero(functionals: &RMat) -> Vec<usize> {
    (0..functionals.len()).filter(|&j| functionals[j].iter().any(|x| !x.is_zero())).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// First arrangement vertex outside `Z^r`, scanning subsets lexicographically.
pub fn vertex_outside_lattice(functionals: &RMat, r: usize) -> Result<Option<DicingWitness>, CellError> {
    let idx = nonzero(functionals);
    let rows: RMat = idx.iter().map(|&j| functionals[j].clone()).collect();
    if linalg::rank_rat(&rows, r) < r {
        return Err(CellError::DegenerateSystem);
    }
    for s in subsets(idx.len(), r) {
        let m: RMat = s.iter().map(|&i| rows[i].clone()).collect();
        let Some(inv) = linalg::inverse_rat(&m) else { continue };
        for k in 0..r {
            let col: Vec<Rat> = (0..r).map(|i| inv[i][k]).collect();
            if col.iter().any(|x| !x.is_integer()) {
                return Ok(Some(DicingWitness::VertexOutsideLattice {
                    subset: s.iter().map(|&i| idx[i]).collect(),
                    vertex: col,
                }));
            }
        }
    }
    Ok(None)
}

/// Sublattice of `Z^r` on which every functional is integral.
pub fn integrality_lattice(functionals: &RMat, r: usize) -> IMat {
    let n = functionals.len();
    let d = functionals.iter().fold(1, |l: Int, g| num_integer::lcm(l, linalg::lcm_denominators(g)));
    // A x + d y = 0
    let a: IMat = (0..n)
        .map(|j| {
            let mut row: Vec<Int> = functionals[j].iter().map(|x| (x * d).to_integer()).collect();
            row.extend((0..n).map(|k| if k == j { d } else { 0 }));
            row
        })
        .collect();
    let ker = linalg::int_kernel(&a, r + n);
    let proj: IMat = ker.iter().map(|k| k[..r].to_vec()).collect();
    linalg::hnf(&proj, r)
}

/// Whether the arrangement of `{g_j = n}` has 0-skeleton exactly `Z^r`.
pub fn dicing_check(functionals: &RMat, r: usize) -> Result<DicingVerdict, CellError> {
    if r == 0 {
        return Ok(DicingVerdict::Dicing);
    }
    if let Some(w) = vertex_outside_lattice(functionals, r)? {
        return Ok(DicingVerdict::NotDicing(w));
    }
    let p = integrality_lattice(functionals, r);
    for x in super::decomposition::coset_reps(&linalg::identity(r), &p) {
        let xr = linalg::to_rat_vec(&x);
        let integral: RMat = functionals
            .iter()
            .filter(|g| linalg::rdot(g, &xr).is_integer())
            .cloned()
            .collect();
        if linalg::rank_rat(&integral, r) < r {
            return Ok(DicingVerdict::NotDicing(DicingWitness::LatticePointNotVertex { point: x }));
        }
    }
    Ok(DicingVerdict::Dicing)
}

/// The arrangement as a decomposition with vertices in `Z^r`, periodic
/// under the integrality lattice. Fails if some vertex is not in `Z^r`.
pub fn arrangement_decomposition(functionals: &RMat, r: usize) -> Result<PeriodicDecomposition, CellError> {
    if r > DELAUNAY_RANK_CAP {
        return Err(CellError::RankTooLarge { rank: r, cap: DELAUNAY_RANK_CAP });
    }
    if r == 0 {
        return PeriodicDecomposition::from_height(&HeightFunction::quadratic(Vec::new()));
    }
    if let Some(w) = vertex_outside_lattice(functionals, r)? {
        return Err(CellError::NotLatticeVertexed(w));
    }
    let live: RMat = nonzero(functionals).into_iter().map(|j| functionals[j].clone()).collect();
    let period = integrality_lattice(&live, r);
    PeriodicDecomposition::from_height(&HeightFunction::arrangement(&live, period))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[(i128, i128)]) -> Vec<Rat> {
        v.iter().map(|&(a, b)| Rat::new(a, b)).collect()
    }

    #[test]
    fn coordinate_functionals_dice() {
        let g = vec![rv(&[(1, 1), (0, 1)]), rv(&[(0, 1), (1, 1)]), rv(&[(1, 1), (1, 1)])];
        assert!(dicing_check(&g, 2).unwrap().holds());
        let d = arrangement_decomposition(&g, 2).unwrap();
        assert_eq!(d.maximal_cell_count(), 2);
    }

    #[test]
    fn determinant_two_fails() {
        let g = vec![rv(&[(2, 1), (1, 1)]), rv(&[(0, 1), (1, 1)])];
        match dicing_check(&g, 2).unwrap() {
            DicingVerdict::NotDicing(DicingWitness::VertexOutsideLattice { vertex, .. }) => {
                assert_eq!(vertex, rv(&[(1, 2), (0, 1)]));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn half_functional_alone_skips_points() {
        let g = vec![rv(&[(1, 2)])];
        assert!(matches!(
            dicing_check(&g, 1).unwrap(),
            DicingVerdict::NotDicing(DicingWitness::LatticePointNotVertex { .. })
        ));
        let g = vec![rv(&[(1, 2)]), rv(&[(1, 1)])];
        assert!(dicing_check(&g, 1).unwrap().holds());
    }

    #[test]
    fn degenerate() {
        let g = vec![rv(&[(1, 1), (0, 1)])];
        assert_eq!(dicing_check(&g, 2), Err(CellError::DegenerateSystem));
    }
}
