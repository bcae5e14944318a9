//! Periodic cell decompositions and their orbit counts.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use super::dicing::DicingWitness;
use super::enumerate::{ellipsoid_points, quad};
use super::envelope::{canonical_key, lower_envelope, EnvelopeError, HeightFunction};
use super::polytope::{affine_rank, Polytope};
use crate::linalg::{self, IMat, Int, RMat, Rat};

pub const DELAUNAY_RANK_CAP: usize = 6;
pub const SEMI_DELAUNAY_RANK_CAP: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("rank {rank} exceeds the cap {cap}")]
    RankTooLarge { rank: usize, cap: usize },
    #[error("the functionals do not span the dual space")]
    DegenerateSystem,
    #[error("arrangement has a vertex outside the lattice: {0:?}")]
    NotLatticeVertexed(DicingWitness),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
}

#[derive(Debug, Clone)]
pub struct Cell {
    /// All lattice points of the closed cell.
    pub points: Vec<Vec<Int>>,
    pub vertices: Vec<Vec<Int>>,
    pub polytope: Polytope,
    /// Supporting affine function of the lifted cell, when produced from a height.
    pub support: Option<(Rat, Vec<Rat>)>,
}

impl Cell {
    fn new(points: Vec<Vec<Int>>, support: Option<(Rat, Vec<Rat>)>) -> Self {
        let polytope = Polytope::hull(&points);
        let mut vertices: Vec<Vec<Int>> = polytope.vertices().into_iter().map(|i| points[i].clone()).collect();
        vertices.sort();
        Cell { points, vertices, polytope, support }
    }

    pub fn dim(&self) -> usize {
        affine_rank(&self.points)
    }

    pub fn barycenter(&self) -> Vec<Rat> {
        let n = Rat::from_integer(self.vertices.len() as Int);
        let r = self.vertices.first().map_or(0, |v| v.len());
        (0..r)
            .map(|i| self.vertices.iter().fold(Rat::zero(), |s, v| s + Rat::from_integer(v[i])) / n)
            .collect()
    }
}

/// Maximal cells of a decomposition of `R^rank`, one per orbit of `period`,
/// in coordinates of the vertex lattice `Z^rank`.
#[derive(Debug, Clone)]
pub struct PeriodicDecomposition {
    pub rank: usize,
    pub period: IMat,
    pub cells: Vec<Cell>,
}

impl PeriodicDecomposition {
    pub fn from_height(h: &HeightFunction) -> Result<Self, CellError> {
        let cells = lower_envelope(h)?
            .into_iter()
            .map(|c| Cell::new(c.points, Some(c.support)))
            .collect();
        Ok(PeriodicDecomposition { rank: h.rank(), period: h.period.clone(), cells })
    }

    pub fn maximal_cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Vertex sets of maximal cells, canonical modulo the period.
    pub fn vertex_keys(&self) -> BTreeSet<Vec<Vec<Int>>> {
        self.cells.iter().map(|c| canonical_key(&self.period, &c.vertices)).collect()
    }

    /// Vertex sets of maximal cells modulo a sublattice of the period.
    pub fn vertex_keys_mod(&self, sub: &IMat) -> BTreeSet<Vec<Vec<Int>>> {
        let reps = coset_reps(&self.period, sub);
        let mut out = BTreeSet::new();
        for c in &self.cells {
            for t in &reps {
                let moved: Vec<Vec<Int>> =
                    c.vertices.iter().map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect()).collect();
                out.insert(canonical_key(sub, &moved));
            }
        }
        out
    }

    /// Orbits of faces by dimension `0..=rank`.
    pub fn census(&self) -> Vec<usize> {
        let mut keys: Vec<BTreeSet<Vec<Vec<Int>>>> = vec![BTreeSet::new(); self.rank + 1];
        for c in &self.cells {
            for f in c.polytope.faces() {
                let pts: Vec<Vec<Int>> = f.indices().into_iter().map(|i| c.points[i].clone()).collect();
                let d = affine_rank(&pts);
                keys[d].insert(canonical_key(&self.period, &pts));
            }
        }
        keys.iter().map(|k| k.len()).collect()
    }

    /// Census modulo a sublattice: multiply by the index.
    pub fn census_mod(&self, sub: &IMat) -> Vec<usize> {
        let idx = lattice_index(&self.period, sub) as usize;
        self.census().into_iter().map(|c| c * idx).collect()
    }

    /// Multiply every point and the period by `k`.
    pub fn scaled(&self, k: Int) -> Self {
        let sc = |v: &Vec<Int>| v.iter().map(|x| x * k).collect::<Vec<Int>>();
        let cells = self
            .cells
            .iter()
            .map(|c| Cell::new(c.points.iter().map(sc).collect(), None))
            .collect();
        PeriodicDecomposition {
            rank: self.rank,
            period: linalg::hnf(&self.period.iter().map(sc).collect::<IMat>(), self.rank),
            cells,
        }
    }

    /// Vertex sets (as point lists) for every maximal cell meeting the box
    /// `[-radius, radius]^rank` of period translates; used for rendering.
    pub fn translates(&self, radius: Int) -> Vec<Vec<Vec<Int>>> {
        let mut out = Vec::new();
        let r = self.rank;
        let mut idx = vec![-radius; r];
        loop {
            let shift = linalg::vec_mat(&idx, &self.period, r);
            for c in &self.cells {
                out.push(c.vertices.iter().map(|v| v.iter().zip(&shift).map(|(a, b)| a + b).collect()).collect());
            }
            let mut k = 0;
            loop {
                if k == r {
                    return out;
                }
                idx[k] += 1;
                if idx[k] <= radius {
                    break;
                }
                idx[k] = -radius;
                k += 1;
            }
        }
    }
}

/// `[period : sub]` for a full-rank sublattice.
pub fn lattice_index(period: &IMat, sub: &IMat) -> Int {
    let r = period.len();
    if r == 0 {
        return 1;
    }
    (linalg::det_int(sub) / linalg::det_int(period)).abs()
}

/// Representatives of `period / sub`, for a sublattice `sub` in HNF.
pub fn coset_reps(period: &IMat, sub: &IMat) -> Vec<Vec<Int>> {
    let r = sub.len();
    let mut out = Vec::new();
    let mut x = vec![0 as Int; r];
    loop {
        if r == 0 || linalg::coords_int(period, &x).is_some() {
            out.push(x.clone());
        }
        let mut k = 0;
        loop {
            if k == r {
                return out;
            }
            x[k] += 1;
            if x[k] < sub[k][k] {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// Delaunay decomposition of `Z^r` for a positive definite Gram matrix.
pub fn delaunay(gram: &RMat) -> Result<PeriodicDecomposition, CellError> {
    let r = gram.len();
    if r > DELAUNAY_RANK_CAP {
        return Err(CellError::RankTooLarge { rank: r, cap: DELAUNAY_RANK_CAP });
    }
    PeriodicDecomposition::from_height(&HeightFunction::quadratic(gram.to_vec()))
}

/// Semi-Delaunay decomposition of a height function.
pub fn semi_delaunay(h: &HeightFunction) -> Result<PeriodicDecomposition, CellError> {
    if h.rank() > SEMI_DELAUNAY_RANK_CAP {
        return Err(CellError::RankTooLarge { rank: h.rank(), cap: SEMI_DELAUNAY_RANK_CAP });
    }
    PeriodicDecomposition::from_height(h)
}

/// Empty-ellipsoid certificate of one Delaunay cell: center and squared radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptyEllipsoid {
    pub center: Vec<Rat>,
    pub radius_sq: Rat,
}

/// Check a cell of a Delaunay decomposition for `gram` exactly: all its
/// points lie on one ellipsoid and no other lattice point lies on or inside.
pub fn certify_delaunay_cell(gram: &RMat, cell: &Cell) -> Option<EmptyEllipsoid> {
    let r = gram.len();
    if r == 0 {
        return Some(EmptyEllipsoid { center: Vec::new(), radius_sq: Rat::zero() });
    }
    // q(x - c) = K on the cell: x^T G x - 2 c^T G x = K - c^T G c, linear in (c, K)
    let p0 = linalg::to_rat_vec(&cell.vertices[0]);
    let rows: RMat = cell.vertices[1..]
        .iter()
        .map(|v| {
            let vr = linalg::to_rat_vec(v);
            let d: Vec<Rat> = vr.iter().zip(&p0).map(|(a, b)| a - b).collect();
            (0..r).map(|j| (0..r).fold(Rat::zero(), |s, i| s + d[i] * gram[i][j]) * Rat::from_integer(2)).collect()
        })
        .collect();
    let rhs: Vec<Rat> = cell.vertices[1..]
        .iter()
        .map(|v| quad(gram, &linalg::to_rat_vec(v)) - quad(gram, &p0))
        .collect();
    let (red, piv) = linalg::rref(
        rows.iter().zip(&rhs).map(|(row, b)| {
            let mut x = row.clone();
            x.push(*b);
            x
        }).collect(),
        r + 1,
    );
    if piv.len() != r || piv.contains(&r) {
        return None;
    }
    let center: Vec<Rat> = (0..r).map(|i| red[i][r]).collect();
    let diff = |v: &[Int]| -> Vec<Rat> { v.iter().zip(&center).map(|(a, c)| Rat::from_integer(*a) - c).collect() };
    let k = quad(gram, &diff(&cell.vertices[0]));
    if cell.points.iter().any(|p| quad(gram, &diff(p)) != k) {
        return None;
    }
    let inside = ellipsoid_points(gram, &center, k);
    let pts: BTreeSet<&Vec<Int>> = cell.points.iter().collect();
    if inside.iter().any(|p| !pts.contains(p)) {
        return None;
    }
    Some(EmptyEllipsoid { center, radius_sq: k })
}
