//! Lower envelopes of periodic height functions on `Z^r`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use super::enumerate::{covering_bound, ellipsoid_points, is_positive_definite};
use super::polytope::{affine_rank, Polytope};
use crate::linalg::{self, IMat, Int, RMat, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvelopeError {
    #[error("the quadratic part is not positive definite")]
    NotDefinite,
    #[error("the period lattice must have full rank")]
    PeriodRank,
    #[error("lower envelope search found no point to pivot onto")]
    NoPivot,
    #[error("more than {0} cells modulo the period")]
    TooManyCells(usize),
}

/// Periodic correction term of a height function.
#[derive(Debug, Clone, PartialEq)]
pub enum Residue {
    Zero,
    /// Values on period-reduced representatives; missing entries are 0.
    Table(BTreeMap<Vec<Int>, Rat>),
    /// `sum_j {g_j(x)} (1 - {g_j(x)})` for rational functionals `g_j`.
    Fractional(RMat),
}

/// `H(x) = x^T Q x + linear . x + residue(x mod period)` on `Z^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightFunction {
    pub quad: RMat,
    pub linear: Vec<Rat>,
    /// HNF basis of a full-rank period lattice.
    pub period: IMat,
    pub residue: Residue,
}

fn frac(x: Rat) -> Rat {
    x - x.floor()
}

impl HeightFunction {
    pub fn quadratic(quad: RMat) -> Self {
        let r = quad.len();
        HeightFunction { quad, linear: vec![Rat::zero(); r], period: linalg::identity(r), residue: Residue::Zero }
    }

    /// Piecewise-linear interpolation of `sum_j g_j^2` at the hyperplanes
    /// `g_j = n`; its domains of linearity form the arrangement.
    pub fn arrangement(functionals: &RMat, period: IMat) -> Self {
        let r = period.len();
        let mut quad = vec![vec![Rat::zero(); r]; r];
        for g in functionals {
            for i in 0..r {
                for j in 0..r {
                    quad[i][j] += g[i] * g[j];
                }
            }
        }
        HeightFunction { quad, linear: vec![Rat::zero(); r], period, residue: Residue::Fractional(functionals.clone()) }
    }

    pub fn rank(&self) -> usize {
        self.quad.len()
    }

    pub fn reduce(&self, x: &[Int]) -> Vec<Int> {
        reduce_mod(&self.period, x)
    }

    pub fn residue_at(&self, x: &[Int]) -> Rat {
        match &self.residue {
            Residue::Zero => Rat::zero(),
            Residue::Table(t) => t.get(&self.reduce(x)).copied().unwrap_or_else(Rat::zero),
            Residue::Fractional(gs) => gs.iter().fold(Rat::zero(), |s, g| {
                let v = frac(linalg::rdot(g, &linalg::to_rat_vec(x)));
                s + v * (Rat::one() - v)
            }),
        }
    }

    pub fn value(&self, x: &[Int]) -> Rat {
        let xr = linalg::to_rat_vec(x);
        let q = super::enumerate::quad(&self.quad, &xr);
        q + linalg::rdot(&self.linear, &xr) + self.residue_at(x)
    }

    fn residue_range(&self) -> (Rat, Rat) {
        match &self.residue {
            Residue::Zero => (Rat::zero(), Rat::zero()),
            Residue::Table(t) => t.values().fold((Rat::zero(), Rat::zero()), |(lo, hi), v| {
                (if *v < lo { *v } else { lo }, if *v > hi { *v } else { hi })
            }),
            Residue::Fractional(gs) => (Rat::zero(), Rat::new(gs.len() as Int, 4)),
        }
    }
}

/// Reduce modulo an upper-triangular full-rank HNF basis into the box
/// `0 <= x_i < P_ii`.
pub fn reduce_mod(period: &IMat, x: &[Int]) -> Vec<Int> {
    let mut y = x.to_vec();
    for (i, row) in period.iter().enumerate() {
        let q = num_integer::Integer::div_floor(&y[i], &row[i]);
        if q != 0 {
            for (a, b) in y.iter_mut().zip(row) {
                *a -= q * b;
            }
        }
    }
    y
}

/// Canonical representative of a finite point set modulo translations by
/// the period lattice.
pub fn canonical_key(period: &IMat, points: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut best: Option<Vec<Vec<Int>>> = None;
    for p in points {
        let red = reduce_mod(period, p);
        let shift: Vec<Int> = p.iter().zip(&red).map(|(a, b)| a - b).collect();
        let mut moved: Vec<Vec<Int>> = points
            .iter()
            .map(|q| q.iter().zip(&shift).map(|(a, b)| a - b).collect())
            .collect();
        moved.sort();
        if best.as_ref().is_none_or(|b| moved < *b) {
            best = Some(moved);
        }
    }
    best.unwrap_or_default()
}

/// A maximal cell: the contact set of a supporting affine function.
#[derive(Debug, Clone)]
pub struct EnvelopeCell {
    pub points: Vec<Vec<Int>>,
    pub polytope: Polytope,
    /// Supporting affine function `c0 + c . x`.
    pub support: (Rat, Vec<Rat>),
}

pub const MAX_CELLS: usize = 20_000;

struct Engine<'a> {
    h: &'a HeightFunction,
    offsets: Vec<Vec<Int>>,
    memo: HashMap<Vec<Int>, Rat>,
}

impl Engine<'_> {
    fn value(&mut self, x: &[Int]) -> Rat {
        if let Some(v) = self.memo.get(x) {
            return *v;
        }
        let v = self.h.value(x);
        self.memo.insert(x.to_vec(), v);
        v
    }

    fn around(&self, p: &[Int]) -> Vec<Vec<Int>> {
        self.offsets
            .iter()
            .map(|o| o.iter().zip(p).map(|(a, b)| a + b).collect())
            .collect()
    }

    fn contact(&mut self, cands: &[Vec<Int>], l: &(Rat, Vec<Rat>)) -> Vec<Vec<Int>> {
        let mut t: Vec<Vec<Int>> = cands
            .iter()
            .filter(|x| {
                let lv = l.0 + linalg::rdot(&l.1, &linalg::to_rat_vec(x));
                self.value(x) == lv
            })
            .cloned()
            .collect();
        t.sort();
        t
    }

    /// Raise `l` on the side `dir(x) > 0` until it touches another point.
    fn pivot(
        &mut self,
        cands: &[Vec<Int>],
        l: &(Rat, Vec<Rat>),
        dir: &dyn Fn(&[Int]) -> Rat,
    ) -> Result<Rat, EnvelopeError> {
        let mut best: Option<Rat> = None;
        for x in cands {
            let d = dir(x);
            if d <= Rat::zero() {
                continue;
            }
            let lv = l.0 + linalg::rdot(&l.1, &linalg::to_rat_vec(x));
            let t = (self.value(x) - lv) / d;
            if best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
        best.ok_or(EnvelopeError::NoPivot)
    }
}

/// Maximal cells of the lower envelope of `{(x, H(x))}`, one per orbit of
/// the period lattice.
pub fn lower_envelope(h: &HeightFunction) -> Result<Vec<EnvelopeCell>, EnvelopeError> {
    let r = h.rank();
    if r == 0 {
        let pts = vec![Vec::new()];
        return Ok(vec![EnvelopeCell {
            polytope: Polytope::hull(&pts),
            points: pts,
            support: (h.value(&[]), Vec::new()),
        }]);
    }
    if !is_positive_definite(&h.quad) {
        return Err(EnvelopeError::NotDefinite);
    }
    if h.period.len() != r || linalg::rank_int(&h.period, r) != r {
        return Err(EnvelopeError::PeriodRank);
    }
    let m = covering_bound(&h.quad);
    let (rmin, rmax) = h.residue_range();
    let spread = m + (rmax - rmin);
    let reach = spread * Rat::from_integer(4);
    let zero = vec![Rat::zero(); r];
    let mut eng = Engine { h, offsets: ellipsoid_points(&h.quad, &zero, reach), memo: HashMap::new() };

    // global minimum
    let qinv = linalg::inverse_rat(&h.quad).expect("definite");
    let center: Vec<Rat> = (0..r)
        .map(|i| -(0..r).fold(Rat::zero(), |s, j| s + qinv[i][j] * h.linear[j]) / Rat::from_integer(2))
        .collect();
    let start = ellipsoid_points(&h.quad, &center, spread);
    let min = start.iter().map(|x| eng.value(x)).min().ok_or(EnvelopeError::NoPivot)?;
    let p0 = start.iter().find(|x| eng.value(x) == min).unwrap().clone();
    let cands = eng.around(&p0);
    let mut l: (Rat, Vec<Rat>) = (min, zero.clone());
    let mut t = eng.contact(&cands, &l);
    while affine_rank(&t) < r {
        let diffs: RMat = t
            .iter()
            .map(|x| x.iter().zip(&p0).map(|(a, b)| Rat::from_integer(a - b)).collect())
            .collect();
        let w = linalg::nullspace_rat(&diffs, r).into_iter().next().expect("deficient span");
        let p0r = linalg::to_rat_vec(&p0);
        let dir = |x: &[Int]| {
            linalg::rdot(&w, &linalg::to_rat_vec(x)) - linalg::rdot(&w, &p0r)
        };
        let s = eng.pivot(&cands, &l, &dir)?;
        let shift = linalg::rdot(&w, &p0r);
        l = (l.0 - s * shift, l.1.iter().zip(&w).map(|(a, b)| a + s * b).collect());
        t = eng.contact(&cands, &l);
    }

    let mut seen: HashMap<Vec<Vec<Int>>, usize> = HashMap::new();
    let mut cells = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(canonical_key(&h.period, &t), 0);
    cells.push(EnvelopeCell { polytope: Polytope::hull(&t), points: t, support: l });
    queue.push_back(0usize);
    while let Some(ci) = queue.pop_front() {
        let facets = cells[ci].polytope.facets.clone();
        let (c0, c) = cells[ci].support.clone();
        for f in &facets {
            let anchor = cells[ci].points[f.tight.indices()[0]].clone();
            let cands = eng.around(&anchor);
            let a = linalg::to_rat_vec(&f.normal);
            let b = Rat::from_integer(f.offset);
            let dir = |x: &[Int]| b - linalg::rdot(&a, &linalg::to_rat_vec(x));
            let s = eng.pivot(&cands, &(c0, c.clone()), &dir)?;
            let nl = (c0 + s * b, c.iter().zip(&a).map(|(x, y)| x - s * y).collect::<Vec<_>>());
            let nt = eng.contact(&cands, &nl);
            let key = canonical_key(&h.period, &nt);
            if !seen.contains_key(&key) {
                if cells.len() >= MAX_CELLS {
                    return Err(EnvelopeError::TooManyCells(MAX_CELLS));
                }
                seen.insert(key, cells.len());
                queue.push_back(cells.len());
                cells.push(EnvelopeCell { polytope: Polytope::hull(&nt), points: nt, support: nl });
            }
        }
    }
    Ok(cells)
}
