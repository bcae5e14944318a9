//! Sublattices of the half-integral chain space and the lattices attached to
//! the involution.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveWithInvolution, NodeClass};
use crate::homology::{cycle_basis, involution_on_h1, CycleBasis, HomologyError, InvolutionOnH1};
use crate::linalg::{self, IMat, Int, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("X^-/[X]^- has invariant factors {0:?}, expected only 1 and 2")]
    NonTwoTorsionQuotient(Vec<Int>),
    #[error("torsion of X/(1+iota)X has factors {factors:?} but k = {k}")]
    CokernelMismatch { factors: Vec<Int>, k: usize },
}

/// A lattice given by HNF rows in `scale`-multiplied coordinates: the actual
/// vectors are `row / scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerLattice {
    pub ambient_dim: usize,
    pub scale: Int,
    pub basis: IMat,
}

impl IntegerLattice {
    pub fn new(gens: &[Vec<Int>], scale: Int, ambient_dim: usize) -> Self {
        IntegerLattice { ambient_dim, scale, basis: linalg::hnf(gens, ambient_dim) }
    }

    pub fn zero(ambient_dim: usize, scale: Int) -> Self {
        IntegerLattice { ambient_dim, scale, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The same lattice written with a larger scale (a multiple of the current one).
    pub fn at_scale(&self, scale: Int) -> Self {
        assert!(scale % self.scale == 0, "scale must be a multiple");
        let f = scale / self.scale;
        let gens: IMat = self.basis.iter().map(|r| r.iter().map(|x| x * f).collect()).collect();
        IntegerLattice::new(&gens, scale, self.ambient_dim)
    }

    /// Multiply every vector by an integer.
    pub fn scaled_by(&self, k: Int) -> Self {
        let gens: IMat = self.basis.iter().map(|r| r.iter().map(|x| x * k).collect()).collect();
        IntegerLattice::new(&gens, self.scale, self.ambient_dim)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let s = num_integer::lcm(self.scale, other.scale);
        (self.at_scale(s), other.at_scale(s))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let mut gens = a.basis.clone();
        gens.extend(b.basis.iter().cloned());
        IntegerLattice::new(&gens, a.scale, a.ambient_dim)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        // x A = y B  <=>  (x, y) in ker [A; -B]^T
        let ra = a.rank();
        let stacked: IMat = a
            .basis
            .iter()
            .cloned()
            .chain(b.basis.iter().map(|r| r.iter().map(|x| -x).collect()))
            .collect();
        let ker = linalg::int_kernel(&linalg::transpose(&stacked, a.ambient_dim), stacked.len());
        let gens: IMat = ker
            .iter()
            .map(|k| linalg::vec_mat(&k[..ra], &a.basis, a.ambient_dim))
            .collect();
        IntegerLattice::new(&gens, a.scale, a.ambient_dim)
    }

    /// Whether the (actual) vector `v / v_scale` lies in the lattice.
    pub fn contains_scaled(&self, v: &[Int], v_scale: Int) -> bool {
        let s = num_integer::lcm(self.scale, v_scale);
        let w: Vec<Int> = v.iter().map(|x| x * (s / v_scale)).collect();
        let me = self.at_scale(s);
        linalg::coords_int(&me.basis, &w).is_some()
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.basis.iter().all(|r| self.contains_scaled(r, other.scale))
    }

    /// Integer coordinates of `v / v_scale` in this basis.
    pub fn coords_of(&self, v: &[Int], v_scale: Int) -> Option<Vec<Int>> {
        let s = num_integer::lcm(self.scale, v_scale);
        let w: Vec<Int> = v.iter().map(|x| x * (s / v_scale)).collect();
        linalg::coords_int(&self.at_scale(s).basis, &w)
    }

    /// Index `[self : sub]` for a full-rank sublattice, via Smith form.
    pub fn index_factors(&self, sub: &Self) -> Option<Vec<Int>> {
        if sub.rank() != self.rank() {
            return None;
        }
        let coords: Option<IMat> = sub.basis.iter().map(|r| self.coords_of(r, sub.scale)).collect();
        let coords = coords?;
        Some(linalg::smith(&coords, self.rank()).d)
    }

    pub fn index(&self, sub: &Self) -> Option<Int> {
        self.index_factors(sub).map(|d| d.iter().product::<Int>().abs())
    }

    /// Basis vectors as rational vectors in actual coordinates.
    pub fn rational_basis(&self) -> Vec<Vec<Rat>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|&x| Rat::new(x, self.scale)).collect())
            .collect()
    }

    /// Actual vector for lattice coordinates.
    pub fn point(&self, coords: &[Int]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.ambient_dim];
        for (c, r) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(r) {
                *o += Rat::new(c * x, self.scale);
            }
        }
        out
    }
}

/// Counts of `(+1)`, `(-1)` and swap blocks in a normal form of the involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub k: usize,
    pub l: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum YMinusRelation {
    TwiceXMinus,
    XMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum YMinus {
    Known {
        lattice: IntegerLattice,
        relation: YMinusRelation,
        rule: String,
    },
    /// Only `lower ⊆ Y^- ⊆ upper` is certified.
    Unknown {
        lower: IntegerLattice,
        upper: IntegerLattice,
        index_hint: Option<Int>,
    },
}

impl YMinus {
    pub fn is_twice_x_minus(&self) -> bool {
        matches!(self, YMinus::Known { relation: YMinusRelation::TwiceXMinus, .. })
    }

    pub fn known(&self) -> Option<&IntegerLattice> {
        match self {
            YMinus::Known { lattice, .. } => Some(lattice),
            YMinus::Unknown { .. } => None,
        }
    }
}

/// Everything lattice-theoretic about a validated curve, in edge coordinates.
#[derive(Debug, Clone)]
pub struct InvolutionLattices {
    pub cycles: CycleBasis,
    pub involution: InvolutionOnH1,
    /// `X = H_1`, scale 1.
    pub x: IntegerLattice,
    pub x_plus: IntegerLattice,
    /// `[X]^-`, scale 1.
    pub x_minus_eigen: IntegerLattice,
    /// `X^- = pi^-(X)`, scale 2.
    pub x_minus: IntegerLattice,
    pub profile: BlockProfile,
    pub cokernel_torsion: Vec<Int>,
}

impl InvolutionLattices {
    pub fn compute(c: &CurveWithInvolution) -> Result<Self, LatticeError> {
        let cycles = cycle_basis(c);
        let involution = involution_on_h1(c, &cycles)?;
        let n = c.num_nodes();
        let r = cycles.rank();
        let x = IntegerLattice::new(&cycles.basis, 1, n);
        let x_plus = eigenlattice(&cycles, &involution.iota_x, 1, n);
        let x_minus_eigen = eigenlattice(&cycles, &involution.iota_x, -1, n);
        let x_minus = minus_projection(c, &cycles, n);
        let profile = klm_invariants(&x_plus, &x_minus_eigen, &x_minus, r)?;
        let cokernel_torsion = prym_cokernel_torsion(&involution.iota_x, profile.k)?;
        Ok(InvolutionLattices {
            cycles,
            involution,
            x,
            x_plus,
            x_minus_eigen,
            x_minus,
            profile,
            cokernel_torsion,
        })
    }

    /// `2X^-` as an integral lattice (scale 1).
    pub fn twice_x_minus(&self) -> IntegerLattice {
        IntegerLattice { ambient_dim: self.x_minus.ambient_dim, scale: 1, basis: self.x_minus.basis.clone() }
    }
}

/// `ker(iota -+ 1)` on `X`, in edge coordinates.
pub fn eigenlattice(cycles: &CycleBasis, iota_x: &IMat, sign: Int, ambient: usize) -> IntegerLattice {
    let r = cycles.rank();
    // x (M - sign I) = 0  for row vectors x
    let shifted: IMat = (0..r)
        .map(|i| (0..r).map(|j| iota_x[i][j] - if i == j { sign } else { 0 }).collect())
        .collect();
    let ker = linalg::int_kernel(&linalg::transpose(&shifted, r), r);
    let gens: IMat = ker.iter().map(|k| cycles.to_chain(k)).collect();
    IntegerLattice::new(&gens, 1, ambient)
}

/// `X^-` in doubled coordinates: generated by `b - iota(b)`.
pub fn minus_projection(c: &CurveWithInvolution, cycles: &CycleBasis, ambient: usize) -> IntegerLattice {
    let gens: IMat = cycles
        .basis
        .iter()
        .map(|b| {
            let ib = c.iota1(b);
            b.iter().zip(&ib).map(|(x, y)| x - y).collect()
        })
        .collect();
    IntegerLattice::new(&gens, 2, ambient)
}

pub fn klm_invariants(
    x_plus: &IntegerLattice,
    x_minus_eigen: &IntegerLattice,
    x_minus: &IntegerLattice,
    rank_x: usize,
) -> Result<BlockProfile, LatticeError> {
    let factors = x_minus
        .index_factors(x_minus_eigen)
        .expect("[X]^- has full rank in X^-");
    if factors.iter().any(|d| *d != 1 && *d != 2) {
        return Err(LatticeError::NonTwoTorsionQuotient(factors));
    }
    let m = factors.iter().filter(|d| **d == 2).count();
    let p = BlockProfile { k: x_plus.rank() - m, l: x_minus_eigen.rank() - m, m };
    debug_assert_eq!(p.k + p.l + 2 * p.m, rank_x);
    Ok(p)
}

/// Invariant factors `> 1` of `X/(1+iota)X`; they must all be 2 and number `k`.
pub fn prym_cokernel_torsion(iota_x: &IMat, k: usize) -> Result<Vec<Int>, LatticeError> {
    let r = iota_x.len();
    let one_plus: IMat = (0..r)
        .map(|i| (0..r).map(|j| iota_x[i][j] + Int::from(i == j)).collect())
        .collect();
    let factors: Vec<Int> = linalg::invariant_factors(&one_plus, r)
        .into_iter()
        .filter(|d| *d > 1)
        .collect();
    if factors.len() != k || factors.iter().any(|d| *d != 2) {
        return Err(LatticeError::CokernelMismatch { factors, k });
    }
    Ok(factors)
}

/// The period lattice `Y^-` of the degenerating Prym, by the rule table for
/// the curve types where it is known.
pub fn y_minus_lattice(c: &CurveWithInvolution, lat: &InvolutionLattices) -> YMinus {
    let twice = lat.twice_x_minus();
    let upper = lat.x_minus_eigen.clone();
    let swapping = c.count_class(NodeClass::Swapping);
    let smooth = c.total_smooth_fixed_points();
    let unknown = |hint: Option<Int>| YMinus::Unknown { lower: twice.clone(), upper: upper.clone(), index_hint: hint };

    let candidate = if swapping == 0 && (smooth == 0 || smooth == 2) {
        Some((YMinusRelation::TwiceXMinus, if smooth == 0 {
            "admissible cover: only non-fixed and branchwise fixed nodes"
        } else {
            "two smooth fixed points and no swapping nodes"
        }))
    } else if swapping > 0 && swap_rule_applies(c) {
        if smooth > 0 {
            Some((YMinusRelation::XMinus, "swapping nodes with smooth fixed points"))
        } else if swapping == 1 {
            Some((YMinusRelation::TwiceXMinus, "single swapping node, no smooth fixed points"))
        } else {
            return unknown(Some(2));
        }
    } else {
        None
    };
    let Some((relation, rule)) = candidate else { return unknown(None) };
    let lattice = match relation {
        YMinusRelation::TwiceXMinus => twice.clone(),
        YMinusRelation::XMinus => lat.x_minus.clone(),
    };
    if lattice.contains(&twice) && upper.contains(&lattice) {
        YMinus::Known { lattice, relation, rule: rule.to_string() }
    } else {
        unknown(None)
    }
}

/// The swapping-node rows of the rule table cover irreducible curves and
/// two components joined only to each other.
fn swap_rule_applies(c: &CurveWithInvolution) -> bool {
    match c.num_components() {
        1 => true,
        2 => c.classification().orientation.iter().all(|&(t, h)| t != h),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_and_sum() {
        let a = IntegerLattice::new(&[vec![2, 0], vec![0, 1]], 1, 2);
        let b = IntegerLattice::new(&[vec![1, 1], vec![0, 2]], 1, 2);
        let i = a.intersect(&b);
        assert_eq!(i.basis, vec![vec![2, 0], vec![0, 2]]);
        let s = a.sum(&b);
        assert_eq!(s.basis, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(s.index(&i), Some(4));
    }

    #[test]
    fn half_integral_membership() {
        let xm = IntegerLattice::new(&[vec![1, 1]], 2, 2);
        assert!(xm.contains_scaled(&[1, 1], 1));
        assert!(!xm.contains_scaled(&[1, 0], 1));
    }
}
