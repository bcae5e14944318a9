//! Quadratic forms `B = sum alpha_j z_j^2` and their restrictions.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::CurveWithInvolution;
use crate::lattice::{IntegerLattice, InvolutionLattices, YMinus, YMinusRelation};
use crate::linalg::{Int, RMat, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("weight for node {0} must be a positive integer")]
    NonPositiveWeight(String),
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weights of node {0} and its image differ")]
    NonInvariantWeight(String),
}

/// Gram matrix on the basis of a lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticForm {
    #[serde(with = "crate::qser::mat")]
    pub gram: RMat,
    pub lattice: IntegerLattice,
}

impl QuadraticForm {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn scaled(&self, k: Rat) -> Self {
        QuadraticForm {
            gram: self.gram.iter().map(|r| r.iter().map(|x| x * k).collect()).collect(),
            lattice: self.lattice.clone(),
        }
    }
}

pub fn check_weights(c: &CurveWithInvolution, alpha: &[Int]) -> Result<(), FormError> {
    if alpha.len() != c.num_nodes() {
        return Err(FormError::WeightCount { expected: c.num_nodes(), got: alpha.len() });
    }
    for (a, n) in alpha.iter().zip(&c.spec.nodes) {
        if *a < 1 {
            return Err(FormError::NonPositiveWeight(n.id.clone()));
        }
    }
    Ok(())
}

/// `B(u, v) = sum_j alpha_j u_j v_j` on actual (possibly half-integral) vectors.
pub fn pairing(alpha: &[Int], u: &[Rat], v: &[Rat]) -> Rat {
    alpha
        .iter()
        .zip(u.iter().zip(v))
        .fold(Rat::zero(), |s, (a, (x, y))| s + Rat::from_integer(*a) * x * y)
}

/// Gram matrix of `B` on arbitrary actual vectors.
pub fn gram_of(alpha: &[Int], vectors: &[Vec<Rat>]) -> RMat {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| pairing(alpha, u, v)).collect())
        .collect()
}

pub fn restrict_form(alpha: &[Int], lattice: &IntegerLattice) -> QuadraticForm {
    QuadraticForm { gram: gram_of(alpha, &lattice.rational_basis()), lattice: lattice.clone() }
}

pub fn picard_lefschetz_form(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    alpha: &[Int],
) -> Result<QuadraticForm, FormError> {
    check_weights(c, alpha)?;
    Ok(restrict_form(alpha, &lat.x))
}

/// `B^-`, the restriction of `B` to `X^-`.
pub fn minus_form(lat: &InvolutionLattices, alpha: &[Int]) -> QuadraticForm {
    restrict_form(alpha, &lat.x_minus)
}

/// `[B/2]^-` transported to `X^-` through the identification `Y^- = X^-`
/// or `Y^- = 2X^-`; `None` when `Y^-` is not known.
pub fn principal_form(lat: &InvolutionLattices, ym: &YMinus, alpha: &[Int]) -> Option<QuadraticForm> {
    let b = minus_form(lat, alpha);
    match ym {
        YMinus::Known { relation: YMinusRelation::TwiceXMinus, .. } => Some(b.scaled(Rat::from_integer(2))),
        YMinus::Known { relation: YMinusRelation::XMinus, .. } => Some(b),
        YMinus::Unknown { .. } => None,
    }
}

/// The coordinate functionals `z_j` in the basis of a lattice; row `j` is `z_j`.
pub fn edge_functionals(lattice: &IntegerLattice) -> RMat {
    (0..lattice.ambient_dim)
        .map(|j| lattice.basis.iter().map(|b| Rat::new(b[j], lattice.scale)).collect())
        .collect()
}

/// [`check_weights`] plus invariance under the involution.
pub fn check_invariant_weights(c: &CurveWithInvolution, alpha: &[Int]) -> Result<(), FormError> {
    check_weights(c, alpha)?;
    let cl = c.classification();
    match (0..alpha.len()).find(|&j| alpha[j] != alpha[cl.edge_map[j]]) {
        Some(j) => Err(FormError::NonInvariantWeight(c.spec.nodes[j].id.clone())),
        None => Ok(()),
    }
}

/// Whether the weights are constant on orbits of the involution.
pub fn is_invariant_weight(c: &CurveWithInvolution, alpha: &[Int]) -> bool {
    let cl = c.classification();
    (0..alpha.len()).all(|j| alpha[j] == alpha[cl.edge_map[j]])
}
