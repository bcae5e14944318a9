//! The decompositions attached to a curve with involution and the two
//! dicing conditions on the Prym side.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cells::decomposition::coset_reps;
use crate::cells::dicing::{integrality_lattice, vertex_outside_lattice};
use crate::cells::enumerate::{covering_bound, ellipsoid_points, quad};
use crate::cells::envelope::reduce_mod;
use crate::cells::{
    arrangement_decomposition, delaunay, dicing_check, CellError, DicingVerdict, DicingWitness, HeightFunction,
    PeriodicDecomposition, Residue,
};
use crate::curve::{CurveWithInvolution, NodeClass};
use crate::forms::{edge_functionals, gram_of, minus_form, restrict_form};
use crate::lattice::{InvolutionLattices, YMinus};
use crate::linalg::{self, IMat, Int, RMat, Rat};

/// Image of `z_j` on `X^-` inside `(1/2) Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeRestriction {
    Zero,
    Integral,
    HalfIntegral,
    /// Image generated by an unexpected rational.
    Other(String),
}

#[derive(Debug, Clone)]
pub struct PrymDicing {
    pub restrictions: Vec<EdgeRestriction>,
    /// `m_j`, with `m_j z_j` having image exactly `Z` (or 0 when `z_j` vanishes).
    pub multipliers: Vec<Rat>,
    pub verdict: DicingVerdict,
    /// The dicing itself when the verdict holds.
    pub dicing: Option<PeriodicDecomposition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MiddlePrymVerdict {
    Holds,
    Fails(DicingWitness),
    NotApplicable(String),
}

impl MiddlePrymVerdict {
    pub fn as_option(&self) -> Option<bool> {
        match self {
            MiddlePrymVerdict::Holds => Some(true),
            MiddlePrymVerdict::Fails(_) => Some(false),
            MiddlePrymVerdict::NotApplicable(_) => None,
        }
    }
}

/// `z_j` restricted to `X^-`, in `X^-` coordinates.
pub fn minus_functionals(lat: &InvolutionLattices) -> RMat {
    edge_functionals(&lat.x_minus)
}

fn image_generator(g: &[Rat]) -> Rat {
    // gcd of rationals: gcd(numerators of common-denominator form) / denominator
    let d = linalg::lcm_denominators(g);
    let n = g.iter().fold(0, |acc: Int, x| num_integer::gcd(acc, (x * d).to_integer()));
    Rat::new(n, d)
}

/// The condition that the functionals `m_j z_j` dice `X^-`.
pub fn prym_dicing_condition(lat: &InvolutionLattices) -> Result<PrymDicing, CellError> {
    let r = lat.x_minus.rank();
    let f = minus_functionals(lat);
    let mut restrictions = Vec::new();
    let mut multipliers = Vec::new();
    let mut scaled = Vec::new();
    for g in &f {
        let c = image_generator(g);
        let (kind, m) = if c.is_zero() {
            (EdgeRestriction::Zero, Rat::zero())
        } else if c == Rat::one() {
            (EdgeRestriction::Integral, Rat::one())
        } else if c == Rat::new(1, 2) {
            (EdgeRestriction::HalfIntegral, Rat::from_integer(2))
        } else {
            (EdgeRestriction::Other(crate::qser::format(&c)), c.recip())
        };
        scaled.push(g.iter().map(|x| x * m).collect::<Vec<Rat>>());
        restrictions.push(kind);
        multipliers.push(m);
    }
    let verdict = dicing_check(&scaled, r)?;
    let dicing = if verdict.holds() { Some(arrangement_decomposition(&scaled, r)?) } else { None };
    Ok(PrymDicing { restrictions, multipliers, verdict, dicing })
}

/// Whether the curve lies in the class where the middle Prym is compared
/// with the principally polarized limit, and `Y^- = 2X^-`.
pub fn middle_prym_applicable(c: &CurveWithInvolution, ym: &YMinus) -> Result<(), String> {
    let swapping = c.count_class(NodeClass::Swapping);
    let smooth = c.total_smooth_fixed_points();
    let class_ok = (smooth == 0 && swapping <= 1) || (smooth == 2 && swapping == 0);
    if !class_ok {
        return Err(format!(
            "needs no smooth fixed points and at most one swapping node, or two smooth fixed points and no swapping nodes (found {smooth} and {swapping})"
        ));
    }
    if !ym.is_twice_x_minus() {
        return Err("Y^- is not known to equal 2X^-".into());
    }
    Ok(())
}

/// The condition that the slice decomposition is a dicing for `2X^-`.
pub fn middle_prym_condition(
    c: &CurveWithInvolution,
    lat: &InvolutionLattices,
    ym: &YMinus,
) -> Result<MiddlePrymVerdict, CellError> {
    if let Err(why) = middle_prym_applicable(c, ym) {
        return Ok(MiddlePrymVerdict::NotApplicable(why));
    }
    let r = lat.x_minus.rank();
    let doubled: RMat = minus_functionals(lat)
        .iter()
        .map(|g| g.iter().map(|x| x * Rat::from_integer(2)).collect())
        .collect();
    Ok(match dicing_check(&doubled, r)? {
        DicingVerdict::Dicing => MiddlePrymVerdict::Holds,
        DicingVerdict::NotDicing(w) => MiddlePrymVerdict::Fails(w),
    })
}

/// The Jacobian decomposition: the arrangement of `z_j` on `X`.
pub fn jacobian_decomposition(lat: &InvolutionLattices) -> Result<PeriodicDecomposition, CellError> {
    arrangement_decomposition(&edge_functionals(&lat.x), lat.x.rank())
}

/// The slice of the Jacobian decomposition by `X^-_R`, on `X^-` coordinates,
/// periodic under `[X]^-`. Its vertices always lie in `X^-`; an error here
/// signals an inconsistent lattice computation.
pub fn sliced_decomposition(lat: &InvolutionLattices) -> Result<PeriodicDecomposition, CellError> {
    let r = lat.x_minus.rank();
    let f = minus_functionals(lat);
    if r > 0 {
        if let Some(w) = vertex_outside_lattice(&f, r)? {
            return Err(CellError::NotLatticeVertexed(w));
        }
    }
    arrangement_decomposition(&f, r)
}

/// `[X]^-` in `X^-` coordinates.
pub fn eigen_in_minus_coords(lat: &InvolutionLattices) -> IMat {
    let r = lat.x_minus.rank();
    let rows: IMat = lat
        .x_minus_eigen
        .basis
        .iter()
        .map(|b| lat.x_minus.coords_of(b, 1).expect("[X]^- lies in X^-"))
        .collect();
    linalg::hnf(&rows, r)
}

/// Delaunay decomposition of `X^-` for the principal form; needs `Y^-`.
pub fn pp_delaunay(
    lat: &InvolutionLattices,
    ym: &YMinus,
    alpha: &[Int],
) -> Option<Result<PeriodicDecomposition, CellError>> {
    let form = crate::forms::principal_form(lat, ym, alpha)?;
    Some(delaunay(&form.gram))
}

/// Delaunay decomposition of `X^-` for `B^-`, regardless of `Y^-`.
pub fn minus_delaunay(lat: &InvolutionLattices, alpha: &[Int]) -> Result<PeriodicDecomposition, CellError> {
    delaunay(&minus_form(lat, alpha).gram)
}

/// Cell-set equality of the slice decomposition with twice the
/// principal Delaunay decomposition, compared modulo `2X^-`.
pub fn sliced_equals_twice(sliced: &PeriodicDecomposition, pp: &PeriodicDecomposition) -> bool {
    let r = sliced.rank;
    let two: IMat = (0..r).map(|i| (0..r).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
    let doubled = pp.scaled(2);
    let ours = sliced.vertex_keys_mod(&two);
    ours == doubled.vertex_keys_mod(&two)
}

/// Height on `X^-` induced from `x -> B(x, x)/2` on `X` by minimizing over
/// the fibers of the projection `X -> X^-`. `alpha` must be invariant.
pub fn induced_height(lat: &InvolutionLattices, alpha: &[Int]) -> HeightFunction {
    let rm = lat.x_minus.rank();
    let period = eigen_in_minus_coords(lat);
    let half = Rat::new(1, 2);
    let bm = minus_form(lat, alpha);
    let quad_part: RMat = bm.gram.iter().map(|r| r.iter().map(|x| x * half).collect()).collect();
    if rm == 0 {
        return HeightFunction { quad: quad_part, linear: Vec::new(), period, residue: Residue::Zero };
    }
    // projections of the X basis in X^- coordinates
    let xb = &lat.x.basis;
    let n = lat.x.ambient_dim;
    let proj: IMat = xb
        .iter()
        .map(|b| {
            let ib = lat_iota(lat, b);
            let d: Vec<Int> = b.iter().zip(&ib).map(|(x, y)| x - y).collect();
            lat.x_minus.coords_of(&d, 2).expect("pi^- lands in X^-")
        })
        .collect();
    let plus = &lat.x_plus;
    let plus_rat = plus.rational_basis();
    let gplus = gram_of(alpha, &plus_rat);
    let mut table = std::collections::BTreeMap::new();
    for rep in coset_reps(&linalg::identity(rm), &period) {
        let a = linalg::solve_int_row(&proj, rm, &rep).expect("pi^- is onto X^-");
        let x0 = linalg::vec_mat(&a, xb, n);
        let ix0 = lat_iota(lat, &x0);
        // x0^+ = (x0 + iota x0)/2
        let xp: Vec<Rat> = x0.iter().zip(&ix0).map(|(u, v)| Rat::new(u + v, 2)).collect();
        let value = if plus.rank() == 0 {
            crate::forms::pairing(alpha, &xp, &xp) * half
        } else {
            let coords = linalg::coords_rat(&plus_rat, &xp).expect("x^+ lies in [X]^+ (x) Q");
            let target: Vec<Rat> = coords.iter().map(|c| -*c).collect();
            let bound = covering_bound(&gplus);
            ellipsoid_points(&gplus, &target, bound)
                .into_iter()
                .map(|y| {
                    let d: Vec<Rat> = y.iter().zip(&target).map(|(a, t)| Rat::from_integer(*a) - t).collect();
                    quad(&gplus, &d) * half
                })
                .min()
                .expect("covering bound guarantees a point")
        };
        table.insert(reduce_mod(&period, &rep), value);
    }
    HeightFunction { quad: quad_part, linear: vec![Rat::zero(); rm], period, residue: Residue::Table(table) }
}

fn lat_iota(lat: &InvolutionLattices, v: &[Int]) -> Vec<Int> {
    linalg::mat_vec(&lat.involution.iota1, v)
}

/// The height on `X^-` cut out by the Jacobian Delaunay height on the slice:
/// `sum_j alpha_j phi(z_j)/2` with `phi` the integer interpolation of `t^2`.
pub fn sliced_height(lat: &InvolutionLattices, alpha: &[Int]) -> Result<HeightFunction, CellError> {
    let r = lat.x_minus.rank();
    let f = minus_functionals(lat);
    let period = integrality_lattice(&f, r);
    let live: RMat = f
        .iter()
        .zip(alpha)
        .flat_map(|(g, a)| std::iter::repeat_n(g.clone(), *a as usize))
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .collect();
    Ok(HeightFunction::arrangement(&live, period))
}

/// Orbits of cells by dimension, `0..=rank`.
pub fn strata_census(d: &PeriodicDecomposition) -> Vec<usize> {
    d.census()
}

/// `B` restricted to `X`, for reports.
pub fn jacobian_form(lat: &InvolutionLattices, alpha: &[Int]) -> RMat {
    restrict_form(alpha, &lat.x).gram
}
