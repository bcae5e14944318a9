//! Two-dimensional fans of one-parameter degenerations with a rank one
//! toric part.
//!
//! For a height `H` on `Z` the total space of the family is the torus
//! embedding of the normal fan of the epigraph of `m -> H(m)`: every segment
//! of the lower hull gives a ray, every hull vertex a two-dimensional cone.
//! Rays are written `(a, b)` with `b > 0` and sit at position `a / b` on the
//! line `t = 1`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::HeightFunction;
use crate::linalg::{self, Int, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("height has rank {0}; fans are built for rank one only")]
    NotRankOne(usize),
    #[error("window {window} does not certify periodicity for period {period}")]
    WindowTooSmall { window: Int, period: Int },
    #[error("fans have different periods")]
    IncompatiblePeriods,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationFan {
    /// Primitive rays in angular order; consecutive rays have positive determinant.
    pub rays: Vec<(Int, Int)>,
    /// Hull vertices `m` between consecutive rays, `cones[i]` between `rays[i]` and `rays[i+1]`.
    pub cones: Vec<Int>,
    pub base_ray: (Int, Int),
    /// `H` was multiplied by this to make it integral.
    pub t_scale: Int,
    /// Period of the height in `m`.
    pub period: Int,
    pub rays_per_period: usize,
    /// Change of ray position under one period, as a string rational.
    #[serde(with = "crate::qser::one")]
    pub position_shift: Rat,
}

impl DegenerationFan {
    pub fn positions(&self) -> Vec<Rat> {
        self.rays.iter().map(|(a, b)| Rat::new(*a, *b)).collect()
    }
}

fn det(u: (Int, Int), w: (Int, Int)) -> Int {
    u.0 * w.1 - u.1 * w.0
}

fn primitive(a: Int, b: Int) -> (Int, Int) {
    let g = num_integer::gcd(a, b);
    (a / g, b / g)
}

/// Fan of the lower hull of `{(m, H(m))}` with `|m| <= window`.
pub fn build_family_fan(h: &HeightFunction, window: Int) -> Result<DegenerationFan, FanError> {
    if h.rank() != 1 {
        return Err(FanError::NotRankOne(h.rank()));
    }
    let p = h.period[0][0];
    if window < p {
        return Err(FanError::WindowTooSmall { window, period: p });
    }
    let pad = 2 * p;
    let ms: Vec<Int> = (-window - pad..=window + pad).collect();
    let vals: Vec<Rat> = ms.iter().map(|m| h.value(&[*m])).collect();
    let t_scale = vals.iter().fold(1, |acc, v| num_integer::lcm(acc, *v.denom()));
    let hs: Vec<Int> = vals.iter().map(|v| (v * t_scale).to_integer()).collect();

    // lower hull, strictly convex vertices only
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..ms.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (ms[b] - ms[a]) * (hs[i] - hs[a]) - (hs[b] - hs[a]) * (ms[i] - ms[a]);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let inside: Vec<usize> = hull.into_iter().filter(|&i| ms[i].abs() <= window).collect();
    let breakpoints: Vec<Int> = inside.iter().map(|&i| ms[i]).collect();
    let bset: BTreeSet<Int> = breakpoints.iter().copied().collect();
    let periodic = breakpoints
        .iter()
        .all(|b| b + p > window || bset.contains(&(b + p)));
    let rays_per_period = bset.iter().filter(|b| (0..p).contains(*b)).count();
    if !periodic || rays_per_period == 0 || breakpoints.len() <= rays_per_period {
        return Err(FanError::WindowTooSmall { window, period: p });
    }
    let rays: Vec<(Int, Int)> = inside
        .windows(2)
        .map(|w| primitive(-(hs[w[1]] - hs[w[0]]), ms[w[1]] - ms[w[0]]))
        .collect();
    let cones = breakpoints[1..breakpoints.len() - 1].to_vec();
    let pos: Vec<Rat> = rays.iter().map(|(a, b)| Rat::new(*a, *b)).collect();
    let shifts: BTreeSet<Rat> = (0..pos.len().saturating_sub(rays_per_period))
        .map(|i| pos[i + rays_per_period] - pos[i])
        .collect();
    if shifts.len() != 1 {
        return Err(FanError::WindowTooSmall { window, period: p });
    }
    Ok(DegenerationFan {
        rays,
        cones,
        base_ray: (0, 1),
        t_scale,
        period: p,
        rays_per_period,
        position_shift: *shifts.iter().next().unwrap(),
    })
}

/// The cyclic quotient singularity at the cone over hull vertex `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnSingularity {
    pub vertex: Int,
    pub index: Int,
    /// `Some(index - 1)` when the cone is Gorenstein, i.e. of type `A_n`;
    /// `None` for the other cyclic quotients of the same index.
    pub n: Option<Int>,
    /// Exceptional curves in the minimal resolution.
    pub exceptional_curves: usize,
}

/// Singular cones over one period. A cone `<u, w>` of index `d` is of type
/// `A_{d-1}` exactly when some integral functional is 1 on both rays.
pub fn an_singularities(fan: &DegenerationFan) -> Vec<AnSingularity> {
    let mut out = Vec::new();
    for (i, &m) in fan.cones.iter().enumerate() {
        if !(0..fan.period).contains(&m) {
            continue;
        }
        let (u, w) = (fan.rays[i], fan.rays[i + 1]);
        let index = det(u, w).abs();
        if index >= 2 {
            let gorenstein = (w.1 - u.1) % index == 0 && (u.0 - w.0) % index == 0;
            out.push(AnSingularity {
                vertex: m,
                index,
                n: gorenstein.then_some(index - 1),
                exceptional_curves: resolve_cone(u, w).len() - 2,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinedFan {
    /// Rays in angular order, covering the union of the input windows.
    pub rays: Vec<(Int, Int)>,
    /// Rays per period: components of the central fiber.
    pub central_fiber_components: usize,
    #[serde(with = "crate::qser::one")]
    pub position_shift: Rat,
}

fn count_mod(positions: &[Rat], shift: Rat) -> usize {
    let reduced: BTreeSet<Rat> = positions
        .iter()
        .map(|x| {
            let q = (x / shift).floor();
            x - q * shift
        })
        .collect();
    reduced.len()
}

fn sorted_rays(set: BTreeSet<(Int, Int)>) -> Vec<(Int, Int)> {
    let mut rays: Vec<(Int, Int)> = set.into_iter().collect();
    // decreasing position a/b is increasing angle
    rays.sort_by(|u, w| (w.0 * u.1).cmp(&(u.0 * w.1)));
    rays
}

/// Union of the rays of two fans with the same period.
pub fn common_refinement(f1: &DegenerationFan, f2: &DegenerationFan) -> Result<RefinedFan, FanError> {
    if f1.position_shift != f2.position_shift {
        return Err(FanError::IncompatiblePeriods);
    }
    let set: BTreeSet<(Int, Int)> = f1.rays.iter().chain(&f2.rays).copied().collect();
    let rays = sorted_rays(set);
    let pos: Vec<Rat> = rays.iter().map(|(a, b)| Rat::new(*a, *b)).collect();
    Ok(RefinedFan {
        central_fiber_components: count_mod(&pos, linalg::abs_rat(f1.position_shift)),
        rays,
        position_shift: f1.position_shift,
    })
}

/// Rays of the minimal resolution of the cone spanned by `u`, `w`
/// (`det(u, w) > 0`), including `u` and `w`: the boundary of the convex hull
/// of the nonzero lattice points of the cone.
pub fn resolve_cone(u: (Int, Int), w: (Int, Int)) -> Vec<(Int, Int)> {
    assert!(det(u, w) > 0, "cone must be strictly convex and positively oriented");
    let xs = [0, u.0, w.0, u.0 + w.0];
    let ys = [0, u.1, w.1, u.1 + w.1];
    let mut pts: Vec<(Int, Int)> = Vec::new();
    for x in *xs.iter().min().unwrap()..=*xs.iter().max().unwrap() {
        for y in *ys.iter().min().unwrap()..=*ys.iter().max().unwrap() {
            let p = (x, y);
            if p != (0, 0) && det(u, p) >= 0 && det(p, w) >= 0 {
                pts.push(p);
            }
        }
    }
    // angular order from u to w, nearer points first on a common ray
    pts.sort_by(|a, b| det(*b, *a).cmp(&0).then((a.0.abs() + a.1.abs()).cmp(&(b.0.abs() + b.1.abs()))));
    pts.dedup_by(|a, b| det(*a, *b) == 0);
    let mut chain: Vec<(Int, Int)> = Vec::new();
    for p in pts {
        while chain.len() >= 2 {
            let (a, b) = (chain[chain.len() - 2], chain[chain.len() - 1]);
            if det((b.0 - a.0, b.1 - a.1), (p.0 - b.0, p.1 - b.1)) > 0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    chain
}

/// The minimal resolution: every cone subdivided into unimodular cones.
pub fn minimal_resolution(f: &RefinedFan) -> RefinedFan {
    let mut set: BTreeSet<(Int, Int)> = BTreeSet::new();
    for w in f.rays.windows(2) {
        set.extend(resolve_cone(w[0], w[1]));
    }
    set.extend(f.rays.iter().copied());
    let rays = sorted_rays(set);
    let pos: Vec<Rat> = rays.iter().map(|(a, b)| Rat::new(*a, *b)).collect();
    RefinedFan { central_fiber_components: count_mod(&pos, linalg::abs_rat(f.position_shift)), rays, position_shift: f.position_shift }
}

/// The fan itself as a refinement, for feeding into [`minimal_resolution`].
pub fn as_refined(f: &DegenerationFan) -> RefinedFan {
    RefinedFan { rays: f.rays.clone(), central_fiber_components: f.rays_per_period, position_shift: f.position_shift }
}
