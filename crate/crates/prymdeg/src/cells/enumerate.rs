//! Lattice points in ellipsoids.

use num_traits::Zero;

use crate::linalg::{Int, RMat, Rat};

pub fn to_f64(x: Rat) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `q(y) = sum_i d[i] * (y_i + sum_{j>i} mu[i][j] y_j)^2`.
#[derive(Debug, Clone)]
pub struct Ldl {
    pub d: Vec<Rat>,
    pub mu: RMat,
}

pub fn ldl(g: &[Vec<Rat>]) -> Ldl {
    let r = g.len();
    let mut a = g.to_vec();
    let mut d = vec![Rat::zero(); r];
    let mut mu = vec![vec![Rat::zero(); r]; r];
    for i in 0..r {
        d[i] = a[i][i];
        assert!(d[i] > Rat::zero(), "form is not positive definite");
        for j in i + 1..r {
            mu[i][j] = a[i][j] / d[i];
        }
        for j in i + 1..r {
            for k in i + 1..r {
                a[j][k] = a[j][k] - a[j][i] * a[i][k] / d[i];
            }
        }
    }
    Ldl { d, mu }
}

pub fn is_positive_definite(g: &[Vec<Rat>]) -> bool {
    let r = g.len();
    let mut a = g.to_vec();
    for i in 0..r {
        if a[i][i] <= Rat::zero() {
            return false;
        }
        for j in i + 1..r {
            for k in i + 1..r {
                a[j][k] = a[j][k] - a[j][i] * a[i][k] / a[i][i];
            }
        }
    }
    true
}

/// Every point of the real span is within `q`-distance squared of this bound
/// from a lattice point (nearest-plane rounding).
pub fn covering_bound(g: &[Vec<Rat>]) -> Rat {
    ldl(g).d.iter().fold(Rat::zero(), |s, x| s + x) / Rat::from_integer(4)
}

pub fn quad(g: &[Vec<Rat>], y: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for (i, row) in g.iter().enumerate() {
        for (j, gij) in row.iter().enumerate() {
            s += y[i] * gij * y[j];
        }
    }
    s
}

/// All `x` in `Z^r` with `(x-c)^T G (x-c) <= bound`.
pub fn ellipsoid_points(g: &[Vec<Rat>], center: &[Rat], bound: Rat) -> Vec<Vec<Int>> {
    let r = g.len();
    if r == 0 {
        return if bound >= Rat::zero() { vec![Vec::new()] } else { Vec::new() };
    }
    if bound < Rat::zero() {
        return Vec::new();
    }
    let l = ldl(g);
    let d: Vec<f64> = l.d.iter().map(|x| to_f64(*x)).collect();
    let mu: Vec<Vec<f64>> = l.mu.iter().map(|r| r.iter().map(|x| to_f64(*x)).collect()).collect();
    let c: Vec<f64> = center.iter().map(|x| to_f64(*x)).collect();
    let b = to_f64(bound);
    let mut out = Vec::new();
    let mut x = vec![0 as Int; r];
    recurse(r - 1, b, &d, &mu, &c, &mut x, &mut out);
    out.retain(|p| {
        let y: Vec<Rat> = p.iter().zip(center).map(|(a, c)| Rat::from_integer(*a) - c).collect();
        quad(g, &y) <= bound
    });
    out.sort();
    out
}

fn recurse(
    i: usize,
    budget: f64,
    d: &[f64],
    mu: &[Vec<f64>],
    c: &[f64],
    x: &mut Vec<Int>,
    out: &mut Vec<Vec<Int>>,
) {
    let r = d.len();
    let shift: f64 = (i + 1..r).map(|j| mu[i][j] * (x[j] as f64 - c[j])).sum();
    let mid = c[i] - shift;
    let slack = 1e-9 * (1.0 + budget.abs());
    let rad = ((budget.max(0.0) + slack) / d[i]).sqrt() + 1e-9;
    let lo = (mid - rad).floor() as Int;
    let hi = (mid + rad).ceil() as Int;
    for v in lo..=hi {
        let t = v as f64 - mid;
        let used = d[i] * t * t;
        if used > budget + slack {
            continue;
        }
        x[i] = v;
        if i == 0 {
            out.push(x.clone());
        } else {
            recurse(i - 1, budget - used, d, mu, c, x, out);
        }
    }
}
