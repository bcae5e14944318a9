//! Independent reference computations for the property and acceptance suites.

use std::collections::BTreeSet;

use num_traits::Zero;
use prymdeg::linalg::{IMat, Int, RMat, Rat};
use rand::rngs::StdRng;
use rand::Rng;

/// Cell canonical modulo `Z^r`: translated so that its smallest point is 0, sorted.
pub fn canon(cell: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let min = cell.iter().min().unwrap().clone();
    let mut out: Vec<Vec<Int>> = cell.iter().map(|v| v.iter().zip(&min).map(|(a, b)| a - b).collect()).collect();
    out.sort();
    out
}

fn q(g: &RMat, x: &[Rat]) -> Rat {
    let mut s = Rat::zero();
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += x[i] * g[i][j] * x[j];
        }
    }
    s
}

/// Plain Gaussian elimination, `None` when singular.
fn solve(mut a: RMat, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c] / a[c][c];
                for k in c..n {
                    let v = a[c][k];
                    a[r][k] -= f * v;
                }
                let v = b[c];
                b[r] -= f * v;
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn box_points(r: usize, lo: &[Int], hi: &[Int]) -> Vec<Vec<Int>> {
    let mut out = vec![Vec::new()];
    for i in 0..r {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Int>| {
                (lo[i]..=hi[i]).map(move |x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Delaunay cells of a positive definite form whose cells have all vertices
/// within `[-reach, reach]^r` of each other, found by trying every simplex
/// through the origin and testing its circumscribed ellipsoid for emptiness
/// by brute force.
pub fn brute_force_delaunay(g: &RMat, reach: Int) -> BTreeSet<Vec<Vec<Int>>> {
    let r = g.len();
    let near: Vec<Vec<Int>> = box_points(r, &vec![-reach; r], &vec![reach; r]).into_iter().filter(|p| p.iter().any(|x| *x != 0)).collect();
    let mut cells = BTreeSet::new();
    let mut idx: Vec<usize> = (0..r).collect();
    if near.len() < r {
        return cells;
    }
    let ginv = invert(g);
    let gf: Vec<Vec<f64>> = g.iter().map(|row| row.iter().map(|x| to_f(*x)).collect()).collect();
    loop {
        let simplex: Vec<&Vec<Int>> = idx.iter().map(|&i| &near[i]).collect();
        // |p - c|^2 = |c|^2  <=>  2 p^T G c = p^T G p
        let rows: RMat = simplex
            .iter()
            .map(|p| (0..r).map(|j| (0..r).fold(Rat::zero(), |s, i| s + Rat::from_integer(2 * p[i]) * g[i][j])).collect())
            .collect();
        let rhs: Vec<Rat> = simplex.iter().map(|p| q(g, &p.iter().map(|x| Rat::from_integer(*x)).collect::<Vec<_>>())).collect();
        if let Some(c) = solve(rows, rhs) {
            let rad = q(g, &c);
            // bounding box of the ellipsoid from the diagonal of G^{-1}
            let lo: Vec<Int> = (0..r).map(|i| (to_f(c[i]) - (to_f(rad) * to_f(ginv[i][i])).sqrt()).floor() as Int - 1).collect();
            let hi: Vec<Int> = (0..r).map(|i| (to_f(c[i]) + (to_f(rad) * to_f(ginv[i][i])).sqrt()).ceil() as Int + 1).collect();
            let mut on = Vec::new();
            let mut empty = true;
            // floating point triage, exact arithmetic near the boundary
            let cf: Vec<f64> = c.iter().map(|x| to_f(*x)).collect();
            let radf = to_f(rad);
            let eps = 1e-9 * (1.0 + radf);
            // most simplices are refuted by a nearby point
            let refuted = near.iter().any(|x| {
                let d: Vec<f64> = x.iter().zip(&cf).map(|(a, b)| *a as f64 - b).collect();
                let vf: f64 = (0..r).map(|i| (0..r).map(|j| d[i] * gf[i][j] * d[j]).sum::<f64>()).sum();
                vf < radf - eps
            });
            let scan = if refuted {
                empty = false;
                Vec::new()
            } else {
                box_points(r, &lo, &hi)
            };
            for x in scan {
                let d: Vec<f64> = x.iter().zip(&cf).map(|(a, b)| *a as f64 - b).collect();
                let mut vf = 0.0;
                for i in 0..r {
                    for j in 0..r {
                        vf += d[i] * gf[i][j] * d[j];
                    }
                }
                if vf > radf + eps {
                    continue;
                }
                if vf < radf - eps {
                    empty = false;
                    break;
                }
                let d: Vec<Rat> = x.iter().zip(&c).map(|(a, b)| Rat::from_integer(*a) - b).collect();
                let v = q(g, &d);
                if v < rad {
                    empty = false;
                    break;
                }
                if v == rad {
                    on.push(x);
                }
            }
            if empty {
                cells.insert(canon(&on));
            }
        }
        // next r-subset
        let mut k = r;
        loop {
            if k == 0 {
                return cells;
            }
            k -= 1;
            if idx[k] < near.len() - (r - k) {
                idx[k] += 1;
                for m in k + 1..r {
                    idx[m] = idx[m - 1] + 1;
                }
                break;
            }
        }
    }
}

fn to_f(x: Rat) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn invert(g: &RMat) -> RMat {
    let r = g.len();
    let cols: Vec<Vec<Rat>> = (0..r)
        .map(|j| solve(g.clone(), (0..r).map(|i| Rat::from_integer(Int::from(i == j))).collect()).unwrap())
        .collect();
    (0..r).map(|i| (0..r).map(|j| cols[j][i]).collect()).collect()
}

/// A form of Voronoi's first kind: `sum p_ij (e_i - e_j)^2` over an obtuse
/// superbase `e_0 = -(e_1 + ... + e_r)`. Its Delaunay cells are spanned by
/// partial sums of superbase vectors, so they fit in `[-1, 1]^r` when every
/// weight is positive and in `[-2, 2]^r` otherwise.
pub fn selling_form(rng: &mut StdRng, r: usize, allow_zero: bool) -> RMat {
    loop {
        let mut g = vec![vec![Rat::zero(); r]; r];
        let sb = |i: usize| -> Vec<Int> {
            if i == 0 {
                vec![-1; r]
            } else {
                (0..r).map(|k| Int::from(k + 1 == i)).collect()
            }
        };
        let mut connected = vec![false; r + 1];
        connected[0] = true;
        let mut weights = Vec::new();
        for i in 0..=r {
            for j in i + 1..=r {
                let p: Int = rng.random_range(if allow_zero { 0 } else { 1 }..=3);
                weights.push((i, j, p));
            }
        }
        // connectivity of the positive-weight graph makes the form definite
        for _ in 0..=r {
            for &(i, j, p) in &weights {
                if p > 0 && (connected[i] || connected[j]) {
                    connected[i] = true;
                    connected[j] = true;
                }
            }
        }
        if connected.iter().any(|c| !c) {
            continue;
        }
        for &(i, j, p) in &weights {
            let (a, b) = (sb(i), sb(j));
            let d: Vec<Int> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            for u in 0..r {
                for v in 0..r {
                    g[u][v] += Rat::from_integer(p * d[u] * d[v]);
                }
            }
        }
        return g;
    }
}

/// A random unimodular matrix and its inverse, as products of elementary moves.
pub fn unimodular(rng: &mut StdRng, r: usize, steps: usize) -> (IMat, IMat) {
    let mut u = prymdeg::linalg::identity(r);
    let mut inv = prymdeg::linalg::identity(r);
    if r < 2 {
        if r == 1 && rng.random_bool(0.5) {
            u[0][0] = -1;
            inv[0][0] = -1;
        }
        return (u, inv);
    }
    for _ in 0..steps {
        let i = rng.random_range(0..r);
        let mut j = rng.random_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let c: Int = if rng.random_bool(0.5) { 1 } else { -1 };
        // u <- u * (I + c E_ij): column j += c * column i
        for row in u.iter_mut() {
            row[j] += c * row[i];
        }
        // inv <- (I - c E_ij) * inv: row i -= c * row j
        let rj = inv[j].clone();
        for (x, y) in inv[i].iter_mut().zip(&rj) {
            *x -= c * y;
        }
    }
    (u, inv)
}

/// `U^T G U`.
pub fn congruent(g: &RMat, u: &IMat) -> RMat {
    let r = g.len();
    (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    let mut s = Rat::zero();
                    for i in 0..r {
                        for j in 0..r {
                            s += Rat::from_integer(u[i][a]) * g[i][j] * Rat::from_integer(u[j][b]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `diag(+1^k, -1^l, swap^m)`.
pub fn block_involution(k: usize, l: usize, m: usize) -> IMat {
    let r = k + l + 2 * m;
    let mut d = vec![vec![0; r]; r];
    for i in 0..k {
        d[i][i] = 1;
    }
    for i in k..k + l {
        d[i][i] = -1;
    }
    for b in 0..m {
        let i = k + l + 2 * b;
        d[i][i + 1] = 1;
        d[i + 1][i] = 1;
    }
    d
}
