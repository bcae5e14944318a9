//! Exact integer and rational matrix routines.
//!
//! Matrices are row-major `Vec<Vec<_>>`. Lattices are always given by rows.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = i128;
pub type Rat = num_rational::Ratio<i128>;
pub type IMat = Vec<Vec<Int>>;
pub type RMat = Vec<Vec<Rat>>;

pub fn rat(n: Int) -> Rat {
    Rat::from_integer(n)
}

pub fn ratio(n: Int, d: Int) -> Rat {
    Rat::new(n, d)
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| Int::from(i == j)).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    (0..ncols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>], bcols: usize) -> IMat {
    a.iter()
        .map(|row| {
            (0..bcols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Int>], v: &[Int]) -> Vec<Int> {
    a.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Int], a: &[Vec<Int>], acols: usize) -> Vec<Int> {
    (0..acols)
        .map(|j| v.iter().zip(a).map(|(x, row)| x * row[j]).sum())
        .collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rdot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

pub fn to_rat_mat(m: &[Vec<Int>]) -> RMat {
    m.iter().map(|r| to_rat_vec(r)).collect()
}

fn row_axpy(target: &mut [Int], q: Int, src: &[Int]) {
    for (t, s) in target.iter_mut().zip(src) {
        *t -= q * s;
    }
}

pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(0, |g: Int, x| g.gcd(x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Row echelon form by unimodular row operations, pivoting only on the
/// first `pivot_cols` columns. Returns the reduced matrix and the number of
/// pivot rows. Pivots are positive and entries above a pivot are reduced
/// into `[0, pivot)`.
fn echelon(mut m: IMat, pivot_cols: usize) -> (IMat, usize) {
    let nrows = m.len();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == nrows {
            break;
        }
        loop {
            let best = (r..nrows)
                .filter(|&i| m[i][c] != 0)
                .min_by_key(|&i| m[i][c].abs());
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..nrows {
                if m[i][c] != 0 {
                    let q = Integer::div_floor(&m[i][c], &m[r][c]);
                    let src = m[r].clone();
                    row_axpy(&mut m[i], q, &src);
                    if m[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = -*x;
            }
        }
        let src = m[r].clone();
        for i in 0..r {
            let q = Integer::div_floor(&m[i][c], &src[c]);
            if q != 0 {
                row_axpy(&mut m[i], q, &src);
            }
        }
        r += 1;
    }
    (m, r)
}

/// Hermite normal form of the row lattice spanned by `gens`; zero rows dropped.
pub fn hnf(gens: &[Vec<Int>], ncols: usize) -> IMat {
    let m: IMat = gens.iter().filter(|g| g.iter().any(|x| *x != 0)).cloned().collect();
    if m.is_empty() {
        return Vec::new();
    }
    let (mut m, r) = echelon(m, ncols);
    m.truncate(r);
    m
}

/// Basis (rows, in HNF) of the integer kernel `{x : A x = 0}`.
pub fn int_kernel(a: &[Vec<Int>], ncols: usize) -> IMat {
    let nrows = a.len();
    // rows of [A^T | I]
    let aug: IMat = (0..ncols)
        .map(|j| {
            let mut row: Vec<Int> = a.iter().map(|r| r[j]).collect();
            row.extend((0..ncols).map(|k| Int::from(k == j)));
            row
        })
        .collect();
    let (m, r) = echelon(aug, nrows);
    let ker: IMat = m[r..].iter().map(|row| row[nrows..].to_vec()).collect();
    hnf(&ker, ncols)
}

/// Saturation `(Q L) ∩ Z^n` of a row lattice.
pub fn saturate(gens: &[Vec<Int>], ncols: usize) -> IMat {
    let k = int_kernel(gens, ncols);
    int_kernel(&k, ncols)
}

/// Smith normal form `U A V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IMat,
    pub v: IMat,
    /// Diagonal entries, `d[i] | d[i+1]`, zeros last.
    pub d: Vec<Int>,
}

pub fn smith(a: &[Vec<Int>], ncols: usize) -> Smith {
    let nrows = a.len();
    let mut m: IMat = a.to_vec();
    let mut u = identity(nrows);
    let mut v = identity(ncols);
    let n = nrows.min(ncols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        u.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        for row in v.iter_mut() {
            row.swap(t, bj);
        }
        let p = m[t][t];
        let mut clean = true;
        for i in t + 1..nrows {
            let q = Integer::div_floor(&m[i][t], &p);
            if q != 0 {
                let src = m[t].clone();
                row_axpy(&mut m[i], q, &src);
                let usrc = u[t].clone();
                row_axpy(&mut u[i], q, &usrc);
            }
            if m[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..ncols {
            let q = Integer::div_floor(&m[t][j], &p);
            if q != 0 {
                for row in m.iter_mut() {
                    row[j] -= q * row[t];
                }
                for row in v.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            if m[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility of the trailing block
        let mut fixed = true;
        'outer: for i in t + 1..nrows {
            for j in t + 1..ncols {
                if m[i][j] % p != 0 {
                    let src = m[i].clone();
                    for (x, s) in m[t].iter_mut().zip(&src) {
                        *x += s;
                    }
                    let usrc = u[i].clone();
                    for (x, s) in u[t].iter_mut().zip(&usrc) {
                        *x += s;
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if p < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let d = (0..n).map(|i| m[i][i]).collect();
    Smith { u, v, d }
}

/// Nonzero invariant factors.
pub fn invariant_factors(a: &[Vec<Int>], ncols: usize) -> Vec<Int> {
    smith(a, ncols).d.into_iter().filter(|x| *x != 0).collect()
}

/// Integer solution `a` of `a P = t` (row vector times matrix), if any.
pub fn solve_int_row(p: &[Vec<Int>], ncols: usize, t: &[Int]) -> Option<Vec<Int>> {
    let m = p.len();
    let s = smith(p, ncols);
    // a U^{-1} D = t V
    let tv = vec_mat(t, &s.v, ncols);
    let mut b = vec![0; m];
    for (i, x) in tv.iter().enumerate() {
        let d = if i < s.d.len() { s.d[i] } else { 0 };
        if d == 0 {
            if *x != 0 {
                return None;
            }
        } else {
            if x % d != 0 {
                return None;
            }
            b[i] = x / d;
        }
    }
    Some(vec_mat(&b, &s.u, m))
}

/// Reduced row echelon form over Q; returns the matrix and pivot columns.
pub fn rref(mut m: RMat, ncols: usize) -> (RMat, Vec<usize>) {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                let src = m[r].clone();
                for (x, s) in m[i].iter_mut().zip(&src) {
                    *x -= f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank_rat(m: &[Vec<Rat>], ncols: usize) -> usize {
    rref(m.to_vec(), ncols).1.len()
}

pub fn rank_int(m: &[Vec<Int>], ncols: usize) -> usize {
    hnf(m, ncols).len()
}

/// Basis of the rational nullspace `{x : M x = 0}`.
pub fn nullspace_rat(m: &[Vec<Rat>], ncols: usize) -> RMat {
    let (red, pivots) = rref(m.to_vec(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -red[r][f];
            }
            x
        })
        .collect()
}

/// Solve `M x = b` for square invertible `M`.
pub fn solve_rat(m: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let aug: RMat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(*bi);
            r
        })
        .collect();
    let (red, pivots) = rref(aug, n + 1);
    if pivots.len() != n || pivots.contains(&n) {
        return None;
    }
    Some((0..n).map(|i| red[i][n]).collect())
}

pub fn inverse_rat(m: &[Vec<Rat>]) -> Option<RMat> {
    let n = m.len();
    let aug: RMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (red, pivots) = rref(aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = a[i][c] * inv;
                let src = a[c].clone();
                for (x, s) in a[i].iter_mut().zip(&src) {
                    *x -= f * s;
                }
            }
        }
    }
    det
}

pub fn det_int(m: &[Vec<Int>]) -> Int {
    let d = det_rat(&to_rat_mat(m));
    debug_assert!(d.is_integer());
    d.to_integer()
}

/// Rational coordinates of `v` with respect to the rows of `basis`, if `v`
/// lies in their span.
pub fn coords_rat(basis: &[Vec<Rat>], v: &[Rat]) -> Option<Vec<Rat>> {
    let r = basis.len();
    if r == 0 {
        return v.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let n = v.len();
    // columns = basis vectors, augmented by v
    let aug: RMat = (0..n)
        .map(|j| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b[j]).collect();
            row.push(v[j]);
            row
        })
        .collect();
    let (red, pivots) = rref(aug, r + 1);
    if pivots.contains(&r) || pivots.len() < r {
        return None;
    }
    Some((0..r).map(|i| red[i][r]).collect())
}

/// Integer coordinates with respect to a lattice basis, if integral.
pub fn coords_int(basis: &[Vec<Int>], v: &[Int]) -> Option<Vec<Int>> {
    let c = coords_rat(&to_rat_mat(basis), &to_rat_vec(v))?;
    c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
}

pub fn lcm_denominators(v: &[Rat]) -> Int {
    v.iter().fold(1, |l: Int, x| l.lcm(x.denom()))
}

pub fn is_zero_vec<T: Zero>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs_rat(x: Rat) -> Rat {
    x.abs()
}
