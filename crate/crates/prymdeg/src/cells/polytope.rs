//! Exact convex hulls of lattice point sets by double description.

use std::collections::BTreeSet;

use crate::linalg::{self, Int};

/// Fixed-size bitset over point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn indices(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (k, w) in self.0.iter().enumerate() {
            let mut w = *w;
            while w != 0 {
                let t = w.trailing_zeros() as usize;
                v.push(k * 64 + t);
                w &= w - 1;
            }
        }
        v
    }
}

/// `normal . p >= offset`, with equality exactly on `tight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Int>,
    pub offset: Int,
    pub tight: Bits,
}

impl Facet {
    pub fn slack(&self, p: &[Int]) -> Int {
        linalg::dot(&self.normal, p) - self.offset
    }
}

#[derive(Debug, Clone)]
pub struct Polytope {
    pub dim: usize,
    pub points: Vec<Vec<Int>>,
    pub facets: Vec<Facet>,
}

/// Dimension of the affine span.
pub fn affine_rank(points: &[Vec<Int>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let p0 = &points[0];
    let diffs: Vec<Vec<Int>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    linalg::rank_int(&diffs, p0.len())
}

fn homog(p: &[Int]) -> Vec<Int> {
    let mut v = Vec::with_capacity(p.len() + 1);
    v.push(1);
    v.extend_from_slice(p);
    v
}

impl Polytope {
    /// Convex hull of a full-dimensional point set in `Z^r`.
    pub fn hull(points: &[Vec<Int>]) -> Polytope {
        let r = points.first().map_or(0, |p| p.len());
        assert!(!points.is_empty());
        assert_eq!(affine_rank(points), r, "point set must be full-dimensional");
        let n = points.len();
        if r == 0 {
            return Polytope { dim: 0, points: points.to_vec(), facets: Vec::new() };
        }
        let d = r + 1;
        let rows: Vec<Vec<Int>> = points.iter().map(|p| homog(p)).collect();

        // initial simplex
        let mut basis_idx = Vec::new();
        let mut acc: Vec<Vec<Int>> = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            acc.push(row.clone());
            if linalg::rank_int(&acc, d) == acc.len() {
                basis_idx.push(i);
                if basis_idx.len() == d {
                    break;
                }
            } else {
                acc.pop();
            }
        }
        let vmat = linalg::to_rat_mat(&acc);
        let inv = linalg::inverse_rat(&vmat).expect("independent rows");
        let mut rays: Vec<Vec<Int>> = (0..d)
            .map(|k| {
                let col: Vec<_> = (0..d).map(|i| inv[i][k]).collect();
                let l = linalg::lcm_denominators(&col);
                let v: Vec<Int> = col.iter().map(|x| (x * l).to_integer()).collect();
                linalg::primitive(&v)
            })
            .collect();
        let mut processed = Bits::new(n);
        for &i in &basis_idx {
            processed.set(i);
        }
        let mut zeros: Vec<Bits> = rays.iter().map(|h| tight_set(h, &rows, &processed)).collect();

        for i in 0..n {
            if processed.get(i) {
                continue;
            }
            let v = &rows[i];
            let vals: Vec<Int> = rays.iter().map(|h| linalg::dot(h, v)).collect();
            if vals.iter().all(|x| *x >= 0) {
                processed.set(i);
                for (z, x) in zeros.iter_mut().zip(&vals) {
                    if *x == 0 {
                        z.set(i);
                    }
                }
                continue;
            }
            let mut new_rays = Vec::new();
            let mut new_zeros = Vec::new();
            for (k, x) in vals.iter().enumerate() {
                if *x >= 0 {
                    let mut z = zeros[k].clone();
                    if *x == 0 {
                        z.set(i);
                    }
                    new_rays.push(rays[k].clone());
                    new_zeros.push(z);
                }
            }
            for p in 0..rays.len() {
                if vals[p] <= 0 {
                    continue;
                }
                for q in 0..rays.len() {
                    if vals[q] >= 0 {
                        continue;
                    }
                    let common = zeros[p].and(&zeros[q]);
                    if common.count() + 2 < d {
                        continue;
                    }
                    let adjacent = (0..rays.len())
                        .all(|s| s == p || s == q || !common.is_subset(&zeros[s]));
                    if !adjacent {
                        continue;
                    }
                    let h: Vec<Int> = rays[q]
                        .iter()
                        .zip(&rays[p])
                        .map(|(a, b)| vals[p] * a - vals[q] * b)
                        .collect();
                    let h = linalg::primitive(&h);
                    let mut z = common;
                    z.set(i);
                    new_rays.push(h);
                    new_zeros.push(z);
                }
            }
            processed.set(i);
            rays = new_rays;
            zeros = new_zeros;
        }

        let all = Bits::full(n);
        let mut facets: Vec<Facet> = rays
            .iter()
            .map(|h| Facet { normal: h[1..].to_vec(), offset: -h[0], tight: tight_set(h, &rows, &all) })
            .collect();
        facets.sort_by(|a, b| a.normal.cmp(&b.normal).then(a.offset.cmp(&b.offset)));
        facets.dedup();
        Polytope { dim: r, points: points.to_vec(), facets }
    }

    /// Indices of points that are vertices.
    pub fn vertices(&self) -> Vec<usize> {
        if self.dim == 0 {
            return vec![0];
        }
        (0..self.points.len())
            .filter(|&i| {
                let normals: Vec<Vec<Int>> = self
                    .facets
                    .iter()
                    .filter(|f| f.tight.get(i))
                    .map(|f| f.normal.clone())
                    .collect();
                linalg::rank_int(&normals, self.dim) == self.dim
            })
            .collect()
    }

    /// All nonempty faces, including the polytope itself, as point-index sets.
    pub fn faces(&self) -> Vec<Bits> {
        let n = self.points.len();
        let mut all: BTreeSet<Bits> = BTreeSet::new();
        let top = Bits::full(n);
        all.insert(top.clone());
        let mut level = vec![top];
        while !level.is_empty() {
            let mut next = BTreeSet::new();
            for f in &level {
                let cands: Vec<Bits> = self
                    .facets
                    .iter()
                    .filter(|fc| !f.is_subset(&fc.tight))
                    .map(|fc| f.and(&fc.tight))
                    .filter(|b| !b.is_empty())
                    .collect();
                for c in &cands {
                    let maximal = !cands.iter().any(|o| o != c && c.is_subset(o));
                    if maximal && !all.contains(c) {
                        next.insert(c.clone());
                    }
                }
            }
            for c in &next {
                all.insert(c.clone());
            }
            level = next.into_iter().collect();
        }
        all.into_iter().collect()
    }

    pub fn contains(&self, p: &[Int]) -> bool {
        self.facets.iter().all(|f| f.slack(p) >= 0)
    }
}

fn tight_set(h: &[Int], rows: &[Vec<Int>], mask: &Bits) -> Bits {
    let mut b = Bits::new(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if mask.get(i) && linalg::dot(h, row) == 0 {
            b.set(i);
        }
    }
    b
}
