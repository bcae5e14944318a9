#![allow(dead_code)]

pub mod gen;
pub mod oracles;

use std::path::PathBuf;

use prymdeg::curve::{parse_curve, CurveWithInvolution};
use prymdeg::lattice::{y_minus_lattice, InvolutionLattices, YMinus};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Sorted `*.json` files directly inside `dir`.
pub fn json_files(dir: &std::path::Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    out.sort();
    out
}

pub fn corpus_files() -> Vec<PathBuf> {
    json_files(&corpus_dir())
}

pub fn load_path(p: &std::path::Path) -> CurveWithInvolution {
    let text = std::fs::read_to_string(p).unwrap();
    parse_curve(&text).unwrap().validate_and_classify().unwrap()
}

pub fn load(name: &str) -> CurveWithInvolution {
    load_path(&corpus_dir().join(name))
}

pub fn lattices(c: &CurveWithInvolution) -> (InvolutionLattices, YMinus) {
    let lat = InvolutionLattices::compute(c).unwrap();
    let ym = y_minus_lattice(c, &lat);
    (lat, ym)
}

pub fn battery_files() -> Vec<PathBuf> {
    json_files(&corpus_dir().join("battery"))
}

/// Random weights in `1..=max`, constant on orbits of the involution.
pub fn random_invariant_alpha(c: &CurveWithInvolution, rng: &mut rand::rngs::StdRng, max: i128) -> Vec<i128> {
    use rand::Rng;
    let mut alpha = vec![1; c.num_nodes()];
    for orbit in prymdeg::prym::edge_orbits(c) {
        let w = rng.random_range(1..=max);
        for j in orbit {
            alpha[j] = w;
        }
    }
    alpha
}
