//! Invariants on random curves, random forms and random involutions.

mod common;

use std::collections::BTreeSet;

use common::{gen, oracles};
use num_traits::Zero;
use prymdeg::cells::decomposition::certify_delaunay_cell;
use prymdeg::cells::{delaunay, dicing_check, semi_delaunay, HeightFunction, Residue};
use prymdeg::conditions::{
    induced_height, middle_prym_applicable, middle_prym_condition, minus_delaunay, minus_functionals,
    prym_dicing_condition, sliced_decomposition, sliced_equals_twice, MiddlePrymVerdict,
};
use prymdeg::curve::{CurveWithInvolution, NodeClass};
use prymdeg::fans::{an_singularities, as_refined, build_family_fan, common_refinement, minimal_resolution};
use prymdeg::forms::{edge_functionals, gram_of};
use prymdeg::homology::CycleBasis;
use prymdeg::lattice::{eigenlattice, klm_invariants, prym_cokernel_torsion, BlockProfile, IntegerLattice};
use prymdeg::linalg::{self, IMat, Int, RMat, Rat};
use prymdeg::prym::{component_count, fixed_part_analysis, maximal_half_shift};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn curve() -> impl Strategy<Value = CurveWithInvolution> {
    any::<u64>().prop_map(|s| gen::random_curve(s, 4))
}

fn revalidate(spec: prymdeg::curve::CurveSpec) -> CurveWithInvolution {
    CurveWithInvolution::from_spec(spec).unwrap().validate_and_classify().unwrap()
}

fn rat(n: Int) -> Rat {
    Rat::from_integer(n)
}

fn det(u: (Int, Int), w: (Int, Int)) -> Int {
    u.0 * w.1 - u.1 * w.0
}

/// Numbers recorded for comparing a curve with a relabeled copy.
fn fingerprint(c: &CurveWithInvolution) -> (Vec<usize>, usize, BlockProfile, usize, u128, bool) {
    let (lat, _) = common::lattices(c);
    let classes = [NodeClass::BranchwiseFixed, NodeClass::Swapping, NodeClass::NonFixed].map(|k| c.count_class(k));
    let star = if lat.x_minus.rank() <= 4 { prym_dicing_condition(&lat).unwrap().verdict.holds() } else { true };
    (classes.to_vec(), lat.x.rank(), lat.profile, lat.x_minus.rank(), component_count(&fixed_part_analysis(c)), star)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validation_is_idempotent(c in curve()) {
        let again = c.clone().validate_and_classify().unwrap();
        prop_assert_eq!(again.classification(), c.classification());
    }

    #[test]
    fn class_counts_and_quotient_edges(c in curve()) {
        let b = c.count_class(NodeClass::BranchwiseFixed);
        let n = c.count_class(NodeClass::NonFixed);
        prop_assert_eq!(n % 2, 0);
        prop_assert_eq!(c.quotient_graph().edges.len(), b + n / 2);
    }

    #[test]
    fn node_order_and_labels_do_not_matter(c in curve(), seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut spec = c.spec.clone();
        spec.nodes.shuffle(&mut rng);
        let shuffled = revalidate(spec);
        prop_assert_eq!(fingerprint(&shuffled), fingerprint(&c));

        // rename every id
        let mut spec = c.spec.clone();
        let re = |s: &String| format!("x_{s}");
        for comp in &mut spec.components {
            comp.id = re(&comp.id);
        }
        for node in &mut spec.nodes {
            node.id = re(&node.id);
            node.tail = re(&node.tail);
            node.head = re(&node.head);
        }
        spec.involution.vertices = spec.involution.vertices.iter().map(|(a, b)| (re(a), re(b))).collect();
        spec.involution.edges = spec.involution.edges.iter().map(|(a, b)| (re(a), re(b))).collect();
        prop_assert_eq!(fingerprint(&revalidate(spec)), fingerprint(&c));
    }

    #[test]
    fn reversing_an_orbit_keeps_the_invariants(c in curve(), pick in any::<prop::sample::Index>()) {
        prop_assume!(c.num_nodes() > 0);
        let cl = c.classification();
        let j = pick.index(c.num_nodes());
        let mut spec = c.spec.clone();
        for k in [j, cl.edge_map[j]].into_iter().collect::<BTreeSet<_>>() {
            let n = &mut spec.nodes[k];
            std::mem::swap(&mut n.tail, &mut n.head);
        }
        let flipped = revalidate(spec);
        prop_assert_eq!(fingerprint(&flipped), fingerprint(&c));
    }

    #[test]
    fn involution_on_cycles(c in curve()) {
        let (lat, _) = common::lattices(&c);
        let m = &lat.involution.iota_x;
        let r = m.len();
        prop_assert_eq!(linalg::mat_mul(m, m, r), linalg::identity(r));
        // B is invariant for constant weights: M G M^T = G
        let basis: Vec<Vec<Rat>> = lat.cycles.basis.iter().map(|b| linalg::to_rat_vec(b)).collect();
        let g = gram_of(&vec![1; c.num_nodes()], &basis);
        let mr = linalg::to_rat_mat(m);
        let conj: RMat = (0..r)
            .map(|i| (0..r).map(|j| {
                let mut s = Rat::zero();
                for a in 0..r {
                    for b in 0..r {
                        s += mr[i][a] * g[a][b] * mr[j][b];
                    }
                }
                s
            }).collect())
            .collect();
        prop_assert_eq!(conj, g);
    }

    #[test]
    fn edge_functionals_are_unimodular(c in curve()) {
        let (lat, _) = common::lattices(&c);
        let f = edge_functionals(&lat.x);
        let r = lat.x.rank();
        prop_assume!(r >= 1 && f.len() <= 12);
        let rows: Vec<Vec<Int>> = f.iter().map(|row| row.iter().map(|x| x.to_integer()).collect()).collect();
        // every maximal independent subset has determinant +-1
        let mut subset: Vec<usize> = (0..r).collect();
        loop {
            let m: IMat = subset.iter().map(|&j| rows[j].clone()).collect();
            let d = linalg::det_int(&m);
            prop_assert!(d == 0 || d.abs() == 1, "subset {:?} has determinant {}", subset, d);
            let mut k = r;
            let mut advanced = false;
            while k > 0 {
                k -= 1;
                if subset[k] < rows.len() - (r - k) {
                    subset[k] += 1;
                    for i in k + 1..r {
                        subset[i] = subset[i - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }

    #[test]
    fn minus_lattice_shape(c in curve(), seed in any::<u64>()) {
        let (lat, _) = common::lattices(&c);
        let p = lat.profile;
        prop_assert_eq!(lat.x_minus.rank(), p.l + p.m);
        prop_assert_eq!(lat.x_plus.rank(), p.k + p.m);
        prop_assert_eq!(lat.x_minus.index(&lat.x_minus_eigen), Some(1 << p.m));
        for v in &lat.x_minus.basis {
            let iv = c.iota1(v);
            prop_assert!(iv.iter().zip(v).all(|(a, b)| *a == -b));
        }
        prop_assert_eq!(lat.cokernel_torsion.clone(), vec![2; p.k]);
        // the basis does not depend on the order of the generators
        let mut gens = lat.x_minus.basis.clone();
        gens.shuffle(&mut StdRng::seed_from_u64(seed));
        prop_assert_eq!(IntegerLattice::new(&gens, 2, c.num_nodes()), lat.x_minus.clone());
    }

    #[test]
    fn slice_vertices_lie_in_the_minus_lattice(c in curve()) {
        let (lat, _) = common::lattices(&c);
        prop_assume!(lat.x_minus.rank() <= 4);
        prop_assert!(sliced_decomposition(&lat).is_ok());
    }

    #[test]
    fn induced_height_gives_the_slice(c in curve()) {
        let (lat, _) = common::lattices(&c);
        prop_assume!((1..=3).contains(&lat.x_minus.rank()));
        let h = induced_height(&lat, &vec![1; c.num_nodes()]);
        let semi = semi_delaunay(&h).unwrap();
        let sliced = sliced_decomposition(&lat).unwrap();
        prop_assert_eq!(semi.period.clone(), sliced.period.clone());
        prop_assert_eq!(semi.vertex_keys(), sliced.vertex_keys());
    }

    #[test]
    fn middle_prym_is_the_doubled_delaunay(c in curve()) {
        let (lat, ym) = common::lattices(&c);
        prop_assume!((1..=4).contains(&lat.x_minus.rank()) && middle_prym_applicable(&c, &ym).is_ok());
        let ss = middle_prym_condition(&c, &lat, &ym).unwrap();
        let sliced = sliced_decomposition(&lat).unwrap();
        let pp = minus_delaunay(&lat, &vec![1; c.num_nodes()]).unwrap();
        prop_assert_eq!(ss == MiddlePrymVerdict::Holds, sliced_equals_twice(&sliced, &pp));
        // and (**) implies (*)
        if ss == MiddlePrymVerdict::Holds {
            prop_assert!(prym_dicing_condition(&lat).unwrap().verdict.holds());
        }
    }

    #[test]
    fn dicing_verdict_ignores_the_basis(c in curve(), seed in any::<u64>()) {
        let (lat, _) = common::lattices(&c);
        let r = lat.x_minus.rank();
        prop_assume!((1..=4).contains(&r));
        let star = prym_dicing_condition(&lat).unwrap();
        let f = minus_functionals(&lat);
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..5 {
            let (u, _) = oracles::unimodular(&mut rng, r, 6);
            // g_j(b'_i) with b'_i = sum_k U_ik b_k, times m_j
            let moved: RMat = f
                .iter()
                .zip(&star.multipliers)
                .map(|(g, m)| (0..r).map(|i| (0..r).fold(Rat::zero(), |s, k| s + rat(u[i][k]) * g[k]) * m).collect())
                .collect();
            prop_assert_eq!(dicing_check(&moved, r).unwrap().holds(), star.verdict.holds());
        }
    }

    #[test]
    fn dicings_are_weight_independent(c in curve(), seed in any::<u64>()) {
        let (lat, _) = common::lattices(&c);
        prop_assume!((1..=4).contains(&lat.x_minus.rank()));
        let star = prym_dicing_condition(&lat).unwrap();
        if let Some(dice) = &star.dicing {
            let mut rng = StdRng::seed_from_u64(seed);
            for _ in 0..3 {
                let alpha = common::random_invariant_alpha(&c, &mut rng, 5);
                prop_assert_eq!(minus_delaunay(&lat, &alpha).unwrap().vertex_keys(), dice.vertex_keys());
            }
        }
    }

    #[test]
    fn half_shift_is_half_an_invariant_cycle(c in curve(), s1 in any::<u64>(), s2 in any::<u64>()) {
        prop_assume!(c.total_smooth_fixed_points() == 0 && c.count_class(NodeClass::Swapping) == 0);
        let (lat, _) = common::lattices(&c);
        let cl = c.classification();
        let a = maximal_half_shift(&c, s1).unwrap().doubled;
        let b = maximal_half_shift(&c, s2).unwrap().doubled;
        for (x, k) in a.iter().zip(&cl.node_class) {
            prop_assert_eq!(x.abs() == 1, *k == NodeClass::BranchwiseFixed);
        }
        prop_assert!(lat.x.contains_scaled(&a, 1));
        let diff: Vec<Int> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        prop_assert!(lat.x.contains_scaled(&diff, 2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delaunay_matches_the_oracle(seed in any::<u64>(), rank in 1usize..=2) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = oracles::selling_form(&mut rng, rank, true);
        let (u, _) = oracles::unimodular(&mut rng, rank, 6);
        let gp = oracles::congruent(&g, &u);
        let d = delaunay(&gp).unwrap();
        for cell in &d.cells {
            prop_assert!(certify_delaunay_cell(&gp, cell).is_some());
        }
        let ours: BTreeSet<Vec<Vec<Int>>> = d
            .cells
            .iter()
            .map(|c| oracles::canon(&c.vertices.iter().map(|v| linalg::mat_vec(&u, v)).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(ours, oracles::brute_force_delaunay(&g, 2));
    }

    #[test]
    fn halved_form_height_is_delaunay(seed in any::<u64>(), rank in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = oracles::selling_form(&mut rng, rank, true);
        let half: RMat = g.iter().map(|row| row.iter().map(|x| x / rat(2)).collect()).collect();
        prop_assert_eq!(
            semi_delaunay(&HeightFunction::quadratic(half)).unwrap().vertex_keys(),
            delaunay(&g).unwrap().vertex_keys()
        );
    }

    #[test]
    fn conjugated_involutions(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (k, l, m) = loop {
            let t = (rng.random_range(0..=6usize), rng.random_range(0..=6usize), rng.random_range(0..=3usize));
            if t.0 + t.1 + 2 * t.2 <= 6 {
                break t;
            }
        };
        let r = k + l + 2 * m;
        let (u, ui) = oracles::unimodular(&mut rng, r, 10);
        let mm = linalg::mat_mul(&linalg::mat_mul(&u, &oracles::block_involution(k, l, m), r), &ui, r);
        let cb = CycleBasis { basis: linalg::identity(r), tree_edges: Vec::new(), non_tree_edges: (0..r).collect() };
        let xp = eigenlattice(&cb, &mm, 1, r);
        let xme = eigenlattice(&cb, &mm, -1, r);
        let gens: IMat = (0..r).map(|i| (0..r).map(|j| Int::from(i == j) - mm[i][j]).collect()).collect();
        let xm = IntegerLattice::new(&gens, 2, r);
        prop_assert_eq!(klm_invariants(&xp, &xme, &xm, r).unwrap(), BlockProfile { k, l, m });
        prop_assert_eq!(prym_cokernel_torsion(&mm, k).unwrap(), vec![2; k]);
    }

    #[test]
    fn fans_of_random_heights(
        num in 1i128..=9, den in 1i128..=4, lin in -4i128..=4, period in 1i128..=3,
        table in prop::collection::vec(0i128..=8, 3),
    ) {
        let residue = Residue::Table(
            (1..period).map(|x| (vec![x], Rat::new(table[x as usize], 4))).collect(),
        );
        let h = HeightFunction {
            quad: vec![vec![Rat::new(num, den)]],
            linear: vec![Rat::new(lin, 4)],
            period: vec![vec![period]],
            residue,
        };
        let f = build_family_fan(&h, 12).unwrap();
        for w in f.rays.windows(2) {
            prop_assert!(det(w[0], w[1]) > 0);
        }
        // refining by itself changes nothing
        let same = common_refinement(&f, &f).unwrap();
        prop_assert_eq!(&same.rays, &f.rays);
        prop_assert_eq!(same.central_fiber_components, f.rays_per_period);
        // each A_n cone contributes n exceptional curves
        let sing = an_singularities(&f);
        for s in &sing {
            if let Some(n) = s.n {
                prop_assert_eq!(s.exceptional_curves as Int, n);
            }
        }
        let extra: Int = sing.iter().map(|s| s.exceptional_curves as Int).sum();
        let resolved = minimal_resolution(&as_refined(&f));
        prop_assert_eq!(resolved.central_fiber_components as Int, f.rays_per_period as Int + extra);
        for w in resolved.rays.windows(2) {
            prop_assert_eq!(det(w[0], w[1]), 1);
        }
    }
}
