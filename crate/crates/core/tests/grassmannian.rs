mod common;

use std::collections::BTreeMap;

use clusterbody::grassmannian::{
    bodies_equivalent, check_val_gv, cluster_bfs_g_vectors, exchange_matrix, g_mutation_map,
    gt_valuation, hook_g_vector, index_from_young, no_body, plucker_degree_dimension, psi_matrix,
    rectangles_seed, verify_val_gv, young_from_index, GrData, PlueckerIndex, Side, YoungDiagram,
    EMPTY,
};
use clusterbody::lattice::{rat, to_rat, Int, IntVec, Rat, RatMat};
use clusterbody::Error;
use num::{ToPrimitive, Zero};
use proptest::prelude::*;

fn gr(k: usize, n: usize) -> GrData {
    GrData::new(k, n).unwrap()
}

fn idx(g: &GrData, j: &[usize]) -> PlueckerIndex {
    PlueckerIndex::new(g, j.to_vec()).unwrap()
}

/// Maximal minors of a `rows × n` totally positive Vandermonde matrix with nodes
/// `2^j`, whose minors are pairwise distinct for two rows.
fn minors(g: &GrData) -> BTreeMap<PlueckerIndex, Rat> {
    let nodes: Vec<Rat> = (0..g.n).map(|j| rat(1 << j, 1)).collect();
    g.all_indices()
        .into_iter()
        .map(|j| {
            let rows: Vec<Vec<Rat>> = (0..g.rows())
                .map(|r| {
                    j.0.iter()
                        .map(|&c| num::pow(nodes[c - 1].clone(), r))
                        .collect()
                })
                .collect();
            (j, RatMat::from_rows(rows).unwrap().det())
        })
        .collect()
}

/// Plücker coordinate sitting at each vertex of the rectangles seed.
fn initial_index(g: &GrData, v: usize) -> PlueckerIndex {
    let mut rows = vec![0; g.rows()];
    if let Some((i, j)) = g.box_of(v) {
        rows[..i].iter_mut().for_each(|l| *l = j);
    }
    index_from_young(&YoungDiagram(rows), g).unwrap()
}

fn eps_i64(g: &GrData) -> Vec<Vec<i64>> {
    let e = exchange_matrix(g);
    (0..e.rows())
        .map(|r| {
            (0..e.cols())
                .map(|c| e.get(r, c).to_i64().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn parameters_are_validated() {
    assert!(matches!(GrData::new(0, 4), Err(Error::BadParams(_))));
    assert!(matches!(GrData::new(4, 4), Err(Error::BadParams(_))));
    let g = gr(2, 4);
    assert!(PlueckerIndex::new(&g, vec![1, 1]).is_err());
    assert!(PlueckerIndex::new(&g, vec![1, 5]).is_err());
    assert_eq!(PlueckerIndex::parse(&g, "{2,4}").unwrap(), idx(&g, &[2, 4]));
    assert_eq!(
        g_mutation_map(&g, g.vertex(2, 2)).unwrap_err(),
        Error::FrozenIndex(g.vertex(2, 2))
    );
}

#[test]
fn small_tableaux() {
    let g = gr(2, 4);
    assert_eq!(
        gt_valuation(&idx(&g, &[1, 2]), &g).entries,
        vec![vec![0, 0], vec![0, 0]]
    );
    assert_eq!(
        gt_valuation(&idx(&g, &[2, 4]), &g).entries,
        vec![vec![0, 1], vec![1, 1]]
    );
    // the empty diagram: entry min(r, c)
    assert_eq!(
        gt_valuation(&idx(&g, &[3, 4]), &g).entries,
        vec![vec![1, 1], vec![1, 2]]
    );
    let mut g_empty = vec![Int::zero(); g.dim()];
    g_empty[EMPTY] = Int::from(1);
    assert_eq!(hook_g_vector(&idx(&g, &[3, 4]), &g), g_empty);
}

#[test]
fn hook_g_vectors_are_distinct() {
    for (k, n) in [(2, 4), (2, 5), (3, 5), (3, 6), (4, 7)] {
        let g = gr(k, n);
        let all = g.all_indices();
        let distinct: std::collections::BTreeSet<IntVec> =
            all.iter().map(|j| hook_g_vector(j, &g)).collect();
        assert_eq!(distinct.len(), all.len());
    }
}

#[test]
fn degree_dimensions_match_tableau_counts() {
    for (k, n) in [(2, 4), (2, 5), (3, 5), (3, 6), (2, 6), (4, 7)] {
        let g = gr(k, n);
        for d in 0..=3 {
            assert_eq!(
                plucker_degree_dimension(&g, d),
                Int::from(common::ssyt_count(g.rows(), d, n)),
                "{k} {n} {d}"
            );
        }
    }
}

#[test]
fn valuation_identity_on_small_grassmannians() {
    for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 5), (3, 6), (2, 7), (4, 8)] {
        let rep = verify_val_gv(&gr(k, n));
        assert!(rep.all_pass(), "({k}, {n})");
    }
}

#[test]
fn bodies_are_unimodularly_equivalent() {
    for (k, n) in [(2, 4), (2, 5), (3, 5)] {
        assert!(bodies_equivalent(&gr(k, n)).unwrap());
    }
}

#[test]
fn flow_body_has_tableaux_as_vertices() {
    let g = gr(2, 4);
    let body = no_body(&g, Side::Flow).unwrap();
    for j in g.all_indices() {
        assert!(body.contains(&to_rat(&gt_valuation(&j, &g).to_vec())));
    }
}

/// In `Gr(2, n)` every cluster variable is a Plücker coordinate. Evaluate the
/// exchange recursion at a totally positive point, identify each cluster variable by
/// its value, and compare its g-vector with the hook formula.
#[test]
fn bfs_g_vectors_match_plucker_values() {
    for n in [4, 5, 6] {
        let g = gr(n - 2, n);
        let m = minors(&g);
        let by_value: BTreeMap<Rat, PlueckerIndex> =
            m.iter().map(|(j, v)| (v.clone(), j.clone())).collect();
        assert_eq!(by_value.len(), m.len());
        let init: Vec<Rat> = (0..g.dim())
            .map(|v| m[&initial_index(&g, v)].clone())
            .collect();
        let eps = eps_i64(&g);
        let depth = if n == 6 { 3 } else { 4 };
        for (word, vars) in cluster_bfs_g_vectors(&g, depth).unwrap() {
            let values = common::exchange_values(&eps, &word, &init);
            for (v, gv) in vars {
                let j = by_value
                    .get(&values[v])
                    .unwrap_or_else(|| panic!("{word:?} vertex {v} is not a minor"));
                assert_eq!(gv, hook_g_vector(j, &g), "{word:?} {j}");
            }
        }
    }
}

#[test]
fn opposite_seed_negates_the_exchange_matrix() {
    let g = gr(3, 6);
    let (a, _, p) = rectangles_seed(&g, false).unwrap();
    let (b, _, q) = rectangles_seed(&g, true).unwrap();
    assert_eq!(a.eps().map(|x| -x), b.eps());
    assert_eq!(p.b.map(|x| -x), q.b);
}

fn gr_params() -> impl Strategy<Value = GrData> {
    (3usize..=9).prop_flat_map(|n| (1..n).prop_map(move |k| gr(k, n)))
}

fn index_in(g: GrData) -> impl Strategy<Value = (GrData, PlueckerIndex)> {
    let all = g.all_indices();
    prop::sample::select(all).prop_map(move |j| (g, j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_diagrams_round_trip((g, j) in gr_params().prop_flat_map(index_in)) {
        let y = young_from_index(&j, &g);
        prop_assert!(y.0.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(index_from_young(&y, &g).unwrap(), j);
    }

    #[test]
    fn valuation_identity_for_random_indices((g, j) in gr_params().prop_flat_map(index_in)) {
        prop_assert!(check_val_gv(&g, &[j]).all_pass());
    }

    /// Tableau entries grow by at most one to the east and to the south, and the
    /// number of boxes in the diagram is the number of zero entries.
    #[test]
    fn tableaux_shape((g, j) in gr_params().prop_flat_map(index_in)) {
        let t = gt_valuation(&j, &g);
        let y = young_from_index(&j, &g);
        let zeros = t.entries.iter().flatten().filter(|&&x| x == 0).count();
        prop_assert_eq!(zeros, y.0.iter().sum::<usize>());
        for r in 0..g.rows() {
            for c in 0..g.k {
                if c + 1 < g.k {
                    let d = t.entries[r][c + 1] - t.entries[r][c];
                    prop_assert!((0..=1).contains(&d));
                }
                if r + 1 < g.rows() {
                    let d = t.entries[r + 1][c] - t.entries[r][c];
                    prop_assert!((0..=1).contains(&d));
                }
            }
        }
    }

    /// `ker psi` is spanned by the all-ones vector, and the image is its orthogonal.
    #[test]
    fn psi_kernel_and_image(g in gr_params()) {
        let psi = psi_matrix(&g);
        let ones = vec![Int::from(1); g.dim()];
        prop_assert!(psi.mul_vec(&ones).iter().all(|x| x.is_zero()));
        prop_assert_eq!(psi.to_rat().rank(), g.dim() - 1);
        for c in 0..g.dim() {
            prop_assert!(psi.col(c).iter().sum::<Int>().is_zero());
        }
    }

    #[test]
    fn g_mutation_inverts(x in prop::collection::vec(-5i64..=5, 10), pick in 0usize..4) {
        let g = gr(3, 6);
        let k = g.unfrozen()[pick];
        let map = g_mutation_map(&g, k).unwrap();
        let p: Vec<Rat> = x.iter().map(|&v| rat(v, 1)).collect();
        prop_assert_eq!(map.inverse().unwrap().apply(&map.apply(&p)), p);
    }
}
