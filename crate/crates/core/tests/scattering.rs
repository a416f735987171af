mod common;

use std::sync::Arc;

use clusterbody::io::{diagram_from_json, diagram_to_json};
use clusterbody::lattice::{ivec, rat, unit, Int, IntMat, IntVec, Rat, RatVec};
use clusterbody::laurent::{is_pointed, transport, Flavor, LaurentPolynomial};
use clusterbody::scattering::{
    complete_rank2, default_basepoint, enumerate_broken_lines, is_consistent, loop_product,
    path_ordered_product, series, structure_constant, theta_function, wall_cross,
    ScatteringDiagram, Wall,
};
use clusterbody::seed::{FixedData, Seed};
use clusterbody::Error;
use num::{One, Signed, Zero};
use proptest::prelude::*;

fn fd_from(eps: &[&[i64]], d: &[i64]) -> Arc<FixedData> {
    Arc::new(FixedData::from_exchange(&IntMat::from_i64(eps), d, &[0, 1]).unwrap())
}

fn a2() -> Arc<FixedData> {
    fd_from(&[&[0, 1], &[-1, 0]], &[1, 1])
}

fn b2() -> Arc<FixedData> {
    fd_from(&[&[0, 2], &[-1, 0]], &[1, 2])
}

fn g2() -> Arc<FixedData> {
    fd_from(&[&[0, 3], &[-1, 0]], &[1, 3])
}

fn kronecker() -> Arc<FixedData> {
    fd_from(&[&[0, 2], &[-2, 0]], &[1, 1])
}

fn ints(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

#[test]
fn series_inverse_and_powers() {
    let f = ints(&[1, 1]);
    let inv = series::inverse(&f, 5);
    assert_eq!(inv, ints(&[1, -1, 1, -1, 1, -1]));
    assert_eq!(series::mul(&f, &inv, 5), ints(&[1, 0, 0, 0, 0, 0]));
    assert_eq!(series::pow(&f, 3, 5), ints(&[1, 3, 3, 1, 0, 0]));
    // (1 + w)^{-2} = sum (-1)^j (j + 1) w^j
    assert_eq!(series::pow(&f, -2, 4), ints(&[1, -2, 3, -4, 5]));
}

#[test]
fn crossing_a_single_wall() {
    let wall = Wall {
        n0: ivec(&[1, 0]),
        normal: ivec(&[1, 0]),
        support: Vec::new(),
        direction: ivec(&[0, 1]),
        series: ints(&[1, 1]),
        initial: true,
    };
    let out = wall_cross(&Rat::one(), &ivec(&[-1, 0]), &wall, -1, 4);
    assert_eq!(
        out,
        LaurentPolynomial::from_i64(2, &[(&[-1, 0], 1), (&[-1, 1], 1)])
    );
    let back = wall_cross(&Rat::one(), &ivec(&[1, 0]), &wall, 1, 4);
    assert_eq!(
        back,
        LaurentPolynomial::from_i64(2, &[(&[1, 0], 1), (&[1, 1], 1)])
    );
}

#[test]
fn a2_completion_adds_one_wall() {
    let init = ScatteringDiagram::initial(&a2()).unwrap();
    assert!(!is_consistent(&init, 6).unwrap());
    let d = complete_rank2(&init, 8).unwrap();
    let added: Vec<&Wall> = d.added_walls().collect();
    assert_eq!(added.len(), 1);
    assert_eq!(added[0].n0, ivec(&[1, 1]));
    assert_eq!(added[0].series, ints(&[1, 1]));
    assert!(loop_product(&d, 8).unwrap().is_identity());
}

#[test]
fn finite_types_complete_to_finitely_many_walls() {
    // rays beyond the initial two: 1 for A2, 2 for B2, 4 for G2
    for (fd, extra) in [(a2(), 1), (b2(), 2), (g2(), 4)] {
        let d = complete_rank2(&ScatteringDiagram::initial(&fd).unwrap(), 12).unwrap();
        assert_eq!(d.added_walls().count(), extra);
        assert!(is_consistent(&d, 12).unwrap());
    }
}

#[test]
fn kronecker_central_ray() {
    let order = 10;
    let d = complete_rank2(&ScatteringDiagram::initial(&kronecker()).unwrap(), order).unwrap();
    assert!(is_consistent(&d, order).unwrap());
    let central = d.walls.iter().find(|w| w.n0 == ivec(&[1, 1])).unwrap();
    // (1 - w)^{-2}
    let expected: Vec<Rat> = (0..=order / 2).map(|j| rat(j as i64 + 1, 1)).collect();
    assert_eq!(central.series[..expected.len()], expected[..]);
}

#[test]
fn rank_three_completion_is_unsupported() {
    let fd = Arc::new(
        FixedData::from_exchange(
            &IntMat::from_i64(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]),
            &[1, 1, 1],
            &[0, 1, 2],
        )
        .unwrap(),
    );
    let init = ScatteringDiagram::initial(&fd).unwrap();
    assert_eq!(
        complete_rank2(&init, 4).unwrap_err(),
        Error::RankUnsupported(3)
    );
}

#[test]
fn endpoint_on_a_wall_is_rejected() {
    let d = complete_rank2(&ScatteringDiagram::initial(&a2()).unwrap(), 6).unwrap();
    let on_wall = vec![rat(0, 1), rat(1, 1)];
    assert!(matches!(
        enumerate_broken_lines(&d, &ivec(&[1, 0]), &on_wall, 4),
        Err(Error::NonGenericEndpoint(_))
    ));
}

#[test]
fn closed_paths_and_paths_through_the_origin() {
    let d = complete_rank2(&ScatteringDiagram::initial(&b2()).unwrap(), 8).unwrap();
    let p = |x: i64, y: i64| vec![rat(x, 7), rat(y, 11)];
    let square = vec![p(3, 5), p(-3, 5), p(-3, -5), p(3, -5), p(3, 5)];
    assert!(path_ordered_product(&d, &square, 8).unwrap().is_identity());
    let through = vec![p(3, 5), p(-3, -5)];
    assert_eq!(
        path_ordered_product(&d, &through, 8).unwrap_err(),
        Error::SingularPath
    );
}

#[test]
fn diagram_json_round_trip() {
    let d = complete_rank2(&ScatteringDiagram::initial(&b2()).unwrap(), 6).unwrap();
    let back = diagram_from_json(&diagram_to_json(&d)).unwrap();
    assert_eq!(back, d);
}

/// Theta functions of g-vectors of cluster variables are the cluster variables.
#[test]
fn theta_functions_of_cluster_variables() {
    for fd in [a2(), b2(), g2()] {
        let d = complete_rank2(&ScatteringDiagram::initial(&fd).unwrap(), 12).unwrap();
        let base = default_basepoint(&d);
        let s0 = Seed::initial_shared(fd.clone());
        let mut word = Vec::new();
        for step in 0..8 {
            let s = s0.mutate_word(&word).unwrap();
            for k in 0..2 {
                let x = transport(
                    &LaurentPolynomial::monomial(unit(2, k), Rat::one()),
                    &s,
                    &s0,
                    Flavor::A,
                )
                .unwrap();
                let g = is_pointed(&x, &s0).unwrap().unwrap();
                let t = theta_function(&d, &g, &base, 12).unwrap();
                assert!(t.exact);
                assert_eq!(t.poly, x, "g-vector {g:?}");
            }
            word.push(step % 2);
        }
    }
}

fn generic_positive() -> impl Strategy<Value = RatVec> {
    prop::collection::vec(
        (1i64..40, prop::sample::select(vec![97i64, 101, 103, 107])),
        2,
    )
    .prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
}

fn label() -> impl Strategy<Value = IntVec> {
    prop::collection::vec(-2i64..=2, 2).prop_map(|v| ivec(&v))
}

fn symmetrizable() -> impl Strategy<Value = Arc<FixedData>> {
    (1i64..=3, 1i64..=3).prop_map(|(b, c)| {
        let g = num::integer::gcd(b, c);
        let (d0, d1) = (c / g, b / g);
        fd_from(&[&[0, b], &[-c, 0]], &[d0, d1])
    })
}

fn plane_point() -> impl Strategy<Value = RatVec> {
    prop::collection::vec((-30i64..30, prop::sample::select(vec![89i64, 97, 101])), 2)
        .prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn completion_is_consistent(fd in symmetrizable(), order in 1usize..7) {
        let d = complete_rank2(&ScatteringDiagram::initial(&fd).unwrap(), order).unwrap();
        prop_assert!(is_consistent(&d, order).unwrap());
        for w in d.added_walls() {
            prop_assert_eq!(&w.direction, &d.pstar(&w.n0));
            prop_assert!(w.n0.iter().all(|x| x.is_positive()));
        }
    }

    /// In a consistent diagram the path-ordered product depends only on the endpoints.
    #[test]
    fn path_ordered_products_depend_on_endpoints(a in plane_point(), b in plane_point(), via in plane_point()) {
        let d = complete_rank2(&ScatteringDiagram::initial(&b2()).unwrap(), 6).unwrap();
        let direct = path_ordered_product(&d, &[a.clone(), b.clone()], 6);
        let detour = path_ordered_product(&d, &[a, via, b], 6);
        match (direct, detour) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (x, y) => prop_assert!(x == Err(Error::SingularPath) || y == Err(Error::SingularPath)),
        }
    }

    #[test]
    fn theta_is_independent_of_the_endpoint_in_a_chamber(m in label(), z1 in generic_positive(), z2 in generic_positive()) {
        prop_assume!(!clusterbody::lattice::is_zero(&m));
        let d = complete_rank2(&ScatteringDiagram::initial(&b2()).unwrap(), 10).unwrap();
        let t1 = theta_function(&d, &m, &z1, 10).unwrap();
        let t2 = theta_function(&d, &m, &z2, 10).unwrap();
        prop_assert_eq!(t1.poly, t2.poly);
    }

    #[test]
    fn theta_functions_are_pointed(m in label(), which in 0usize..3) {
        let fd = [a2(), b2(), kronecker()][which].clone();
        let d = complete_rank2(&ScatteringDiagram::initial(&fd).unwrap(), 8).unwrap();
        let t = theta_function(&d, &m, &default_basepoint(&d), 8).unwrap();
        let s0 = Seed::initial_shared(fd);
        prop_assert_eq!(t.poly.coeff(&m), Rat::one());
        prop_assert_eq!(is_pointed(&t.poly, &s0).unwrap(), Some(m));
    }

    /// `θ_p θ_q = Σ_r α(p, q, r) θ_r`, with nonnegative integer `α`.
    #[test]
    fn structure_constants_expand_products(p in label(), q in label()) {
        let bound = 12;
        let d = complete_rank2(&ScatteringDiagram::initial(&a2()).unwrap(), bound).unwrap();
        let base = default_basepoint(&d);
        let theta = |m: &IntVec| theta_function(&d, m, &base, bound).unwrap().poly;
        let product = theta(&p).mul(&theta(&q));
        let mut sum = LaurentPolynomial::zero(2);
        // every label with nonzero α is an exponent of the product
        for r in product.exponents() {
            let alpha = structure_constant(&d, &p, &q, &r, bound).unwrap();
            prop_assert!(alpha.is_integer() && !alpha.is_negative());
            if !alpha.is_zero() {
                sum = sum.add(&theta(&r).scale(&alpha));
            }
        }
        prop_assert_eq!(sum, product);
    }
}

#[test]
fn structure_constant_outside_the_cone_vanishes() {
    let d = complete_rank2(&ScatteringDiagram::initial(&a2()).unwrap(), 6).unwrap();
    let p = ivec(&[1, 0]);
    let r = vec![Int::from(5), Int::from(5)];
    assert!(structure_constant(&d, &p, &p, &r, 6).unwrap().is_zero());
}
