mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use clusterbody::lattice::{ivec, rat, unit, IntMat, Rat, TotalOrder};
use clusterbody::laurent::{
    g_valuation, g_valuation_fraction, is_pointed, theta_expand_table, transport, Flavor,
    LaurentPolynomial, PointedDecomposition,
};
use clusterbody::seed::{FixedData, Seed};
use num::One;
use proptest::prelude::*;

fn fd_from(eps: &[&[i64]], d: &[i64], unfrozen: &[usize]) -> Arc<FixedData> {
    Arc::new(FixedData::from_exchange(&IntMat::from_i64(eps), d, unfrozen).unwrap())
}

fn cluster_variable(s: &Seed, s0: &Seed, k: usize) -> LaurentPolynomial {
    let mono = LaurentPolynomial::monomial(unit(s.n(), k), Rat::one());
    transport(&mono, s, s0, Flavor::A).unwrap()
}

#[test]
fn a2_first_mutation() {
    let fd = fd_from(&[&[0, 1], &[-1, 0]], &[1, 1], &[0, 1]);
    let s0 = Seed::initial_shared(fd);
    let x = cluster_variable(&s0.mutate(0).unwrap(), &s0, 0);
    // (A_2 + 1) / A_1
    assert_eq!(
        x,
        LaurentPolynomial::from_i64(2, &[(&[-1, 1], 1), (&[-1, 0], 1)])
    );
}

#[test]
fn a2_pentagon_returns_the_initial_cluster() {
    let fd = fd_from(&[&[0, 1], &[-1, 0]], &[1, 1], &[0, 1]);
    let s0 = Seed::initial_shared(fd);
    let s5 = s0.mutate_word(&[0, 1, 0, 1, 0]).unwrap();
    let mut vars: Vec<LaurentPolynomial> = (0..2).map(|k| cluster_variable(&s5, &s0, k)).collect();
    vars.sort_by_key(|v| v.to_string());
    let mut init: Vec<LaurentPolynomial> = (0..2)
        .map(|k| LaurentPolynomial::monomial(unit(2, k), Rat::one()))
        .collect();
    init.sort_by_key(|v| v.to_string());
    assert_eq!(vars, init);
}

#[test]
fn pointedness_of_cluster_variables() {
    let fd = fd_from(&[&[0, 1], &[-1, 0]], &[1, 1], &[0, 1]);
    let s0 = Seed::initial_shared(fd);
    let x = cluster_variable(&s0.mutate(0).unwrap(), &s0, 0);
    assert_eq!(is_pointed(&x, &s0).unwrap(), Some(ivec(&[-1, 0])));
    let not_pointed = LaurentPolynomial::from_i64(2, &[(&[0, 0], 1), (&[1, 1], 1)]);
    assert_eq!(is_pointed(&not_pointed, &s0).unwrap(), None);
    let wrong_coef = LaurentPolynomial::from_i64(2, &[(&[-1, 0], 2), (&[-1, 1], 1)]);
    assert_eq!(is_pointed(&wrong_coef, &s0).unwrap(), None);
}

#[test]
fn x_transport_round_trip() {
    let fd = fd_from(&[&[0, 1], &[-1, 0]], &[1, 1], &[0, 1]);
    let s0 = Seed::initial_shared(fd);
    let s1 = s0.mutate(0).unwrap();
    // X_1 is sent to X_1^{-1}; the round trip is the identity.
    let f = LaurentPolynomial::from_i64(2, &[(&[1, 0], 1)]);
    let g = transport(&f, &s0, &s1, Flavor::X).unwrap();
    assert_eq!(g, LaurentPolynomial::from_i64(2, &[(&[-1, 0], 1)]));
    assert_eq!(transport(&g, &s1, &s0, Flavor::X).unwrap(), f);
}

#[test]
fn theta_expansion_against_a_table() {
    let order = TotalOrder::graded_lex(2);
    let mut table = BTreeMap::new();
    table.insert(
        ivec(&[1, 0]),
        LaurentPolynomial::from_i64(2, &[(&[1, 0], 1), (&[1, 1], 1)]),
    );
    table.insert(
        ivec(&[0, 1]),
        LaurentPolynomial::from_i64(2, &[(&[0, 1], 1)]),
    );
    let f = LaurentPolynomial::from_i64(2, &[(&[1, 0], 2), (&[1, 1], 2), (&[0, 1], 3)]);
    let dec = theta_expand_table(&f, &order, &table).unwrap();
    assert_eq!(dec.coeff(&ivec(&[1, 0])), rat(2, 1));
    assert_eq!(dec.coeff(&ivec(&[0, 1])), rat(3, 1));
    assert_eq!(dec.reconstruct(2, |m| table.get(m).cloned()).unwrap(), f);
    assert_eq!(g_valuation(&dec, &order).unwrap(), ivec(&[0, 1]));
    let missing = LaurentPolynomial::from_i64(2, &[(&[5, 5], 1)]);
    assert!(theta_expand_table(&missing, &order, &table).is_err());
}

#[test]
fn valuation_of_a_fraction() {
    let order = TotalOrder::graded_lex(2);
    let num = PointedDecomposition {
        terms: vec![(rat(1, 1), ivec(&[2, 1])), (rat(1, 1), ivec(&[3, 3]))],
    };
    let den = PointedDecomposition {
        terms: vec![(rat(1, 1), ivec(&[1, 0]))],
    };
    assert_eq!(
        g_valuation_fraction(&num, &den, &order).unwrap(),
        ivec(&[1, 1])
    );
}

fn positive_point() -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((1i64..9, 1i64..9).prop_map(|(p, q)| rat(p, q)), 4)
}

fn no_immediate_repeats(w: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for k in w {
        if out.last() != Some(&k) {
            out.push(k);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Transported cluster variables evaluate like the exchange recursion.
    #[test]
    fn cluster_variables_match_exchange_relations(
        word in prop::collection::vec(0usize..2, 0..7).prop_map(no_immediate_repeats),
        x in positive_point(),
        which in 0usize..3,
    ) {
        let (eps, d): (Vec<Vec<i64>>, Vec<i64>) = match which {
            0 => (vec![vec![0, 1], vec![-1, 0]], vec![1, 1]),
            1 => (vec![vec![0, 2], vec![-1, 0]], vec![1, 2]),
            _ => (vec![vec![0, 3], vec![-1, 0]], vec![1, 3]),
        };
        let rows: Vec<&[i64]> = eps.iter().map(|r| r.as_slice()).collect();
        let s0 = Seed::initial_shared(fd_from(&rows, &d, &[0, 1]));
        let s = s0.mutate_word(&word).unwrap();
        let x = &x[..2];
        let oracle = common::exchange_values(&eps, &word, x);
        for k in 0..2 {
            prop_assert_eq!(common::eval(&cluster_variable(&s, &s0, k), x), oracle[k].clone());
        }
    }

    /// Same with a frozen vertex and rank 3 mutable part.
    #[test]
    fn frozen_coefficients_match_exchange_relations(
        word in prop::collection::vec(0usize..3, 0..5).prop_map(no_immediate_repeats),
        x in positive_point(),
    ) {
        let eps = vec![vec![0, 1, 0, 1], vec![-1, 0, 1, 0], vec![0, -1, 0, 1], vec![-1, 0, -1, 0]];
        let rows: Vec<&[i64]> = eps.iter().map(|r| r.as_slice()).collect();
        let s0 = Seed::initial_shared(fd_from(&rows, &[1, 1, 1, 1], &[0, 1, 2]));
        let s = s0.mutate_word(&word).unwrap();
        let oracle = common::exchange_values(&eps, &word, &x);
        for k in 0..4 {
            let v = cluster_variable(&s, &s0, k);
            prop_assert!(is_pointed(&v, &s0).unwrap().is_some());
            prop_assert_eq!(common::eval(&v, &x), oracle[k].clone());
        }
    }
}
