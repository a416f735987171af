use std::sync::Arc;

use clusterbody::lattice::{rat, rat_of, rvec, unit, IntMat, Rat, RatVec};
use clusterbody::laurent::{transport, Flavor, LaurentPolynomial};
use clusterbody::polytope::{lattice_points, Polytope};
use clusterbody::seed::{FixedData, Seed};
use clusterbody::tropical::{
    apply_pl_to_polytope, i_involution, trop_mutate_a, tropicalize, Convention, ElementaryPL,
    PLMap, TropicalPoint,
};
use clusterbody::Error;
use num::One;
use proptest::prelude::*;

fn running_example() -> Arc<FixedData> {
    Arc::new(
        FixedData::from_exchange(&IntMat::from_i64(&[&[0, 2], &[-1, 0]]), &[1, 2], &[0, 1])
            .unwrap(),
    )
}

/// `min`/`-max` of `<n, m> = sum n_i m_i / d_i` over the exponents, computed directly.
fn trop_eval(f: &LaurentPolynomial, x: &[Rat], d: &[i64], conv: Convention) -> Rat {
    let vals: Vec<Rat> = f
        .terms()
        .map(|(m, _)| {
            m.iter()
                .zip(x)
                .zip(d)
                .map(|((a, b), dd)| rat_of(a) * b / rat(*dd, 1))
                .sum()
        })
        .collect();
    match conv {
        Convention::Lower => vals.iter().min().unwrap().clone(),
        Convention::Upper => -vals.iter().max().unwrap().clone(),
    }
}

#[test]
fn tropicalization_requires_positive_coefficients() {
    let f = LaurentPolynomial::from_i64(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
    assert_eq!(
        tropicalize(&f, Convention::Lower).unwrap_err(),
        Error::NotPositive
    );
    let g = LaurentPolynomial::from_i64(2, &[(&[1, 0], 1), (&[0, 1], 3)]);
    let t = tropicalize(&g, Convention::Lower).unwrap();
    assert_eq!(t.evaluate(&rvec(&[2, -1])), rat(-1, 1));
    let u = tropicalize(&g, Convention::Upper).unwrap();
    assert_eq!(u.evaluate(&rvec(&[2, -1])), rat(-2, 1));
}

#[test]
fn point_mutation_is_tagged_and_reversible() {
    let s0 = Seed::initial_shared(running_example());
    let p = TropicalPoint::new(&s0, rvec(&[1, -3]), Convention::Upper);
    let q = trop_mutate_a(&p, 0, &s0).unwrap();
    assert_eq!(q.seed, vec![0]);
    let s1 = s0.mutate(0).unwrap();
    let back = trop_mutate_a(&q, 0, &s1).unwrap();
    assert_eq!(back, p);
    assert!(trop_mutate_a(&p, 0, &s1).is_err());
    let i = i_involution(&p);
    assert_eq!(i.convention, Convention::Lower);
    assert_eq!(i_involution(&i), p);
}

#[test]
fn elementary_image_of_a_square() {
    let sq = Polytope::hull(&[
        rvec(&[-1, -1]),
        rvec(&[1, -1]),
        rvec(&[-1, 1]),
        rvec(&[1, 1]),
    ])
    .unwrap();
    // shear on one side of x = 0
    let e = ElementaryPL {
        ell: rvec(&[1, 0]),
        w: rvec(&[0, 1]),
    };
    let (img, rep) = apply_pl_to_polytope(&PLMap::elementary(e.clone()), &sq).unwrap();
    assert!(!rep.convex);
    assert_eq!(img.vertices().len(), 5);
    let flat =
        Polytope::hull(&[rvec(&[0, -1]), rvec(&[1, -1]), rvec(&[0, 1]), rvec(&[1, 1])]).unwrap();
    let (img, rep) = apply_pl_to_polytope(&PLMap::elementary(e), &flat).unwrap();
    assert!(rep.convex);
    let expected =
        Polytope::hull(&[rvec(&[0, -1]), rvec(&[1, 0]), rvec(&[0, 1]), rvec(&[1, 2])]).unwrap();
    assert!(img.same_set(&expected));
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, 0..6)
}

fn point() -> impl Strategy<Value = RatVec> {
    prop::collection::vec((-9i64..=9, 1i64..4).prop_map(|(p, q)| rat(p, q)), 2)
}

fn conv() -> impl Strategy<Value = Convention> {
    prop_oneof![Just(Convention::Upper), Just(Convention::Lower)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pl_maps_invert(w in word(), x in point(), c in conv(), flavor_a in any::<bool>()) {
        let s0 = Seed::initial_shared(running_example());
        let flavor = if flavor_a { Flavor::A } else { Flavor::X };
        let map = PLMap::mutations(&s0, &w, flavor, c).unwrap();
        prop_assert_eq!(map.inverse().unwrap().apply(&map.apply(&x)), x);
    }

    /// Tropicalized cluster monomials do not depend on the chart they are evaluated in.
    #[test]
    fn tropical_functions_are_chart_independent(w in word(), w2 in word(), x in point(), c in conv(), k in 0usize..2) {
        let fd = running_example();
        let s0 = Seed::initial_shared(fd.clone());
        let s = s0.mutate_word(&w).unwrap();
        let s2 = s0.mutate_word(&w2).unwrap();
        let mono = LaurentPolynomial::monomial(unit(2, k), Rat::one());
        let f0 = transport(&mono, &s2, &s0, Flavor::A).unwrap();
        let fs = transport(&mono, &s2, &s, Flavor::A).unwrap().map_exponents(2, |m| s.m_to_initial(m));
        let map = PLMap::mutations(&s0, &w, Flavor::A, c).unwrap();
        prop_assert_eq!(trop_eval(&f0, &x, fd.d(), c), trop_eval(&fs, &map.apply(&x), fd.d(), c));
    }

    /// For a convex image, lattice points map bijectively onto lattice points.
    #[test]
    fn convex_images_carry_lattice_points(a in 0i64..3, b in 0i64..3, lo in -2i64..0) {
        let box_ = Polytope::hull(&[rvec(&[lo, 0]), rvec(&[a, 0]), rvec(&[lo, b]), rvec(&[a, b])]).unwrap();
        let map = PLMap::elementary(ElementaryPL { ell: rvec(&[0, 1]), w: rvec(&[1, 0]) });
        let (img, rep) = apply_pl_to_polytope(&map, &box_).unwrap();
        prop_assert!(rep.convex);
        let mut mapped: Vec<RatVec> = lattice_points(&box_).iter().map(|p| map.apply(&clusterbody::lattice::to_rat(p))).collect();
        let mut pts: Vec<RatVec> = lattice_points(&img).iter().map(|p| clusterbody::lattice::to_rat(p)).collect();
        mapped.sort();
        pts.sort();
        prop_assert_eq!(mapped, pts);
    }
}
