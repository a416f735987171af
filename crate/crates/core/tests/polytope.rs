use clusterbody::lattice::{ivec, IntMat};
use clusterbody::lattice::{rat, rvec, to_rat, IntVec, Rat, RatMat, RatVec};
use clusterbody::polytope::{
    lattice_points, lattice_points_brute, slice, superpotential_cone, verify_unimodular,
    AffineSubspace, Halfspace, Polytope,
};
use clusterbody::tropical::{Convention, PLFunction};
use itertools::Itertools;
use num::{Signed, Zero};
use proptest::prelude::*;

fn pts(v: &[&[i64]]) -> Vec<RatVec> {
    v.iter().map(|p| rvec(p)).collect()
}

/// Oracle: a point is a vertex iff it is not a convex combination of the other
/// points. By Carathéodory it suffices to try affinely independent subsets of size
/// at most d+1 and solve for barycentric coordinates exactly.
fn brute_vertices(points: &[RatVec]) -> Vec<RatVec> {
    let mut uniq = points.to_vec();
    uniq.sort();
    uniq.dedup();
    let d = uniq[0].len();
    let mut out = Vec::new();
    for (i, p) in uniq.iter().enumerate() {
        let others: Vec<&RatVec> = uniq
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q)
            .collect();
        let mut inside = false;
        for size in 1..=(d + 1).min(others.len()) {
            for subset in others.iter().copied().combinations(size) {
                let mut rows: Vec<RatVec> = (0..d)
                    .map(|r| subset.iter().map(|q| q[r].clone()).collect())
                    .collect();
                rows.push(vec![rat(1, 1); size]);
                let m = RatMat::from_rows(rows).unwrap();
                if m.rank() < size {
                    continue;
                }
                let mut rhs = p.clone();
                rhs.push(rat(1, 1));
                if let Some(l) = m.solve(&rhs) {
                    if l.iter().all(|x| !x.is_negative()) {
                        inside = true;
                        break;
                    }
                }
            }
            if inside {
                break;
            }
        }
        if !inside {
            out.push(p.clone());
        }
    }
    out
}

#[test]
fn square_with_interior_point() {
    let p = Polytope::hull(
        &pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
            .into_iter()
            .chain([vec![rat(1, 2), rat(1, 2)]])
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert_eq!(p.vertices().len(), 4);
    assert_eq!(p.facets().len(), 4);
    assert!(p.equalities().is_empty());
    assert_eq!(lattice_points(&p).len(), 4);
    let q = p.scale(&rat(2, 1)).unwrap();
    assert_eq!(lattice_points(&q).len(), 9);
}

#[test]
fn single_point_and_segment() {
    let p = Polytope::hull(&pts(&[&[2, 3]])).unwrap();
    assert_eq!(p.vertices(), &[rvec(&[2, 3])]);
    assert!(p.facets().is_empty());
    assert_eq!(p.equalities().len(), 2);
    assert_eq!(p.affine_dim(), 0);
    let s = Polytope::hull(&pts(&[&[0, 0, 0], &[2, 2, 2], &[1, 1, 1]])).unwrap();
    assert_eq!(s.vertices().len(), 2);
    assert_eq!(s.affine_dim(), 1);
    assert_eq!(lattice_points(&s).len(), 3);
}

#[test]
fn h_to_v_and_unbounded() {
    let f = vec![
        Halfspace::new(rvec(&[1, 0]), rat(0, 1)),
        Halfspace::new(rvec(&[0, 1]), rat(0, 1)),
        Halfspace::new(rvec(&[-1, -1]), rat(-3, 1)),
    ];
    let p = Polytope::from_h(2, &f, &[]).unwrap();
    assert_eq!(p.vertices().len(), 3);
    assert_eq!(lattice_points(&p).len(), 10);
    let open = &f[..2];
    assert_eq!(
        Polytope::from_h(2, open, &[]).unwrap_err().code(),
        "Unbounded"
    );
    let infeasible = [
        Halfspace::new(rvec(&[1, 0]), rat(1, 1)),
        Halfspace::new(rvec(&[-1, 0]), rat(0, 1)),
    ];
    let bounded_box: Vec<Halfspace> = infeasible
        .iter()
        .cloned()
        .chain([
            Halfspace::new(rvec(&[0, 1]), rat(0, 1)),
            Halfspace::new(rvec(&[0, -1]), rat(-1, 1)),
        ])
        .collect();
    assert!(Polytope::from_h(2, &bounded_box, &[]).unwrap().is_empty());
    assert!(lattice_points(&Polytope::empty(3)).is_empty());
}

#[test]
fn simplicial_cone_slice() {
    let f = PLFunction {
        kind: Convention::Lower,
        support: vec![ivec(&[1, 0]), ivec(&[0, 1])],
    };
    let cone = superpotential_cone(&[f], &[Rat::zero()]).unwrap();
    let fiber = AffineSubspace {
        dim: 2,
        equations: vec![Halfspace::new(rvec(&[1, 1]), rat(1, 1))],
    };
    let s = slice(&cone, &fiber).unwrap();
    assert_eq!(s.vertices(), &[rvec(&[0, 1]), rvec(&[1, 0])]);
    let half = superpotential_cone(
        &[PLFunction {
            kind: Convention::Lower,
            support: vec![ivec(&[1, 1])],
        }],
        &[Rat::zero()],
    )
    .unwrap();
    assert_eq!(slice(&half, &fiber).unwrap_err().code(), "Unbounded");
}

#[test]
fn upper_convention_cone_negates_pieces() {
    let f = PLFunction {
        kind: Convention::Upper,
        support: vec![ivec(&[-1, 0]), ivec(&[0, -1])],
    };
    let cone = superpotential_cone(&[f], &[Rat::zero()]).unwrap();
    assert!(cone.contains(&rvec(&[1, 2])));
    assert!(!cone.contains(&rvec(&[-1, 2])));
}

#[test]
fn unimodular_checks() {
    let p = Polytope::hull(&pts(&[&[0, 0], &[1, 0], &[0, 1]])).unwrap();
    assert!(verify_unimodular(
        &p,
        &p,
        &IntMat::identity(2),
        &ivec(&[0, 0])
    ));
    let u = IntMat::from_i64(&[&[1, 1], &[0, 1]]);
    let q = p.affine_image(&u.to_rat(), &rvec(&[1, 1])).unwrap();
    assert!(verify_unimodular(&p, &q, &u, &ivec(&[1, 1])));
    let two = IntMat::from_i64(&[&[2, 0], &[0, 1]]);
    let q2 = p.affine_image(&two.to_rat(), &rvec(&[0, 0])).unwrap();
    assert!(!verify_unimodular(&p, &q2, &two, &ivec(&[0, 0])));
}

fn point_set(dim: usize) -> impl Strategy<Value = Vec<IntVec>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), 1..9)
        .prop_map(|v| v.into_iter().map(|p| ivec(&p)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_round_trip((dim, points) in (1usize..=4).prop_flat_map(|d| (Just(d), point_set(d)))) {
        let rp: Vec<RatVec> = points.iter().map(|p| to_rat(p)).collect();
        let h = Polytope::hull(&rp).unwrap();
        for p in &rp {
            prop_assert!(h.contains(p));
        }
        prop_assert_eq!(h.vertices().to_vec(), brute_vertices(&rp));
        let back = Polytope::from_h(dim, h.facets(), h.equalities()).unwrap();
        prop_assert!(back.same_set(&h));
        for f in h.facets() {
            let tight = h.vertices().iter().filter(|v| f.value(v).is_zero()).count() as i64;
            prop_assert!(tight >= h.affine_dim());
            prop_assert!(h.vertices().iter().any(|v| f.value(v).is_positive()));
        }
        prop_assert_eq!(lattice_points(&h), lattice_points_brute(&h));
    }

    #[test]
    fn hull_fuzz(points in point_set(3)) {
        let rp: Vec<RatVec> = points.iter().map(|p| to_rat(p)).collect();
        let h = Polytope::hull(&rp).unwrap();
        prop_assert_eq!(h.vertices().to_vec(), brute_vertices(&rp));
        let back = Polytope::from_h(3, h.facets(), h.equalities()).unwrap();
        prop_assert!(back.same_set(&h));
        prop_assert_eq!(lattice_points(&h), lattice_points_brute(&h));
        let twice = h.scale(&rat(2, 1)).unwrap();
        let doubled: Vec<RatVec> = h.vertices().iter().map(|v| v.iter().map(|x| x * rat(2, 1)).collect()).collect();
        prop_assert_eq!(twice.vertices().to_vec(), doubled);
    }
}
