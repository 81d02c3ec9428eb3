use std::collections::BTreeMap;

use chowvol::mixedvol::{
    brion_volume, cross_validate, deletion_volume, deletion_volume_traced, generic_vectors, Genericity,
};
use chowvol::poly::{int, q, Monomial};
use chowvol::{Matroid, RationalPoly, VarId};

fn x(l: &[u32]) -> RationalPoly {
    RationalPoly::var(VarId::of(l))
}

fn sq(p: &RationalPoly) -> RationalPoly {
    p * p
}

fn plane() -> Matroid {
    Matroid::from_bases(&[1, 2, 3, 4], &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap()
}

/// Known volume of the rank-3 matroid on {1,2,3,4} with 1,2,3 collinear.
fn plane_volume() -> RationalPoly {
    let squares = [&[1][..], &[2], &[3], &[4], &[4], &[1, 4], &[2, 4], &[3, 4], &[1, 2, 3]]
        .iter()
        .map(|l| sq(&x(l)))
        .sum::<RationalPoly>();
    let mut p = squares.scale(&q(-1, 2));
    p += &x(&[4]) * &(&(&x(&[1, 4]) + &x(&[2, 4])) + &x(&[3, 4]));
    p += &x(&[1, 2, 3]) * &(&(&x(&[1]) + &x(&[2])) + &x(&[3]));
    p += &x(&[1]) * &x(&[1, 4]);
    p += &x(&[2]) * &x(&[2, 4]);
    p += &x(&[3]) * &x(&[3, 4]);
    p
}

/// Known volume of the Boolean matroid on {1,2,4}.
fn boolean_124() -> RationalPoly {
    let squares = [&[1][..], &[2], &[4], &[1, 2], &[1, 4], &[2, 4]]
        .iter()
        .map(|l| sq(&x(l)))
        .sum::<RationalPoly>();
    let mut p = squares.scale(&q(-1, 2));
    p += &x(&[1]) * &(&x(&[1, 2]) + &x(&[1, 4]));
    p += &x(&[2]) * &(&x(&[1, 2]) + &x(&[2, 4]));
    p += &x(&[4]) * &(&x(&[1, 4]) + &x(&[2, 4]));
    p
}

#[test]
fn plane_matroid_both_methods() {
    let m = plane();
    let expect = plane_volume();
    assert_eq!(deletion_volume(&m).unwrap().poly, expect);
    for seed in [1, 2, 3] {
        let gv = generic_vectors(&m, seed).unwrap();
        assert_eq!(brion_volume(&m, &gv).unwrap().poly, expect);
    }
    assert_eq!(expect.len(), 17);
}

#[test]
fn boolean_matroid_under_relabeling() {
    let renamed: BTreeMap<VarId, VarId> = [
        (VarId::of(&[4]), VarId::of(&[3])),
        (VarId::of(&[1, 4]), VarId::of(&[1, 3])),
        (VarId::of(&[2, 4]), VarId::of(&[2, 3])),
    ]
    .into();
    let expect = boolean_124().rename(&renamed);
    let u33 = Matroid::uniform(3, 3).unwrap();
    assert_eq!(deletion_volume(&u33).unwrap().poly, expect);
    let report = cross_validate(&u33, &[5, 6], &Genericity::default()).unwrap();
    assert!(report.passed());
    assert_eq!(report.brion[0].poly, expect);

    let b124 = Matroid::boolean(&[1, 2, 4]).unwrap();
    assert_eq!(deletion_volume(&b124).unwrap().poly, boolean_124());
}

#[test]
fn deleting_a_non_coloop() {
    let m = plane();
    let (vol, trace) = deletion_volume_traced(&m, 3, Some(2)).unwrap();
    assert_eq!(trace.minor.poly, boolean_124());
    let lifted = &boolean_124().rename(&[(VarId::of(&[1, 2]), VarId::of(&[1, 2, 3]))].into())
        + &(&x(&[3]) * &(&x(&[1, 2, 3]) + &x(&[4])));
    assert_eq!(trace.tower[1].poly, lifted);
    let z = &(&x(&[3, 4]) - &x(&[3])) - &x(&[4]);
    assert_eq!(vol.poly, &lifted - &sq(&z).scale(&q(1, 2)));
    assert_eq!(vol.poly, plane_volume());
}

#[test]
fn deleting_a_coloop() {
    let m = plane();
    let (vol, trace) = deletion_volume_traced(&m, 4, None).unwrap();
    assert!(trace.coloop);
    assert_eq!(trace.minor.poly, &(&x(&[1]) + &x(&[2])) + &x(&[3]));
    let s = &(&x(&[1]) + &x(&[2])) + &x(&[3]);
    let lifted = &(&x(&[4]) * &(&s + &x(&[4]).scale(&q(1, 2))))
        + &(&x(&[1, 2, 3]) * &(&s - &x(&[1, 2, 3]).scale(&q(1, 2))));
    assert_eq!(trace.tower[3].poly, lifted);
    let mut expect = lifted.clone();
    for e in 1..=3 {
        expect -= &sq(&(&(&x(&[e, 4]) - &x(&[e])) - &x(&[4]))).scale(&q(1, 2));
    }
    assert_eq!(vol.poly, expect);
    let x4 = Monomial::product([VarId::of(&[4]), VarId::of(&[4])]);
    assert_eq!(trace.tower[3].poly.coefficient(&x4), q(1, 2));
    assert_eq!(vol.poly.coefficient(&x4), int(-1));
}

#[test]
fn trivial_volumes() {
    for n in 1..=4 {
        let u = Matroid::uniform(1, n).unwrap();
        assert_eq!(deletion_volume(&u).unwrap().poly, RationalPoly::one());
        assert_eq!(brion_volume(&u, &generic_vectors(&u, 1).unwrap()).unwrap().poly, RationalPoly::one());
    }
    let u24 = Matroid::uniform(2, 4).unwrap();
    let sum: RationalPoly = (1..=4).map(|e| x(&[e])).sum();
    assert_eq!(deletion_volume(&u24).unwrap().poly, sum);
}
