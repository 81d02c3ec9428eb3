use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use proptest::prelude::*;

use chowvol::corpus::{random_matroids, uniform_matroids, CorpusEntry};
use chowvol::fan::deletion_tower;
use chowvol::mixedvol::{
    b_coefficients, brion_volume, cross_validate, decompose_weight_seeded, deletion_volume,
    deletion_volume_traced, evaluation_volume_fan, evaluation_volume_seeded, generic_vectors,
    lift_coloop, lift_non_coloop, random_projection, subdivision_operator, DeletionStep, EvaluationData,
};
use chowvol::poly::int;
use chowvol::{
    bergman_fan, Cone, ElementSet, Flat, Genericity, Matroid, MinkowskiWeight, RationalPoly, SimplicialFan, VarId,
};

fn small_corpus() -> Vec<CorpusEntry> {
    let mut c = uniform_matroids(5).unwrap();
    c.extend(random_matroids(25, 5, 2024).unwrap());
    c
}

fn flat_pivots(m: &Matroid) -> Vec<u32> {
    m.elements()
        .into_iter()
        .filter(|&i| m.len() > 1 && m.is_flat(ElementSet::singleton(i)))
        .collect()
}

fn one(fan: &SimplicialFan) -> MinkowskiWeight {
    MinkowskiWeight::constant(fan, int(1))
}

#[test]
fn methods_agree_on_small_corpus() {
    for e in small_corpus() {
        let report = cross_validate(&e.matroid, &[3, 4], &Genericity::default()).unwrap();
        assert!(report.passed(), "{}: {:?}", e.name, report.divergence);
    }
}

#[test]
fn every_choice_of_j_gives_the_same_volume() {
    for e in small_corpus().iter().filter(|e| e.matroid.len() <= 4) {
        let m = &e.matroid;
        let reference = deletion_volume(m).unwrap();
        for i in flat_pivots(m) {
            for j in m.elements().into_iter().filter(|&j| j != i) {
                let (vol, _) = deletion_volume_traced(m, i, Some(j)).unwrap();
                assert_eq!(vol, reference, "{} i={i} j={j}", e.name);
            }
        }
    }
}

#[test]
fn tower_volumes_match_evaluation() {
    let policy = Genericity::default();
    for e in small_corpus().iter().filter(|e| e.matroid.dim() >= 1) {
        let m = &e.matroid;
        for i in flat_pivots(m) {
            let (_, trace) = deletion_volume_traced(m, i, None).unwrap();
            let tower = deletion_tower(m, i).unwrap();
            assert_eq!(tower.len(), trace.tower.len(), "{} i={i}", e.name);
            for (j, (fan, vol)) in tower.iter().zip(&trace.tower).enumerate() {
                let (_, projected) = random_projection(fan, 17 + j as u64, &policy).unwrap();
                let eval = evaluation_volume_seeded(&projected, &one(&projected), 5, &policy).unwrap();
                assert_eq!(&eval, vol, "{} i={i} j={j}", e.name);
            }
        }
    }
}

/// Chains of nontrivial flats strictly inside `low` or strictly above `high`.
fn interval_product(m: &Matroid, low: Flat, high: Flat) -> BTreeSet<BTreeSet<VarId>> {
    let chains = m.lattice().unwrap().all_chains();
    let below: Vec<BTreeSet<VarId>> = chains
        .iter()
        .filter(|c| c.flats().iter().all(|f| f.is_proper_subset(low)))
        .map(|c| c.flats().iter().map(|f| VarId(*f)).collect())
        .collect();
    let above: Vec<BTreeSet<VarId>> = chains
        .iter()
        .filter(|c| c.flats().iter().all(|f| high.is_proper_subset(*f)))
        .map(|c| c.flats().iter().map(|f| VarId(*f)).collect())
        .collect();
    below
        .iter()
        .flat_map(|a| above.iter().map(move |b| a.union(b).copied().collect()))
        .collect()
}

#[test]
fn links_of_subdivided_cones_are_products() {
    for e in small_corpus().iter().filter(|e| e.matroid.dim() >= 2) {
        let m = &e.matroid;
        let fan = bergman_fan(m).unwrap();
        for tau in fan.cones_of_dim(2) {
            let r = fan.fresh_label();
            let fine = fan.star_subdivide(&tau, r).unwrap();
            let link_r = fine.link(&fine.cone_of(&[r]).unwrap()).unwrap().abstract_cones();
            let boundary: Vec<BTreeSet<VarId>> = [vec![], vec![fan.labels(&tau)[0]], vec![fan.labels(&tau)[1]]]
                .into_iter()
                .map(|v| v.into_iter().collect())
                .collect();
            let expect: BTreeSet<BTreeSet<VarId>> = fan
                .link(&tau)
                .unwrap()
                .abstract_cones()
                .iter()
                .flat_map(|b| boundary.iter().map(move |a| a.union(b).copied().collect()))
                .collect();
            assert_eq!(link_r, expect, "{} τ={:?}", e.name, fan.labels(&tau));
        }

        for i in flat_pivots(m) {
            let tower = deletion_tower(m, i).unwrap();
            for (j, f) in m.s_set(i).unwrap().into_iter().enumerate() {
                let delta = &tower[j + 1];
                let tau = delta.cone_of(&[VarId(ElementSet::singleton(i)), VarId(f)]).unwrap();
                let link = delta.link(&tau).unwrap().abstract_cones();
                assert_eq!(link, interval_product(m, f, f.with(i)), "{} i={i} F={f}", e.name);
            }
        }
    }
}

#[test]
fn subdivision_operator_matches_evaluation() {
    let policy = Genericity::default();
    let mut pairs = 0;
    for (k, e) in small_corpus().iter().filter(|e| e.matroid.dim() >= 2).enumerate() {
        let m = &e.matroid;
        let fan = bergman_fan(m).unwrap();
        let vol = deletion_volume(m).unwrap();
        let cones = fan.cones_of_dim(2);
        for tau in cones.iter().skip(k % 3).step_by(5).take(3) {
            let labels = fan.labels(tau);
            let r = fan.fresh_label();
            let fine = fan.star_subdivide(tau, r).unwrap();
            let weight = one(&fan).pull_back(&fan, &fine).unwrap();
            assert!(weight.0.values().all(One::is_one));
            let (rows, projected) = random_projection(&fine, k as u64, &policy).unwrap();
            let eval = evaluation_volume_seeded(&projected, &weight, 1, &policy).unwrap();
            let op = subdivision_operator(&vol, labels[0], labels[1], r).unwrap();
            assert_eq!(eval, op, "{} τ={labels:?}", e.name);
            let coarse = fan.project(&rows).unwrap();
            assert_eq!(evaluation_volume_seeded(&coarse, &one(&coarse), 2, &policy).unwrap(), vol);
            pairs += 1;
        }
    }
    assert!(pairs >= 20);
}

#[test]
fn pulled_back_weights_follow_the_coarse_cone() {
    let m = Matroid::uniform(3, 4).unwrap();
    let fan = bergman_fan(&m).unwrap();
    let mut w = one(&fan);
    let tau = fan.cone_of(&[VarId::of(&[1]), VarId::of(&[1, 2])]).unwrap();
    w.0.insert(tau.clone(), int(5));
    let fine = fan.star_subdivide(&tau, fan.fresh_label()).unwrap();
    let pulled = w.pull_back(&fan, &fine).unwrap();
    assert_eq!(pulled.0.len(), fan.maximal_cones().len() + 1);
    assert_eq!(pulled.0.values().filter(|x| **x == int(5)).count(), 2);
}

#[test]
fn lifts_satisfy_their_equations() {
    for e in small_corpus() {
        let m = &e.matroid;
        for i in flat_pivots(m) {
            let step = DeletionStep::new(m, i, None).unwrap();
            let minor = deletion_volume(&step.minor).unwrap();
            let xi = VarId(ElementSet::singleton(i));
            let b = b_coefficients(m, i).unwrap();
            let b_part = |p: &RationalPoly| -> RationalPoly {
                b.values.iter().map(|(g, c)| p.derivative(VarId(*g)).scale(c)).sum()
            };
            if step.coloop {
                let lifted = lift_coloop(&minor, &step).unwrap();
                let xc = VarId(step.complement);
                let p = &lifted.poly;
                assert!((&(&p.derivative(xi) - &p.derivative(xc)) - &b_part(p)).is_zero());
                assert!(p.derivative(xi).derivative(xc).is_zero());
                assert!(p.set_zero(xi).set_zero(xc).is_zero());
                assert_eq!(lifted.degree, minor.degree + 1);
                assert!(matches!(lift_non_coloop(&minor, &step), Err(chowvol::Error::IsColoop(_))));
            } else {
                let lifted = lift_non_coloop(&minor, &step).unwrap();
                let p = &lifted.poly;
                assert!((&p.derivative(xi) - &b_part(p)).is_zero());
                let renamed: BTreeMap<VarId, VarId> =
                    step.closure.iter().map(|(g, gb)| (VarId(*g), VarId(*gb))).collect();
                assert_eq!(p.set_zero(xi), minor.poly.rename(&renamed));
                assert!(matches!(lift_coloop(&minor, &step), Err(chowvol::Error::NotColoop(_))));
            }
        }
    }
}

#[test]
fn weight_decomposition_sums_to_the_weight() {
    let policy = Genericity::default();
    let mut fans = 0;
    for (k, e) in small_corpus().iter().filter(|e| e.matroid.dim() >= 1).enumerate().take(30) {
        let m = &e.matroid;
        let gv = generic_vectors(m, k as u64).unwrap();
        let fan = bergman_fan(m).unwrap().project(&gv.projection().unwrap()).unwrap();
        let w = one(&fan);
        let (v0, parts) = decompose_weight_seeded(&fan, &w, k as u64, &policy).unwrap();
        assert_eq!(parts.len(), fan.maximal_cones().len());
        let mut total = RationalPoly::zero();
        for part in &parts {
            assert!(part.fan.check_balancing(&part.weight).passed());
            assert_eq!(part.weight.get(&Cone::new(0..fan.dim())), w.get(&part.cone));
            // At x_{v0} = 0 each summand's volume is the matching term of the
            // evaluation sum at v0; the x_{v0} parts cancel in the total.
            let own = evaluation_volume_seeded(&part.fan, &part.weight, 3, &policy).unwrap();
            let term = EvaluationData::new(&fan, &part.cone, &v0).contribution(&fan);
            let apex = part.fan.ray(fan.dim()).label;
            assert_eq!(own.poly.set_zero(apex), term, "{} σ={:?}", e.name, part.cone);
            total += &own.poly;
        }
        let whole = evaluation_volume_fan(&fan, &w, &v0).unwrap();
        assert_eq!(total, whole.poly);
        assert_eq!(whole, brion_volume(m, &gv).unwrap());
        fans += 1;
    }
    assert!(fans >= 10);
}

fn permuted(m: &Matroid, labels: &[u32]) -> (Matroid, BTreeMap<u32, u32>) {
    let map: BTreeMap<u32, u32> = m.elements().into_iter().zip(labels.iter().copied()).collect();
    (m.relabel(&map).unwrap(), map)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn brion_is_seed_invariant(idx in 0usize..30, s1 in any::<u64>(), s2 in any::<u64>()) {
        let m = &small_corpus()[idx].matroid;
        let a = brion_volume(m, &generic_vectors(m, s1).unwrap()).unwrap();
        let b = brion_volume(m, &generic_vectors(m, s2).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn volumes_are_relabeling_equivariant(
        idx in 0usize..40,
        labels in Just((1u32..=24).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let m = &small_corpus()[idx].matroid;
        let (pm, map) = permuted(m, &labels);
        let rename: BTreeMap<VarId, VarId> = m
            .lattice()
            .unwrap()
            .nontrivial()
            .iter()
            .map(|f| (VarId(*f), VarId(f.map_labels(|e| map[&e]))))
            .collect();
        let expect = deletion_volume(m).unwrap().poly.rename(&rename);
        prop_assert_eq!(&deletion_volume(&pm).unwrap().poly, &expect);
        let gv = generic_vectors(&pm, 9).unwrap();
        prop_assert_eq!(&brion_volume(&pm, &gv).unwrap().poly, &expect);
    }
}
