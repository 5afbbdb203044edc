use std::collections::BTreeSet;

use fqrigid::directions::{directions_of_function, is_frobenius_linear};
use fqrigid::example::f25_u;
use fqrigid::search::{
    empirical_margin, enumerate_additive_in, find_exceptional_examples, verify_thm_main, Classification, SearchOptions,
};
use fqrigid::{build_field, CosetUnion, Element, LinearizedMap};

/// Every linearized map whose full-table direction set lies in `set`.
fn naive_filter(set: &CosetUnion) -> Vec<LinearizedMap> {
    let field = set.field().clone();
    let q = field.q() as u64;
    let n = field.n();
    let mut out = Vec::new();
    for code in 1..q.pow(n) {
        let mut c = code;
        let coeffs: Vec<Element> = (0..n)
            .map(|_| {
                let e = Element((c % q) as u32);
                c /= q;
                e
            })
            .collect();
        let map = LinearizedMap::new(field.clone(), coeffs).unwrap();
        let dirs = directions_of_function(&field, &map.table()).unwrap();
        if !dirs.has_infinity() && dirs.slopes().iter().all(|&s| set.contains(s)) {
            out.push(map);
        }
    }
    out
}

#[test]
fn enumeration_matches_full_table_filter() {
    for (p, n) in [(2u64, 2u32), (3, 2), (2, 3), (5, 2), (3, 3), (7, 2)] {
        let field = build_field(p, n).unwrap();
        let order = field.group_order() as u64;
        for d in fqrigid::arith::divisors(order).into_iter().filter(|&d| d <= 8) {
            let d = d as u32;
            for mask in 1u32..(1 << d) {
                let m: Vec<u32> = (0..d).filter(|&k| mask >> k & 1 == 1).collect();
                let set = CosetUnion::new(field.clone(), d, m.iter().copied()).unwrap();
                let fast = enumerate_additive_in(&set, &SearchOptions::default()).unwrap();
                assert_eq!(fast, naive_filter(&set), "F_{} d={d} M={m:?}", field.q());
            }
        }
    }
}

#[test]
fn survivors_grow_with_the_set() {
    let field = build_field(7, 2).unwrap();
    let small = CosetUnion::new(field.clone(), 8, [0, 3]).unwrap();
    let big = CosetUnion::new(field.clone(), 8, [0, 3, 5, 6]).unwrap();
    let a: BTreeSet<Vec<u32>> =
        enumerate_additive_in(&small, &SearchOptions::default()).unwrap().iter().map(|m| m.coeff_encodings()).collect();
    let b: BTreeSet<Vec<u32>> =
        enumerate_additive_in(&big, &SearchOptions::default()).unwrap().iter().map(|m| m.coeff_encodings()).collect();
    assert!(a.is_subset(&b));
}

#[test]
fn reports_are_identical_across_worker_counts() {
    let one = verify_thm_main(7, 2, 4, &[0, 1], &SearchOptions::with_jobs(1)).unwrap();
    let three = verify_thm_main(7, 2, 4, &[0, 1], &SearchOptions::with_jobs(3)).unwrap();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&three).unwrap());
    let back: fqrigid::search::RigidityReport = serde_json::from_str(&serde_json::to_string(&one).unwrap()).unwrap();
    assert_eq!(back, one);
}

#[test]
fn f25_search_finds_exceptional_survivors() {
    let field = build_field(5, 2).unwrap();
    let u = f25_u(&field);
    let one = Element::ONE;
    let set = CosetUnion::closure_of(field.clone(), 6, [u, field.add(one, u), field.sub(one, u)]).unwrap();
    let report = verify_thm_main(5, 2, 6, set.exponents(), &SearchOptions::default()).unwrap();
    assert!(!report.hypotheses.p_bound);
    assert!(report.violations.is_empty());
    assert!(report.exceptional_count > 0);
    let target = vec![one.0, u.0];
    let s = report.survivors.iter().find(|s| s.coeffs == target).expect("x + u x^5 survives");
    assert_eq!(s.classification, Classification::Exceptional);
    assert_eq!(s.direction_count, 6);
    // every scalar multiple a x with a in D survives too
    for a in set.elements() {
        let coeffs = vec![a.0, 0];
        assert!(report.survivors.iter().any(|s| s.coeffs == coeffs));
    }
}

#[test]
fn f25_catalog_recovers_the_example_up_to_scaling() {
    let field = build_field(5, 2).unwrap();
    let u = f25_u(&field);
    let one = Element::ONE;
    let catalog = find_exceptional_examples(5, 2, &[6], 3, &SearchOptions::default()).unwrap();
    let c = field.inv(field.add(one, u)).unwrap();
    let want = LinearizedMap::new(field.clone(), vec![one, u]).unwrap().scaled(c);
    let set = CosetUnion::closure_of(field.clone(), 6, [u, field.add(one, u), field.sub(one, u)]).unwrap();
    let hit = catalog.iter().find(|e| e.coeffs == want.coeff_encodings()).expect("example present");
    assert_eq!(hit.coset_union(&field), set.scale(field.add(one, u)).unwrap());
    assert!(!hit.is_violation());
    for e in &catalog {
        let map = e.map(&field);
        assert_eq!(map.eval(one), one);
        assert!(is_frobenius_linear(&field, &map.table()).unwrap().is_none());
        assert!(map.directions().is_subset_of(&e.coset_union(&field)));
    }
}

#[test]
fn f9_catalog_fixture() {
    let catalog = find_exceptional_examples(3, 2, &[8], 4, &SearchOptions::default()).unwrap();
    let got: Vec<(Vec<u32>, Vec<u32>, Vec<u32>)> =
        catalog.iter().map(|e| (e.coeffs.clone(), e.cosets.m.clone(), e.frobenius_orbit_rep.clone())).collect();
    assert_eq!(
        got,
        vec![
            (vec![7, 3], vec![0, 1, 2, 5], vec![7, 3]),
            (vec![6, 4], vec![0, 1, 4, 7], vec![6, 4]),
            (vec![4, 6], vec![0, 3, 6, 7], vec![7, 3]),
            (vec![3, 7], vec![0, 3, 4, 5], vec![6, 4]),
        ]
    );
    assert!(catalog.iter().all(|e| e.direction_count == 4 && !e.p_bound));
}

#[test]
fn no_exceptions_where_the_bound_holds() {
    // p = 37 >= 36 for (n, d, r) = (2, 2, 1)
    let catalog = find_exceptional_examples(37, 2, &[2], 1, &SearchOptions::default()).unwrap();
    assert!(catalog.is_empty());
    let margin = empirical_margin(2, 2, 1, 20, &SearchOptions::default()).unwrap();
    assert_eq!(margin.threshold, 36.0);
    assert!(margin.rows.iter().all(|r| r.p < 36));
}
