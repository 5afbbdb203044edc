use fqrigid::charsum::{
    planes_through_one, quotient_sum_cor22, subspace_generator, weil_pair_sum, Verdict, WeilInstance,
};
use fqrigid::clique::{cliques_of_size_q_through_0_1, make_instance, verify_thm_main2, CliqueMode, CliqueOptions};
use fqrigid::example::f25_u;
use fqrigid::{build_field, CosetUnion, Element, LinearizedMap};

#[test]
fn every_plane_through_one_has_a_generator() {
    let field = build_field(3, 4).unwrap();
    let planes = planes_through_one(&field);
    let f9 = field.subfield_elements(2).unwrap();
    let mut qualifying = 0;
    for basis in &planes {
        let w = basis[1];
        if f9.contains(&w) {
            assert!(subspace_generator(&field, basis).is_err());
            continue;
        }
        let v = subspace_generator(&field, basis).unwrap();
        assert_eq!(field.subfield_profile(v), vec![4]);
        qualifying += 1;
    }
    // 13 planes through 1 in F_3^4, one of them F_9
    assert_eq!((planes.len(), qualifying), (13, 12));
}

#[test]
fn quotient_sum_on_the_f25_directions() {
    let field = build_field(5, 2).unwrap();
    let u = f25_u(&field);
    let dirs = LinearizedMap::new(field.clone(), vec![Element::ONE, u]).unwrap().directions().slopes();
    let h = CosetUnion::subgroup(field.clone(), 6).unwrap();
    let l = CosetUnion::power_residues(field.clone(), 4).unwrap();
    let mut audited = 0;
    for &a in &dirs {
        for &b in &dirs {
            let ab = field.div(a, b).unwrap();
            if h.contains(ab) || l.contains(ab) {
                continue;
            }
            for j in 1..6 {
                let audit = quotient_sum_cor22(&field, 6, j, a, b, Element::ONE, u).unwrap();
                if audit.hypotheses_hold() {
                    assert_eq!(audit.verdict, Verdict::Pass);
                    audited += 1;
                }
            }
        }
    }
    assert!(audited > 0);
}

#[test]
fn exact_mode_for_quadratic_characters() {
    // with real characters the sum and its square are rational integers
    let field = build_field(7, 2).unwrap();
    for x1 in [3u32, 9, 20] {
        for x2 in [11u32, 30, 41] {
            let audit = weil_pair_sum(&WeilInstance::new(field.clone(), Element(x1), Element(x2), 2, 1, 1).unwrap());
            let s = audit.exact_sum().unwrap().as_integer().unwrap();
            assert_eq!(s as f64, audit.re);
            assert_eq!(audit.exact_abs_squared().unwrap().as_integer(), Some(s * s));
        }
    }
}

#[test]
fn clique_reports_do_not_depend_on_workers() {
    let inst = make_instance(3, 2, 5, &[0, 2]).unwrap();
    let one = CliqueOptions { jobs: Some(1), ..Default::default() };
    let two = CliqueOptions { jobs: Some(2), ..Default::default() };
    let a = verify_thm_main2(&inst, CliqueMode::Catalog, &one).unwrap();
    let b = verify_thm_main2(&inst, CliqueMode::Catalog, &two).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let back: fqrigid::clique::CliqueReport = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn clique_cap_and_missing_subfield() {
    let big = make_instance(19, 1, 2, &[0]).unwrap();
    assert!(cliques_of_size_q_through_0_1(&big, &CliqueOptions::default()).is_err());
    let off = make_instance(5, 1, 3, &[1]).unwrap();
    assert!(!off.fq_star_in_s());
    let report = verify_thm_main2(&off, CliqueMode::Verify, &CliqueOptions::default()).unwrap();
    assert!(report.cliques.is_empty());
    assert_eq!(report.mode, CliqueMode::Catalog);
    assert!(report.violations.is_empty());
}
