use super::*;
use crate::constructions::{build_direct_product_with_elem_abelian, build_h_mod_center, build_quintuple, build_u3, build_cyclic};
use crate::field::{find_irreducible, FieldSpec};

fn fs(p: u32, m: usize) -> FieldSpec {
    find_irreducible(p, m).unwrap()
}

#[test]
fn hypothesis_on_hmod() {
    let g = build_h_mod_center(&fs(3, 1)).unwrap();
    let r = verify_hypothesis_a2(&g);
    assert!(r.passed(), "{r:?}");
    assert_eq!((r.p, r.m), (Some(3), Some(1)));
}

#[test]
fn hypothesis_rejects_u3_and_product() {
    let r = verify_hypothesis_a2(&build_u3(&fs(3, 1)).unwrap());
    assert!(!r.passed());
    assert_eq!(r.failures().next().unwrap().name, "class_3");
    let g = build_h_mod_center(&fs(3, 1)).unwrap();
    let x = build_direct_product_with_elem_abelian(&g, 3, 1).unwrap();
    let r = verify_hypothesis_a2(&x);
    let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
    assert_eq!(failed, vec!["center_in_derived"]);
}

#[test]
fn structural_suite_small() {
    for (p, m) in [(3, 1), (5, 1)] {
        let r = verify_structural_suite(&build_h_mod_center(&fs(p, m)).unwrap()).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.checks.len() >= 15);
    }
}

#[test]
fn structural_suite_needs_hypothesis() {
    let err = verify_structural_suite(&build_u3(&fs(3, 1)).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn u3_recognition() {
    let g = build_h_mod_center(&fs(3, 1)).unwrap();
    let gbar = g.central_quotient().unwrap().group;
    let r = u3_recognizer(&gbar);
    assert!(r.recognized, "{r:?}");
    assert_eq!(r.q, Some(3));
    let r = u3_recognizer(&g);
    assert!(!r.recognized);
    assert!(r.q.is_none());
    let r = u3_recognizer(&build_cyclic(27).unwrap());
    assert!(!r.recognized);
    assert!(u3_recognizer(&build_u3(&fs(5, 1)).unwrap()).recognized);
    assert_eq!(u3_recognizer(&build_u3(&fs(3, 2)).unwrap()).q, Some(9));
}

#[test]
fn rejection_reasons() {
    // exponent 9 is checked before the class
    let r = u3_recognizer(&build_cyclic(27).unwrap());
    assert_eq!(r.rejected_by.as_deref(), Some("exponent"));
    let elab = crate::constructions::GroupSpec::ElementaryAbelian { p: 3, k: 3 }.build().unwrap();
    assert_eq!(u3_recognizer(&elab).rejected_by.as_deref(), Some("class"));
    let hmod = build_h_mod_center(&fs(3, 1)).unwrap();
    assert!(matches!(u3_recognizer(&hmod).rejected_by.as_deref(), Some("order") | Some("exponent") | Some("class")));
}

fn ctx(g: &FiniteGroup, p: u32, m: usize) -> FrameContext {
    FrameContext::new(g, &fs(p, m)).unwrap()
}

#[test]
fn central_correction_examples() {
    let g = build_h_mod_center(&fs(3, 1)).unwrap();
    let c = ctx(&g, 3, 1);
    let x1 = g.tag("x1").unwrap();
    assert_eq!(find_central_correction(&c, x1, x1).unwrap(), g.identity());
    // v = x1 g' with g' in G' \ Z and [x1, v] central but nontrivial
    let v = c
        .derived
        .members()
        .filter(|&d| !c.center.contains(d))
        .map(|d| g.mul(x1, d))
        .find(|&v| {
            let k = g.commutator(x1, v);
            c.center.contains(k) && k != g.identity()
        })
        .expect("such a pair exists");
    let h = find_central_correction(&c, x1, v).unwrap();
    assert!(c.derived.contains(h));
    assert_eq!(g.commutator(x1, g.mul(v, h)), g.identity());
}

#[test]
fn central_correction_in_quintuple_p5() {
    let g = build_quintuple(&fs(5, 1)).unwrap();
    let c = ctx(&g, 5, 1);
    let x1 = g.tag("x1").unwrap();
    let v = g.find_label(&[1, 0, 1, 0, 0]).unwrap();
    assert!(c.center.contains(g.commutator(x1, v)));
    let h = find_central_correction(&c, x1, v).unwrap();
    assert_eq!(g.commutator(x1, g.mul(v, h)), g.identity());
    let y1 = g.tag("y1").unwrap();
    assert!(matches!(find_central_correction(&c, x1, y1), Err(Error::Precondition(_))));
}

#[test]
fn coordinate_frame_quintuple_3_1() {
    let g = build_quintuple(&fs(3, 1)).unwrap();
    let c = ctx(&g, 3, 1);
    let f = lift_generator_frame(&c, LiftStrategy::Coordinate).unwrap();
    assert_eq!(g.label(f.h[0]), &[0, 0, 2, 1, 2]);
    assert_eq!(g.label(f.z[0]), &[0, 0, 0, 2, 0]);
    assert_eq!(g.label(f.z[1]), &[0, 0, 0, 0, 1]);
    assert!(verify_frame(&c, &f).iter().all(|c| c.passed));
    let params = extract_presentation_params(&c, &f).unwrap();
    assert_eq!(params.epsilon, vec![vec![0, 0]]);
    assert_eq!(params.alpha, vec![vec![vec![0, 0]]]);
    assert_eq!(params.beta, vec![vec![vec![0, 0]]]);
    assert!(verify_kappa_words(&c, &f).passed);
    assert!(verify_z_containments(&params).passed);
}

#[test]
fn coordinate_frame_quintuple_3_2() {
    let g = build_quintuple(&fs(3, 2)).unwrap();
    let c = ctx(&g, 3, 2);
    let f = lift_generator_frame(&c, LiftStrategy::Coordinate).unwrap();
    // no correction needed
    assert!(f.x_corrections.iter().chain(&f.y_corrections).all(|&h| h == g.identity()));
    assert!(verify_frame(&c, &f).iter().all(|c| c.passed), "{:?}", verify_frame(&c, &f));
    let params = extract_presentation_params(&c, &f).unwrap();
    assert_eq!(params.gamma[1][1], vec![2, 0, 0, 0]);
    assert_eq!(g.commutator(f.h[1], f.x[1]), g.pow(f.z[0], 2));
    assert!(verify_kappa_words(&c, &f).passed);
    for i in 0..2 {
        for j in 0..2 {
            let k = &params.kappa[i][j];
            assert_eq!(params.gamma[i][j], [k.clone(), vec![0, 0]].concat());
            assert_eq!(params.delta[i][j], [vec![0, 0], k.clone()].concat());
        }
    }
}

#[test]
fn generic_frame_hmod_3_1_matches_coordinate_frame() {
    let g = build_h_mod_center(&fs(3, 1)).unwrap();
    let c = ctx(&g, 3, 1);
    let gen = lift_generator_frame(&c, LiftStrategy::Generic).unwrap();
    assert!(verify_frame(&c, &gen).iter().all(|c| c.passed));
    let coord = lift_generator_frame(&c, LiftStrategy::Coordinate).unwrap();
    let a = extract_presentation_params(&c, &gen).unwrap();
    let b = extract_presentation_params(&c, &coord).unwrap();
    assert!(verify_frame_independence(&a, &b).passed, "{a:?}\n{b:?}");
    assert!(verify_frame_independence(&a, &a).passed);
}

#[test]
fn shifted_frame_agrees() {
    let g = build_quintuple(&fs(3, 2)).unwrap();
    let c = ctx(&g, 3, 2);
    let f = lift_generator_frame(&c, LiftStrategy::Coordinate).unwrap();
    let s = shifted_frame(&c, &f).unwrap();
    assert_ne!(f.x[0], s.x[0]);
    assert!(verify_frame(&c, &s).iter().all(|c| c.passed));
    let a = extract_presentation_params(&c, &f).unwrap();
    let b = extract_presentation_params(&c, &s).unwrap();
    assert!(verify_frame_independence(&a, &b).passed);
}

#[test]
fn broken_frame_is_reported() {
    let g = build_quintuple(&fs(3, 1)).unwrap();
    let c = ctx(&g, 3, 1);
    let mut f = lift_generator_frame(&c, LiftStrategy::Coordinate).unwrap();
    f.z.swap(0, 1);
    let checks = verify_frame(&c, &f);
    assert!(checks.iter().any(|c| !c.passed && c.name == "h_and_z_are_commutators"));
    assert!(!verify_kappa_words(&c, &f).passed);
}

#[test]
fn coordinate_lift_needs_tags() {
    let g = build_quintuple(&fs(3, 1)).unwrap().with_tags(Default::default());
    let c = ctx(&g, 3, 1);
    assert!(matches!(lift_generator_frame(&c, LiftStrategy::Coordinate), Err(Error::Precondition(_))));
    assert!(lift_generator_frame(&c, LiftStrategy::Generic).is_ok());
}
