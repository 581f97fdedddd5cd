use super::*;
use crate::constructions::{build_direct_product_with_elem_abelian, build_h_mod_center, build_quintuple, build_u3, GroupSpec};
use crate::field::find_irreducible;

fn u3() -> FiniteGroup {
    build_u3(&find_irreducible(3, 1).unwrap()).unwrap()
}

fn hmod() -> FiniteGroup {
    build_h_mod_center(&find_irreducible(3, 1).unwrap()).unwrap()
}

#[test]
fn commutation_map_basics() {
    let g = u3();
    let a = commutation_map(&g, 100, 1).unwrap();
    let e = g.identity();
    let id = a.quotient.project(e);
    for y in 0..a.domain_order() {
        assert_eq!(a.get(id, y), e);
    }
    let (x1, y1) = (g.tag("X1").unwrap(), g.tag("Y1").unwrap());
    assert_eq!(a.get(a.quotient.project(x1), a.quotient.project(y1)), g.tag("H1").unwrap());
}

#[test]
fn commutation_image_is_derived_subgroup() {
    let g = hmod();
    let a = commutation_map(&g, 100, 2).unwrap();
    let image = a.image();
    assert!(image.iter().all(|&c| a.derived.contains(c)));
    assert_eq!(g.closure(&image).order(), a.derived.order());
}

#[test]
fn isomorphism_reflexive_and_refuted() {
    let g = u3();
    let cfg = SearchConfig::default();
    let out = are_isomorphic(&g, &g, &cfg);
    verify_isomorphism(&g, &g, out.witness().unwrap()).unwrap();
    let elab = GroupSpec::ElementaryAbelian { p: 3, k: 3 }.build().unwrap();
    let out = are_isomorphic(&g, &elab, &cfg);
    assert!(out.is_refuted());
    assert_eq!(out.nodes(), 0);
}

#[test]
fn matrix_quotient_is_isomorphic_to_quintuple_group() {
    let spec = find_irreducible(3, 1).unwrap();
    let (a, b) = (hmod(), build_quintuple(&spec).unwrap());
    let out = are_isomorphic(&a, &b, &SearchConfig::default());
    let w = out.witness().expect("isomorphic");
    verify_isomorphism(&a, &b, w).unwrap();
}

#[test]
fn tiny_budget_is_inconclusive() {
    let spec = find_irreducible(3, 1).unwrap();
    let (a, b) = (hmod(), build_quintuple(&spec).unwrap());
    let cfg = SearchConfig { max_nodes: 1, ..Default::default() };
    assert!(are_isomorphic(&a, &b, &cfg).is_inconclusive());
}

#[test]
fn u3_isoclinic_to_product_with_cyclic() {
    let g = u3();
    let h = build_direct_product_with_elem_abelian(&g, 3, 1).unwrap();
    let out = are_isoclinic(&g, &h, &SearchConfig::default()).unwrap();
    let w = out.witness().expect("isoclinic").clone();
    verify_isoclinism_witness(&g, &h, &w).unwrap();
    verify_isoclinism_witness(&h, &g, &w.inverse()).unwrap();
    let (same, a, b) = conjugate_type_consistency(&g, &h);
    assert!(same);
    assert_eq!((a, b), (vec![1, 3], vec![1, 3]));
}

#[test]
fn isoclinism_reflexive_with_identity_witness() {
    let g = hmod();
    let out = are_isoclinic(&g, &g, &SearchConfig::default()).unwrap();
    let w = out.witness().unwrap();
    assert!(w.phi.iter().enumerate().all(|(i, &v)| i == v));
    assert_eq!(w.theta_domain, w.theta_image);
}

#[test]
fn u3_and_hmod_refuted_immediately() {
    let out = are_isoclinic(&u3(), &hmod(), &SearchConfig::default()).unwrap();
    assert!(out.is_refuted());
    assert_eq!(out.nodes(), 0);
}

#[test]
fn hmod_and_its_product_are_isoclinic() {
    let g = hmod();
    let h = build_direct_product_with_elem_abelian(&g, 3, 1).unwrap();
    let out = are_isoclinic(&g, &h, &SearchConfig::default()).unwrap();
    let w = out.witness().expect("isoclinic");
    verify_isoclinism_witness(&g, &h, w).unwrap();
    assert!(conjugate_type_consistency(&g, &h).0);
}

#[test]
fn matrix_quotient_and_quintuple_are_isoclinic() {
    let spec = find_irreducible(3, 1).unwrap();
    let (g, h) = (hmod(), build_quintuple(&spec).unwrap());
    let out = are_isoclinic(&g, &h, &SearchConfig::default()).unwrap();
    verify_isoclinism_witness(&g, &h, out.witness().unwrap()).unwrap();
}

#[test]
fn size_limit_needs_override() {
    let spec = find_irreducible(5, 1).unwrap();
    let g = build_h_mod_center(&spec).unwrap();
    assert!(matches!(are_isoclinic(&g, &g, &SearchConfig { size_limit: Some(100), ..Default::default() }), Err(Error::CapExceeded { .. })));
}

#[test]
fn tampered_witness_rejected() {
    let g = u3();
    let h = build_direct_product_with_elem_abelian(&g, 3, 1).unwrap();
    let mut w = are_isoclinic(&g, &h, &SearchConfig::default()).unwrap().witness().unwrap().clone();
    w.theta_image.swap(1, 2);
    assert!(verify_isoclinism_witness(&g, &h, &w).is_err());
}
