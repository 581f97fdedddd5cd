use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", self.stdout))
    }
}

fn pgf_in(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pgf"))
        .args(args)
        .arg("--no-timings")
        .env_remove("PGF_CACHE_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn pgf(args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    pgf_in(dir.path(), args)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn invariants_of_hmod_3_1() {
    let r = pgf(&["invariants", "hmod:p=3,m=1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["schema"], 1);
    assert_eq!(j["order"], 243);
    assert_eq!(j["class"], 3);
    assert_eq!(j["conjugate_type"], serde_json::json!([1, 9]));
    assert_eq!(j["center_order"], 9);
    assert_eq!(j["derived_order"], 27);
    assert_eq!(j["field_modulus"], serde_json::json!([0, 1]));
}

#[test]
fn invariants_of_u3_3_1() {
    let j = pgf(&["invariants", "u3:p=3,m=1"]).json();
    assert_eq!(j["order"], 27);
    assert_eq!(j["class"], 2);
    assert_eq!(j["conjugate_type"], serde_json::json!([1, 3]));
}

#[test]
fn even_characteristic_is_a_usage_error() {
    let r = pgf(&["invariants", "hmod:p=2,m=1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("p must be odd"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn malformed_specs_exit_2() {
    for spec in ["hmod:p=9,m=1", "hmod:p=3", "nope:p=3,m=1", "u3:p=3,m=0"] {
        assert_eq!(pgf(&["invariants", spec]).code, 2, "{spec}");
    }
    assert_eq!(pgf(&["frobnicate"]).code, 2);
}

#[test]
fn oversized_spec_exits_3() {
    let r = pgf(&["invariants", "hmod:p=3,m=4"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn verify_all_on_hmod_passes() {
    let dir = tempfile::tempdir().unwrap();
    let r = pgf_in(dir.path(), &["verify", "hmod:p=3,m=1", "all"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    for c in j["checks"].as_array().unwrap() {
        assert_eq!(c["verdict"], "pass", "{c}");
    }
    check(&j, "identification");
    check(&j, "identities.class3");
    check(&j, "structural.central_quotient_is_u3");
    assert!(dir.path().join("params-hmod_p=3,m=1.json").exists());
}

#[test]
fn verify_a2_on_u3_fails_with_witness() {
    let r = pgf(&["verify", "u3:p=3,m=1", "a2"]);
    assert_eq!(r.code, 1);
    let j = r.json();
    let c = check(&j, "a2.class_3");
    assert_eq!(c["verdict"], "fail");
    assert!(!c["witness"].as_str().unwrap().is_empty());
}

#[test]
fn verify_structural_fails_on_product_with_cyclic() {
    let r = pgf(&["verify", "xab:hmod:p=3,m=1,k=1", "structural"]);
    assert_eq!(r.code, 1);
    assert_eq!(check(&r.json(), "a2.center_in_derived")["verdict"], "fail");
}

#[test]
fn presentation_emits_params_file() {
    let dir = tempfile::tempdir().unwrap();
    let r = pgf_in(dir.path(), &["verify", "hmod:p=3,m=2", "presentation"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let body = std::fs::read_to_string(dir.path().join("params-hmod_p=3,m=2.json")).unwrap();
    let params: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(params["params"]["m"], 2);
    assert_eq!(params["params"]["kappa"][1][1], serde_json::json!([2, 0]));
}

#[test]
fn isoclinic_exit_codes() {
    let r = pgf(&["isoclinic", "u3:p=3,m=1", "xab:u3:p=3,m=1,k=1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let j = r.json();
    assert_eq!(check(&j, "witness_reverification")["verdict"], "pass");
    assert_eq!(j["other"]["spec"], "xab:u3:p=3,m=1,k=1");

    let r = pgf(&["isoclinic", "u3:p=3,m=1", "hmod:p=3,m=1"]);
    assert_eq!(r.code, 1);
    assert_eq!(check(&r.json(), "isoclinic")["verdict"], "fail");
}

#[test]
fn isoclinic_self_uses_identity_witness() {
    let r = pgf(&["isoclinic", "hmod:p=3,m=1", "hmod:p=3,m=1"]);
    assert_eq!(r.code, 0);
    let j = r.json();
    let phi: Vec<u64> = serde_json::from_value(check(&j, "isoclinic")["witness"]["witness"]["phi"].clone()).unwrap();
    assert!(phi.iter().enumerate().all(|(i, &v)| i as u64 == v));
}

#[test]
fn isoclinic_over_size_limit_needs_force() {
    let r = pgf(&["isoclinic", "u3:p=3,m=4", "u3:p=3,m=4"]);
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert_eq!(pgf(&["isoclinic", "hmod:p=5,m=1", "quint:p=5,m=1"]).code, 0);
}

#[test]
fn kappa_examples() {
    let j = pgf(&["kappa", "3", "1"]).json();
    assert_eq!(j["kappa"], serde_json::json!([[[1]]]));
    let j = pgf(&["kappa", "3", "2"]).json();
    assert_eq!(j["kappa"][1][1], serde_json::json!([2, 0]));
    let j = pgf(&["kappa", "3", "2", "--modulus", "2,1,1"]).json();
    assert_eq!(j["field_modulus"], serde_json::json!([2, 1, 1]));
    assert_eq!(pgf(&["kappa", "4", "1"]).code, 2);
    assert_eq!(pgf(&["kappa", "3", "2", "--modulus", "1,1,1"]).code, 2);
}

#[test]
fn reports_are_deterministic() {
    for args in [&["verify", "hmod:p=3,m=1", "all"][..], &["isoclinic", "u3:p=3,m=1", "xab:u3:p=3,m=1,k=1"]] {
        let a = pgf(args);
        let b = pgf(args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.code, b.code);
    }
}

#[test]
fn seed_changes_only_sampled_checks() {
    let a = pgf(&["verify", "hmod:p=3,m=1", "identities", "--seed", "7"]);
    let b = pgf(&["verify", "hmod:p=3,m=1", "identities"]);
    assert_eq!(a.stdout, b.stdout, "exhaustive checks ignore the seed");
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn cache_hit_matches_cold_run() {
    let cache = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_pgf"))
            .args(args)
            .env("PGF_CACHE_DIR", cache.path())
            .current_dir(work.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    for args in [&["invariants", "hmod:p=3,m=1"][..], &["verify", "quint:p=3,m=1", "all"]] {
        let cold = run(args);
        assert!(std::fs::read_dir(cache.path()).unwrap().count() > 0);
        let warm = run(args);
        assert_eq!(strip_timings(cold.clone()), strip_timings(warm.clone()));
        assert!(warm["timings"].as_object().unwrap().is_empty(), "warm run should not recompute");
    }
}

#[test]
fn pretty_is_rendered_from_json() {
    let r = pgf(&["invariants", "u3:p=3,m=1", "--pretty"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("conjugate_type"));
    assert!(serde_json::from_str::<Value>(&r.stdout).is_err());
}
