//! One line per acceptance criterion.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use pgf_core::constructions::{
    build_h_mod_center, build_quintuple, build_u3, default_identification_mode, quintuple_law,
    verify_quintuple_identification, CheckMode, GroupSpec,
};
use pgf_core::field::{find_irreducible, FieldSpec};
use pgf_core::group::FiniteGroup;
use pgf_core::isoclinism::{are_isoclinic, are_isomorphic, verify_isoclinism_witness, verify_isomorphism, SearchConfig, SearchOutcome};
use pgf_core::structure::u3_recognizer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const PAIRS: [(u32, usize); 4] = [(3, 1), (5, 1), (7, 1), (3, 2)];
const ALT_MODULUS: [u32; 3] = [2, 1, 1];

type Verdict = Result<String, String>;

fn field(p: u32, m: usize, modulus: Option<&[u32]>) -> FieldSpec {
    match modulus {
        Some(c) => FieldSpec::new(p, m, c.to_vec()).unwrap(),
        None => find_irreducible(p, m).unwrap(),
    }
}

fn hmod_spec(p: u32, m: usize, modulus: Option<&[u32]>) -> String {
    match modulus {
        Some(c) => format!("hmod:p={p},m={m},modulus=[{}]", c.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
        None => format!("hmod:p={p},m={m}"),
    }
}

fn cli(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let dir_arg = dir.path().to_str().unwrap().to_string();
    let mut full = vec!["pgf", "--no-timings", "--params-dir", &dir_arg];
    full.extend_from_slice(args);
    let out = pgf::run(full);
    let json = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, json)
}

fn failed_checks(report: &Value) -> Vec<String> {
    report["checks"]
        .as_array()
        .map(|cs| cs.iter().filter(|c| c["verdict"] != "pass").map(|c| format!("{}: {}", c["name"], c["witness"])).collect())
        .unwrap_or_default()
}

fn conjugate_type_of(p: u32, m: usize, modulus: Option<&[u32]>) -> Result<(Vec<u64>, Duration), String> {
    let spec = hmod_spec(p, m, modulus);
    let start = Instant::now();
    let (code, j) = cli(&["invariants", &spec]);
    let took = start.elapsed();
    if code != 0 {
        return Err(format!("{spec}: exit {code}"));
    }
    if j["class"] != 3 {
        return Err(format!("{spec}: class {}", j["class"]));
    }
    Ok((serde_json::from_value(j["conjugate_type"].clone()).unwrap(), took))
}

fn criterion_1(p: u32, m: usize, modulus: Option<&[u32]>) -> Verdict {
    let (ty, took) = conjugate_type_of(p, m, modulus)?;
    let q2 = (p as u64).pow(2 * m as u32);
    if ty != vec![1, q2] {
        return Err(format!("({p},{m}) conjugate type {ty:?}"));
    }
    let budget = if (p as u64).pow(5 * m as u32) <= 16807 { Duration::from_secs(1) } else { Duration::from_secs(600) };
    if took > budget {
        return Err(format!("({p},{m}) took {took:?}, budget {budget:?}"));
    }
    Ok(format!("({p},{m}) type [1,{q2}] in {} ms", took.as_millis()))
}

fn criterion_2(p: u32, m: usize, modulus: Option<&[u32]>) -> Verdict {
    let (code, j) = cli(&["verify", &hmod_spec(p, m, modulus), "structural"]);
    let n = j["checks"].as_array().map_or(0, Vec::len);
    if code != 0 || n == 0 {
        return Err(format!("({p},{m}) exit {code}: {:?}", failed_checks(&j)));
    }
    Ok(format!("({p},{m}) {n} checks"))
}

fn criterion_3_identification(p: u32, m: usize, modulus: Option<&[u32]>) -> Verdict {
    let f = field(p, m, modulus);
    let mode = default_identification_mode(&f, 0);
    let r = verify_quintuple_identification(&f, mode).map_err(|e| e.to_string())?;
    let enough = match mode {
        CheckMode::Exhaustive => r.exhaustive,
        CheckMode::Sampled { .. } => r.pairs_checked >= 100_000,
    };
    if !r.holds || !enough {
        return Err(format!("({p},{m}) {r:?}"));
    }
    let how = if r.exhaustive { "exhaustive" } else { "sampled" };
    Ok(format!("({p},{m}) {how} {} pairs", r.pairs_checked))
}

fn criterion_3_witness() -> Verdict {
    let f = field(3, 1, None);
    let (a, b) = (build_h_mod_center(&f).unwrap(), build_quintuple(&f).unwrap());
    let start = Instant::now();
    let cfg = SearchConfig { time_limit: Some(Duration::from_secs(60)), ..SearchConfig::default() };
    match are_isomorphic(&a, &b, &cfg) {
        SearchOutcome::Found { witness, nodes } => {
            verify_isomorphism(&a, &b, &witness)?;
            let took = start.elapsed();
            if took > Duration::from_secs(60) {
                return Err(format!("isomorphism took {took:?}"));
            }
            Ok(format!("isomorphism witness at (3,1) after {nodes} nodes in {} ms", took.as_millis()))
        }
        other => Err(format!("isomorphism search: {other:?}")),
    }
}

fn criterion_4(p: u32, m: usize, modulus: Option<&[u32]>) -> Verdict {
    let g = build_h_mod_center(&field(p, m, modulus)).map_err(|e| e.to_string())?;
    let q = (p as u64).pow(m as u32);
    let cq = g.central_quotient().map_err(|e| e.to_string())?;
    let yes = u3_recognizer(&cq.group);
    if !yes.recognized || yes.q != Some(q) {
        return Err(format!("({p},{m}) central quotient not recognized: {yes:?}"));
    }
    let no = u3_recognizer(&g);
    if no.recognized {
        return Err(format!("({p},{m}) group itself recognized"));
    }
    Ok(format!("({p},{m}) q={q}, group rejected by {}", no.rejected_by.unwrap_or_default()))
}

fn criterion_5(p: u32, m: usize, modulus: Option<&[u32]>) -> Verdict {
    let (code, j) = cli(&["verify", &hmod_spec(p, m, modulus), "presentation"]);
    let checks = j["checks"].as_array().cloned().unwrap_or_default();
    let frames = checks.iter().filter(|c| c["name"].as_str().is_some_and(|n| n.ends_with(".params_extracted"))).count();
    let kappa = checks.iter().filter(|c| c["name"].as_str().is_some_and(|n| n.ends_with(".kappa_words"))).count();
    if code != 0 || frames < 2 || kappa < frames {
        return Err(format!("({p},{m}) exit {code}, {frames} frames: {:?}", failed_checks(&j)));
    }
    Ok(format!("({p},{m}) {frames} frames, {} checks", checks.len()))
}

fn criterion_6() -> Verdict {
    let f = field(3, 1, None);
    let u3 = build_u3(&f).unwrap();
    let prod: GroupSpec = "xab:u3:p=3,m=1,k=1".parse().unwrap();
    let prod = prod.build().unwrap();
    let start = Instant::now();
    let found = are_isoclinic(&u3, &prod, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let SearchOutcome::Found { witness, .. } = found else {
        return Err(format!("U3(3) vs U3(3)xC3: {found:?}"));
    };
    if took > Duration::from_secs(120) {
        return Err(format!("search took {took:?}"));
    }
    verify_isoclinism_witness(&u3, &prod, &witness)?;
    let (ta, tb) = (u3.conjugacy_classes().conjugate_type, prod.conjugacy_classes().conjugate_type);
    if ta != tb {
        return Err(format!("conjugate types {ta:?} vs {tb:?}"));
    }
    let hmod = build_h_mod_center(&f).unwrap();
    let start = Instant::now();
    let refuted = are_isoclinic(&u3, &hmod, &SearchConfig::default()).map_err(|e| e.to_string())?;
    let refute_time = start.elapsed();
    if !refuted.is_refuted() || refuted.nodes() != 0 {
        return Err(format!("U3(3) vs hmod(3,1): {refuted:?}"));
    }
    Ok(format!("witness in {} ms, refutation in {} ms", took.as_millis(), refute_time.as_millis()))
}

fn identity_matrix() -> Vec<(String, FiniteGroup)> {
    let specs = [
        "u3:p=3,m=1",
        "u3:p=5,m=1",
        "u3:p=3,m=2",
        "hmod:p=3,m=1",
        "hmod:p=5,m=1",
        "hmod:p=7,m=1",
        "hmod:p=3,m=2",
        "quint:p=3,m=1",
        "quint:p=5,m=1",
        "xab:u3:p=3,m=1,k=1",
        "xab:hmod:p=3,m=1,k=1",
        "cyc:n=9",
        "elab:p=3,k=3",
    ];
    specs.iter().map(|s| (s.to_string(), s.parse::<GroupSpec>().unwrap().build().unwrap())).collect()
}

fn criterion_7() -> Verdict {
    let mut lines = Vec::new();
    for (name, g) in identity_matrix() {
        let r = g.check_class3_identities(10_000, 0).map_err(|e| format!("{name}: {e}"))?;
        let small = g.order() <= 300;
        if !r.passed() || r.exhaustive != small || (!small && r.tuples_checked < 10_000) {
            return Err(format!("{name}: {r:?}"));
        }
        lines.push(format!("{name}:{}", if r.exhaustive { "exh" } else { "smp" }));
    }
    Ok(lines.join(" "))
}

fn criterion_8() -> Verdict {
    let f = field(3, 1, None);
    let (g, law) = (build_quintuple(&f).unwrap(), quintuple_law(&f).unwrap());
    for a in 0..g.order() {
        for b in 0..g.order() {
            let formula = law.encode(law.commutator_formula(law.decode(a), law.decode(b)));
            if g.commutator(a, b) != formula {
                return Err(format!("(3,1) mismatch at {:?}, {:?}", law.decode(a), law.decode(b)));
            }
        }
    }
    let f = field(3, 2, None);
    let (g, law) = (build_quintuple(&f).unwrap(), quintuple_law(&f).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples = 100_000;
    for _ in 0..samples {
        let (a, b) = (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()));
        let formula = law.encode(law.commutator_formula(law.decode(a), law.decode(b)));
        if g.commutator(a, b) != formula {
            return Err(format!("(3,2) mismatch at {:?}, {:?}", law.decode(a), law.decode(b)));
        }
    }
    Ok(format!("(3,1) all {} pairs, (3,2) {samples} sampled pairs", 243 * 243))
}

fn criterion_9() -> Verdict {
    let alt = Some(&ALT_MODULUS[..]);
    let steps: [(&str, fn(u32, usize, Option<&[u32]>) -> Verdict); 5] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3_identification),
        ("4", criterion_4),
        ("5", criterion_5),
    ];
    let mut verdicts = Vec::new();
    for (name, step) in steps {
        let default = step(3, 2, None).is_ok();
        let other = step(3, 2, alt);
        if default != other.is_ok() {
            return Err(format!("criterion {name} differs: default {default}, alternate {other:?}"));
        }
        verdicts.push(format!("{name}:{}", if default { "pass" } else { "fail" }));
    }
    let (a, _) = conjugate_type_of(3, 2, None)?;
    let (b, _) = conjugate_type_of(3, 2, alt)?;
    if a != b {
        return Err(format!("conjugate types {a:?} vs {b:?}"));
    }
    if verdicts.iter().any(|v| v.ends_with("fail")) {
        return Err(format!("verdicts agree but not all pass: {}", verdicts.join(" ")));
    }
    Ok(format!("modulus x^2+x+2 agrees: {} type {a:?}", verdicts.join(" ")))
}

fn over_pairs(pairs: &[(u32, usize)], f: fn(u32, usize, Option<&[u32]>) -> Verdict) -> Verdict {
    let mut out = Vec::new();
    for &(p, m) in pairs {
        out.push(f(p, m, None)?);
    }
    Ok(out.join("; "))
}

fn run_one(n: usize, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    let line = match &verdict {
        Ok(detail) => format!("criterion {n}: PASS ({secs:.1}s) {detail}\n"),
        Err(detail) => format!("criterion {n}: FAIL ({secs:.1}s) {detail}\n"),
    };
    // bypass libtest capture so the lines show up in plain `cargo test`
    let _ = std::io::stdout().write_all(line.as_bytes());
    verdict.is_ok()
}

#[test]
fn acceptance() {
    let results = [
        run_one(1, || over_pairs(&PAIRS, criterion_1)),
        run_one(2, || over_pairs(&PAIRS, criterion_2)),
        run_one(3, || {
            let ident = over_pairs(&[(3, 1), (5, 1), (3, 2)], criterion_3_identification)?;
            Ok(format!("{ident}; {}", criterion_3_witness()?))
        }),
        run_one(4, || over_pairs(&PAIRS, criterion_4)),
        run_one(5, || over_pairs(&[(3, 1), (5, 1), (3, 2)], criterion_5)),
        run_one(6, criterion_6),
        run_one(7, criterion_7),
        run_one(8, criterion_8),
        run_one(9, criterion_9),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
