//! The four commands. Each returns a report and an exit code.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use pgf_core::constructions::{default_identification_mode, verify_quintuple_identification, GroupKind, GroupSpec};
use pgf_core::field::{find_irreducible, is_prime, structure_constants, FieldSpec};
use pgf_core::group::FiniteGroup;
use pgf_core::isoclinism::{are_isoclinic, conjugate_type_consistency, verify_isoclinism_witness, SearchConfig, SearchOutcome};
use pgf_core::structure::{
    extract_presentation_params, lift_generator_frame, shifted_frame, u3_recognizer, verify_frame,
    verify_frame_independence, verify_hypothesis_a2_with, verify_kappa_words, verify_structural_suite_with,
    verify_z_containments, FrameContext, GeneratorFrame, GroupSummary, LiftStrategy, PresentationParams,
};
use pgf_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::report::{CheckEntry, Invariants, Report, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Clone, Debug)]
pub struct Context {
    pub cache: Cache,
    pub seed: u64,
    pub force: bool,
    pub timings: bool,
    pub params_dir: PathBuf,
}

/// An error that ends the command before a report exists.
#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::InvalidField(_) => EXIT_USAGE,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_FAILED,
        };
        CmdError { code, message: e.to_string() }
    }
}

type CmdResult = Result<(Report, i32), CmdError>;

fn timed<T>(ctx: &Context, report: &mut Report, name: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    if ctx.timings {
        *report.timings.entry(name.to_string()).or_insert(0) += start.elapsed().as_millis() as u64;
    }
    out
}

fn modulus_of(spec: &GroupSpec) -> Vec<u32> {
    spec.field().map(|f| f.modulus().to_vec()).unwrap_or_default()
}

pub fn compute_invariants(g: &FiniteGroup) -> Invariants {
    let s = GroupSummary::compute(g);
    invariants_from(g, &s)
}

fn invariants_from(g: &FiniteGroup, s: &GroupSummary) -> Invariants {
    Invariants {
        order: g.order(),
        center_order: s.center.order(),
        derived_order: s.derived.order(),
        gamma3_order: s.gamma3().map_or(1, |x| x.order()),
        class: s.class(),
        conjugate_type: s.classes.conjugate_type.clone(),
    }
}

fn parse_spec(s: &str) -> Result<GroupSpec, CmdError> {
    Ok(s.parse::<GroupSpec>()?)
}

fn cached_invariants(ctx: &Context, report: &mut Report, spec: &GroupSpec) -> Result<Invariants, CmdError> {
    let key = spec.to_string();
    let modulus = modulus_of(spec);
    if let Some(inv) = ctx.cache.get::<Invariants>(&key, &modulus, "invariants") {
        return Ok(inv);
    }
    let g = timed(ctx, report, "build", || spec.build())?;
    let inv = timed(ctx, report, "invariants", || compute_invariants(&g));
    ctx.cache.put(&key, &modulus, "invariants", &inv);
    Ok(inv)
}

fn base_report(command: &str, spec: &GroupSpec) -> Report {
    let mut r = Report::new(command, spec.to_string());
    r.field_modulus = spec.field().map(|f| f.modulus().to_vec());
    r
}

pub fn cmd_invariants(ctx: &Context, spec: &str) -> CmdResult {
    let spec = parse_spec(spec)?;
    let mut report = base_report("invariants", &spec);
    report.invariants = Some(cached_invariants(ctx, &mut report, &spec)?);
    Ok((report, EXIT_OK))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    A2,
    Structural,
    Presentation,
    Identities,
    Identification,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::A2 => "a2",
            Suite::Structural => "structural",
            Suite::Presentation => "presentation",
            Suite::Identities => "identities",
            Suite::Identification => "identification",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SuiteResult {
    checks: Vec<CheckEntry>,
    params: Option<PresentationParams>,
    invariants: Option<Invariants>,
}

fn fail(name: &str, witness: impl Into<String>) -> CheckEntry {
    CheckEntry::new(name, Verdict::Fail, Value::String(witness.into()))
}

fn pass(name: &str, witness: Value) -> CheckEntry {
    CheckEntry::new(name, Verdict::Pass, witness)
}

fn entries(prefix: &str, checks: &[pgf_core::structure::Check]) -> Vec<CheckEntry> {
    checks.iter().map(|c| CheckEntry::from_check(prefix, c)).collect()
}

fn suite_a2(g: &FiniteGroup, s: &GroupSummary) -> Vec<CheckEntry> {
    entries("a2", &verify_hypothesis_a2_with(g, s).checks)
}

fn suite_structural(g: &FiniteGroup, s: &GroupSummary) -> Vec<CheckEntry> {
    let hyp = verify_hypothesis_a2_with(g, s);
    if !hyp.passed() {
        return entries("a2", &hyp.checks);
    }
    let mut out = match verify_structural_suite_with(g, s) {
        Ok(r) => entries("structural", &r.checks),
        Err(e) => return vec![fail("structural", e.to_string())],
    };
    let q = hyp.p.unwrap().pow(hyp.m.unwrap());
    match g.central_quotient() {
        Ok(cq) => {
            let r = u3_recognizer(&cq.group);
            let ok = r.recognized && r.q == Some(q);
            out.push(CheckEntry::new(
                "structural.central_quotient_is_u3",
                if ok { Verdict::Pass } else { Verdict::Fail },
                json!({ "expected_q": q, "recognition": r }),
            ));
        }
        Err(e) => out.push(fail("structural.central_quotient_is_u3", e.to_string())),
    }
    let r = u3_recognizer(g);
    out.push(CheckEntry::new(
        "structural.group_is_not_u3",
        if r.recognized { Verdict::Fail } else { Verdict::Pass },
        json!(r),
    ));
    out
}

fn frame_entries(tag: &str, fctx: &FrameContext, f: &GeneratorFrame, out: &mut Vec<CheckEntry>) -> Option<PresentationParams> {
    out.extend(entries(&format!("frame.{tag}"), &verify_frame(fctx, f)));
    out.push(CheckEntry::from_check(&format!("frame.{tag}"), &verify_kappa_words(fctx, f)));
    match extract_presentation_params(fctx, f) {
        Ok(params) => {
            out.push(pass(&format!("frame.{tag}.params_extracted"), json!({ "x": f.x, "y": f.y, "h": f.h, "z": f.z })));
            out.push(CheckEntry::from_check(&format!("frame.{tag}"), &verify_z_containments(&params)));
            Some(params)
        }
        Err(e) => {
            out.push(fail(&format!("frame.{tag}.params_extracted"), e.to_string()));
            None
        }
    }
}

fn suite_presentation(g: &FiniteGroup, spec: &GroupSpec) -> SuiteResult {
    let mut checks = Vec::new();
    let Some(field) = spec.field() else {
        checks.push(fail("presentation.field", "spec has no underlying field"));
        return SuiteResult { checks, params: None, invariants: None };
    };
    let fctx = match FrameContext::new(g, field) {
        Ok(c) => c,
        Err(e) => {
            checks.push(fail("presentation.frame_context", e.to_string()));
            return SuiteResult { checks, params: None, invariants: None };
        }
    };
    let mut frames: Vec<(String, GeneratorFrame)> = Vec::new();
    for strategy in [LiftStrategy::Coordinate, LiftStrategy::Generic] {
        let tag = match strategy {
            LiftStrategy::Coordinate => "coordinate",
            LiftStrategy::Generic => "generic",
        };
        match lift_generator_frame(&fctx, strategy) {
            Ok(f) => frames.push((tag.into(), f)),
            Err(Error::Precondition(msg)) if strategy == LiftStrategy::Coordinate => {
                checks.push(CheckEntry::new("frame.coordinate.skipped", Verdict::Pass, Value::String(msg)));
            }
            Err(e) => checks.push(fail(&format!("frame.{tag}.lift"), e.to_string())),
        }
    }
    if let Some((tag, f)) = frames.first().cloned() {
        match shifted_frame(&fctx, &f) {
            Ok(s) => frames.push((format!("{tag}_shifted"), s)),
            Err(e) => checks.push(fail("frame.shifted.lift", e.to_string())),
        }
    }
    let mut params: Vec<(String, PresentationParams)> = Vec::new();
    for (tag, f) in &frames {
        if let Some(p) = frame_entries(tag, &fctx, f, &mut checks) {
            params.push((tag.clone(), p));
        }
    }
    if params.len() < 2 {
        checks.push(fail("presentation.frame_count", format!("{} frames with parameters, need 2", params.len())));
    }
    if let Some((first_tag, first)) = params.first() {
        for (tag, p) in &params[1..] {
            let c = verify_frame_independence(first, p);
            checks.push(CheckEntry::from_check(&format!("presentation.{tag}_vs_{first_tag}"), &c));
        }
    }
    SuiteResult { checks, params: params.into_iter().next().map(|(_, p)| p), invariants: None }
}

fn suite_identities(g: &FiniteGroup, seed: u64) -> Vec<CheckEntry> {
    match g.check_class3_identities(10_000, seed) {
        Ok(r) => {
            let witness = json!({
                "exhaustive": r.exhaustive,
                "tuples_checked": r.tuples_checked,
                "failure_count": r.failure_count,
                "failures": r.failures.iter().take(5).map(|f| json!({
                    "identity": f.identity, "elements": f.elements, "exponents": f.exponents
                })).collect::<Vec<_>>(),
            });
            vec![CheckEntry::new("identities.class3", if r.passed() { Verdict::Pass } else { Verdict::Fail }, witness)]
        }
        Err(e) => vec![fail("identities.class3", e.to_string())],
    }
}

fn suite_identification(spec: &GroupSpec, seed: u64) -> Vec<CheckEntry> {
    let field = match (spec.kind(), spec.field()) {
        (GroupKind::HModCenter | GroupKind::Quintuple, Some(f)) => f,
        _ => return vec![fail("identification", "only defined for hmod and quint specs")],
    };
    match verify_quintuple_identification(field, default_identification_mode(field, seed)) {
        Ok(r) => vec![CheckEntry::new("identification", if r.holds { Verdict::Pass } else { Verdict::Fail }, json!(r))],
        Err(e) => vec![fail("identification", e.to_string())],
    }
}

fn params_file_name(spec: &GroupSpec) -> String {
    let safe: String =
        spec.to_string().chars().map(|c| if c.is_ascii_alphanumeric() || "=,.-".contains(c) { c } else { '_' }).collect();
    format!("params-{safe}.json")
}

pub fn cmd_verify(ctx: &Context, spec: &str, suite: Suite) -> CmdResult {
    let spec = parse_spec(spec)?;
    let mut report = base_report(&format!("verify {}", suite.name()), &spec);
    let key = spec.to_string();
    let modulus = modulus_of(&spec);
    let check_key = format!("verify:{}:seed={}", suite.name(), ctx.seed);
    let result = match ctx.cache.get::<SuiteResult>(&key, &modulus, &check_key) {
        Some(r) => r,
        None => {
            let g = timed(ctx, &mut report, "build", || spec.build())?;
            let needs_summary = matches!(suite, Suite::A2 | Suite::Structural | Suite::All);
            let summary = needs_summary.then(|| timed(ctx, &mut report, "summary", || GroupSummary::compute(&g)));
            let mut r = SuiteResult { checks: Vec::new(), params: None, invariants: None };
            let s = summary.as_ref();
            if matches!(suite, Suite::A2) {
                r.checks.extend(timed(ctx, &mut report, "a2", || suite_a2(&g, s.unwrap())));
            }
            if matches!(suite, Suite::Structural | Suite::All) {
                r.checks.extend(timed(ctx, &mut report, "structural", || suite_structural(&g, s.unwrap())));
            }
            if matches!(suite, Suite::Presentation | Suite::All) {
                let p = timed(ctx, &mut report, "presentation", || suite_presentation(&g, &spec));
                r.checks.extend(p.checks);
                r.params = p.params;
            }
            if matches!(suite, Suite::Identities | Suite::All) {
                r.checks.extend(timed(ctx, &mut report, "identities", || suite_identities(&g, ctx.seed)));
            }
            let applicable = matches!(spec.kind(), GroupKind::HModCenter | GroupKind::Quintuple);
            if suite == Suite::Identification || (suite == Suite::All && applicable) {
                r.checks.extend(timed(ctx, &mut report, "identification", || suite_identification(&spec, ctx.seed)));
            }
            r.invariants = Some(match s {
                Some(s) => invariants_from(&g, s),
                None => timed(ctx, &mut report, "invariants", || compute_invariants(&g)),
            });
            ctx.cache.put(&key, &modulus, &check_key, &r);
            r
        }
    };
    report.invariants = result.invariants.clone();
    if let Some(params) = &result.params {
        let name = params_file_name(&spec);
        let body = serde_json::to_string_pretty(&json!({ "schema": 1, "spec": spec.to_string(), "params": params }))
            .expect("params serialize");
        let written = fs::create_dir_all(&ctx.params_dir).and_then(|_| fs::write(ctx.params_dir.join(&name), body));
        report.checks.push(match written {
            Ok(()) => pass("presentation.params_file", Value::String(name)),
            Err(e) => fail("presentation.params_file", format!("{name}: {e}")),
        });
    }
    report.checks.splice(0..0, result.checks.iter().cloned());
    let code = if report.all_passed() { EXIT_OK } else { EXIT_FAILED };
    Ok((report, code))
}

pub fn cmd_isoclinic(ctx: &Context, a: &str, b: &str) -> CmdResult {
    let (sa, sb) = (parse_spec(a)?, parse_spec(b)?);
    let mut report = base_report("isoclinic", &sa);
    let mut other = base_report("isoclinic", &sb);
    let ga = timed(ctx, &mut report, "build", || sa.build())?;
    let gb = timed(ctx, &mut report, "build", || sb.build())?;
    report.invariants = Some(cached_invariants(ctx, &mut report, &sa)?);
    other.invariants = Some(cached_invariants(ctx, &mut other, &sb)?);
    other.timings.clear();
    let cfg = SearchConfig {
        size_limit: if ctx.force { None } else { SearchConfig::default().size_limit },
        ..SearchConfig::default()
    };
    let outcome = timed(ctx, &mut report, "search", || are_isoclinic(&ga, &gb, &cfg))?;
    let code = match &outcome {
        SearchOutcome::Found { witness, nodes } => {
            report.checks.push(pass("isoclinic", json!({ "nodes": nodes, "witness": witness })));
            let rev = timed(ctx, &mut report, "reverify", || verify_isoclinism_witness(&ga, &gb, witness));
            report.checks.push(match rev {
                Ok(()) => pass("witness_reverification", Value::String("phi, theta and the commutation square check out".into())),
                Err(e) => fail("witness_reverification", e),
            });
            let inv = verify_isoclinism_witness(&gb, &ga, &witness.inverse());
            report.checks.push(match inv {
                Ok(()) => pass("witness_inverse", Value::String("inverted witness verifies in the reverse direction".into())),
                Err(e) => fail("witness_inverse", e),
            });
            let (same, ta, tb) = conjugate_type_consistency(&ga, &gb);
            report.checks.push(CheckEntry::new(
                "conjugate_type_consistency",
                if same { Verdict::Pass } else { Verdict::Fail },
                json!([ta, tb]),
            ));
            if report.all_passed() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        SearchOutcome::Refuted { reason, nodes } => {
            report.checks.push(CheckEntry::new("isoclinic", Verdict::Fail, json!({ "nodes": nodes, "refutation": reason })));
            EXIT_FAILED
        }
        SearchOutcome::Inconclusive { reason, nodes } => {
            report.checks.push(CheckEntry::new("isoclinic", Verdict::Inconclusive, json!({ "nodes": nodes, "reason": reason })));
            EXIT_INCONCLUSIVE
        }
    };
    report.other = Some(Box::new(other));
    Ok((report, code))
}

pub fn cmd_kappa(p: u64, m: usize, modulus: Option<&str>) -> CmdResult {
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::InvalidField(format!("{p} is not prime")).into());
    }
    if m == 0 {
        return Err(Error::InvalidField("extension degree must be positive".into()).into());
    }
    let field: FieldSpec = match modulus {
        None => find_irreducible(p as u32, m)?,
        Some(list) => {
            let coeffs = list
                .trim_matches(|c| c == '[' || c == ']')
                .split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| Error::InvalidField(format!("bad coefficient '{c}'"))))
                .collect::<Result<Vec<_>, _>>()?;
            FieldSpec::new(p as u32, m, coeffs)?
        }
    };
    let kappa = structure_constants(&field);
    let mut report = Report::new("kappa", format!("kappa:{field}"));
    report.field_modulus = Some(field.modulus().to_vec());
    report.kappa = Some(kappa.to_nested());
    let sym = kappa.is_symmetric();
    report.checks.push(CheckEntry::new(
        "kappa_symmetric",
        if sym { Verdict::Pass } else { Verdict::Fail },
        Value::String(format!("kappa[i][j] = kappa[j][i]: {sym}")),
    ));
    let code = if report.all_passed() { EXIT_OK } else { EXIT_FAILED };
    Ok((report, code))
}
