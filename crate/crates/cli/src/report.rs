//! The JSON report and its `--pretty` rendering.

use std::collections::BTreeMap;

use pgf_core::structure::Check;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: u32 = 1;
pub const TOOLCHAIN: &str = concat!("pgf ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Value,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, verdict: Verdict, witness: Value) -> Self {
        CheckEntry { name: name.into(), verdict, witness }
    }

    pub fn from_check(prefix: &str, c: &Check) -> Self {
        let name = if prefix.is_empty() { c.name.clone() } else { format!("{prefix}.{}", c.name) };
        let verdict = if c.passed { Verdict::Pass } else { Verdict::Fail };
        CheckEntry { name, verdict, witness: Value::String(c.witness.clone()) }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Order-type invariants of one group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Invariants {
    pub order: usize,
    pub center_order: usize,
    pub derived_order: usize,
    pub gamma3_order: usize,
    /// `None` when the group is not nilpotent.
    pub class: Option<usize>,
    pub conjugate_type: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub spec: String,
    #[serde(flatten)]
    pub invariants: Option<Invariants>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_modulus: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<Vec<Vec<u32>>>>,
    /// Second group of a pairwise command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<Box<Report>>,
    pub checks: Vec<CheckEntry>,
    pub timings: BTreeMap<String, u64>,
    pub toolchain: String,
}

impl Report {
    pub fn new(command: &str, spec: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            spec: spec.into(),
            invariants: None,
            field_modulus: None,
            kappa: None,
            other: None,
            checks: Vec::new(),
            timings: BTreeMap::new(),
            toolchain: TOOLCHAIN.into(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckEntry::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Indented `key: value` lines rendered from the JSON form.
pub fn render_pretty(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            // checks read best as one line each
            if let (Some(Value::String(name)), Some(Value::String(verdict))) = (map.get("name"), map.get("verdict")) {
                let w = map.get("witness").and_then(scalar).unwrap_or_else(|| "(structured)".into());
                out.push_str(&format!("{pad}{verdict:<12} {name}  {w}\n"));
                return;
            }
            for (k, x) in map {
                match scalar(x) {
                    Some(s) if s.len() <= 120 => out.push_str(&format!("{pad}{k}: {s}\n")),
                    Some(_) => out.push_str(&format!("{pad}{k}: ({} chars)\n", x.to_string().len())),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{s}\n")),
                    None => render(x, depth, out),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
