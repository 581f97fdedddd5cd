//! Structural checks for class-3 groups of conjugate type `(1, p^{2m})`:
//! the standing hypothesis, the derived-subgroup/center suite, recognition of
//! U3(q), and generator frames with their presentation parameters.

mod frame;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ConjugacyReport, FiniteGroup, Subgroup};

pub use frame::{
    extract_presentation_params, find_central_correction, FrameContext, lift_generator_frame, shifted_frame, verify_frame,
    verify_frame_independence, verify_kappa_words, verify_z_containments, GeneratorFrame, LiftStrategy,
    PresentationParams, ZBasis,
};

/// A named verdict with the data that justifies it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, witness: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, witness: witness.into() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct HypothesisReport {
    pub p: Option<u64>,
    pub m: Option<u32>,
    pub checks: Vec<Check>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, witness: impl Into<String>) {
        self.checks.push(Check::new(name, passed, witness));
    }
}

/// Invariants shared by most checks, computed once.
#[derive(Clone, Debug)]
pub struct GroupSummary {
    pub p: Option<u64>,
    pub center: Subgroup,
    pub derived: Subgroup,
    /// `None` when the group is not nilpotent.
    pub series: Option<Vec<Subgroup>>,
    pub classes: ConjugacyReport,
}

impl GroupSummary {
    pub fn compute(g: &FiniteGroup) -> Self {
        GroupSummary {
            p: g.p_group_prime(),
            center: g.center(),
            derived: g.derived_subgroup(),
            series: g.lower_central_series().ok(),
            classes: g.conjugacy_classes(),
        }
    }

    pub fn class(&self) -> Option<usize> {
        self.series.as_ref().map(|s| s.len() - 1)
    }

    pub fn gamma3(&self) -> Option<&Subgroup> {
        self.series.as_ref().and_then(|s| s.get(2))
    }
}

fn log_base(p: u64, n: u64) -> Option<u32> {
    if p < 2 || n == 0 {
        return None;
    }
    let mut e = 0;
    let mut r = n;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some(e)
}

/// Class 3, conjugate type `(1, p^{2m})`, and `Z(G) <= G'`.
pub fn verify_hypothesis_a2(g: &FiniteGroup) -> HypothesisReport {
    verify_hypothesis_a2_with(g, &GroupSummary::compute(g))
}

pub fn verify_hypothesis_a2_with(g: &FiniteGroup, s: &GroupSummary) -> HypothesisReport {
    let mut r = HypothesisReport { p: s.p, ..Default::default() };
    let n = g.order() as u64;
    match s.p {
        Some(p) => r.push("p_group", true, format!("order {n} = {p}^{}", log_base(p, n).unwrap())),
        None => r.push("p_group", false, format!("order {n} is not a prime power")),
    }
    match s.class() {
        Some(c) => r.push("class_3", c == 3, format!("nilpotency class {c}")),
        None => r.push("class_3", false, "not nilpotent"),
    }
    let ct = &s.classes.conjugate_type;
    let m = match (s.p, ct.as_slice()) {
        (Some(p), [1, big]) => log_base(p, *big as u64).filter(|e| e % 2 == 0).map(|e| e / 2),
        _ => None,
    };
    r.m = m;
    r.push(
        "conjugate_type",
        m.is_some(),
        match m {
            Some(m) => format!("conjugate type {ct:?} = (1, p^{}), m = {m}", 2 * m),
            None => format!("conjugate type {ct:?} is not (1, p^(2m))"),
        },
    );
    let inside = s.center.is_subset_of(&s.derived);
    r.push("center_in_derived", inside, format!("|Z| = {}, |G'| = {}, Z <= G': {inside}", s.center.order(), s.derived.order()));
    r
}

/// Orders of `C_{G'}(x)` for every `x`, computed once per coset of `G'`
/// (the value is constant on cosets when `G'` is abelian).
fn derived_centralizer_orders(g: &FiniteGroup, derived: &Subgroup) -> Result<Vec<usize>> {
    if !g.is_abelian_subgroup(derived) {
        return Err(Error::Precondition("G' is not abelian".into()));
    }
    let cosets = g.quotient(derived)?;
    let d: Vec<usize> = derived.members().collect();
    let per_coset: Vec<usize> = (0..cosets.group.order())
        .map(|c| {
            let x = cosets.rep(c);
            d.iter().filter(|&&a| g.commute(x, a)).count()
        })
        .collect();
    Ok((0..g.order()).map(|x| per_coset[cosets.project(x)]).collect())
}

/// The derived-subgroup, center and central-quotient suite for a group
/// already satisfying [`verify_hypothesis_a2`].
pub fn verify_structural_suite(g: &FiniteGroup) -> Result<HypothesisReport> {
    let s = GroupSummary::compute(g);
    verify_structural_suite_with(g, &s)
}

pub fn verify_structural_suite_with(g: &FiniteGroup, s: &GroupSummary) -> Result<HypothesisReport> {
    let hyp = verify_hypothesis_a2_with(g, s);
    if !hyp.passed() {
        let failed: Vec<&str> = hyp.failures().map(|c| c.name.as_str()).collect();
        return Err(Error::Precondition(format!("hypothesis fails: {}", failed.join(", "))));
    }
    let (p, m) = (hyp.p.unwrap(), hyp.m.unwrap());
    let pm = |k: u32| (p as usize).pow(k);
    let mut r = HypothesisReport { p: Some(p), m: Some(m), checks: Vec::new() };
    let (z, d) = (&s.center, &s.derived);

    r.push("order", g.order() == pm(5 * m), format!("|G| = {}, p^(5m) = {}", g.order(), pm(5 * m)));
    r.push("derived_index", d.index() == pm(2 * m), format!("[G:G'] = {}, expected {}", d.index(), pm(2 * m)));
    let dz = d.order() / z.order();
    r.push("derived_over_center", dz == pm(m), format!("[G':Z] = {dz}, expected {}", pm(m)));
    r.push("center_order", z.order() == pm(2 * m), format!("|Z| = {}, expected {}", z.order(), pm(2 * m)));
    let breadth_exp = 2 * m;
    r.push(
        "breadth_is_twice_m",
        dz < pm(breadth_exp) && breadth_exp == 2 * log_base(p, dz as u64).unwrap_or(0),
        format!("class size p^{breadth_exp}, [G':Z] = {dz}"),
    );
    let g3 = s.gamma3().expect("class 3 checked");
    r.push("center_is_gamma3", g3.same_members(z), format!("|gamma3| = {}, |Z| = {}", g3.order(), z.order()));
    let z_ea = g.is_elementary_abelian(z);
    r.push("center_elementary_abelian", z_ea, format!("Z elementary abelian: {z_ea}"));
    let d_ea = g.is_elementary_abelian(d);
    r.push("derived_elementary_abelian", d_ea, format!("G' elementary abelian: {d_ea}"));

    let central = g.central_quotient()?;
    let gbar = &central.group;
    let exp = gbar.exponent();
    r.push("central_quotient_exponent", exp as u64 == p, format!("exp(G/Z) = {exp}"));

    // centralizers in G'
    let cd = derived_centralizer_orders(g, d)?;
    let outside_ok = (0..g.order()).filter(|&x| !d.contains(x)).find(|&x| cd[x] != z.order());
    r.push(
        "derived_centralizer_outside_derived",
        outside_ok.is_none(),
        match outside_ok {
            None => format!("C_G'(x) = Z for all {} elements outside G'", g.order() - d.order()),
            Some(x) => format!("|C_G'({x})| = {} != |Z| = {}", cd[x], z.order()),
        },
    );
    let min_c = cd.iter().copied().min().unwrap_or(0);
    let breadth_set: Vec<usize> = (0..g.order()).filter(|&x| cd[x] == min_c).collect();
    let expected: Vec<usize> = (0..g.order()).filter(|&x| cd[x] == z.order()).collect();
    let generated = g.closure(&breadth_set).order();
    r.push(
        "breadth_set_generates",
        breadth_set == expected && generated == g.order(),
        format!("|B_G'| = {}, matches C_G'(x) = Z: {}, <B_G'> has order {generated}", breadth_set.len(), breadth_set == expected),
    );
    let bad_cent = (0..s.classes.class_reps.len())
        .map(|i| (s.classes.class_reps[i], s.classes.class_sizes[i]))
        .find(|&(x, size)| !d.contains(x) && g.order() / size / z.order() != dz);
    r.push(
        "centralizer_over_center",
        bad_cent.is_none(),
        match bad_cent {
            None => format!("[C_G(x):Z] = [G':Z] = {dz} for x outside G'"),
            Some((x, size)) => format!("[C_G({x}):Z] = {}", g.order() / size / z.order()),
        },
    );

    // the central quotient
    let zbar = gbar.center();
    r.push("central_quotient_order", gbar.order() == pm(3 * m), format!("|G/Z| = {}", gbar.order()));
    let camina = gbar.camina_check()?;
    r.push("central_quotient_camina", camina, format!("G/Z Camina: {camina}"));
    let mut cents: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut bad = None;
    for x in 0..gbar.order() {
        if zbar.contains(x) {
            continue;
        }
        let c = gbar.centralizer(x);
        if c.order() != pm(2 * m) || !gbar.is_elementary_abelian(&c) {
            bad = Some(format!("C({x}) has order {}, elementary abelian {}", c.order(), gbar.is_elementary_abelian(&c)));
            break;
        }
        cents.insert(c.members().map(|v| v as u32).collect());
    }
    r.push(
        "central_quotient_centralizers",
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{} distinct centralizers, each elementary abelian of order {}", cents.len(), pm(2 * m))),
    );
    let cents: Vec<Subgroup> =
        cents.into_iter().map(|mem| gbar.subgroup_from_members(mem.into_iter().map(|v| v as usize).collect())).collect::<Result<_>>()?;
    let mut pair_fail = None;
    'pairs: for i in 0..cents.len() {
        for j in i + 1..cents.len() {
            let meet = gbar.intersection(&cents[i], &cents[j]);
            let join = gbar.join(&cents[i], &cents[j]);
            if !meet.same_members(&zbar) || !join.is_whole() {
                pair_fail = Some(format!("centralizers {i},{j}: meet {}, join {}", meet.order(), join.order()));
                break 'pairs;
            }
        }
    }
    r.push(
        "central_quotient_centralizer_pairs",
        pair_fail.is_none() && cents.len() >= 2,
        pair_fail.unwrap_or_else(|| format!("all {} pairs meet in Z(G/Z) and generate G/Z", cents.len() * (cents.len().max(1) - 1) / 2)),
    );
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct U3Recognition {
    pub recognized: bool,
    pub q: Option<u64>,
    /// First failing criterion when not recognized.
    pub rejected_by: Option<String>,
    pub detail: String,
}

/// Accepts `G` as U3(p^n) when it has order `p^{3n}`, exponent `p`, class 2,
/// `[G:G'] = p^{2n}`, is Camina, and every non-central element has an
/// abelian centralizer.
pub fn u3_recognizer(g: &FiniteGroup) -> U3Recognition {
    let reject = |name: &str, detail: String| U3Recognition { recognized: false, q: None, rejected_by: Some(name.into()), detail };
    let Some(p) = g.p_group_prime() else {
        return reject("p_group", format!("order {} is not a prime power", g.order()));
    };
    let e = log_base(p, g.order() as u64).unwrap();
    if e % 3 != 0 {
        return reject("order", format!("order {p}^{e}, exponent not a multiple of 3"));
    }
    let n = e / 3;
    let exp = g.exponent() as u64;
    if exp != p {
        return reject("exponent", format!("exponent {exp}"));
    }
    let class = match g.nilpotency_class() {
        Ok(c) => c,
        Err(_) => return reject("class", "not nilpotent".into()),
    };
    if class != 2 {
        return reject("class", format!("nilpotency class {class}"));
    }
    let d = g.derived_subgroup();
    if d.index() as u64 != p.pow(2 * n) {
        return reject("derived_index", format!("[G:G'] = {}", d.index()));
    }
    match g.camina_check() {
        Ok(true) => {}
        Ok(false) => return reject("camina", "some class is smaller than its G' coset".into()),
        Err(e) => return reject("camina", e.to_string()),
    }
    let z = g.center();
    for x in 0..g.order() {
        if !z.contains(x) && !g.is_abelian_subgroup(&g.centralizer(x)) {
            return reject("abelian_centralizers", format!("C({x}) is not abelian"));
        }
    }
    let q = p.pow(n);
    U3Recognition { recognized: true, q: Some(q), rejected_by: None, detail: format!("order {q}^3, exponent {p}, Camina, class 2") }
}

#[cfg(test)]
mod tests;
