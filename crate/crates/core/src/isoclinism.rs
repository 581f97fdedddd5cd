//! Commutation maps, isomorphism search and isoclinism witnesses.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Quotient, Subgroup};

/// Default bound on `|G/Z|` and `|G'|` for the isoclinism search.
pub const DEFAULT_SEARCH_LIMIT: usize = 729;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Partial assignments explored before giving up.
    pub max_nodes: u64,
    pub order_profile_pruning: bool,
    pub time_limit: Option<Duration>,
    /// `None` lifts the size limit.
    pub size_limit: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: 50_000_000,
            order_profile_pruning: true,
            time_limit: Some(Duration::from_secs(120)),
            size_limit: Some(DEFAULT_SEARCH_LIMIT),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum SearchOutcome<W> {
    Found { witness: W, nodes: u64 },
    Refuted { reason: String, nodes: u64 },
    /// Budget exhausted; says nothing either way.
    Inconclusive { reason: String, nodes: u64 },
}

impl<W> SearchOutcome<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            SearchOutcome::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, SearchOutcome::Refuted { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, SearchOutcome::Inconclusive { .. })
    }

    pub fn nodes(&self) -> u64 {
        match self {
            SearchOutcome::Found { nodes, .. } | SearchOutcome::Refuted { nodes, .. } | SearchOutcome::Inconclusive { nodes, .. } => {
                *nodes
            }
        }
    }
}

/// `(xZ, yZ) -> [x, y]` as a table over the central quotient.
#[derive(Clone, Debug)]
pub struct CommutationMap {
    pub group: FiniteGroup,
    pub quotient: Quotient,
    pub derived: Subgroup,
    table: Vec<u32>,
}

impl CommutationMap {
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.quotient.group.order() + b] as usize
    }

    pub fn domain_order(&self) -> usize {
        self.quotient.group.order()
    }

    /// Distinct values, ascending.
    pub fn image(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.table.iter().map(|&x| x as usize).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Builds the table from coset representatives and recomputes `samples`
/// random entries with other representatives.
pub fn commutation_map(g: &FiniteGroup, samples: usize, seed: u64) -> Result<CommutationMap> {
    let quotient = g.central_quotient()?;
    let n = quotient.group.order();
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            table.push(g.commutator(quotient.rep(a), quotient.rep(b)) as u32);
        }
    }
    let center: Vec<usize> = g.center().members().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let za = center[rng.gen_range(0..center.len())];
        let zb = center[rng.gen_range(0..center.len())];
        let c = g.commutator(g.mul(quotient.rep(a), za), g.mul(quotient.rep(b), zb));
        if c != table[a * n + b] as usize {
            return Err(Error::TheoremViolation(format!("commutator depends on coset representative at ({a},{b})")));
        }
    }
    for a in 0..n {
        if table[a * n + a] as usize != g.identity() {
            return Err(Error::TheoremViolation(format!("a(x, x) is not trivial at {a}")));
        }
    }
    Ok(CommutationMap { group: g.clone(), quotient, derived: g.derived_subgroup(), table })
}

fn element_orders(g: &FiniteGroup) -> Vec<usize> {
    (0..g.order()).map(|x| g.element_order(x)).collect()
}

fn class_sizes(g: &FiniteGroup) -> Vec<usize> {
    let r = g.conjugacy_classes();
    (0..g.order()).map(|x| r.class_size_of(x)).collect()
}

fn census<T: Ord + Clone>(v: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in v {
        *m.entry(x.clone()).or_insert(0) += 1;
    }
    m
}

/// Per-element fingerprints for pruning: element order, class size and
/// any caller-supplied extra component.
fn fingerprints(g: &FiniteGroup, extra: Option<&[usize]>, pruning: bool) -> Vec<(usize, usize, usize)> {
    if !pruning {
        return (0..g.order()).map(|x| (usize::from(x == g.identity()), 0, 0)).collect();
    }
    let orders = element_orders(g);
    let sizes = class_sizes(g);
    (0..g.order()).map(|x| (orders[x], sizes[x], extra.map_or(0, |e| e[x]))).collect()
}

/// First invariant telling the two groups apart, if any.
pub fn invariant_mismatch(a: &FiniteGroup, b: &FiniteGroup) -> Option<String> {
    if a.order() != b.order() {
        return Some(format!("orders differ: {} vs {}", a.order(), b.order()));
    }
    if a.is_abelian() != b.is_abelian() {
        return Some(format!("abelian: {} vs {}", a.is_abelian(), b.is_abelian()));
    }
    let (ca, cb) = (a.nilpotency_class().ok(), b.nilpotency_class().ok());
    if ca != cb {
        return Some(format!("nilpotency class differs: {ca:?} vs {cb:?}"));
    }
    let (za, zb) = (a.center().order(), b.center().order());
    if za != zb {
        return Some(format!("center orders differ: {za} vs {zb}"));
    }
    let (da, db) = (a.derived_subgroup().order(), b.derived_subgroup().order());
    if da != db {
        return Some(format!("derived subgroup orders differ: {da} vs {db}"));
    }
    let (oa, ob) = (element_orders(a), element_orders(b));
    let (ea, eb) = (oa.iter().copied().fold(1, crate::group::lcm), ob.iter().copied().fold(1, crate::group::lcm));
    if ea != eb {
        return Some(format!("exponents differ: {ea} vs {eb}"));
    }
    let (ta, tb) = (a.conjugacy_classes().conjugate_type, b.conjugacy_classes().conjugate_type);
    if ta != tb {
        return Some(format!("conjugate types differ: {ta:?} vs {tb:?}"));
    }
    if census(&oa) != census(&ob) {
        return Some("element order census differs".into());
    }
    let (sa, sb) = (class_sizes(a), class_sizes(b));
    let ja: Vec<_> = oa.iter().zip(&sa).collect();
    let jb: Vec<_> = ob.iter().zip(&sb).collect();
    if census(&ja) != census(&jb) {
        return Some("(element order, class size) census differs".into());
    }
    None
}

struct Budget {
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
}

impl Budget {
    fn new(cfg: &SearchConfig) -> Self {
        Budget { nodes: 0, max_nodes: cfg.max_nodes, deadline: cfg.time_limit.map(|t| Instant::now() + t) }
    }

    fn tick(&mut self) -> std::result::Result<(), String> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(format!("node budget of {} exhausted", self.max_nodes));
        }
        if self.nodes % 1024 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err("time limit exceeded".into());
                }
            }
        }
        Ok(())
    }
}

/// Backtracking over images of a small generating set of `a`.
struct IsoSearch<'a> {
    a: &'a FiniteGroup,
    b: &'a FiniteGroup,
    gens: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    images: Vec<usize>,
    map: Vec<u32>,
    used: Vec<bool>,
}

const UNSET: u32 = u32::MAX;

/// Greedy generating set, rarest fingerprints first; for p-groups each pick
/// lies outside the subgroup generated by earlier picks and the Frattini
/// subgroup, so the set is minimal.
fn small_generating_set<F: Ord + Clone + std::hash::Hash>(a: &FiniteGroup, fa: &[F], fb: &[F]) -> Vec<usize> {
    let mut freq: HashMap<&F, usize> = HashMap::new();
    for f in fb {
        *freq.entry(f).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..a.order()).filter(|&x| x != a.identity()).collect();
    order.sort_by_key(|&x| (freq.get(&fa[x]).copied().unwrap_or(0), x));
    let frattini: Vec<usize> = match a.p_group_prime() {
        Some(p) => {
            let mut f: Vec<usize> = a.derived_subgroup().generators().to_vec();
            f.extend(a.generators().iter().map(|&g| a.pow(g, p)));
            f
        }
        None => Vec::new(),
    };
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = a.closure(&frattini);
    for x in order {
        if span.is_whole() {
            break;
        }
        if !span.contains(x) {
            chosen.push(x);
            let mut g = frattini.clone();
            g.extend(&chosen);
            span = a.closure(&g);
        }
    }
    if a.closure(&chosen).order() != a.order() {
        // not a p-group: fall back to the plain closure condition
        chosen.clear();
        let mut span = a.trivial_subgroup();
        for x in 0..a.order() {
            if !span.contains(x) {
                chosen.push(x);
                span = a.closure(&chosen);
            }
        }
    }
    chosen
}

impl<'a> IsoSearch<'a> {
    fn new<F: Ord + Clone + std::hash::Hash>(a: &'a FiniteGroup, b: &'a FiniteGroup, fa: &[F], fb: &[F]) -> Self {
        let gens = small_generating_set(a, fa, fb);
        let candidates = gens.iter().map(|&g| (0..b.order()).filter(|&y| fb[y] == fa[g]).collect()).collect();
        IsoSearch {
            a,
            b,
            images: vec![0; gens.len()],
            gens,
            candidates,
            map: vec![UNSET; a.order()],
            used: vec![false; b.order()],
        }
    }

    /// Maps `<gens[0..=k]>` by breadth-first search, checking every edge and
    /// injectivity.
    fn extend(&mut self, k: usize) -> bool {
        self.map.iter_mut().for_each(|x| *x = UNSET);
        self.used.iter_mut().for_each(|x| *x = false);
        let (a, b) = (self.a, self.b);
        let (ea, eb) = (a.identity(), b.identity());
        self.map[ea] = eb as u32;
        self.used[eb] = true;
        let mut queue = vec![ea];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            let fx = self.map[x] as usize;
            for s in 0..=k {
                let y = a.mul(x, self.gens[s]);
                let fy = b.mul(fx, self.images[s]);
                match self.map[y] {
                    UNSET => {
                        if self.used[fy] {
                            return false;
                        }
                        self.map[y] = fy as u32;
                        self.used[fy] = true;
                        queue.push(y);
                    }
                    v if v as usize != fy => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Calls `visit` on every isomorphism; stops when it returns true.
    fn run(
        &mut self,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[u32]) -> bool,
    ) -> std::result::Result<bool, String> {
        self.level(0, budget, visit)
    }

    fn level(
        &mut self,
        k: usize,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[u32]) -> bool,
    ) -> std::result::Result<bool, String> {
        if k == self.gens.len() {
            return Ok(visit(&self.map));
        }
        for i in 0..self.candidates[k].len() {
            budget.tick()?;
            self.images[k] = self.candidates[k][i];
            if self.extend(k) && self.level(k + 1, budget, visit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exhaustive homomorphism and bijectivity check of `map: a -> b`.
pub fn verify_isomorphism(a: &FiniteGroup, b: &FiniteGroup, map: &[usize]) -> std::result::Result<(), String> {
    if a.order() != b.order() || map.len() != a.order() {
        return Err("sizes differ".into());
    }
    let mut hit = vec![false; b.order()];
    for &y in map {
        if y >= b.order() || std::mem::replace(&mut hit[y], true) {
            return Err(format!("not a bijection at image {y}"));
        }
    }
    for x in 0..a.order() {
        for y in 0..a.order() {
            if map[a.mul(x, y)] != b.mul(map[x], map[y]) {
                return Err(format!("not a homomorphism at ({x},{y})"));
            }
        }
    }
    Ok(())
}

/// An explicit isomorphism `a -> b` as an index table, or a refutation.
pub fn are_isomorphic(a: &FiniteGroup, b: &FiniteGroup, cfg: &SearchConfig) -> SearchOutcome<Vec<usize>> {
    if let Some(reason) = invariant_mismatch(a, b) {
        return SearchOutcome::Refuted { reason, nodes: 0 };
    }
    let fa = fingerprints(a, None, cfg.order_profile_pruning);
    let fb = fingerprints(b, None, cfg.order_profile_pruning);
    let mut search = IsoSearch::new(a, b, &fa, &fb);
    let mut budget = Budget::new(cfg);
    let mut found = None;
    let res = search.run(&mut budget, &mut |map| {
        found = Some(map.iter().map(|&v| v as usize).collect::<Vec<_>>());
        true
    });
    match (res, found) {
        (Ok(_), Some(witness)) => SearchOutcome::Found { witness, nodes: budget.nodes },
        (Ok(_), None) => SearchOutcome::Refuted { reason: "search exhausted without an isomorphism".into(), nodes: budget.nodes },
        (Err(reason), _) => SearchOutcome::Inconclusive { reason, nodes: budget.nodes },
    }
}

/// `phi` on central-quotient indices and `theta` on derived-subgroup
/// elements, listed as parallel domain/image arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoclinismWitness {
    pub phi: Vec<usize>,
    pub theta_domain: Vec<usize>,
    pub theta_image: Vec<usize>,
}

impl IsoclinismWitness {
    /// The witness for the reverse direction.
    pub fn inverse(&self) -> Self {
        let mut phi = vec![0; self.phi.len()];
        for (x, &y) in self.phi.iter().enumerate() {
            phi[y] = x;
        }
        let mut pairs: Vec<(usize, usize)> = self.theta_image.iter().copied().zip(self.theta_domain.iter().copied()).collect();
        pairs.sort_unstable();
        let (theta_domain, theta_image) = pairs.into_iter().unzip();
        IsoclinismWitness { phi, theta_domain, theta_image }
    }

    pub fn theta(&self, x: usize) -> Option<usize> {
        self.theta_domain.binary_search(&x).ok().map(|i| self.theta_image[i])
    }
}

/// Recomputes both commutation maps and checks the witness from scratch:
/// both maps are isomorphisms and the commutation square commutes.
pub fn verify_isoclinism_witness(g: &FiniteGroup, h: &FiniteGroup, w: &IsoclinismWitness) -> std::result::Result<(), String> {
    let ag = commutation_map(g, 0, 0).map_err(|e| e.to_string())?;
    let ah = commutation_map(h, 0, 0).map_err(|e| e.to_string())?;
    verify_with_maps(&ag, &ah, w)
}

fn verify_with_maps(ag: &CommutationMap, ah: &CommutationMap, w: &IsoclinismWitness) -> std::result::Result<(), String> {
    let (gq, hq) = (&ag.quotient.group, &ah.quotient.group);
    verify_isomorphism(gq, hq, &w.phi).map_err(|e| format!("phi: {e}"))?;
    let (g, h) = (&ag.group, &ah.group);
    let gd: Vec<usize> = ag.derived.members().collect();
    if w.theta_domain != gd || w.theta_image.len() != gd.len() {
        return Err("theta domain is not G'".into());
    }
    let mut seen = std::collections::BTreeSet::new();
    for &y in &w.theta_image {
        if !ah.derived.contains(y) || !seen.insert(y) {
            return Err(format!("theta is not a bijection onto H' at {y}"));
        }
    }
    if seen.len() != ah.derived.order() {
        return Err("theta misses part of H'".into());
    }
    for (i, &x) in gd.iter().enumerate() {
        for (j, &y) in gd.iter().enumerate() {
            let lhs = w.theta(g.mul(x, y)).ok_or("theta undefined on a product")?;
            if lhs != h.mul(w.theta_image[i], w.theta_image[j]) {
                return Err(format!("theta is not a homomorphism at ({x},{y})"));
            }
        }
    }
    let n = gq.order();
    for a in 0..n {
        for b in 0..n {
            let lhs = w.theta(ag.get(a, b)).ok_or("theta undefined on a commutator")?;
            if lhs != ah.get(w.phi[a], w.phi[b]) {
                return Err(format!("square fails at ({a},{b})"));
            }
        }
    }
    Ok(())
}

/// `theta` forced by `phi`, extended multiplicatively over G'.
fn forced_theta(ag: &CommutationMap, ah: &CommutationMap, phi: &[u32]) -> Option<IsoclinismWitness> {
    let (g, h) = (&ag.group, &ah.group);
    let n = ag.domain_order();
    let mut theta: HashMap<usize, usize> = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            let c = ag.get(a, b);
            let t = ah.get(phi[a] as usize, phi[b] as usize);
            if *theta.entry(c).or_insert(t) != t {
                return None;
            }
        }
    }
    // spread over <commutators> = G' along a spanning tree
    let gens: Vec<(usize, usize)> = theta.iter().map(|(&c, &t)| (c, t)).collect();
    let mut full: HashMap<usize, usize> = HashMap::new();
    full.insert(g.identity(), h.identity());
    let mut queue = vec![g.identity()];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let fx = full[&x];
        for &(c, t) in &gens {
            let y = g.mul(x, c);
            let fy = h.mul(fx, t);
            match full.get(&y) {
                None => {
                    full.insert(y, fy);
                    queue.push(y);
                }
                Some(&v) if v != fy => return None,
                _ => {}
            }
        }
    }
    if full.len() != ag.derived.order() {
        return None;
    }
    let theta_domain: Vec<usize> = ag.derived.members().collect();
    let theta_image: Vec<usize> = theta_domain.iter().map(|x| full[x]).collect();
    let w = IsoclinismWitness { phi: phi.iter().map(|&v| v as usize).collect(), theta_domain, theta_image };
    verify_with_maps(ag, ah, &w).ok().map(|_| w)
}

fn same_table(g: &FiniteGroup, h: &FiniteGroup) -> bool {
    g.order() == h.order()
        && g.identity() == h.identity()
        && (0..g.order()).all(|a| (0..g.order()).all(|b| g.mul(a, b) == h.mul(a, b)))
}

/// Searches `phi: G/Z(G) -> H/Z(H)`; `theta` is forced by the commutation
/// square and checked for consistency.
pub fn are_isoclinic(g: &FiniteGroup, h: &FiniteGroup, cfg: &SearchConfig) -> Result<SearchOutcome<IsoclinismWitness>> {
    let (zg, zh) = (g.center(), h.center());
    let (dg, dh) = (g.derived_subgroup(), h.derived_subgroup());
    let (qg, qh) = (g.order() / zg.order(), h.order() / zh.order());
    if qg != qh {
        return Ok(SearchOutcome::Refuted { reason: format!("central quotient orders differ: {qg} vs {qh}"), nodes: 0 });
    }
    if dg.order() != dh.order() {
        return Ok(SearchOutcome::Refuted {
            reason: format!("derived subgroup orders differ: {} vs {}", dg.order(), dh.order()),
            nodes: 0,
        });
    }
    if let Some(limit) = cfg.size_limit {
        let big = qg.max(dg.order());
        if big > limit {
            return Err(Error::CapExceeded { order: big as u128, cap: limit });
        }
    }
    let ag = commutation_map(g, 100, 0)?;
    let ah = commutation_map(h, 100, 0)?;
    let (gq, hq) = (&ag.quotient.group, &ah.quotient.group);
    if let Some(reason) = invariant_mismatch(gq, hq) {
        return Ok(SearchOutcome::Refuted { reason: format!("central quotients: {reason}"), nodes: 0 });
    }
    if let Some(reason) = invariant_mismatch(&g.subgroup_group(&dg), &h.subgroup_group(&dh)) {
        return Ok(SearchOutcome::Refuted { reason: format!("derived subgroups: {reason}"), nodes: 0 });
    }
    if same_table(gq, hq) && same_table(g, h) {
        let phi: Vec<u32> = (0..gq.order() as u32).collect();
        if let Some(witness) = forced_theta(&ag, &ah, &phi) {
            return Ok(SearchOutcome::Found { witness, nodes: 0 });
        }
    }
    // how many cosets commute with each coset is preserved by phi
    let commuting = |a: &CommutationMap| -> Vec<usize> {
        let n = a.domain_order();
        let e = a.group.identity();
        (0..n).map(|x| (0..n).filter(|&y| a.get(x, y) == e).count()).collect()
    };
    let fa = fingerprints(gq, Some(&commuting(&ag)), cfg.order_profile_pruning);
    let fb = fingerprints(hq, Some(&commuting(&ah)), cfg.order_profile_pruning);
    let mut search = IsoSearch::new(gq, hq, &fa, &fb);
    let mut budget = Budget::new(cfg);
    let mut found = None;
    let res = search.run(&mut budget, &mut |phi| {
        found = forced_theta(&ag, &ah, phi);
        found.is_some()
    });
    Ok(match (res, found) {
        (Ok(_), Some(witness)) => SearchOutcome::Found { witness, nodes: budget.nodes },
        (Ok(_), None) => SearchOutcome::Refuted {
            reason: "no isomorphism of central quotients admits a compatible theta".into(),
            nodes: budget.nodes,
        },
        (Err(reason), _) => SearchOutcome::Inconclusive { reason, nodes: budget.nodes },
    })
}

/// Isoclinic groups share their conjugate type.
pub fn conjugate_type_consistency(g: &FiniteGroup, h: &FiniteGroup) -> (bool, Vec<usize>, Vec<usize>) {
    let (a, b) = (g.conjugacy_classes().conjugate_type, h.conjugacy_classes().conjugate_type);
    (a == b, a, b)
}

#[cfg(test)]
mod tests;
