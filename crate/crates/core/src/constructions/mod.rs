//! Concrete groups: U3(q), the patterned 5x5 matrix group H_m and its central
//! quotient, the quintuple group, and direct products with elementary abelian
//! groups.

pub mod matrix;
pub mod quintuple;
mod spec;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ff_pow, FieldSpec, FieldTables};
use crate::group::{FiniteGroup, GroupLaw, GroupParts, Quotient, DEFAULT_CAP};

use matrix::{entry_pos, Entries, MatrixGroupBuilder, MatrixRing};
use quintuple::QuintupleLaw;

pub use spec::{GroupKind, GroupSpec};

fn power_basis(spec: &FieldSpec) -> Vec<u8> {
    let alpha = spec.alpha();
    (0..spec.m()).map(|k| spec.index_of(&ff_pow(&alpha, k as u64, spec)) as u8).collect()
}

fn tables(spec: &FieldSpec) -> Result<Arc<FieldTables>> {
    Ok(Arc::new(FieldTables::new(spec)?))
}

fn check_odd(spec: &FieldSpec) -> Result<()> {
    if spec.p() == 2 {
        return Err(Error::InvalidSpec("p must be odd".into()));
    }
    Ok(())
}

fn predicted(spec: &FieldSpec, exp: u32, cap: usize) -> Result<()> {
    let order = (spec.order() as u128).pow(exp);
    if order > cap as u128 {
        return Err(Error::CapExceeded { order, cap });
    }
    Ok(())
}

/// U3(p^m) as lower unitriangular 3x3 matrices, generated by
/// `X_i` (entry (3,2) = a^(i-1)) and `Y_i` (entry (2,1) = a^(i-1)). Tags
/// `X_i`, `Y_i`, `H_i` (entry (3,1) = a^(i-1)) for `1 <= i <= m`.
pub fn build_u3(spec: &FieldSpec) -> Result<FiniteGroup> {
    build_u3_with_cap(spec, DEFAULT_CAP)
}

pub fn build_u3_with_cap(spec: &FieldSpec, cap: usize) -> Result<FiniteGroup> {
    check_odd(spec)?;
    predicted(spec, 3, cap)?;
    let field = tables(spec)?;
    let basis = power_basis(spec);
    let ring = MatrixRing { dim: 3, field };
    let unit = |row: usize, col: usize, v: u8| -> Entries {
        let mut e = ring.identity();
        e[entry_pos(row, col)] = v;
        e
    };
    let mut generators = Vec::new();
    for (i, &b) in basis.iter().enumerate() {
        generators.push((format!("X{}", i + 1), unit(3, 2, b)));
    }
    for (i, &b) in basis.iter().enumerate() {
        generators.push((format!("Y{}", i + 1), unit(2, 1, b)));
    }
    let (group, law) = MatrixGroupBuilder {
        name: format!("u3:{}", spec_suffix(spec)),
        ring: ring.clone(),
        generators,
        key_positions: vec![0, 1, 2],
        pattern: None,
        cap,
    }
    .build()?;
    if group.order() != spec.order().pow(3) {
        return Err(Error::Construction(format!("U3 generated only {} elements", group.order())));
    }
    // H_k for every k = i+j-1 up to 2m-1
    let alpha = spec.alpha();
    let h = |k: usize| -> usize {
        let v = spec.index_of(&ff_pow(&alpha, k as u64 - 1, spec)) as u8;
        law.lookup(&unit(3, 1, v)).expect("H_k is in U3")
    };
    let m = spec.m();
    let mut tags = group.tags().clone();
    for i in 1..=m {
        tags.insert(format!("H{i}"), h(i));
    }
    let x = |i: usize| tags[&format!("X{i}")];
    let y = |i: usize| tags[&format!("Y{i}")];
    let p = spec.p() as u64;
    let e = group.identity();
    for i in 1..=m {
        let hi = h(i);
        for g in [x(i), y(i), hi] {
            if group.pow(g, p) != e {
                return Err(Error::Construction("a tagged generator does not have order p".into()));
            }
        }
        for j in 1..=m {
            let ok = group.commutator(x(i), x(j)) == e
                && group.commutator(y(i), y(j)) == e
                && group.commutator(hi, x(j)) == e
                && group.commutator(hi, y(j)) == e
                && group.commutator(x(i), y(j)) == h(i + j - 1);
            if !ok {
                return Err(Error::Construction(format!("U3 relations fail at (i,j)=({i},{j})")));
            }
        }
    }
    Ok(group.with_tags(tags))
}

fn spec_suffix(spec: &FieldSpec) -> String {
    let default = crate::field::find_irreducible(spec.p(), spec.m()).ok();
    if default.as_ref() == Some(spec) {
        format!("p={},m={}", spec.p(), spec.m())
    } else {
        spec.to_string()
    }
}

/// Coordinates `(a, b, c, d, e, f)` of a patterned 5x5 matrix.
pub fn h_coordinates(entries: &[u8]) -> [u8; 6] {
    [
        entries[entry_pos(2, 1)],
        entries[entry_pos(3, 2)],
        entries[entry_pos(3, 1)],
        entries[entry_pos(4, 1)],
        entries[entry_pos(5, 2)],
        entries[entry_pos(5, 1)],
    ]
}

fn h_pattern_matrix(field: &FieldTables, [a, b, c, d, e, f]: [u8; 6]) -> Entries {
    let mut m = vec![0u8; 10];
    m[entry_pos(2, 1)] = a;
    m[entry_pos(3, 1)] = c;
    m[entry_pos(3, 2)] = b;
    m[entry_pos(4, 1)] = d;
    m[entry_pos(4, 2)] = field.sub(field.mul(a, b), c);
    m[entry_pos(4, 3)] = a;
    m[entry_pos(5, 1)] = f;
    m[entry_pos(5, 2)] = e;
    m[entry_pos(5, 3)] = c;
    m[entry_pos(5, 4)] = b;
    m
}

fn is_h_pattern(field: &FieldTables, m: &[u8]) -> bool {
    let a = m[entry_pos(2, 1)];
    let c = m[entry_pos(3, 1)];
    let b = m[entry_pos(3, 2)];
    m[entry_pos(4, 2)] == field.sub(field.mul(a, b), c)
        && m[entry_pos(4, 3)] == a
        && m[entry_pos(5, 3)] == c
        && m[entry_pos(5, 4)] == b
}

/// The patterned subgroup of U5(q), closed from the unit matrices in the
/// `a`, `b`, `c` and `f` coordinates for each power-basis element. Every
/// product formed during closure is checked against the pattern. Tags `x_i`
/// and `y_i` are the `a` and `b` units.
pub fn build_h_matrix(spec: &FieldSpec) -> Result<FiniteGroup> {
    build_h_matrix_with_cap(spec, DEFAULT_CAP)
}

pub fn build_h_matrix_with_cap(spec: &FieldSpec, cap: usize) -> Result<FiniteGroup> {
    check_odd(spec)?;
    predicted(spec, 6, cap)?;
    let field = tables(spec)?;
    let basis = power_basis(spec);
    let mut generators = Vec::new();
    for (slot, name) in [(0usize, "x"), (1, "y"), (2, "c"), (5, "f")] {
        for (i, &v) in basis.iter().enumerate() {
            let mut coords = [0u8; 6];
            coords[slot] = v;
            generators.push((format!("{name}{}", i + 1), h_pattern_matrix(&field, coords)));
        }
    }
    let pattern_field = Arc::clone(&field);
    let (group, _) = MatrixGroupBuilder {
        name: format!("hmat:{}", spec_suffix(spec)),
        ring: MatrixRing { dim: 5, field },
        generators,
        key_positions: vec![entry_pos(2, 1), entry_pos(3, 2), entry_pos(3, 1), entry_pos(4, 1), entry_pos(5, 2), entry_pos(5, 1)],
        pattern: Some(Box::new(move |m: &[u8]| is_h_pattern(&pattern_field, m))),
        cap,
    }
    .build()?;
    if group.order() != spec.order().pow(6) {
        return Err(Error::Construction(format!("H_m generated only {} elements", group.order())));
    }
    // drop the c/f tags; x/y are the meaningful ones downstream
    let tags = group.tags().iter().filter(|(k, _)| k.starts_with('x') || k.starts_with('y')).map(|(k, &v)| (k.clone(), v)).collect();
    Ok(group.with_tags(tags))
}

/// `H_m / Z(H_m)` with the natural projection retained.
pub fn build_h_mod_center_quotient(spec: &FieldSpec) -> Result<Quotient> {
    Ok(h_mod_center_parts(spec)?.1)
}

/// The matrix group together with its central quotient.
pub fn h_mod_center_parts(spec: &FieldSpec) -> Result<(FiniteGroup, Quotient)> {
    let h = build_h_matrix(spec)?;
    let z = h.center();
    let q = h.quotient_named(&z, format!("hmod:{}", spec_suffix(spec)))?;
    let gens: Vec<usize> = q.group.generators().to_vec();
    // reduce to a small generating set for cheaper orbit expansion
    let reduced = q.group.closure(&gens).generators().to_vec();
    Ok((h, Quotient { group: q.group.with_generators(reduced), ..q }))
}

pub fn build_h_mod_center(spec: &FieldSpec) -> Result<FiniteGroup> {
    Ok(build_h_mod_center_quotient(spec)?.group)
}

/// The quintuple group of order `q^5`, generated by `x_i = (a^(i-1),0,0,0,0)`
/// and `y_i = (0,a^(i-1),0,0,0)`.
pub fn build_quintuple(spec: &FieldSpec) -> Result<FiniteGroup> {
    check_odd(spec)?;
    predicted(spec, 5, DEFAULT_CAP)?;
    let law = quintuple_law(spec)?;
    let order = law.order();
    let labels = (0..order).flat_map(|i| law.decode(i)).collect();
    let basis = power_basis(spec);
    let mut tags = BTreeMap::new();
    let mut generators = Vec::new();
    for (i, &v) in basis.iter().enumerate() {
        let x = law.encode([v, 0, 0, 0, 0]);
        tags.insert(format!("x{}", i + 1), x);
        generators.push(x);
    }
    for (i, &v) in basis.iter().enumerate() {
        let y = law.encode([0, v, 0, 0, 0]);
        tags.insert(format!("y{}", i + 1), y);
        generators.push(y);
    }
    FiniteGroup::from_parts(
        GroupParts {
            name: format!("quint:{}", spec_suffix(spec)),
            law: Arc::new(law),
            labels,
            label_width: 5,
            generators,
            tags,
        },
        DEFAULT_CAP,
    )
}

pub fn quintuple_law(spec: &FieldSpec) -> Result<QuintupleLaw> {
    Ok(QuintupleLaw { field: tables(spec)? })
}

struct ProductLaw {
    base: FiniteGroup,
    p: usize,
    width: usize,
}

impl ProductLaw {
    fn split(&self, i: usize) -> (usize, usize) {
        (i / self.width, i % self.width)
    }

    fn add(&self, mut u: usize, mut v: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        while place < self.width {
            out += ((u % self.p + v % self.p) % self.p) * place;
            u /= self.p;
            v /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg(&self, mut u: usize) -> usize {
        let mut out = 0;
        let mut place = 1;
        while place < self.width {
            out += ((self.p - u % self.p) % self.p) * place;
            u /= self.p;
            place *= self.p;
        }
        out
    }
}

impl GroupLaw for ProductLaw {
    fn order(&self) -> usize {
        self.base.order() * self.width
    }

    fn identity(&self) -> usize {
        self.base.identity() * self.width
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        let ((g, u), (h, v)) = (self.split(a), self.split(b));
        self.base.mul(g, h) * self.width + self.add(u, v)
    }

    fn inv(&self, a: usize) -> usize {
        let (g, u) = self.split(a);
        self.base.inv(g) * self.width + self.neg(u)
    }
}

/// `G x C_p^k`; labels are the base label followed by `k` digit bytes.
pub fn build_direct_product_with_elem_abelian(g: &FiniteGroup, p: u32, k: u32) -> Result<FiniteGroup> {
    build_direct_product_with_cap(g, p, k, DEFAULT_CAP)
}

pub fn build_direct_product_with_cap(g: &FiniteGroup, p: u32, k: u32, cap: usize) -> Result<FiniteGroup> {
    if k == 0 {
        return Ok(g.clone());
    }
    let p = p as usize;
    let width = p.checked_pow(k).ok_or(Error::CapExceeded { order: u128::MAX, cap })?;
    let order = g.order() as u128 * width as u128;
    if order > cap as u128 {
        return Err(Error::CapExceeded { order, cap });
    }
    let law = ProductLaw { base: g.clone(), p, width };
    let mut labels = Vec::with_capacity(order as usize * (g.label_width() + k as usize));
    for i in 0..order as usize {
        let (b, mut u) = law.split(i);
        labels.extend_from_slice(g.label(b));
        let mut digits = vec![0u8; k as usize];
        for d in digits.iter_mut().rev() {
            *d = (u % p) as u8;
            u /= p;
        }
        labels.extend(digits);
    }
    let mut generators: Vec<usize> = g.generators().iter().map(|&x| x * width).collect();
    let e = g.identity() * width;
    let mut place = 1;
    for _ in 0..k {
        generators.push(e + place);
        place *= p;
    }
    let tags = g.tags().iter().map(|(n, &v)| (n.clone(), v * width)).collect();
    FiniteGroup::from_parts(
        GroupParts {
            name: format!("xab:{},k={k}", g.name()),
            law: Arc::new(law),
            labels,
            label_width: g.label_width() + k as usize,
            generators,
            tags,
        },
        cap,
    )
}

struct CyclicLaw(usize);

impl GroupLaw for CyclicLaw {
    fn order(&self) -> usize {
        self.0
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        (a + b) % self.0
    }

    fn inv(&self, a: usize) -> usize {
        (self.0 - a) % self.0
    }
}

pub fn build_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidSpec("cyclic group order must be positive".into()));
    }
    if n > DEFAULT_CAP {
        return Err(Error::CapExceeded { order: n as u128, cap: DEFAULT_CAP });
    }
    let labels = (0..n as u32).flat_map(u32::to_be_bytes).collect();
    FiniteGroup::from_parts(
        GroupParts {
            name: format!("cyc:n={n}"),
            law: Arc::new(CyclicLaw(n)),
            labels,
            label_width: 4,
            generators: if n > 1 { vec![1] } else { vec![] },
            tags: BTreeMap::new(),
        },
        DEFAULT_CAP,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentificationResult {
    pub holds: bool,
    pub pairs_checked: u64,
    pub exhaustive: bool,
    /// Human-readable description of the first failure.
    pub counterexample: Option<String>,
}

/// Exhaustive when `q^5 <= 3125`, otherwise `10^5` seeded random pairs.
pub fn default_identification_mode(spec: &FieldSpec, seed: u64) -> CheckMode {
    if spec.order().pow(5) <= 3125 {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { pairs: 100_000, seed }
    }
}

/// Checks that `(a,b,c,d,e,f)Z -> (a,b,c,d,e)` is a well-defined bijective
/// homomorphism from `H_m/Z(H_m)` onto the quintuple group.
pub fn verify_quintuple_identification(spec: &FieldSpec, mode: CheckMode) -> Result<IdentificationResult> {
    let (parent, hq) = h_mod_center_parts(spec)?;
    let quint = build_quintuple(spec)?;
    let law = quintuple_law(spec)?;
    let to_quint = |entries: &[u8]| -> usize {
        let [a, b, c, d, e, _] = h_coordinates(entries);
        law.encode([a, b, c, d, e])
    };
    let hmat = &hq.projection;
    let n = hq.group.order();
    let fail = |msg: String, pairs: u64, exhaustive: bool| {
        Ok(IdentificationResult { holds: false, pairs_checked: pairs, exhaustive, counterexample: Some(msg) })
    };
    let exhaustive = matches!(mode, CheckMode::Exhaustive);

    // well-defined: every parent element maps like its coset representative
    let phi: Vec<usize> = (0..n).map(|c| to_quint(hq.group.label(c))).collect();
    for x in 0..parent.order() {
        if to_quint(parent.label(x)) != phi[hmat[x] as usize] {
            return fail(format!("coordinate map not constant on the coset of parent element {x}"), 0, exhaustive);
        }
    }
    // bijective
    let mut hit = vec![false; quint.order()];
    for &t in &phi {
        if std::mem::replace(&mut hit[t], true) {
            return fail(format!("two cosets map to quintuple {:?}", law.decode(t)), 0, exhaustive);
        }
    }
    if n != quint.order() {
        return fail(format!("orders differ: {n} vs {}", quint.order()), 0, exhaustive);
    }
    // homomorphism
    let mut checked = 0u64;
    let mut check_pair = |a: usize, b: usize| -> Option<String> {
        checked += 1;
        let lhs = phi[hq.group.mul(a, b)];
        let rhs = quint.mul(phi[a], phi[b]);
        (lhs != rhs).then(|| {
            format!(
                "product of {:?} and {:?}: quotient gives {:?}, quintuple law gives {:?}",
                law.decode(phi[a]),
                law.decode(phi[b]),
                law.decode(lhs),
                law.decode(rhs)
            )
        })
    };
    match mode {
        CheckMode::Exhaustive => {
            for a in 0..n {
                for b in 0..n {
                    if let Some(msg) = check_pair(a, b) {
                        return fail(msg, checked, true);
                    }
                }
            }
        }
        CheckMode::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..pairs {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if let Some(msg) = check_pair(a, b) {
                    return fail(msg, checked, false);
                }
            }
        }
    }
    Ok(IdentificationResult { holds: true, pairs_checked: checked, exhaustive, counterexample: None })
}
