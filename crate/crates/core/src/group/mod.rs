//! Finite groups over an explicitly enumerated element universe.
//!
//! Elements are indices `0..order`. Multiplication is either a flat table
//! (orders up to [`TABLE_LIMIT`]) or delegated to a [`GroupLaw`] that computes
//! products from canonical encodings on demand.

mod classes;
mod identities;
mod quotient;
mod subgroup;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use classes::ConjugacyReport;
pub use identities::{IdentityFailure, IdentityReport};
pub use quotient::Quotient;
pub use subgroup::Subgroup;

/// Default hard cap on the number of enumerated elements.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Groups up to this order get a memoized multiplication table.
pub const TABLE_LIMIT: usize = 4096;

/// On-demand multiplication over element indices.
pub trait GroupLaw: Send + Sync {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
}

/// A law given by an explicit Cayley table.
pub struct TableLaw {
    order: usize,
    identity: usize,
    table: Vec<u32>,
}

impl TableLaw {
    pub fn new(order: usize, identity: usize, table: Vec<u32>) -> Result<Self> {
        if table.len() != order * order || identity >= order {
            return Err(Error::Construction("table shape does not match order".into()));
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(Error::Construction("table entry out of range".into()));
        }
        Ok(TableLaw { order, identity, table })
    }
}

impl GroupLaw for TableLaw {
    fn order(&self) -> usize {
        self.order
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    fn inv(&self, a: usize) -> usize {
        let row = &self.table[a * self.order..(a + 1) * self.order];
        row.iter().position(|&x| x as usize == self.identity).expect("every element has an inverse")
    }
}

enum MulRepr {
    Table(Vec<u16>),
    Law(Arc<dyn GroupLaw>),
}

struct Core {
    order: usize,
    identity: usize,
    repr: MulRepr,
    inv: Vec<u32>,
    label_width: usize,
    labels: Vec<u8>,
}

struct Inner {
    name: String,
    core: Arc<Core>,
    generators: Vec<usize>,
    tags: BTreeMap<String, usize>,
}

/// An immutable finite group; cloning is cheap.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<Inner>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.inner.name)
            .field("order", &self.inner.core.order)
            .finish()
    }
}

/// Everything needed to assemble a [`FiniteGroup`] around a law.
pub struct GroupParts {
    pub name: String,
    pub law: Arc<dyn GroupLaw>,
    /// Fixed-width canonical encodings, `order * label_width` bytes.
    pub labels: Vec<u8>,
    pub label_width: usize,
    pub generators: Vec<usize>,
    pub tags: BTreeMap<String, usize>,
}

/// Cayley table from right multiplication by generators along a spanning
/// tree. Falls back to calling the law on every pair when the generators
/// do not reach the whole group.
fn fill_table(law: &dyn GroupLaw, order: usize, identity: usize, generators: &[usize]) -> Vec<u16> {
    let right: Vec<Vec<u16>> =
        generators.iter().map(|&s| (0..order).map(|x| law.mul(x, s) as u16).collect()).collect();
    let mut seen = vec![false; order];
    seen[identity] = true;
    let mut steps = Vec::with_capacity(order);
    let mut queue = std::collections::VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for (k, r) in right.iter().enumerate() {
            let y = r[x] as usize;
            if !seen[y] {
                seen[y] = true;
                steps.push((y, x, k));
                queue.push_back(y);
            }
        }
    }
    let mut table = vec![0u16; order * order];
    if steps.len() + 1 != order {
        for a in 0..order {
            for b in 0..order {
                table[a * order + b] = law.mul(a, b) as u16;
            }
        }
        return table;
    }
    for a in 0..order {
        let row = &mut table[a * order..(a + 1) * order];
        row[identity] = a as u16;
        for &(y, x, k) in &steps {
            row[y] = right[k][row[x] as usize];
        }
    }
    table
}

impl FiniteGroup {
    pub fn from_parts(parts: GroupParts, cap: usize) -> Result<Self> {
        let GroupParts { name, law, labels, label_width, generators, tags } = parts;
        let order = law.order();
        if order > cap {
            return Err(Error::CapExceeded { order: order as u128, cap });
        }
        if labels.len() != order * label_width {
            return Err(Error::Construction(format!(
                "{name}: expected {} label bytes, got {}",
                order * label_width,
                labels.len()
            )));
        }
        if order > u32::MAX as usize {
            return Err(Error::CapExceeded { order: order as u128, cap: u32::MAX as usize });
        }
        let identity = law.identity();
        let inv: Vec<u32> = (0..order).map(|a| law.inv(a) as u32).collect();
        let repr = if order <= TABLE_LIMIT {
            MulRepr::Table(fill_table(law.as_ref(), order, identity, &generators))
        } else {
            MulRepr::Law(law)
        };
        let core = Arc::new(Core { order, identity, repr, inv, label_width, labels });
        Ok(FiniteGroup { inner: Arc::new(Inner { name, core, generators, tags }) })
    }

    /// Builds a group from a Cayley table, with every element as a generator
    /// reduced to a small generating set. Labels are the big-endian indices.
    pub fn from_table(name: impl Into<String>, order: usize, identity: usize, table: Vec<u32>) -> Result<Self> {
        let law = Arc::new(TableLaw::new(order, identity, table)?);
        let labels = (0..order).flat_map(|i| (i as u32).to_be_bytes()).collect();
        let g = FiniteGroup::from_parts(
            GroupParts {
                name: name.into(),
                law,
                labels,
                label_width: 4,
                generators: (0..order).collect(),
                tags: BTreeMap::new(),
            },
            DEFAULT_CAP,
        )?;
        let gens = g.closure(&g.inner.generators).generators().to_vec();
        Ok(g.with_generators(gens))
    }

    /// The same group with a different distinguished generating set.
    pub fn with_generators(&self, generators: Vec<usize>) -> Self {
        let inner = &self.inner;
        FiniteGroup {
            inner: Arc::new(Inner {
                name: inner.name.clone(),
                core: Arc::clone(&inner.core),
                generators,
                tags: inner.tags.clone(),
            }),
        }
    }

    /// The same group with a different set of tagged elements.
    pub fn with_tags(&self, tags: BTreeMap<String, usize>) -> Self {
        let inner = &self.inner;
        FiniteGroup {
            inner: Arc::new(Inner {
                name: inner.name.clone(),
                core: Arc::clone(&inner.core),
                generators: inner.generators.clone(),
                tags,
            }),
        }
    }

    /// The same group under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let inner = &self.inner;
        FiniteGroup {
            inner: Arc::new(Inner {
                name: name.into(),
                core: Arc::clone(&inner.core),
                generators: inner.generators.clone(),
                tags: inner.tags.clone(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn order(&self) -> usize {
        self.inner.core.order
    }

    pub fn identity(&self) -> usize {
        self.inner.core.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.inner.generators
    }

    /// Distinguished elements recorded by the construction (e.g. `X1`, `x2`).
    pub fn tag(&self, name: &str) -> Option<usize> {
        self.inner.tags.get(name).copied()
    }

    pub fn tags(&self) -> &BTreeMap<String, usize> {
        &self.inner.tags
    }

    pub fn label(&self, a: usize) -> &[u8] {
        let w = self.inner.core.label_width;
        &self.inner.core.labels[a * w..(a + 1) * w]
    }

    pub fn label_width(&self) -> usize {
        self.inner.core.label_width
    }

    pub fn find_label(&self, label: &[u8]) -> Option<usize> {
        (0..self.order()).find(|&a| self.label(a) == label)
    }

    pub fn has_table(&self) -> bool {
        matches!(self.inner.core.repr, MulRepr::Table(_))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.inner.core.repr {
            MulRepr::Table(t) => t[a * self.inner.core.order + b] as usize,
            MulRepr::Law(l) => l.mul(a, b),
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inner.core.inv[a] as usize
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut base = a;
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^-1 b^-1 a b`
    #[inline]
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    /// Left-normed `[[a, b], c]`.
    pub fn commutator3(&self, a: usize, b: usize, c: usize) -> usize {
        self.commutator(self.commutator(a, b), c)
    }

    /// `g^-1 x g`
    #[inline]
    pub fn conjugate(&self, x: usize, g: usize) -> usize {
        self.mul(self.inv(g), self.mul(x, g))
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let e = self.identity();
        let mut k = 1;
        let mut x = a;
        while x != e {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).map(|a| self.element_order(a)).fold(1, lcm)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|&a| gens.iter().all(|&b| self.commute(a, b)))
    }

    /// The prime `p` when the order is a nontrivial power of `p`.
    pub fn p_group_prime(&self) -> Option<u64> {
        let n = self.order() as u64;
        if n < 2 {
            return None;
        }
        let p = (2..=n).find(|d| n % d == 0)?;
        let mut r = n;
        while r % p == 0 {
            r /= p;
        }
        (r == 1).then_some(p)
    }

    /// `log_p(k)` when `k` is an exact power of the group's prime.
    pub fn log_p(&self, k: usize) -> Option<u32> {
        let p = self.p_group_prime()? as usize;
        let mut e = 0;
        let mut r = k;
        while r > 1 {
            if r % p != 0 {
                return None;
            }
            r /= p;
            e += 1;
        }
        (r == 1).then_some(e)
    }

    /// Checks identity and inverse laws for every element, and associativity
    /// exhaustively for orders up to 1000, otherwise on `samples` random
    /// triples.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.order();
        let e = self.identity();
        for g in 0..n {
            if self.mul(e, g) != g || self.mul(g, e) != g {
                return Err(Error::Construction(format!("identity law fails at {g}")));
            }
            if self.mul(g, self.inv(g)) != e {
                return Err(Error::Construction(format!("inverse law fails at {g}")));
            }
        }
        let assoc = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= 1000 {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::Construction(format!("associativity fails at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::Construction(format!("associativity fails at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }

    /// Cayley table as a flat vector (for relabeling and small fixtures).
    pub fn cayley_table(&self) -> Vec<u32> {
        let n = self.order();
        let mut t = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                t.push(self.mul(a, b) as u32);
            }
        }
        t
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn cyclic(n: usize) -> FiniteGroup {
        let table = (0..n).flat_map(|a| (0..n).map(move |b| ((a + b) % n) as u32)).collect();
        FiniteGroup::from_table(format!("C{n}"), n, 0, table).unwrap()
    }

    /// S3 as permutations of three points, for non-nilpotent error paths.
    pub fn s3() -> FiniteGroup {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mut table = Vec::new();
        for a in &perms {
            for b in &perms {
                table.push(idx([b[a[0]], b[a[1]], b[a[2]]]) as u32);
            }
        }
        FiniteGroup::from_table("S3", 6, 0, table).unwrap()
    }
}
