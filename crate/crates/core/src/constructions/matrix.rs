//! Lower unitriangular matrices over a table-driven finite field, and groups
//! built as closures of a generating set of such matrices.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldTables;
use crate::group::{FiniteGroup, GroupLaw, GroupParts};

/// Position of entry `(row, col)` (1-based, `row > col`) in the row-major list
/// of below-diagonal entries.
pub fn entry_pos(row: usize, col: usize) -> usize {
    debug_assert!(row > col && col >= 1);
    (row - 1) * (row - 2) / 2 + (col - 1)
}

/// Below-diagonal entries in row-major order, each a field element index.
pub type Entries = Vec<u8>;

#[derive(Clone)]
pub struct MatrixRing {
    pub dim: usize,
    pub field: Arc<FieldTables>,
}

impl MatrixRing {
    pub fn width(&self) -> usize {
        self.dim * (self.dim - 1) / 2
    }

    pub fn identity(&self) -> Entries {
        vec![0; self.width()]
    }

    fn get(&self, m: &[u8], row: usize, col: usize) -> u8 {
        if row == col {
            1
        } else {
            m[entry_pos(row, col)]
        }
    }

    pub fn mul(&self, a: &[u8], b: &[u8]) -> Entries {
        let f = &self.field;
        let mut out = vec![0u8; self.width()];
        for r in 2..=self.dim {
            for c in 1..r {
                let mut acc = f.add(a[entry_pos(r, c)], b[entry_pos(r, c)]);
                for k in c + 1..r {
                    acc = f.add(acc, f.mul(a[entry_pos(r, k)], b[entry_pos(k, c)]));
                }
                out[entry_pos(r, c)] = acc;
            }
        }
        out
    }

    pub fn inv(&self, a: &[u8]) -> Entries {
        // X = A^-1 column by column: X[r][c] = -sum_{c<=k<r} A[r][k] X[k][c]
        let f = &self.field;
        let mut x = vec![0u8; self.width()];
        for c in 1..self.dim {
            for r in c + 1..=self.dim {
                let mut acc = 0u8;
                for k in c..r {
                    let xkc = if k == c { 1 } else { x[entry_pos(k, c)] };
                    acc = f.add(acc, f.mul(self.get(a, r, k), xkc));
                }
                x[entry_pos(r, c)] = f.neg(acc);
            }
        }
        x
    }
}

/// A matrix group enumerated by closure. Elements are looked up through a
/// dense index over `key_positions` (the free coordinates of the pattern).
pub struct MatrixLaw {
    ring: MatrixRing,
    elements: Vec<u8>,
    key_positions: Vec<usize>,
    dense: Vec<u32>,
}

impl MatrixLaw {
    fn key(&self, m: &[u8]) -> usize {
        let q = self.ring.field.q();
        self.key_positions.iter().rev().fold(0, |acc, &p| acc * q + m[p] as usize)
    }

    pub fn entries(&self, a: usize) -> &[u8] {
        let w = self.ring.width();
        &self.elements[a * w..(a + 1) * w]
    }

    pub fn lookup(&self, m: &[u8]) -> Option<usize> {
        let i = self.dense[self.key(m)];
        (i != u32::MAX && self.entries(i as usize) == m).then_some(i as usize)
    }
}

impl GroupLaw for MatrixLaw {
    fn order(&self) -> usize {
        self.elements.len() / self.ring.width()
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        let prod = self.ring.mul(self.entries(a), self.entries(b));
        self.lookup(&prod).expect("matrix group is closed under multiplication")
    }

    fn inv(&self, a: usize) -> usize {
        let inv = self.ring.inv(self.entries(a));
        self.lookup(&inv).expect("matrix group is closed under inversion")
    }
}

pub struct MatrixGroupBuilder {
    pub name: String,
    pub ring: MatrixRing,
    pub generators: Vec<(String, Entries)>,
    /// Coordinates that determine an element; all others must be functions of
    /// these for the dense index to be injective.
    pub key_positions: Vec<usize>,
    /// Membership predicate asserted for every product formed during closure.
    pub pattern: Option<Box<dyn Fn(&[u8]) -> bool + Send + Sync>>,
    pub cap: usize,
}

impl MatrixGroupBuilder {
    /// Breadth-first closure from the identity; indices follow discovery order.
    pub fn build(self) -> Result<(FiniteGroup, Arc<MatrixLaw>)> {
        let MatrixGroupBuilder { name, ring, generators, key_positions, pattern, cap } = self;
        let q = ring.field.q();
        let dense_len = q
            .checked_pow(key_positions.len() as u32)
            .filter(|&n| n <= 64 * cap)
            .ok_or(Error::CapExceeded { order: (q as u128).pow(key_positions.len() as u32), cap })?;
        let w = ring.width();
        let check = |m: &[u8]| -> Result<()> {
            match &pattern {
                Some(p) if !p(m) => Err(Error::Construction(format!("{name}: product {m:?} leaves the pattern"))),
                _ => Ok(()),
            }
        };
        let mut law = MatrixLaw { ring, elements: Vec::new(), key_positions, dense: vec![u32::MAX; dense_len] };
        let id = law.ring.identity();
        let id_key = law.key(&id);
        law.dense[id_key] = 0;
        law.elements.extend_from_slice(&id);
        for (_, g) in &generators {
            check(g)?;
        }
        let mut frontier = 0usize;
        while frontier < law.elements.len() / w {
            let current = law.entries(frontier).to_vec();
            for (_, g) in &generators {
                let prod = law.ring.mul(&current, g);
                check(&prod)?;
                let key = law.key(&prod);
                match law.dense[key] {
                    u32::MAX => {
                        let idx = law.elements.len() / w;
                        if idx >= cap {
                            return Err(Error::CapExceeded { order: idx as u128 + 1, cap });
                        }
                        law.dense[key] = idx as u32;
                        law.elements.extend_from_slice(&prod);
                    }
                    i => {
                        if law.entries(i as usize) != prod.as_slice() {
                            return Err(Error::Construction(format!(
                                "{name}: key coordinates do not determine {prod:?}"
                            )));
                        }
                    }
                }
            }
            frontier += 1;
        }
        let mut tags = BTreeMap::new();
        let mut gen_idx = Vec::new();
        for (tag, g) in &generators {
            let i = law.lookup(g).expect("generator is enumerated");
            tags.insert(tag.clone(), i);
            gen_idx.push(i);
        }
        let law = Arc::new(law);
        let labels = law.elements.clone();
        let group = FiniteGroup::from_parts(
            GroupParts { name, law: law.clone(), labels, label_width: w, generators: gen_idx, tags },
            cap,
        )?;
        Ok((group, law))
    }
}
