use std::collections::BTreeMap;
use std::sync::Arc;

use super::{FiniteGroup, GroupLaw, GroupParts, Subgroup, DEFAULT_CAP};
use crate::error::{Error, Result};

/// `G/N` together with the natural projection.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub group: FiniteGroup,
    /// Parent element -> coset index.
    pub projection: Arc<Vec<u32>>,
    /// Coset index -> smallest parent member.
    pub reps: Arc<Vec<u32>>,
}

struct QuotientLaw {
    parent: FiniteGroup,
    projection: Arc<Vec<u32>>,
    reps: Arc<Vec<u32>>,
}

impl GroupLaw for QuotientLaw {
    fn order(&self) -> usize {
        self.reps.len()
    }

    fn identity(&self) -> usize {
        self.projection[self.parent.identity()] as usize
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        let x = self.parent.mul(self.reps[a] as usize, self.reps[b] as usize);
        self.projection[x] as usize
    }

    fn inv(&self, a: usize) -> usize {
        self.projection[self.parent.inv(self.reps[a] as usize)] as usize
    }
}

impl Quotient {
    pub fn project(&self, x: usize) -> usize {
        self.projection[x] as usize
    }

    pub fn rep(&self, coset: usize) -> usize {
        self.reps[coset] as usize
    }

    /// Parent members of a coset, ascending.
    pub fn coset_members(&self, coset: usize) -> Vec<usize> {
        (0..self.projection.len()).filter(|&x| self.projection[x] as usize == coset).collect()
    }
}

impl FiniteGroup {
    /// `G/N`; coset indices follow the order of their smallest members and
    /// each coset is labelled by its representative's encoding.
    pub fn quotient(&self, n: &Subgroup) -> Result<Quotient> {
        self.quotient_named(n, format!("{}/N{}", self.name(), n.order()))
    }

    pub fn quotient_named(&self, n: &Subgroup, name: String) -> Result<Quotient> {
        if !self.is_normal(n) {
            return Err(Error::NotNormal);
        }
        let order = self.order();
        let unset = u32::MAX;
        let mut projection = vec![unset; order];
        let mut reps = Vec::with_capacity(order / n.order());
        let normal: Vec<usize> = n.members().collect();
        for g in 0..order {
            if projection[g] != unset {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g as u32);
            for &h in &normal {
                projection[self.mul(g, h)] = id;
            }
        }
        let labels = reps.iter().flat_map(|&r| self.label(r as usize).to_vec()).collect();
        let projection = Arc::new(projection);
        let reps = Arc::new(reps);
        let law = Arc::new(QuotientLaw { parent: self.clone(), projection: Arc::clone(&projection), reps: Arc::clone(&reps) });
        let mut generators: Vec<usize> = self.generators().iter().map(|&g| projection[g] as usize).collect();
        generators.sort_unstable();
        generators.dedup();
        let identity_coset = projection[self.identity()] as usize;
        generators.retain(|&g| g != identity_coset);
        let tags: BTreeMap<String, usize> =
            self.tags().iter().map(|(k, &v)| (k.clone(), projection[v] as usize)).collect();
        let group = FiniteGroup::from_parts(
            GroupParts { name, law, labels, label_width: self.label_width(), generators, tags },
            DEFAULT_CAP,
        )?;
        Ok(Quotient { group, projection, reps })
    }

    /// `G/Z(G)`.
    pub fn central_quotient(&self) -> Result<Quotient> {
        let z = self.center();
        self.quotient_named(&z, format!("{}/Z", self.name()))
    }
}
