use serde::Serialize;

use super::{FiniteGroup, Subgroup};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    /// One entry per class, in order of smallest member.
    pub class_sizes: Vec<usize>,
    /// Distinct class sizes, ascending.
    pub conjugate_type: Vec<usize>,
    /// Smallest member of each class.
    pub class_reps: Vec<usize>,
    #[serde(skip)]
    pub class_of: Vec<u32>,
}

impl ConjugacyReport {
    pub fn class_count(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_size_of(&self, x: usize) -> usize {
        self.class_sizes[self.class_of[x] as usize]
    }

    /// Number of classes of each distinct size, aligned with `conjugate_type`.
    pub fn size_multiplicities(&self) -> Vec<usize> {
        self.conjugate_type
            .iter()
            .map(|s| self.class_sizes.iter().filter(|&&t| t == *s).count())
            .collect()
    }
}

impl FiniteGroup {
    /// Orbit of `x` under conjugation by the distinguished generators.
    pub fn conjugacy_class(&self, x: usize) -> Vec<usize> {
        let mut orbit = vec![x];
        let mut i = 0;
        while i < orbit.len() {
            let y = orbit[i];
            for &g in self.generators() {
                let z = self.conjugate(y, g);
                if !orbit.contains(&z) {
                    orbit.push(z);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbits of the conjugation action, found by expanding under the
    /// generating set; work is `O(order * generators)`.
    pub fn conjugacy_classes(&self) -> ConjugacyReport {
        let n = self.order();
        let unset = u32::MAX;
        let mut class_of = vec![unset; n];
        let mut class_sizes = Vec::new();
        let mut class_reps = Vec::new();
        let mut queue = Vec::new();
        for x in 0..n {
            if class_of[x] != unset {
                continue;
            }
            let id = class_sizes.len() as u32;
            class_of[x] = id;
            queue.clear();
            queue.push(x);
            let mut size = 1;
            while let Some(y) = queue.pop() {
                for &g in self.generators() {
                    let z = self.conjugate(y, g);
                    if class_of[z] == unset {
                        class_of[z] = id;
                        queue.push(z);
                        size += 1;
                    }
                }
            }
            class_sizes.push(size);
            class_reps.push(x);
        }
        let mut conjugate_type = class_sizes.clone();
        conjugate_type.sort_unstable();
        conjugate_type.dedup();
        ConjugacyReport { class_sizes, conjugate_type, class_reps, class_of }
    }

    /// `log_p [G : C_G(x)]`.
    pub fn breadth(&self, x: usize) -> Result<u32> {
        let size = self.conjugacy_class(x).len();
        self.log_p(size).ok_or_else(|| Error::Precondition(format!("{} is not a p-group", self.name())))
    }

    /// `log_p [A : C_A(x)]`.
    pub fn breadth_in(&self, a: &Subgroup, x: usize) -> Result<u32> {
        let c = a.members().filter(|&y| self.commute(x, y)).count();
        self.log_p(a.order() / c).ok_or_else(|| Error::Precondition(format!("{} is not a p-group", self.name())))
    }

    /// Elements of maximal breadth relative to an abelian normal subgroup `a`.
    pub fn breadth_set(&self, a: &Subgroup) -> Result<Vec<usize>> {
        if !self.is_normal(a) {
            return Err(Error::NotNormal);
        }
        if !self.is_abelian_subgroup(a) {
            return Err(Error::Precondition("breadth set needs an abelian subgroup".into()));
        }
        let breadths: Vec<u32> = (0..self.order()).map(|x| self.breadth_in(a, x)).collect::<Result<_>>()?;
        let max = breadths.iter().copied().max().unwrap_or(0);
        Ok((0..self.order()).filter(|&x| breadths[x] == max).collect())
    }

    /// True iff `xG' = x^G` for every `x` outside `G'`. Needs `1 < G' < G`.
    pub fn camina_check(&self) -> Result<bool> {
        let derived = self.derived_subgroup();
        if derived.is_trivial() {
            return Err(Error::Degenerate(format!("{} is abelian", self.name())));
        }
        if derived.is_whole() {
            return Err(Error::Degenerate(format!("{} is perfect", self.name())));
        }
        let report = self.conjugacy_classes();
        for (&rep, &size) in report.class_reps.iter().zip(&report.class_sizes) {
            if derived.contains(rep) {
                continue;
            }
            if size != derived.order() {
                return Ok(false);
            }
            // the class lies in the coset, so equal sizes mean equal sets
            let rep_inv = self.inv(rep);
            let inside = self.conjugacy_class(rep).into_iter().all(|y| derived.contains(self.mul(rep_inv, y)));
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
