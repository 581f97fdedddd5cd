use std::collections::BTreeMap;
use std::sync::Arc;

use super::{FiniteGroup, GroupParts, TableLaw, DEFAULT_CAP};
use crate::error::{Error, Result};

/// A subgroup stored as a sorted array of parent indices, together with a
/// small generating set found during construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent_order: usize,
    members: Vec<u32>,
    generators: Vec<usize>,
}

impl Subgroup {
    fn new(parent: &FiniteGroup, mut members: Vec<u32>, generators: Vec<usize>) -> Self {
        members.sort_unstable();
        assert!(
            parent.order() % members.len() == 0,
            "Lagrange violated: subgroup of order {} in group of order {}",
            members.len(),
            parent.order()
        );
        Subgroup { parent_order: parent.order(), members, generators }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent_order / self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.parent_order
    }

    pub fn members(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.members.iter().map(|&x| x as usize)
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&(x as u32)).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.parent_order];
        for &x in &self.members {
            m[x as usize] = true;
        }
        m
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x as usize))
    }

    pub fn same_members(&self, other: &Subgroup) -> bool {
        self.members == other.members
    }
}

/// Incremental closure: adding a generator re-expands only what is needed.
struct ClosureBuilder<'g> {
    group: &'g FiniteGroup,
    seen: Vec<bool>,
    members: Vec<u32>,
    generators: Vec<usize>,
}

impl<'g> ClosureBuilder<'g> {
    fn new(group: &'g FiniteGroup) -> Self {
        let mut seen = vec![false; group.order()];
        seen[group.identity()] = true;
        ClosureBuilder { group, seen, members: vec![group.identity() as u32], generators: Vec::new() }
    }

    fn add(&mut self, g: usize) -> bool {
        if self.seen[g] {
            return false;
        }
        self.generators.push(g);
        // Existing members times the new generator, then BFS with all gens.
        let mut queue: Vec<u32> = Vec::new();
        for i in 0..self.members.len() {
            let y = self.group.mul(self.members[i] as usize, g);
            if !self.seen[y] {
                self.seen[y] = true;
                self.members.push(y as u32);
                queue.push(y as u32);
            }
        }
        while let Some(x) = queue.pop() {
            for &s in &self.generators {
                let y = self.group.mul(x as usize, s);
                if !self.seen[y] {
                    self.seen[y] = true;
                    self.members.push(y as u32);
                    queue.push(y as u32);
                }
            }
        }
        true
    }

    fn finish(self) -> Subgroup {
        Subgroup::new(self.group, self.members, self.generators)
    }
}

impl FiniteGroup {
    /// Smallest subgroup containing `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subgroup {
        let mut b = ClosureBuilder::new(self);
        for &g in gens {
            b.add(g);
        }
        b.finish()
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[usize]) -> Subgroup {
        let mut b = ClosureBuilder::new(self);
        for &g in gens {
            b.add(g);
        }
        let mut i = 0;
        while i < b.generators.len() {
            let h = b.generators[i];
            for &g in self.generators() {
                let c = self.conjugate(h, g);
                b.add(c);
            }
            i += 1;
        }
        b.finish()
    }

    pub fn whole(&self) -> Subgroup {
        let members = (0..self.order() as u32).collect();
        Subgroup::new(self, members, self.generators().to_vec())
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::new(self, vec![self.identity() as u32], Vec::new())
    }

    /// Subgroup from an explicit member list; closure is verified.
    pub fn subgroup_from_members(&self, members: Vec<usize>) -> Result<Subgroup> {
        let mut b = ClosureBuilder::new(self);
        for &x in &members {
            b.add(x);
        }
        if b.members.len() != members.len() {
            return Err(Error::Precondition("member list is not closed under multiplication".into()));
        }
        Ok(b.finish())
    }

    fn filtered(&self, pred: impl Fn(usize) -> bool) -> Subgroup {
        let members: Vec<usize> = (0..self.order()).filter(|&x| pred(x)).collect();
        let mut b = ClosureBuilder::new(self);
        for &x in &members {
            b.add(x);
        }
        debug_assert_eq!(b.members.len(), members.len());
        b.finish()
    }

    pub fn center(&self) -> Subgroup {
        let gens = self.generators().to_vec();
        self.filtered(|x| gens.iter().all(|&g| self.commute(x, g)))
    }

    pub fn centralizer(&self, x: usize) -> Subgroup {
        self.filtered(|y| self.commute(x, y))
    }

    /// Elements of `a` commuting with `x`.
    pub fn centralizer_in(&self, a: &Subgroup, x: usize) -> Subgroup {
        let members: Vec<usize> = a.members().filter(|&y| self.commute(x, y)).collect();
        let mut b = ClosureBuilder::new(self);
        for &y in &members {
            b.add(y);
        }
        b.finish()
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let members: Vec<usize> = a.members().filter(|&x| b.contains(x)).collect();
        let mut cb = ClosureBuilder::new(self);
        for &x in &members {
            cb.add(x);
        }
        cb.finish()
    }

    /// The subgroup generated by `a` and `b`.
    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let gens: Vec<usize> = a.generators().iter().chain(b.generators()).copied().collect();
        self.closure(&gens)
    }

    pub fn is_normal(&self, n: &Subgroup) -> bool {
        n.generators().iter().all(|&h| self.generators().iter().all(|&g| n.contains(self.conjugate(h, g))))
    }

    pub fn is_abelian_subgroup(&self, a: &Subgroup) -> bool {
        let gens = a.generators();
        gens.iter().all(|&x| gens.iter().all(|&y| self.commute(x, y)))
    }

    /// Abelian and every nontrivial element of order `p`.
    pub fn is_elementary_abelian(&self, a: &Subgroup) -> bool {
        let Some(p) = self.p_group_prime() else {
            return a.is_trivial();
        };
        self.is_abelian_subgroup(a) && a.generators().iter().all(|&x| self.pow(x, p) == self.identity())
    }

    /// `[A, B]` for normal subgroups `A`, `B`.
    pub fn commutator_subgroup(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut comms = Vec::new();
        for &x in a.generators() {
            for &y in b.generators() {
                comms.push(self.commutator(x, y));
            }
        }
        self.normal_closure(&comms)
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let w = self.whole();
        self.commutator_subgroup(&w, &w)
    }

    /// `gamma_1 = G, gamma_{k+1} = [gamma_k, G]`, ending with the first
    /// trivial term. Fails when the series stabilizes above the identity.
    pub fn lower_central_series(&self) -> Result<Vec<Subgroup>> {
        let w = self.whole();
        let mut series = vec![w.clone()];
        loop {
            let last = series.last().unwrap();
            if last.is_trivial() {
                return Ok(series);
            }
            let next = self.commutator_subgroup(last, &w);
            if next.order() == last.order() {
                return Err(Error::Domain(format!(
                    "{} is not nilpotent: lower central series stabilizes at order {}",
                    self.name(),
                    next.order()
                )));
            }
            series.push(next);
        }
    }

    /// `a` as a group in its own right; element `i` is the `i`-th member
    /// and keeps its parent label.
    pub fn subgroup_group(&self, a: &Subgroup) -> FiniteGroup {
        let members: Vec<usize> = a.members().collect();
        let pos = |x: usize| a.members.binary_search(&(x as u32)).expect("closed subgroup");
        let k = members.len();
        let mut table = Vec::with_capacity(k * k);
        for &x in &members {
            for &y in &members {
                table.push(pos(self.mul(x, y)) as u32);
            }
        }
        let law = TableLaw::new(k, pos(self.identity()), table).expect("well-formed table");
        let labels = members.iter().flat_map(|&x| self.label(x).to_vec()).collect();
        let generators = a.generators().iter().map(|&g| pos(g)).collect();
        FiniteGroup::from_parts(
            GroupParts {
                name: format!("{}[{}]", self.name(), k),
                law: Arc::new(law),
                labels,
                label_width: self.label_width(),
                generators,
                tags: BTreeMap::new(),
            },
            DEFAULT_CAP,
        )
        .expect("subgroup fits under the cap")
    }

    pub fn nilpotency_class(&self) -> Result<usize> {
        Ok(self.lower_central_series()?.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use crate::group::fixtures::*;

    #[test]
    fn closure_of_identity_is_trivial() {
        let g = cyclic(9);
        assert!(g.closure(&[g.identity()]).is_trivial());
        assert_eq!(g.closure(&[3]).order(), 3);
        assert_eq!(g.closure(&[2]).order(), 9);
    }

    #[test]
    fn abelian_center_and_class() {
        let g = cyclic(9);
        assert!(g.center().is_whole());
        assert_eq!(g.nilpotency_class().unwrap(), 1);
        assert!(g.derived_subgroup().is_trivial());
        assert!(g.centralizer(g.identity()).is_whole());
    }

    #[test]
    fn non_nilpotent_is_a_domain_error() {
        let g = s3();
        assert!(g.nilpotency_class().is_err());
        assert_eq!(g.derived_subgroup().order(), 3);
        assert!(g.center().is_trivial());
    }

    #[test]
    fn normality() {
        let g = s3();
        let a3 = g.derived_subgroup();
        assert!(g.is_normal(&a3));
        let t = g.closure(&[1]);
        assert_eq!(t.order(), 2);
        assert!(!g.is_normal(&t));
        assert!(g.normal_closure(&[1]).is_whole());
    }

    #[test]
    fn subgroup_from_members_checks_closure() {
        let g = cyclic(9);
        assert!(g.subgroup_from_members(vec![0, 3, 6]).is_ok());
        assert!(g.subgroup_from_members(vec![0, 3]).is_err());
    }
}
