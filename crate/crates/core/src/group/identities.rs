use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FiniteGroup;
use crate::error::{Error, Result};

/// Orders up to this bound are checked over every triple.
pub const EXHAUSTIVE_IDENTITY_LIMIT: usize = 300;

const MAX_RECORDED_FAILURES: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityFailure {
    pub identity: &'static str,
    pub elements: Vec<usize>,
    pub exponents: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub exhaustive: bool,
    pub tuples_checked: u64,
    pub failure_count: u64,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

struct Checker<'g> {
    g: &'g FiniteGroup,
    central: Vec<bool>,
    comm: Option<Vec<u32>>,
    p: u64,
    report: IdentityReport,
}

impl<'g> Checker<'g> {
    fn comm(&self, a: usize, b: usize) -> usize {
        match &self.comm {
            Some(t) => t[a * self.g.order() + b] as usize,
            None => self.g.commutator(a, b),
        }
    }

    fn fail(&mut self, identity: &'static str, elements: Vec<usize>, exponents: Vec<u64>) {
        self.report.failure_count += 1;
        if self.report.failures.len() < MAX_RECORDED_FAILURES {
            self.report.failures.push(IdentityFailure { identity, elements, exponents });
        }
    }

    fn check_triple(&mut self, a: usize, b: usize, c: usize, (i, j, k): (u64, u64, u64)) {
        let g = self.g;
        let e = g.identity();
        let (ab, ac, bc) = (self.comm(a, b), self.comm(a, c), self.comm(b, c));
        let abc = self.comm(ab, c);

        // [a,c], [b,c] central  =>  [a,b,c] = 1
        if self.central[ac] && self.central[bc] && abc != e {
            self.fail("hall_witt_central", vec![a, b, c], vec![]);
        }
        // [a,b] central  =>  [[a,t],b] = [[b,t],a]   (t = c)
        if self.central[ab] {
            let lhs = self.comm(self.comm(a, c), b);
            let rhs = self.comm(self.comm(b, c), a);
            if lhs != rhs {
                self.fail("central_pair_symmetry", vec![a, b, c], vec![]);
            }
        }
        // [ab,c] = [a,c][b,c][a,c,b]
        let lhs = self.comm(g.mul(a, b), c);
        let rhs = g.mul(g.mul(ac, bc), self.comm(ac, b));
        if lhs != rhs {
            self.fail("product_left", vec![a, b, c], vec![]);
        }
        // [a,bc] = [a,b][a,c][a,b,c]
        let lhs = self.comm(a, g.mul(b, c));
        let rhs = g.mul(g.mul(ab, ac), abc);
        if lhs != rhs {
            self.fail("product_right", vec![a, b, c], vec![]);
        }
        // [a^i,b^j,c^k] = [a,b,c]^(ijk)
        let lhs = self.comm(self.comm(g.pow(a, i), g.pow(b, j)), g.pow(c, k));
        if lhs != g.pow(abc, i * j * k) {
            self.fail("power_trilinear", vec![a, b, c], vec![i, j, k]);
        }
        self.report.tuples_checked += 1;
    }

    fn check_pair_power(&mut self, a: usize, b: usize, s: u64) {
        let g = self.g;
        let ab = self.comm(a, b);
        let binom = s * s.saturating_sub(1) / 2;
        // [a^s,b] = [a,b]^s [a,b,a]^C(s,2)
        let lhs = self.comm(g.pow(a, s), b);
        let rhs = g.mul(g.pow(ab, s), g.pow(self.comm(ab, a), binom));
        if lhs != rhs {
            self.fail("power_left", vec![a, b], vec![s]);
        }
        // [a,b^s] = [a,b]^s [a,b,b]^C(s,2)
        let lhs = self.comm(a, g.pow(b, s));
        let rhs = g.mul(g.pow(ab, s), g.pow(self.comm(ab, b), binom));
        if lhs != rhs {
            self.fail("power_right", vec![a, b], vec![s]);
        }
    }
}

impl FiniteGroup {
    /// Checks the class-3 commutator calculus: the Hall-Witt consequence
    /// `[x,z],[y,z] central => [x,y,z]=1`, the symmetry
    /// `[a,b] central => [[a,t],b]=[[b,t],a]`, the product expansions and the
    /// power rules. Exhaustive over all triples for orders up to
    /// [`EXHAUSTIVE_IDENTITY_LIMIT`], otherwise over `samples` random tuples.
    pub fn check_class3_identities(&self, samples: usize, seed: u64) -> Result<IdentityReport> {
        let class = self.nilpotency_class()?;
        if class > 3 {
            return Err(Error::Precondition(format!("{} has class {class} > 3", self.name())));
        }
        let n = self.order();
        let exhaustive = n <= EXHAUSTIVE_IDENTITY_LIMIT;
        let p = self.p_group_prime().unwrap_or(1);
        let comm = exhaustive.then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(self.commutator(a, b) as u32);
                }
            }
            t
        });
        let mut ck = Checker {
            g: self,
            central: self.center().mask(),
            comm,
            p,
            report: IdentityReport { exhaustive, tuples_checked: 0, failure_count: 0, failures: Vec::new() },
        };
        let p = ck.p;
        if exhaustive {
            let mut t = 0u64;
            for a in 0..n {
                for b in 0..n {
                    for s in 0..p {
                        ck.check_pair_power(a, b, s);
                    }
                    for c in 0..n {
                        // exponent triples rotate through all of (0..p)^3
                        let exps = (t % p, (t / p) % p, (t / (p * p)) % p);
                        ck.check_triple(a, b, c, exps);
                        t += 1;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                let exps = (rng.gen_range(0..p), rng.gen_range(0..p), rng.gen_range(0..p));
                ck.check_triple(a, b, c, exps);
                ck.check_pair_power(a, b, rng.gen_range(0..p));
            }
        }
        Ok(ck.report)
    }
}
