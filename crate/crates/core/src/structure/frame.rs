//! Generator frames `x_i, y_i, h_i, z_l` and the exponent tensors of the
//! presentation they satisfy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Check;
use crate::error::{Error, Result};
use crate::field::{structure_constants, FieldSpec, KappaTensor};
use crate::group::{FiniteGroup, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftStrategy {
    /// Use the construction's `x_i`, `y_i` tags.
    Coordinate,
    /// Reconstruct the field from commutators and search in index order.
    Generic,
}

/// Group data a frame lives in: the ambient group, its center and derived
/// subgroup, and the field fixing `alpha` and `kappa`.
#[derive(Clone, Debug)]
pub struct FrameContext {
    pub group: FiniteGroup,
    pub field: FieldSpec,
    pub center: Subgroup,
    pub derived: Subgroup,
}

impl FrameContext {
    pub fn new(group: &FiniteGroup, field: &FieldSpec) -> Result<Self> {
        let p = group.p_group_prime();
        if p != Some(field.p() as u64) {
            return Err(Error::Precondition(format!("{} is not a {}-group", group.name(), field.p())));
        }
        let derived = group.derived_subgroup();
        let q = field.order();
        if derived.index() != q * q {
            return Err(Error::Precondition(format!("[G:G'] = {}, expected {}", derived.index(), q * q)));
        }
        Ok(FrameContext { group: group.clone(), field: field.clone(), center: group.center(), derived })
    }

    pub fn m(&self) -> usize {
        self.field.m()
    }

    pub fn p(&self) -> u64 {
        self.field.p() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorFrame {
    pub strategy: LiftStrategy,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub h: Vec<usize>,
    pub z: Vec<usize>,
    /// Elements of G' multiplied onto `x_j` / `y_j` to make them commute
    /// with `x_1` / `y_1`; identity when no correction was needed.
    pub x_corrections: Vec<usize>,
    pub y_corrections: Vec<usize>,
}

/// Smallest-index `h` in G' with `[u, vh] = 1`.
pub fn find_central_correction(ctx: &FrameContext, u: usize, v: usize) -> Result<usize> {
    let g = &ctx.group;
    if ctx.derived.contains(u) || ctx.derived.contains(v) {
        return Err(Error::Precondition("u and v must lie outside G'".into()));
    }
    let c = g.commutator(u, v);
    if !ctx.center.contains(c) {
        return Err(Error::Precondition(format!("[u,v] = {c} is not central")));
    }
    if c == g.identity() {
        return Ok(g.identity());
    }
    ctx.derived.members().find(|&h| g.commutator(u, g.mul(v, h)) == g.identity()).ok_or_else(|| {
        Error::TheoremViolation(format!("no h in G' with [u, vh] = 1 for u = {u}, v = {v}"))
    })
}

fn complete(ctx: &FrameContext, strategy: LiftStrategy, mut x: Vec<usize>, mut y: Vec<usize>) -> Result<GeneratorFrame> {
    let g = &ctx.group;
    let m = ctx.m();
    let mut x_corrections = vec![g.identity(); m];
    let mut y_corrections = vec![g.identity(); m];
    for j in 1..m {
        let hx = find_central_correction(ctx, x[0], x[j])?;
        x[j] = g.mul(x[j], hx);
        x_corrections[j] = hx;
        let hy = find_central_correction(ctx, y[0], y[j])?;
        y[j] = g.mul(y[j], hy);
        y_corrections[j] = hy;
    }
    let h: Vec<usize> = y.iter().map(|&yi| g.commutator(x[0], yi)).collect();
    let z: Vec<usize> =
        x.iter().map(|&xi| g.commutator(h[0], xi)).chain(y.iter().map(|&yi| g.commutator(h[0], yi))).collect();
    Ok(GeneratorFrame { strategy, x, y, h, z, x_corrections, y_corrections })
}

fn coordinate_lift(ctx: &FrameContext) -> Result<GeneratorFrame> {
    let g = &ctx.group;
    let tag = |name: String| {
        g.tag(&name).ok_or_else(|| Error::Precondition(format!("{} has no coordinate tag {name}", g.name())))
    };
    let m = ctx.m();
    let x = (1..=m).map(|i| tag(format!("x{i}"))).collect::<Result<Vec<_>>>()?;
    let y = (1..=m).map(|i| tag(format!("y{i}"))).collect::<Result<Vec<_>>>()?;
    complete(ctx, LiftStrategy::Coordinate, x, y)
}

/// `G'/Z` as a field: elements are coset keys (smallest member index).
struct CommutatorField<'a> {
    ctx: &'a FrameContext,
    key: BTreeMap<usize, usize>,
    /// key -> first `u` with `[x_1,u]` central and `[u,y_1]` in that coset
    u: BTreeMap<usize, usize>,
    /// key -> first `w` with `[y_1,w]` central and `[x_1,w]` in that coset
    w: BTreeMap<usize, usize>,
}

impl<'a> CommutatorField<'a> {
    fn new(ctx: &'a FrameContext, x1: usize, y1: usize) -> Self {
        let g = &ctx.group;
        let mut key = BTreeMap::new();
        for a in ctx.derived.members() {
            let k = ctx.center.members().map(|z| g.mul(a, z)).min().unwrap();
            key.insert(a, k);
        }
        let mut u = BTreeMap::new();
        let mut w = BTreeMap::new();
        for e in 0..g.order() {
            if ctx.center.contains(g.commutator(x1, e)) {
                if let Some(&k) = key.get(&g.commutator(e, y1)) {
                    u.entry(k).or_insert(e);
                }
            }
            if ctx.center.contains(g.commutator(y1, e)) {
                if let Some(&k) = key.get(&g.commutator(x1, e)) {
                    w.entry(k).or_insert(e);
                }
            }
        }
        CommutatorField { ctx, key, u, w }
    }

    fn k(&self, a: usize) -> usize {
        self.key[&a]
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.k(self.ctx.group.mul(a, b))
    }

    fn scale(&self, c: u32, a: usize) -> usize {
        self.k(self.ctx.group.pow(a, c as u64))
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.k(self.ctx.group.commutator(self.u[&a], self.w[&b]))
    }

    fn keys(&self) -> Vec<usize> {
        let mut ks: Vec<usize> = self.key.values().copied().collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

fn try_generic(ctx: &FrameContext, x1: usize, y1: usize) -> Result<GeneratorFrame> {
    let g = &ctx.group;
    let m = ctx.m();
    let f = CommutatorField::new(ctx, x1, y1);
    let q = ctx.field.order();
    if f.keys().len() != q || f.u.len() != q || f.w.len() != q {
        return Err(Error::TheoremViolation(format!("G'/Z does not carry a field of order {q} from x1 = {x1}, y1 = {y1}")));
    }
    let zero = f.k(g.identity());
    let one = f.k(g.commutator(x1, y1));
    let modulus = ctx.field.modulus();
    let powers = |a: usize, count: usize| {
        let mut out = vec![one];
        while out.len() < count {
            out.push(f.mul(*out.last().unwrap(), a));
        }
        out
    };
    let alpha = f
        .keys()
        .into_iter()
        .find(|&a| {
            let pw = powers(a, m + 1);
            pw.iter().zip(modulus).fold(zero, |acc, (&t, &c)| f.add(acc, f.scale(c, t))) == zero
        })
        .ok_or_else(|| Error::TheoremViolation("modulus has no root in G'/Z".into()))?;
    let basis = powers(alpha, m);
    let x: Vec<usize> = basis.iter().enumerate().map(|(i, b)| if i == 0 { x1 } else { f.u[b] }).collect();
    let y: Vec<usize> = basis.iter().enumerate().map(|(i, b)| if i == 0 { y1 } else { f.w[b] }).collect();
    let frame = complete(ctx, LiftStrategy::Generic, x, y)?;
    let failed: Vec<String> = verify_frame(ctx, &frame).into_iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(frame)
    } else {
        Err(Error::TheoremViolation(format!("frame from x1 = {x1} fails {}", failed.join(", "))))
    }
}

fn generic_lift(ctx: &FrameContext) -> Result<GeneratorFrame> {
    let g = &ctx.group;
    let zn = ctx.center.order();
    let mut last = None;
    for x1 in 0..g.order() {
        if ctx.derived.contains(x1) || ctx.derived.members().filter(|&a| g.commute(x1, a)).count() != zn {
            continue;
        }
        let Some(y1) = (0..g.order()).find(|&y| !ctx.center.contains(g.commutator(x1, y))) else {
            continue;
        };
        match try_generic(ctx, x1, y1) {
            Ok(frame) => return Ok(frame),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::TheoremViolation("no x1 with C_G'(x1) = Z".into())))
}

pub fn lift_generator_frame(ctx: &FrameContext, strategy: LiftStrategy) -> Result<GeneratorFrame> {
    match strategy {
        LiftStrategy::Coordinate => coordinate_lift(ctx),
        LiftStrategy::Generic => generic_lift(ctx),
    }
}

/// The same frame with `x_1` multiplied by the first nontrivial central
/// element.
pub fn shifted_frame(ctx: &FrameContext, frame: &GeneratorFrame) -> Result<GeneratorFrame> {
    let g = &ctx.group;
    let c = ctx
        .center
        .members()
        .find(|&c| c != g.identity())
        .ok_or_else(|| Error::Precondition("trivial center".into()))?;
    let mut x = frame.x.clone();
    x[0] = g.mul(x[0], c);
    let shifted = complete(ctx, frame.strategy, x, frame.y.clone())?;
    Ok(shifted)
}

/// Checks every frame invariant.
pub fn verify_frame(ctx: &FrameContext, f: &GeneratorFrame) -> Vec<Check> {
    let g = &ctx.group;
    let m = ctx.m();
    let e = g.identity();
    let mut out = Vec::new();
    let shape = f.x.len() == m && f.y.len() == m && f.h.len() == m && f.z.len() == 2 * m;
    out.push(Check::new("frame_shape", shape, format!("m = {m}, |x| = {}, |z| = {}", f.x.len(), f.z.len())));
    if !shape {
        return out;
    }
    let bad = (0..m).find(|&i| {
        g.commutator(f.x[0], f.y[i]) != f.h[i]
            || g.commutator(f.h[0], f.x[i]) != f.z[i]
            || g.commutator(f.h[0], f.y[i]) != f.z[m + i]
    });
    out.push(Check::new(
        "h_and_z_are_commutators",
        bad.is_none(),
        bad.map_or("[x1,y_i] = h_i, [h1,x_i] = z_i, [h1,y_i] = z_(m+i)".into(), |i| format!("fails at i = {}", i + 1)),
    ));
    let bad = (1..m).find(|&j| g.commutator(f.x[0], f.x[j]) != e || g.commutator(f.y[0], f.y[j]) != e);
    out.push(Check::new(
        "first_generators_commute",
        bad.is_none(),
        bad.map_or("[x1,x_j] = [y1,y_j] = 1".into(), |j| format!("fails at j = {}", j + 1)),
    ));
    let mut gens: Vec<usize> = f.x.iter().chain(&f.y).copied().collect();
    gens.extend_from_slice(ctx.derived.generators());
    let top = g.closure(&gens).order();
    out.push(Check::new("xy_generate_mod_derived", top == g.order(), format!("<x, y, G'> has order {top}")));
    let mut gens = f.h.clone();
    gens.extend_from_slice(ctx.center.generators());
    let mid = g.closure(&gens);
    out.push(Check::new(
        "h_generate_derived_mod_center",
        mid.same_members(&ctx.derived),
        format!("<h, Z> has order {}, |G'| = {}", mid.order(), ctx.derived.order()),
    ));
    let zs = g.closure(&f.z);
    let expected = (ctx.p() as usize).pow(2 * m as u32);
    out.push(Check::new(
        "z_independent_generate_center",
        zs.same_members(&ctx.center) && zs.order() == expected,
        format!("<z> has order {}, p^(2m) = {expected}, |Z| = {}", zs.order(), ctx.center.order()),
    ));
    out
}

/// Discrete logs in the elementary abelian group `<z_1> x ... x <z_2m>`.
pub struct ZBasis {
    p: u64,
    z: Vec<usize>,
    coords: BTreeMap<usize, Vec<u32>>,
}

impl ZBasis {
    pub fn new(g: &FiniteGroup, z: &[usize], p: u64) -> Result<Self> {
        let mut coords = BTreeMap::new();
        let k = z.len();
        let total = (p as usize).pow(k as u32);
        for idx in 0..total {
            let mut e = vec![0u32; k];
            let mut r = idx;
            for slot in e.iter_mut() {
                *slot = (r % p as usize) as u32;
                r /= p as usize;
            }
            let x = word(g, z, &e);
            if coords.insert(x, e).is_some() {
                return Err(Error::TheoremViolation("z_1..z_2m are not independent".into()));
            }
        }
        Ok(ZBasis { p, z: z.to_vec(), coords })
    }

    pub fn coords(&self, x: usize) -> Option<&[u32]> {
        self.coords.get(&x).map(Vec::as_slice)
    }

    pub fn word(&self, g: &FiniteGroup, e: &[u32]) -> usize {
        word(g, &self.z, e)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// `prod g_k^{e_k}` in index order.
fn word(g: &FiniteGroup, gens: &[usize], e: &[u32]) -> usize {
    gens.iter().zip(e).fold(g.identity(), |acc, (&x, &k)| g.mul(acc, g.pow(x, k as u64)))
}

type Tensor3 = Vec<Vec<Vec<u32>>>;

/// Exponent vectors in the basis `z_1..z_2m` (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationParams {
    pub p: u64,
    pub m: usize,
    pub modulus: Vec<u32>,
    pub kappa: Tensor3,
    /// `[x_i, x_j]`
    pub alpha: Tensor3,
    /// `[y_i, y_j]`
    pub beta: Tensor3,
    /// `[h_i, x_j]`
    pub gamma: Tensor3,
    /// `[h_i, y_j]`
    pub delta: Tensor3,
    /// `[x_i, y_j] [x_1, prod_k y_k^kappa_ijk]^-1`
    pub lambda: Tensor3,
    /// `[x_j, y_i] [prod_k x_k^kappa_ijk, y_1]^-1`
    pub mu: Tensor3,
    /// `x_i^p`
    pub epsilon: Vec<Vec<u32>>,
    /// `y_i^p`
    pub nu: Vec<Vec<u32>>,
}

impl PresentationParams {
    /// The tensors required to agree between frames, by name.
    pub fn frame_invariant_parts(&self) -> [(&'static str, &Tensor3); 6] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
            ("lambda", &self.lambda),
            ("mu", &self.mu),
        ]
    }
}

pub fn extract_presentation_params(ctx: &FrameContext, f: &GeneratorFrame) -> Result<PresentationParams> {
    let g = &ctx.group;
    let m = ctx.m();
    let p = ctx.p();
    let zb = ZBasis::new(g, &f.z, p)?;
    let kappa = structure_constants(&ctx.field);
    let log = |what: &str, i: usize, j: usize, x: usize| -> Result<Vec<u32>> {
        zb.coords(x).map(<[u32]>::to_vec).ok_or_else(|| {
            Error::TheoremViolation(format!("{what} at (i,j) = ({},{}) is element {x}, outside <z>", i + 1, j + 1))
        })
    };
    let kv = |i: usize, j: usize| kappa.vector(i, j).to_vec();
    let mut t: [Tensor3; 6] = Default::default();
    for slot in t.iter_mut() {
        *slot = vec![vec![Vec::new(); m]; m];
    }
    let [alpha, beta, gamma, delta, lambda, mu] = &mut t;
    for i in 0..m {
        for j in 0..m {
            alpha[i][j] = log("[x_i,x_j]", i, j, g.commutator(f.x[i], f.x[j]))?;
            beta[i][j] = log("[y_i,y_j]", i, j, g.commutator(f.y[i], f.y[j]))?;
            gamma[i][j] = log("[h_i,x_j]", i, j, g.commutator(f.h[i], f.x[j]))?;
            delta[i][j] = log("[h_i,y_j]", i, j, g.commutator(f.h[i], f.y[j]))?;
            let yk = word(g, &f.y, &kv(i, j));
            let r7 = g.mul(g.commutator(f.x[i], f.y[j]), g.inv(g.commutator(f.x[0], yk)));
            lambda[i][j] = log("relation for [x_i,y_j]", i, j, r7)?;
            let xk = word(g, &f.x, &kv(i, j));
            let r8 = g.mul(g.commutator(f.x[j], f.y[i]), g.inv(g.commutator(xk, f.y[0])));
            mu[i][j] = log("relation for [x_j,y_i]", i, j, r8)?;
        }
    }
    let epsilon = (0..m).map(|i| log("x_i^p", i, i, g.pow(f.x[i], p))).collect::<Result<_>>()?;
    let nu = (0..m).map(|i| log("y_i^p", i, i, g.pow(f.y[i], p))).collect::<Result<_>>()?;
    let [alpha, beta, gamma, delta, lambda, mu] = t;
    Ok(PresentationParams {
        p,
        m,
        modulus: ctx.field.modulus().to_vec(),
        kappa: kappa.to_nested(),
        alpha,
        beta,
        gamma,
        delta,
        lambda,
        mu,
        epsilon,
        nu,
    })
}

fn kappa_word(g: &FiniteGroup, zs: &[usize], kappa: &KappaTensor, i: usize, j: usize) -> usize {
    word(g, zs, kappa.vector(i, j))
}

/// `[h_i,x_j] = [h_j,x_i] = prod_l z_l^kappa_ijl` and the same for `y` with
/// `z_(m+l)`, for all `i, j`.
pub fn verify_kappa_words(ctx: &FrameContext, f: &GeneratorFrame) -> Check {
    let g = &ctx.group;
    let m = ctx.m();
    let kappa = structure_constants(&ctx.field);
    let (zx, zy) = f.z.split_at(m);
    for i in 0..m {
        for j in 0..m {
            let wx = kappa_word(g, zx, &kappa, i, j);
            let wy = kappa_word(g, zy, &kappa, i, j);
            let ok = g.commutator(f.h[i], f.x[j]) == wx
                && g.commutator(f.h[j], f.x[i]) == wx
                && g.commutator(f.h[i], f.y[j]) == wy
                && g.commutator(f.h[j], f.y[i]) == wy;
            if !ok {
                return Check::new(
                    "kappa_words",
                    false,
                    format!("(i,j) = ({},{}): commutators differ from the kappa word {:?}", i + 1, j + 1, kappa.vector(i, j)),
                );
            }
        }
    }
    Check::new("kappa_words", true, format!("all {} (i,j) pairs, both families", m * m))
}

/// `[x_i,x_j]` in `<z_1..z_m>` and `[y_i,y_j]` in `<z_(m+1)..z_2m>`.
pub fn verify_z_containments(params: &PresentationParams) -> Check {
    let m = params.m;
    for i in 0..m {
        for j in 0..m {
            if params.alpha[i][j][m..].iter().any(|&c| c != 0) {
                return Check::new("z_containments", false, format!("[x_{},x_{}] leaves <z_1..z_m>", i + 1, j + 1));
            }
            if params.beta[i][j][..m].iter().any(|&c| c != 0) {
                return Check::new("z_containments", false, format!("[y_{},y_{}] leaves <z_(m+1)..z_2m>", i + 1, j + 1));
            }
        }
    }
    Check::new("z_containments", true, format!("all {} pairs", m * m))
}

/// `alpha .. mu` agree entry-wise; `epsilon`, `nu` may differ.
pub fn verify_frame_independence(a: &PresentationParams, b: &PresentationParams) -> Check {
    for ((name, ta), (_, tb)) in a.frame_invariant_parts().into_iter().zip(b.frame_invariant_parts()) {
        if ta != tb {
            return Check::new("frame_independence", false, format!("{name} differs: {ta:?} vs {tb:?}"));
        }
    }
    Check::new("frame_independence", true, "alpha, beta, gamma, delta, lambda, mu agree")
}
