use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{find_irreducible, is_prime, FieldSpec};
use crate::group::{FiniteGroup, DEFAULT_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    U3,
    HMatrix,
    HModCenter,
    Quintuple,
    ElemAbelianProduct,
    Cyclic,
    ElementaryAbelian,
}

/// A parsed group description such as `hmod:p=3,m=1` or
/// `xab:u3:p=3,m=1,k=1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    U3(FieldSpec),
    HMatrix(FieldSpec),
    HModCenter(FieldSpec),
    Quintuple(FieldSpec),
    ElemAbelianProduct { base: Box<GroupSpec>, k: u32 },
    Cyclic(usize),
    ElementaryAbelian { p: u32, k: u32 },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

/// Splits `a=1,b=[1,2],c=3` on top-level commas.
fn split_params(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

struct Params<'a>(Vec<(&'a str, &'a str)>);

impl<'a> Params<'a> {
    fn parse(s: &'a str, allowed: &[&str]) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in split_params(s) {
            let (k, v) = part.split_once('=').ok_or_else(|| invalid(format!("expected key=value, got '{part}'")))?;
            let k = k.trim();
            if !allowed.contains(&k) {
                return Err(invalid(format!("unknown parameter '{k}'")));
            }
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(invalid(format!("parameter '{k}' given twice")));
            }
            pairs.push((k, v.trim()));
        }
        Ok(Params(pairs))
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn int(&self, key: &str) -> Result<u64> {
        let v = self.get(key).ok_or_else(|| invalid(format!("missing parameter {key}")))?;
        v.parse().map_err(|_| invalid(format!("parameter {key} is not a non-negative integer: '{v}'")))
    }
}

fn parse_field(params: &str) -> Result<FieldSpec> {
    let ps = Params::parse(params, &["p", "m", "modulus"])?;
    let p = ps.int("p")?;
    let m = ps.int("m")? as usize;
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(invalid(format!("p must be prime, got {p}")));
    }
    if p == 2 {
        return Err(invalid("p must be odd"));
    }
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    let p = p as u32;
    match ps.get("modulus") {
        None => find_irreducible(p, m).map_err(|e| invalid(e.to_string())),
        Some(list) => {
            let inner = list
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .ok_or_else(|| invalid(format!("modulus must look like [c0,...,cm], got '{list}'")))?;
            let coeffs = inner
                .split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| invalid(format!("bad modulus coefficient '{c}'"))))
                .collect::<Result<Vec<_>>>()?;
            FieldSpec::new(p, m, coeffs).map_err(|e| invalid(e.to_string()))
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').ok_or_else(|| invalid(format!("expected <kind>:<params>, got '{s}'")))?;
        match kind {
            "u3" => Ok(GroupSpec::U3(parse_field(rest)?)),
            "hmat" => Ok(GroupSpec::HMatrix(parse_field(rest)?)),
            "hmod" => Ok(GroupSpec::HModCenter(parse_field(rest)?)),
            "quint" => Ok(GroupSpec::Quintuple(parse_field(rest)?)),
            "xab" => {
                let (base, k) = rest.rsplit_once(",k=").ok_or_else(|| invalid("xab needs a trailing ,k=<rank>"))?;
                let k = k.trim().parse().map_err(|_| invalid(format!("bad rank '{k}'")))?;
                let base: GroupSpec = base.parse()?;
                if base.prime().is_none() {
                    return Err(invalid("xab base must be a p-group"));
                }
                Ok(GroupSpec::ElemAbelianProduct { base: Box::new(base), k })
            }
            "cyc" => {
                let n = Params::parse(rest, &["n"])?.int("n")? as usize;
                if n == 0 {
                    return Err(invalid("n must be positive"));
                }
                Ok(GroupSpec::Cyclic(n))
            }
            "elab" => {
                let ps = Params::parse(rest, &["p", "k"])?;
                let p = ps.int("p")?;
                if !is_prime(p) {
                    return Err(invalid(format!("p must be prime, got {p}")));
                }
                Ok(GroupSpec::ElementaryAbelian { p: p as u32, k: ps.int("k")? as u32 })
            }
            other => Err(invalid(format!("unknown group kind '{other}'"))),
        }
    }
}

fn write_field(f: &mut fmt::Formatter<'_>, spec: &FieldSpec) -> fmt::Result {
    let default = find_irreducible(spec.p(), spec.m()).ok();
    if default.as_ref() == Some(spec) {
        write!(f, "p={},m={}", spec.p(), spec.m())
    } else {
        write!(f, "{spec}")
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::U3(s) => {
                f.write_str("u3:")?;
                write_field(f, s)
            }
            GroupSpec::HMatrix(s) => {
                f.write_str("hmat:")?;
                write_field(f, s)
            }
            GroupSpec::HModCenter(s) => {
                f.write_str("hmod:")?;
                write_field(f, s)
            }
            GroupSpec::Quintuple(s) => {
                f.write_str("quint:")?;
                write_field(f, s)
            }
            GroupSpec::ElemAbelianProduct { base, k } => write!(f, "xab:{base},k={k}"),
            GroupSpec::Cyclic(n) => write!(f, "cyc:n={n}"),
            GroupSpec::ElementaryAbelian { p, k } => write!(f, "elab:p={p},k={k}"),
        }
    }
}

impl GroupSpec {
    pub fn kind(&self) -> GroupKind {
        match self {
            GroupSpec::U3(_) => GroupKind::U3,
            GroupSpec::HMatrix(_) => GroupKind::HMatrix,
            GroupSpec::HModCenter(_) => GroupKind::HModCenter,
            GroupSpec::Quintuple(_) => GroupKind::Quintuple,
            GroupSpec::ElemAbelianProduct { .. } => GroupKind::ElemAbelianProduct,
            GroupSpec::Cyclic(_) => GroupKind::Cyclic,
            GroupSpec::ElementaryAbelian { .. } => GroupKind::ElementaryAbelian,
        }
    }

    /// The field the group is built over, if any (through products too).
    pub fn field(&self) -> Option<&FieldSpec> {
        match self {
            GroupSpec::U3(s) | GroupSpec::HMatrix(s) | GroupSpec::HModCenter(s) | GroupSpec::Quintuple(s) => Some(s),
            GroupSpec::ElemAbelianProduct { base, .. } => base.field(),
            _ => None,
        }
    }

    pub fn prime(&self) -> Option<u32> {
        match self {
            GroupSpec::ElemAbelianProduct { base, .. } => base.prime(),
            GroupSpec::Cyclic(n) => {
                let n = *n as u64;
                let p = (2..=n).find(|d| n % d == 0)?;
                let mut r = n;
                while r % p == 0 {
                    r /= p;
                }
                (r == 1).then_some(p as u32)
            }
            GroupSpec::ElementaryAbelian { p, .. } => Some(*p),
            _ => self.field().map(FieldSpec::p),
        }
    }

    pub fn order(&self) -> u128 {
        let q = |s: &FieldSpec| s.order() as u128;
        match self {
            GroupSpec::U3(s) => q(s).pow(3),
            GroupSpec::HMatrix(s) => q(s).pow(6),
            GroupSpec::HModCenter(s) | GroupSpec::Quintuple(s) => q(s).pow(5),
            GroupSpec::ElemAbelianProduct { base, k } => base.order() * (base.prime().unwrap_or(1) as u128).pow(*k),
            GroupSpec::Cyclic(n) => *n as u128,
            GroupSpec::ElementaryAbelian { p, k } => (*p as u128).pow(*k),
        }
    }

    /// Largest universe enumerated while building (the central quotient
    /// enumerates its parent first).
    pub fn peak_order(&self) -> u128 {
        match self {
            GroupSpec::HModCenter(s) => (s.order() as u128).pow(6),
            GroupSpec::ElemAbelianProduct { base, .. } => base.peak_order().max(self.order()),
            _ => self.order(),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        self.build_with_cap(DEFAULT_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<FiniteGroup> {
        if self.peak_order() > cap as u128 {
            return Err(Error::CapExceeded { order: self.peak_order(), cap });
        }
        let g = match self {
            GroupSpec::U3(s) => super::build_u3_with_cap(s, cap)?,
            GroupSpec::HMatrix(s) => super::build_h_matrix_with_cap(s, cap)?,
            GroupSpec::HModCenter(s) => super::build_h_mod_center(s)?,
            GroupSpec::Quintuple(s) => super::build_quintuple(s)?,
            GroupSpec::ElemAbelianProduct { base, k } => {
                let b = base.build_with_cap(cap)?;
                let p = base.prime().expect("validated at parse time");
                super::build_direct_product_with_cap(&b, p, *k, cap)?
            }
            GroupSpec::Cyclic(n) => super::build_cyclic(*n)?,
            GroupSpec::ElementaryAbelian { p, k } => {
                let trivial = super::build_cyclic(1)?;
                super::build_direct_product_with_cap(&trivial, *p, *k, cap)?
            }
        };
        Ok(g.renamed(self.to_string()))
    }
}
