//! The quintuple group on `F_q^5` with product
//! `(a+x, b+y, c+z+bx, d+u+az+(ab-c)x, e+v+cy+b(xy-z))`.

use std::sync::Arc;

use crate::field::FieldTables;
use crate::group::GroupLaw;

pub type Quintuple = [u8; 5];

#[derive(Clone)]
pub struct QuintupleLaw {
    pub field: Arc<FieldTables>,
}

impl QuintupleLaw {
    fn q(&self) -> usize {
        self.field.q()
    }

    /// Lexicographic index of `(a,b,c,d,e)`.
    pub fn encode(&self, t: Quintuple) -> usize {
        t.iter().fold(0, |acc, &c| acc * self.q() + c as usize)
    }

    pub fn decode(&self, mut i: usize) -> Quintuple {
        let q = self.q();
        let mut t = [0u8; 5];
        for slot in t.iter_mut().rev() {
            *slot = (i % q) as u8;
            i /= q;
        }
        t
    }

    pub fn product(&self, g: Quintuple, h: Quintuple) -> Quintuple {
        let f = &self.field;
        let [a, b, c, d, e] = g;
        let [x, y, z, u, v] = h;
        let add = |s: u8, t: u8| f.add(s, t);
        let mul = |s: u8, t: u8| f.mul(s, t);
        let ab_c = f.sub(mul(a, b), c);
        let xy_z = f.sub(mul(x, y), z);
        [
            add(a, x),
            add(b, y),
            add(add(c, z), mul(b, x)),
            add(add(d, u), add(mul(a, z), mul(ab_c, x))),
            add(add(e, v), add(mul(c, y), mul(b, xy_z))),
        ]
    }

    /// `(-a, -b, -c+ab, -d, -e)`
    pub fn inverse(&self, g: Quintuple) -> Quintuple {
        let f = &self.field;
        let [a, b, c, d, e] = g;
        [f.neg(a), f.neg(b), f.add(f.neg(c), f.mul(a, b)), f.neg(d), f.neg(e)]
    }

    /// Closed-form commutator `g^-1 h^-1 g h`:
    /// `(0, 0, bx-ay, 2az-2cx+a^2y-bx^2, 2(c-ab)y-2b(z-xy)-ay^2+b^2x)`.
    pub fn commutator_formula(&self, g: Quintuple, h: Quintuple) -> Quintuple {
        let f = &self.field;
        let [a, b, c, _, _] = g;
        let [x, y, z, _, _] = h;
        let mul = |s: u8, t: u8| f.mul(s, t);
        let add = |s: u8, t: u8| f.add(s, t);
        let sub = |s: u8, t: u8| f.sub(s, t);
        let two = |s: u8| f.add(s, s);
        let third = sub(mul(b, x), mul(a, y));
        let fourth = sub(add(sub(two(mul(a, z)), two(mul(c, x))), mul(mul(a, a), y)), mul(b, mul(x, x)));
        let fifth = add(
            sub(sub(two(mul(sub(c, mul(a, b)), y)), two(mul(b, sub(z, mul(x, y))))), mul(a, mul(y, y))),
            mul(mul(b, b), x),
        );
        [0, 0, third, fourth, fifth]
    }
}

impl GroupLaw for QuintupleLaw {
    fn order(&self) -> usize {
        self.q().pow(5)
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.encode(self.product(self.decode(a), self.decode(b)))
    }

    fn inv(&self, a: usize) -> usize {
        self.encode(self.inverse(self.decode(a)))
    }
}
