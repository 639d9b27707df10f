//! The group interface that words are evaluated in.
//!
//! Both concrete arenas of the crate (power-commutator groups and finite
//! abelian groups) implement [`Group`]; finite ones additionally expose their
//! element list through [`FiniteGroup`], which is what the exhaustive
//! checkers and the brute-force solver iterate over.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::{BigInt, Sign};
use num_traits::Zero;

pub trait Group {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// `a^e` by square-and-multiply over the bits of `|e|`.
    fn pow(&self, a: &Self::Elem, e: &BigInt) -> Self::Elem {
        if e.is_zero() {
            return self.identity();
        }
        let base = if e.sign() == Sign::Minus { self.inv(a) } else { a.clone() };
        let mag = e.magnitude();
        let mut acc = self.identity();
        for bit in (0..mag.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if mag.bit(bit) {
                acc = self.mul(&acc, &base);
            }
        }
        acc
    }

    fn pow_i64(&self, a: &Self::Elem, e: i64) -> Self::Elem {
        self.pow(a, &BigInt::from(e))
    }

    /// `[a, b] = a^-1 b^-1 a b`.
    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mul(&self.mul(&ai, &bi), &self.mul(a, b))
    }

    /// `a^b = b^-1 a b`.
    fn conjugate(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(b), a), b)
    }
}

pub trait FiniteGroup: Group {
    /// All elements, in a fixed deterministic order.
    fn elements(&self) -> Vec<Self::Elem>;

    fn order(&self) -> usize {
        self.elements().len()
    }

    /// Smallest `n >= 1` with `a^n = 1`.
    fn element_order(&self, a: &Self::Elem) -> usize {
        let mut x = a.clone();
        let mut n = 1;
        while !self.is_identity(&x) {
            x = self.mul(&x, a);
            n += 1;
        }
        n
    }
}

/// A multiplication table over element indices, for exhaustive checks on
/// small groups.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    n: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    identity: u32,
}

impl CayleyTable {
    /// Tabulates `g`. Elements are indexed in the order of `g.elements()`.
    pub fn from_group<G: FiniteGroup>(g: &G) -> (Self, Vec<G::Elem>) {
        let elems = g.elements();
        let index: HashMap<&G::Elem, u32> =
            elems.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                table.push(index[&g.mul(a, b)]);
            }
        }
        let identity = index[&g.identity()];
        let inverse = elems.iter().map(|a| index[&g.inv(a)]).collect();
        (CayleyTable { n, table, inverse, identity }, elems)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

impl Group for CayleyTable {
    type Elem = u32;

    fn identity(&self) -> u32 {
        self.identity
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.table[*a as usize * self.n + *b as usize]
    }

    fn inv(&self, a: &u32) -> u32 {
        self.inverse[*a as usize]
    }
}

impl FiniteGroup for CayleyTable {
    fn elements(&self) -> Vec<u32> {
        (0..self.n as u32).collect()
    }

    fn order(&self) -> usize {
        self.n
    }
}
