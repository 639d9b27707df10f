use std::collections::BTreeMap;
use std::fmt;

use num_traits::ToPrimitive;

use crate::arith::{factor_u64, prime_power};
use crate::group::{CayleyTable, FiniteGroup, Group};
use crate::word::Symbol;

/// Groups up to this order get the exhaustive associativity check at
/// construction; larger ones only the overlap checks.
pub const EXHAUSTIVE_CHECK_LIMIT: usize = 256;

/// Normal form `g_1^e_1 … g_n^e_n` with `0 <= e_i < r_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PcElement {
    pub exponents: Vec<u32>,
}

/// A word `g_i^e …` on generator indices (0-based).
pub type PcWord = Vec<(usize, u32)>;

/// Raw presentation data, before collection tables are built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PcPresentation {
    pub relative_orders: Vec<u32>,
    /// `g_i^{r_i}` as a word in later generators; empty means trivial.
    pub powers: Vec<PcWord>,
    /// `[g_j, g_i]` for `i < j`, keyed `(j, i)`, as a word in generators after `j`.
    pub commutators: BTreeMap<(usize, usize), PcWord>,
    pub names: Vec<Symbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PcError {
    #[error("relative order {0} of generator g{1} is not a prime power")]
    BadOrder(u32, usize),
    #[error("relation for {0} mentions generator g{1}, which is not later")]
    NotLater(String, usize),
    #[error("generator index g{0} out of range")]
    OutOfRange(usize),
    #[error("inconsistent presentation: {0}")]
    Inconsistent(String),
    #[error("expected {want} names, got {got}")]
    NameCount { want: usize, got: usize },
}

/// A finite group given by a consistent power-commutator presentation.
#[derive(Clone, Debug)]
pub struct PcGroup {
    presentation: PcPresentation,
    orders: Vec<u32>,
    powers: Vec<PcElement>,
    /// `conj[j][i] = g_i^-1 g_j g_i` for `i < j`.
    conj: Vec<Vec<PcElement>>,
}

impl PcGroup {
    pub fn new(mut pres: PcPresentation) -> Result<Self, PcError> {
        let n = pres.relative_orders.len();
        for (i, &r) in pres.relative_orders.iter().enumerate() {
            if prime_power(u64::from(r)).is_none() {
                return Err(PcError::BadOrder(r, i + 1));
            }
        }
        pres.powers.resize(n, Vec::new());
        if pres.names.is_empty() {
            pres.names = (1..=n).map(|i| Symbol::plain(&format!("g{i}"))).collect();
        }
        if pres.names.len() != n {
            return Err(PcError::NameCount { want: n, got: pres.names.len() });
        }
        for (i, w) in pres.powers.iter().enumerate() {
            check_later(w, i, n, &format!("g{}^{}", i + 1, pres.relative_orders[i]))?;
        }
        for (&(j, i), w) in &pres.commutators {
            if j >= n {
                return Err(PcError::OutOfRange(j + 1));
            }
            if i >= j {
                return Err(PcError::NotLater(format!("[g{}, g{}]", j + 1, i + 1), i + 1));
            }
            check_later(w, j, n, &format!("[g{}, g{}]", j + 1, i + 1))?;
        }

        let zero = PcElement { exponents: vec![0; n] };
        let mut g = PcGroup {
            orders: pres.relative_orders.clone(),
            powers: vec![zero.clone(); n],
            conj: (0..n).map(|j| vec![zero.clone(); j]).collect(),
            presentation: pres,
        };
        // later generators first, so each relation collects in a finished subgroup
        for i in (0..n).rev() {
            g.powers[i] = g.collect_word(&g.presentation.powers[i]);
            for j in i + 1..n {
                let comm = g.presentation.commutators.get(&(j, i)).cloned().unwrap_or_default();
                let mut w = vec![(j, 1)];
                w.extend(comm);
                g.conj[j][i] = g.collect_word(&w);
            }
        }
        g.check_consistency()?;
        Ok(g)
    }

    pub fn presentation(&self) -> &PcPresentation {
        &self.presentation
    }

    pub fn n_gens(&self) -> usize {
        self.orders.len()
    }

    pub fn relative_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn names(&self) -> &[Symbol] {
        &self.presentation.names
    }

    pub fn with_names(mut self, names: Vec<Symbol>) -> Result<Self, PcError> {
        if names.len() != self.n_gens() {
            return Err(PcError::NameCount { want: self.n_gens(), got: names.len() });
        }
        self.presentation.names = names;
        Ok(self)
    }

    /// Group order `r_1 ⋯ r_n`.
    pub fn size(&self) -> u128 {
        self.orders.iter().map(|&r| u128::from(r)).product()
    }

    pub fn generator(&self, i: usize) -> PcElement {
        let mut e = vec![0; self.n_gens()];
        e[i] = 1;
        PcElement { exponents: e }
    }

    pub fn element(&self, exponents: Vec<u32>) -> Option<PcElement> {
        (exponents.len() == self.n_gens() && exponents.iter().zip(&self.orders).all(|(e, r)| e < r))
            .then_some(PcElement { exponents })
    }

    /// Normal form of a word in the generators.
    pub fn collect_word(&self, w: &[(usize, u32)]) -> PcElement {
        let mut acc = self.identity();
        for &(k, e) in w {
            for _ in 0..e {
                acc = self.mul_gen(&acc, k);
            }
        }
        acc
    }

    /// `a · g_k`, collecting from the left: `g_k` moves past the tail of `a`
    /// by conjugating it, then absorbs into position `k`.
    fn mul_gen(&self, a: &PcElement, k: usize) -> PcElement {
        let n = self.n_gens();
        let mut tail = self.identity();
        let plain = (k + 1..n).all(|j| a.exponents[j] == 0 || self.conj[j][k] == self.generator(j));
        if plain {
            tail.exponents[k + 1..].copy_from_slice(&a.exponents[k + 1..]);
        } else {
            for j in k + 1..n {
                for _ in 0..a.exponents[j] {
                    tail = self.mul(&tail, &self.conj[j][k]);
                }
            }
        }
        let mut ek = a.exponents[k] + 1;
        if ek == self.orders[k] {
            ek = 0;
            tail = self.mul(&self.powers[k], &tail);
        }
        let mut out = tail;
        out.exponents[..k].copy_from_slice(&a.exponents[..k]);
        out.exponents[k] = ek;
        out
    }

    fn check_consistency(&self) -> Result<(), PcError> {
        let n = self.n_gens();
        let g: Vec<PcElement> = (0..n).map(|i| self.generator(i)).collect();
        let pow = |x: &PcElement, e: u32| (0..e).fold(self.identity(), |acc, _| self.mul(&acc, x));
        let fail = |what: String| Err(PcError::Inconsistent(what));
        for k in 0..n {
            let rk = self.orders[k];
            // g_k^{r_k} g_k = g_k g_k^{r_k}
            let p = pow(&g[k], rk);
            if self.mul(&p, &g[k]) != self.mul(&g[k], &p) {
                return fail(format!("overlap g{0}^{1} g{0}", k + 1, rk + 1));
            }
            for j in 0..k {
                let rj = self.orders[j];
                let gkj = self.mul(&g[k], &g[j]);
                // g_k^{r_k} g_j = g_k^{r_k - 1} (g_k g_j)
                if self.mul(&pow(&g[k], rk), &g[j]) != self.mul(&pow(&g[k], rk - 1), &gkj) {
                    return fail(format!("overlap g{}^{} g{}", k + 1, rk, j + 1));
                }
                // g_k g_j^{r_j} = (g_k g_j) g_j^{r_j - 1}
                if self.mul(&g[k], &pow(&g[j], rj)) != self.mul(&gkj, &pow(&g[j], rj - 1)) {
                    return fail(format!("overlap g{} g{}^{}", k + 1, j + 1, rj));
                }
                for i in 0..j {
                    // (g_k g_j) g_i = g_k (g_j g_i)
                    if self.mul(&gkj, &g[i]) != self.mul(&g[k], &self.mul(&g[j], &g[i])) {
                        return fail(format!("overlap g{} g{} g{}", k + 1, j + 1, i + 1));
                    }
                }
            }
        }
        if self.size() <= EXHAUSTIVE_CHECK_LIMIT as u128 {
            let (table, elems) = CayleyTable::from_group(self);
            let gens: Vec<u32> =
                g.iter().map(|x| elems.iter().position(|e| e == x).expect("generator listed") as u32).collect();
            for x in 0..table.len() as u32 {
                if !table.is_identity(&table.mul(&x, &table.inv(&x))) {
                    return fail(format!("{:?} has no right inverse", elems[x as usize].exponents));
                }
                for a in 0..table.len() as u32 {
                    for &k in &gens {
                        if table.mul(&table.mul(&x, &a), &k) != table.mul(&x, &table.mul(&a, &k)) {
                            return fail(format!(
                                "associativity fails at {:?}, {:?}",
                                elems[x as usize].exponents, elems[a as usize].exponents
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn format_element(&self, x: &PcElement) -> String {
        let parts: Vec<String> = x
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = &self.presentation.names[i];
                if e == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

fn check_later(w: &PcWord, after: usize, n: usize, what: &str) -> Result<(), PcError> {
    for &(g, _) in w {
        if g >= n {
            return Err(PcError::OutOfRange(g + 1));
        }
        if g <= after {
            return Err(PcError::NotLater(what.to_string(), g + 1));
        }
    }
    Ok(())
}

impl Group for PcGroup {
    type Elem = PcElement;

    fn identity(&self) -> PcElement {
        PcElement { exponents: vec![0; self.n_gens()] }
    }

    fn mul(&self, a: &PcElement, b: &PcElement) -> PcElement {
        let mut acc = a.clone();
        for (k, &e) in b.exponents.iter().enumerate() {
            for _ in 0..e {
                acc = self.mul_gen(&acc, k);
            }
        }
        acc
    }

    /// Clears positions left to right; the exponents applied form the inverse
    /// directly in normal form.
    fn inv(&self, a: &PcElement) -> PcElement {
        let mut cur = a.clone();
        let mut out = self.identity();
        for k in 0..self.n_gens() {
            let f = (self.orders[k] - cur.exponents[k]) % self.orders[k];
            for _ in 0..f {
                cur = self.mul_gen(&cur, k);
            }
            out.exponents[k] = f;
        }
        out
    }
}

impl FiniteGroup for PcGroup {
    /// Lexicographic in the exponent vector.
    fn elements(&self) -> Vec<PcElement> {
        let total = self.size().to_usize().expect("group too large to enumerate");
        let mut out = Vec::with_capacity(total);
        let mut e = vec![0u32; self.n_gens()];
        for _ in 0..total {
            out.push(PcElement { exponents: e.clone() });
            for i in (0..e.len()).rev() {
                e[i] += 1;
                if e[i] < self.orders[i] {
                    break;
                }
                e[i] = 0;
            }
        }
        out
    }

    fn order(&self) -> usize {
        self.size().to_usize().expect("group too large")
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, w: &PcWord) -> fmt::Result {
    for (k, &(g, e)) in w.iter().enumerate() {
        if k > 0 {
            f.write_str(" ")?;
        }
        if e == 1 {
            write!(f, "g{}", g + 1)?;
        } else {
            write!(f, "g{}^{}", g + 1, e)?;
        }
    }
    Ok(())
}

/// Prints the group file format.
impl fmt::Display for PcGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.presentation;
        writeln!(f, "gens {}", self.n_gens())?;
        let orders: Vec<String> = self.orders.iter().map(u32::to_string).collect();
        writeln!(f, "orders {}", orders.join(" "))?;
        let names: Vec<String> = p.names.iter().map(Symbol::to_string).collect();
        writeln!(f, "names {}", names.join(" "))?;
        for (i, w) in p.powers.iter().enumerate() {
            if !w.is_empty() {
                write!(f, "pow {}: ", i + 1)?;
                write_word(f, w)?;
                writeln!(f)?;
            }
        }
        for (&(j, i), w) in &p.commutators {
            if !w.is_empty() {
                write!(f, "comm {} {}: ", j + 1, i + 1)?;
                write_word(f, w)?;
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Cyclic group of order `p^k` as a chain of `k` generators of order `p`
/// with `g_i^p = g_{i+1}`.
pub fn cyclic(p: u32, k: u32) -> Result<PcGroup, PcError> {
    let n = k as usize;
    let pres = PcPresentation {
        relative_orders: vec![p; n],
        powers: (0..n).map(|i| if i + 1 < n { vec![(i + 1, 1)] } else { Vec::new() }).collect(),
        commutators: BTreeMap::new(),
        names: Vec::new(),
    };
    PcGroup::new(pres)
}

/// Unitriangular 3×3 matrices over `Z/p^k`: `g1 = I + E12`, `g2 = I + E23`,
/// `g3 = I + E13`, with `[g1, g2] = g3` central.
pub fn heisenberg(p: u32, k: u32) -> Result<PcGroup, PcError> {
    let q = p.pow(k);
    let mut comms = BTreeMap::new();
    // [g2, g1] = [g1, g2]^-1 = g3^{q-1}
    comms.insert((1, 0), vec![(2, q - 1)]);
    let pres = PcPresentation {
        relative_orders: vec![q; 3],
        powers: vec![Vec::new(); 3],
        commutators: comms,
        names: Vec::new(),
    };
    PcGroup::new(pres)
}

/// Dihedral group of order `2^n` (n >= 2): `g1` a reflection, `g2` a
/// rotation of order `2^{n-1}`, `g_{i+1} = g_i^2`.
pub fn dihedral(n: u32) -> Result<PcGroup, PcError> {
    assert!(n >= 2, "dihedral 2-group needs order at least 4");
    let gens = n as usize;
    let mut comms = BTreeMap::new();
    // s^-1 r^m s = r^-m, so [r^m, s] = r^{-2m}; for r^m = g_j this is g_{j+1} ⋯ g_n
    for j in 1..gens {
        let w: PcWord = (j + 1..gens).map(|t| (t, 1)).collect();
        comms.insert((j, 0), w);
    }
    let pres = PcPresentation {
        relative_orders: vec![2; gens],
        powers: (0..gens).map(|i| if i >= 1 && i + 1 < gens { vec![(i + 1, 1)] } else { Vec::new() }).collect(),
        commutators: comms,
        names: Vec::new(),
    };
    PcGroup::new(pres)
}

/// `a × b`, generators of `a` first. Names are kept when they stay distinct.
pub fn direct_product(a: &PcGroup, b: &PcGroup) -> Result<PcGroup, PcError> {
    let off = a.n_gens();
    let shift = |w: &PcWord| w.iter().map(|&(g, e)| (g + off, e)).collect::<PcWord>();
    let pa = a.presentation();
    let pb = b.presentation();
    let mut comms = pa.commutators.clone();
    for (&(j, i), w) in &pb.commutators {
        comms.insert((j + off, i + off), shift(w));
    }
    let mut names: Vec<Symbol> = pa.names.iter().chain(&pb.names).cloned().collect();
    let mut seen = std::collections::HashSet::new();
    if !names.iter().all(|n| seen.insert(n.clone())) {
        names = Vec::new();
    }
    let pres = PcPresentation {
        relative_orders: pa.relative_orders.iter().chain(&pb.relative_orders).copied().collect(),
        powers: pa.powers.iter().cloned().chain(pb.powers.iter().map(shift)).collect(),
        commutators: comms,
        names,
    };
    PcGroup::new(pres)
}

/// Cyclic group of order `n >= 2` as a product of its primary parts.
pub fn cyclic_of_order(n: u64) -> Result<PcGroup, PcError> {
    let parts: Vec<PcGroup> =
        factor_u64(n).into_iter().map(|(p, k)| cyclic(p as u32, k)).collect::<Result<_, _>>()?;
    let mut it = parts.into_iter();
    let first = it.next().ok_or(PcError::BadOrder(n as u32, 1))?;
    it.try_fold(first, |acc, g| direct_product(&acc, &g))
}

/// Named builtin groups, for suites that sweep "every builtin up to order n":
/// cyclic groups of order <= 81, Heisenberg groups mod 2, 3, 4, dihedral
/// 2-groups up to order 64 and a few direct products.
pub fn builtin_catalog() -> Vec<(String, PcGroup)> {
    let mut out = Vec::new();
    let mut push = |name: String, g: Result<PcGroup, PcError>| out.push((name, g.expect("builtin presentation is valid")));
    for n in 2..=81 {
        push(format!("C{n}"), cyclic_of_order(n));
    }
    push("Heis(2)".into(), heisenberg(2, 1));
    push("Heis(3)".into(), heisenberg(3, 1));
    push("Heis(4)".into(), heisenberg(2, 2));
    for n in 2..=6 {
        push(format!("D{}", 1u32 << n), dihedral(n));
    }
    let c = |p, k| cyclic(p, k).unwrap();
    let product = |a: Result<PcGroup, PcError>, b: PcGroup| direct_product(&a.unwrap(), &b);
    push("C2xC2".into(), product(Ok(c(2, 1)), c(2, 1)));
    push("C2xC2xC2".into(), product(product(Ok(c(2, 1)), c(2, 1)), c(2, 1)));
    push("C3xC3".into(), product(Ok(c(3, 1)), c(3, 1)));
    push("C3xC9".into(), product(Ok(c(3, 1)), c(3, 2)));
    push("C2xHeis(2)".into(), product(heisenberg(2, 1), c(2, 1)));
    push("C4xD8".into(), product(dihedral(3), c(2, 2)));
    push("C2xD16".into(), product(dihedral(4), c(2, 1)));
    push("C3xHeis(2)".into(), product(heisenberg(2, 1), c(3, 1)));
    push("C2xHeis(3)".into(), product(heisenberg(3, 1), c(2, 1)));
    push("C3xHeis(3)".into(), product(heisenberg(3, 1), c(3, 1)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 3×3 unitriangular matrices over Z/q, stored as (a12, a23, a13).
    fn unitri_mul(x: (u32, u32, u32), y: (u32, u32, u32), q: u32) -> (u32, u32, u32) {
        ((x.0 + y.0) % q, (x.1 + y.1) % q, (x.2 + y.2 + x.0 * y.1) % q)
    }

    /// Matrix of the normal form g1^a g2^b g3^c.
    fn to_matrix(e: &PcElement, q: u32) -> (u32, u32, u32) {
        let g1 = (1, 0, 0);
        let g2 = (0, 1, 0);
        let g3 = (0, 0, 1);
        let mut m = (0, 0, 0);
        for (g, &k) in [g1, g2, g3].iter().zip(&e.exponents) {
            for _ in 0..k {
                m = unitri_mul(m, *g, q);
            }
        }
        m
    }

    #[test]
    fn catalog_orders() {
        let cat = builtin_catalog();
        for (name, g) in &cat {
            if let Some(n) = name.strip_prefix('C').and_then(|s| s.parse::<usize>().ok()) {
                assert_eq!(g.order(), n, "{name}");
                assert!(g.elements().iter().any(|x| g.element_order(x) == n), "{name} is cyclic");
            }
        }
        let by = |n: &str| cat.iter().find(|(m, _)| m == n).unwrap().1.order();
        assert_eq!(by("C3xHeis(3)"), 81);
        assert_eq!(by("C2xD16"), 32);
    }

    #[test]
    fn heisenberg_matches_matrices() {
        for (p, k) in [(2, 1), (3, 1), (2, 2)] {
            let g = heisenberg(p, k).unwrap();
            let q = p.pow(k);
            let elems = g.elements();
            assert_eq!(elems.len() as u32, q * q * q);
            for a in &elems {
                for b in &elems {
                    assert_eq!(to_matrix(&g.mul(a, b), q), unitri_mul(to_matrix(a, q), to_matrix(b, q), q));
                }
            }
            assert_eq!(g.commutator(&g.generator(0), &g.generator(1)), g.generator(2));
        }
    }

    #[test]
    fn heisenberg_mod_2_noncommuting() {
        let g = heisenberg(2, 1).unwrap();
        let (a, b) = (g.generator(0), g.generator(1));
        let ab = g.mul(&a, &b);
        let ba = g.mul(&b, &a);
        assert_ne!(ab, ba);
        assert_eq!(ab, g.mul(&ba, &g.generator(2)));
    }

    #[test]
    fn cyclic_arithmetic() {
        let c4 = cyclic(2, 2).unwrap();
        let a = c4.generator(0);
        let a2 = c4.pow_i64(&a, 2);
        let a3 = c4.pow_i64(&a, 3);
        assert_eq!(c4.mul(&a2, &a3), a);
        assert_eq!(c4.element_order(&a), 4);
        assert_eq!(c4.inv(&a), a3);
        for x in c4.elements() {
            assert_eq!(c4.mul(&c4.identity(), &x), x);
        }
    }

    #[test]
    fn dihedral_relations() {
        for n in 2..=6 {
            let d = dihedral(n).unwrap();
            let (s, r) = (d.generator(0), d.generator(1));
            assert_eq!(d.order(), 1 << n);
            assert_eq!(d.element_order(&s), 2);
            assert_eq!(d.element_order(&r), 1 << (n - 1));
            assert_eq!(d.conjugate(&r, &s), d.inv(&r));
        }
    }

    #[test]
    fn inverses() {
        let g = direct_product(&dihedral(4).unwrap(), &heisenberg(3, 1).unwrap()).unwrap();
        for x in g.elements().iter().step_by(7) {
            assert!(g.is_identity(&g.mul(x, &g.inv(x))));
            assert!(g.is_identity(&g.mul(&g.inv(x), x)));
        }
    }

    #[test]
    fn inconsistent_rejected() {
        let mut comms = BTreeMap::new();
        comms.insert((1, 0), vec![(2, 1)]);
        let pres = PcPresentation {
            relative_orders: vec![2, 2, 2],
            powers: vec![vec![(1, 1)], Vec::new(), Vec::new()],
            commutators: comms,
            names: Vec::new(),
        };
        // g1^2 = g2 makes g1 commute with g2, contradicting [g2, g1] = g3
        assert!(matches!(PcGroup::new(pres), Err(PcError::Inconsistent(_))));
        let bad = PcPresentation { relative_orders: vec![6], ..Default::default() };
        assert_eq!(PcGroup::new(bad).unwrap_err(), PcError::BadOrder(6, 1));
        let backwards =
            PcPresentation { relative_orders: vec![2, 2], powers: vec![Vec::new(), vec![(0, 1)]], ..Default::default() };
        assert!(matches!(PcGroup::new(backwards), Err(PcError::NotLater(..))));
    }
}
