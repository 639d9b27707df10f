//! Symbolic periodic abelian groups: per prime, a sum of rule-generated cyclic
//! summands `Z/p^k` and some number of Prüfer groups.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::is_prime_u64;
use crate::expr::{Evaluator, Expr, SeqTable};
use crate::syntax::{parse_expr, statements, ParseError};

/// Exponents `k` of a family of cyclic summands `Z/p^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclicFamily {
    Finite(Vec<u64>),
    /// `k_i = a*i + b` for every `i >= from`; infinitely many summands.
    Arithmetic { a: u64, b: i64, from: u64 },
    /// `k_1 = k1`, `k_{i+1} = 2*k_i + c`; infinitely many summands.
    Doubling { k1: u64, c: i64 },
}

impl CyclicFamily {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            CyclicFamily::Finite(ks) => {
                if ks.contains(&0) {
                    return Err("cyclic exponents must be >= 1".into());
                }
            }
            CyclicFamily::Arithmetic { a, b, from } => {
                if (*a as i128) * (*from as i128) + (*b as i128) < 1 {
                    return Err(format!("k_{from} = {} is below 1", *a as i128 * *from as i128 + *b as i128));
                }
            }
            CyclicFamily::Doubling { k1, c } => {
                if *k1 < 1 {
                    return Err("k_1 must be >= 1".into());
                }
                if (*k1 as i128) + (*c as i128) < 0 {
                    return Err("doubling rule decreases and eventually leaves the naturals".into());
                }
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, CyclicFamily::Finite(ks) if ks.is_empty())
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self, CyclicFamily::Finite(_))
    }

    /// `Some(max k)` when the exponents are bounded.
    pub fn max_exponent(&self) -> Option<u64> {
        match self {
            CyclicFamily::Finite(ks) => Some(ks.iter().copied().max().unwrap_or(0)),
            CyclicFamily::Arithmetic { a: 0, b, .. } => Some(*b as u64),
            CyclicFamily::Arithmetic { .. } => None,
            CyclicFamily::Doubling { k1, c } if (*k1 as i128) + (*c as i128) == 0 => Some(*k1),
            CyclicFamily::Doubling { .. } => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.max_exponent().is_some()
    }

    /// Exponent of the summand with the given index, if it exists.
    pub fn exponent(&self, index: u64) -> Option<u64> {
        match self {
            CyclicFamily::Finite(ks) => ks.get(usize::try_from(index).ok()?.checked_sub(1)?).copied(),
            CyclicFamily::Arithmetic { a, b, from } => {
                if index < *from {
                    return None;
                }
                u64::try_from(i128::from(*a) * i128::from(index) + i128::from(*b)).ok()
            }
            CyclicFamily::Doubling { k1, c } => {
                if index < 1 {
                    return None;
                }
                let mut k = i128::from(*k1);
                for _ in 1..index {
                    k = k.checked_mul(2)?.checked_add(i128::from(*c))?;
                    if k > i128::from(u64::MAX) {
                        return None;
                    }
                }
                u64::try_from(k).ok()
            }
        }
    }

    /// Summand indices `first..` in order; finite families stop.
    pub fn first_index(&self) -> u64 {
        match self {
            CyclicFamily::Arithmetic { from, .. } => *from,
            _ => 1,
        }
    }
}

impl fmt::Display for CyclicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signed = |v: i64| if v < 0 { format!(" - {}", v.unsigned_abs()) } else { format!(" + {v}") };
        match self {
            CyclicFamily::Finite(ks) => {
                let v: Vec<String> = ks.iter().map(u64::to_string).collect();
                write!(f, "[{}]", v.join(", "))
            }
            CyclicFamily::Arithmetic { a, b, from } => write!(f, "k_i = {a}*i{} for i>={from}", signed(*b)),
            CyclicFamily::Doubling { k1, c } => write!(f, "k_1 = {k1}, k_{{i+1}} = 2*k_i{}", signed(*c)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PrueferCount {
    Finite(u64),
    Omega,
}

impl PrueferCount {
    pub fn is_zero(&self) -> bool {
        *self == PrueferCount::Finite(0)
    }

    fn add(self, other: PrueferCount) -> PrueferCount {
        match (self, other) {
            (PrueferCount::Finite(a), PrueferCount::Finite(b)) => PrueferCount::Finite(a + b),
            _ => PrueferCount::Omega,
        }
    }

    pub fn contains(&self, index: u64) -> bool {
        index >= 1
            && match self {
                PrueferCount::Finite(n) => index <= *n,
                PrueferCount::Omega => true,
            }
    }
}

impl fmt::Display for PrueferCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrueferCount::Finite(n) => write!(f, "{n}"),
            PrueferCount::Omega => f.write_str("omega"),
        }
    }
}

/// The p-component up to the choice of prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentShape {
    pub cyclic: Vec<CyclicFamily>,
    pub pruefer: PrueferCount,
}

impl Default for ComponentShape {
    fn default() -> Self {
        ComponentShape { cyclic: Vec::new(), pruefer: PrueferCount::Finite(0) }
    }
}

impl ComponentShape {
    pub fn has_cyclic(&self) -> bool {
        self.cyclic.iter().any(|c| !c.is_empty())
    }

    pub fn is_trivial(&self) -> bool {
        !self.has_cyclic() && self.pruefer.is_zero()
    }

    pub fn is_divisible(&self) -> bool {
        !self.has_cyclic()
    }

    pub fn cyclic_bounded(&self) -> bool {
        self.cyclic.iter().all(CyclicFamily::is_bounded)
    }

    /// `Some(e)` when `p^e` kills the cyclic part.
    pub fn cyclic_period_exponent(&self) -> Option<u64> {
        let mut e = 0;
        for c in &self.cyclic {
            e = e.max(c.max_exponent()?);
        }
        Some(e)
    }

    pub fn pruefer_part(&self) -> ComponentShape {
        ComponentShape { cyclic: Vec::new(), pruefer: self.pruefer }
    }

    pub fn cyclic_part(&self) -> ComponentShape {
        let cyclic = self.cyclic.iter().filter(|c| !c.is_empty()).cloned().collect();
        ComponentShape { cyclic, pruefer: PrueferCount::Finite(0) }
    }

    fn merge(&mut self, other: ComponentShape) {
        self.cyclic.extend(other.cyclic);
        self.pruefer = self.pruefer.add(other.pruefer);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PComponentDescriptor {
    pub p: u64,
    pub shape: ComponentShape,
}

impl PComponentDescriptor {
    pub fn trivial(p: u64) -> Self {
        PComponentDescriptor { p, shape: ComponentShape::default() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeriodicAbelianDescriptor {
    pub components: BTreeMap<u64, ComponentShape>,
    /// The same shape at every prime; excludes explicit components.
    pub every_prime: Option<ComponentShape>,
}

impl PeriodicAbelianDescriptor {
    /// The p-component; trivial when absent.
    pub fn component(&self, p: u64) -> PComponentDescriptor {
        let shape = self
            .components
            .get(&p)
            .or(self.every_prime.as_ref())
            .cloned()
            .unwrap_or_default();
        PComponentDescriptor { p, shape }
    }

    pub fn with_component(mut self, p: u64, shape: ComponentShape) -> Self {
        self.components.entry(p).or_default().merge(shape);
        self
    }
}

/// A parsed descriptor file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupDescriptor {
    Periodic(PeriodicAbelianDescriptor),
    /// Torsion-free groups are described only by whether they are divisible.
    TorsionFree { divisible: bool },
}

impl fmt::Display for PeriodicAbelianDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_shape = |f: &mut fmt::Formatter<'_>, p: &str, s: &ComponentShape| -> fmt::Result {
            for c in &s.cyclic {
                writeln!(f, "component p={p} cyclic {c}")?;
            }
            if !s.pruefer.is_zero() {
                writeln!(f, "component p={p} pruefer count={}", s.pruefer)?;
            }
            Ok(())
        };
        for (p, s) in &self.components {
            write_shape(f, &p.to_string(), s)?;
        }
        if let Some(s) = &self.every_prime {
            write_shape(f, "*", s)?;
        }
        Ok(())
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Periodic(d) => write!(f, "{d}"),
            GroupDescriptor::TorsionFree { divisible } => {
                writeln!(f, "torsionfree divisible={}", if *divisible { "yes" } else { "no" })
            }
        }
    }
}

fn perr(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col: 1, message: message.into() }
}

fn parse_cyclic(line: usize, text: &str) -> Result<CyclicFamily, ParseError> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or_else(|| perr(line, "missing `]`"))?;
        let ks = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| perr(line, format!("bad exponent `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(CyclicFamily::Finite(ks));
    }
    if let Some((first, rec)) = text.split_once(',') {
        // k_1 = <int>, k_{i+1} = 2*k_i + c
        let k1 = first
            .trim()
            .strip_prefix("k_1")
            .and_then(|s| s.trim().strip_prefix('='))
            .and_then(|s| s.trim().parse::<u64>().ok())
            .ok_or_else(|| perr(line, "expected `k_1 = <int>`"))?;
        let rhs = rec
            .trim()
            .strip_prefix("k_{i+1}")
            .and_then(|s| s.trim().strip_prefix('='))
            .ok_or_else(|| perr(line, "expected `k_{i+1} = 2*k_i + c`"))?;
        let e = parse_expr(rhs, Some("i")).map_err(|e| perr(line, e.message))?;
        let c = doubling_offset(&e).ok_or_else(|| perr(line, "recurrence must have the form 2*k_i + c"))?;
        return Ok(CyclicFamily::Doubling { k1, c });
    }
    let rhs = text
        .strip_prefix("k_i")
        .and_then(|s| s.trim().strip_prefix('='))
        .ok_or_else(|| perr(line, "expected `[k, ...]`, `k_i = a*i + b` or `k_1 = .., k_{i+1} = ..`"))?;
    let (expr_text, from) = match rhs.split_once(" for ") {
        Some((e, cond)) => {
            let n = cond
                .trim()
                .strip_prefix('i')
                .and_then(|s| s.trim().strip_prefix(">="))
                .and_then(|s| s.trim().parse::<u64>().ok())
                .ok_or_else(|| perr(line, "expected `for i>=<n>`"))?;
            (e, n)
        }
        None => (rhs, 1),
    };
    let e = parse_expr(expr_text, Some("i")).map_err(|e| perr(line, e.message))?;
    let (a, b) = e.as_affine().ok_or_else(|| perr(line, "k_i must be affine in i"))?;
    let a = a.to_u64().ok_or_else(|| perr(line, "slope must be a natural number"))?;
    let b = b.to_i64().ok_or_else(|| perr(line, "offset out of range"))?;
    Ok(CyclicFamily::Arithmetic { a, b, from })
}

/// `c` when `e(k_i) = 2*k_i + c` identically.
fn doubling_offset(e: &Expr) -> Option<i64> {
    let value = |i: u64, k: i64| -> Option<BigInt> {
        let mut t = SeqTable::default();
        t.define_base("k", i, Expr::int(k));
        Evaluator::new(&t).eval(e, Some(&BigInt::from(i))).ok()
    };
    let c = value(1, 0)?;
    for (i, k) in [(1, 1), (1, 7), (2, 0), (5, 3)] {
        if value(i, k)? != BigInt::from(2 * k) + &c {
            return None;
        }
    }
    c.to_i64()
}

pub fn parse_descriptor(text: &str) -> Result<GroupDescriptor, ParseError> {
    let mut desc = PeriodicAbelianDescriptor::default();
    let mut torsion_free: Option<bool> = None;
    let mut any_component = false;
    for (line, _, stmt) in statements(text) {
        let (head, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        match head {
            "torsionfree" => {
                let flag = rest
                    .trim()
                    .strip_prefix("divisible=")
                    .ok_or_else(|| perr(line, "expected `torsionfree divisible=yes|no`"))?;
                torsion_free = Some(match flag.trim() {
                    "yes" => true,
                    "no" => false,
                    other => return Err(perr(line, format!("divisible must be yes or no, not `{other}`"))),
                });
            }
            "component" => {
                any_component = true;
                let rest = rest.trim();
                let rest = rest.strip_prefix("p=").ok_or_else(|| perr(line, "expected `p=<prime>` or `p=*`"))?;
                let (p_text, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let (kind, spec) = body.trim().split_once(char::is_whitespace).unwrap_or((body.trim(), ""));
                let shape = match kind {
                    "cyclic" => {
                        let fam = parse_cyclic(line, spec)?;
                        fam.validate().map_err(|m| perr(line, m))?;
                        ComponentShape { cyclic: vec![fam], pruefer: PrueferCount::Finite(0) }
                    }
                    "pruefer" => {
                        let count = spec
                            .trim()
                            .strip_prefix("count=")
                            .ok_or_else(|| perr(line, "expected `count=<n>|omega`"))?;
                        let pruefer = match count.trim() {
                            "omega" => PrueferCount::Omega,
                            n => PrueferCount::Finite(
                                n.parse().map_err(|_| perr(line, format!("bad count `{n}`")))?,
                            ),
                        };
                        ComponentShape { cyclic: Vec::new(), pruefer }
                    }
                    other => return Err(perr(line, format!("unknown summand kind `{other}`"))),
                };
                if p_text == "*" {
                    desc.every_prime.get_or_insert_with(ComponentShape::default).merge(shape);
                } else {
                    let p: u64 = p_text.parse().map_err(|_| perr(line, format!("bad prime `{p_text}`")))?;
                    if !is_prime_u64(p) {
                        return Err(perr(line, format!("{p} is not prime")));
                    }
                    desc.components.entry(p).or_default().merge(shape);
                }
                if desc.every_prime.is_some() && !desc.components.is_empty() {
                    return Err(perr(line, "`p=*` cannot be combined with explicit primes"));
                }
            }
            other => return Err(perr(line, format!("unknown keyword `{other}`"))),
        }
    }
    match (torsion_free, any_component) {
        (Some(_), true) => Err(perr(1, "a descriptor is either torsion-free or periodic, not both")),
        (Some(divisible), false) => Ok(GroupDescriptor::TorsionFree { divisible }),
        (None, _) => Ok(GroupDescriptor::Periodic(desc)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(text: &str) -> PeriodicAbelianDescriptor {
        match parse_descriptor(text).unwrap() {
            GroupDescriptor::Periodic(d) => d,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn families() {
        let d = periodic("component p=2 cyclic k_i = 2*i+1 for i>=1\ncomponent p=3 pruefer count=omega\ncomponent p=5 cyclic [1,1,3]");
        let c2 = &d.components[&2].cyclic[0];
        assert_eq!(*c2, CyclicFamily::Arithmetic { a: 2, b: 1, from: 1 });
        assert_eq!(c2.exponent(3), Some(7));
        assert!(!c2.is_bounded());
        assert_eq!(d.components[&3].pruefer, PrueferCount::Omega);
        assert_eq!(d.components[&5].cyclic[0].max_exponent(), Some(3));
        assert!(d.component(7).shape.is_trivial());
    }

    #[test]
    fn doubling_rules() {
        let d = periodic("component p=2 cyclic k_1 = 2, k_{i+1} = 2*k_i + 1");
        let c = &d.components[&2].cyclic[0];
        assert_eq!(*c, CyclicFamily::Doubling { k1: 2, c: 1 });
        let ks: Vec<_> = (1..=4).map(|i| c.exponent(i).unwrap()).collect();
        assert_eq!(ks, vec![2, 5, 11, 23]);
        let flat = periodic("component p=2 cyclic k_1 = 3, k_{i+1} = 2*k_i - 3");
        assert!(flat.components[&2].cyclic[0].is_bounded());
        assert!(parse_descriptor("component p=2 cyclic k_1 = 3, k_{i+1} = 2*k_i - 4").is_err());
        assert!(parse_descriptor("component p=2 cyclic k_1 = 3, k_{i+1} = k_i*k_i").is_err());
    }

    #[test]
    fn errors() {
        assert!(parse_descriptor("component p=4 cyclic [1]").is_err());
        assert!(parse_descriptor("component p=2 cyclic [0]").is_err());
        assert!(parse_descriptor("component p=2 cyclic k_i = i - 3").is_err());
        assert!(parse_descriptor("component p=* cyclic [1]\ncomponent p=2 cyclic [1]").is_err());
        assert!(parse_descriptor("torsionfree divisible=maybe").is_err());
        assert_eq!(
            parse_descriptor("torsionfree divisible=yes").unwrap(),
            GroupDescriptor::TorsionFree { divisible: true }
        );
    }

    #[test]
    fn display_round_trip() {
        let text = "component p=2 cyclic k_i = 1*i + 0 for i>=1\ncomponent p=2 pruefer count=omega\n\
                    component p=3 cyclic k_1 = 2, k_{i+1} = 2*k_i - 1\ncomponent p=5 cyclic [1, 2]\n";
        let d = parse_descriptor(text).unwrap();
        assert_eq!(d.to_string(), text);
        assert_eq!(parse_descriptor(&d.to_string()).unwrap(), d);
        let star = parse_descriptor("component p=* cyclic [1]").unwrap();
        assert_eq!(parse_descriptor(&star.to_string()).unwrap(), star);
    }
}
