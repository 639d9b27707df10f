//! Integer expressions used inside generated-system rules.
//!
//! The sublanguage has integer literals, the rule index variable, `+ - * ^`,
//! parentheses, sequence references `k_i` / `k_3` / `k_{i-1}` and the builtin
//! `prime(n)` (the n-th prime, `prime(1) = 2`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::nth_prime;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Index,
    Seq(String, Box<Expr>),
    Prime(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("rule index used outside a rule")]
    NoIndex,
    #[error("sequence `{name}` is undefined at index {index}")]
    UndefinedSeq { name: String, index: BigInt },
    #[error("exponent {0} out of range for `^`")]
    BadPower(BigInt),
    #[error("prime({0}) requires an index >= 1")]
    BadPrimeIndex(BigInt),
    #[error("sequence recursion exceeded depth {0}")]
    TooDeep(usize),
}

const MAX_POW: u32 = 1 << 20;
const MAX_DEPTH: usize = 512;

/// Definition of one named sequence: explicit values at given indices plus an
/// optional general formula valid from `from` upward.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeqDef {
    pub bases: BTreeMap<u64, Expr>,
    pub general: Option<(u64, Expr)>,
}

impl SeqDef {
    /// `Some(indices)` when the sequence is only defined at explicit indices.
    pub fn finite_domain(&self) -> Option<Vec<u64>> {
        match self.general {
            Some(_) => None,
            None => Some(self.bases.keys().copied().collect()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeqTable {
    pub defs: BTreeMap<String, SeqDef>,
}

impl SeqTable {
    pub fn get(&self, name: &str) -> Option<&SeqDef> {
        self.defs.get(name)
    }

    pub fn define_base(&mut self, name: &str, index: u64, value: Expr) {
        self.defs.entry(name.to_string()).or_default().bases.insert(index, value);
    }

    pub fn define_general(&mut self, name: &str, from: u64, formula: Expr) {
        self.defs.entry(name.to_string()).or_default().general = Some((from, formula));
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

/// Evaluation context; memoizes sequence values.
pub struct Evaluator<'a> {
    seqs: &'a SeqTable,
    memo: HashMap<(String, u64), BigInt>,
    depth: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(seqs: &'a SeqTable) -> Self {
        Evaluator { seqs, memo: HashMap::new(), depth: 0 }
    }

    pub fn eval(&mut self, e: &Expr, index: Option<&BigInt>) -> Result<BigInt, ExprError> {
        Ok(match e {
            Expr::Int(v) => v.clone(),
            Expr::Index => index.cloned().ok_or(ExprError::NoIndex)?,
            Expr::Neg(a) => -self.eval(a, index)?,
            Expr::Add(a, b) => self.eval(a, index)? + self.eval(b, index)?,
            Expr::Sub(a, b) => self.eval(a, index)? - self.eval(b, index)?,
            Expr::Mul(a, b) => self.eval(a, index)? * self.eval(b, index)?,
            Expr::Pow(a, b) => {
                let base = self.eval(a, index)?;
                let exp = self.eval(b, index)?;
                match exp.to_u32() {
                    Some(k) if k <= MAX_POW => num_traits::pow(base, k as usize),
                    _ => return Err(ExprError::BadPower(exp)),
                }
            }
            Expr::Prime(a) => {
                let n = self.eval(a, index)?;
                match n.to_u64() {
                    Some(k) if (1..=1_000_000).contains(&k) => BigInt::from(nth_prime(k as usize)),
                    _ => return Err(ExprError::BadPrimeIndex(n)),
                }
            }
            Expr::Seq(name, arg) => {
                let at = self.eval(arg, index)?;
                self.seq_value(name, &at)?
            }
        })
    }

    /// Fills the memo for `from..n` bottom-up so that recurrences referring
    /// to earlier terms never recurse deeply. Failures are left for the
    /// direct evaluation to report.
    fn warm_up(&mut self, name: &str, from: u64, n: u64) {
        if self.depth > 0 || n.saturating_sub(from) < 16 {
            return;
        }
        self.depth += 1;
        for j in from..n {
            if !self.memo.contains_key(&(name.to_string(), j)) {
                let _ = self.seq_value(name, &BigInt::from(j));
            }
        }
        self.depth -= 1;
    }

    pub fn seq_value(&mut self, name: &str, at: &BigInt) -> Result<BigInt, ExprError> {
        let undefined = || ExprError::UndefinedSeq { name: name.to_string(), index: at.clone() };
        let n = at.to_u64().ok_or_else(undefined)?;
        if let Some(v) = self.memo.get(&(name.to_string(), n)) {
            return Ok(v.clone());
        }
        let def = self.seqs.get(name).ok_or_else(undefined)?;
        let (formula, bind) = if let Some(b) = def.bases.get(&n) {
            (b, None)
        } else {
            match &def.general {
                Some((from, f)) if n >= *from => (f, Some(BigInt::from(n))),
                _ => return Err(undefined()),
            }
        };
        if let (Some(_), Some((from, _))) = (&bind, &def.general) {
            self.warm_up(name, *from, n);
        }
        if self.depth >= MAX_DEPTH {
            return Err(ExprError::TooDeep(MAX_DEPTH));
        }
        self.depth += 1;
        let v = self.eval(formula, bind.as_ref());
        self.depth -= 1;
        let v = v?;
        self.memo.insert((name.to_string(), n), v.clone());
        Ok(v)
    }
}

impl Expr {
    pub fn int(v: impl Into<BigInt>) -> Self {
        Expr::Int(v.into())
    }

    /// Recognizes `a*i + b` built from literals, the index, `+ - *` and
    /// negation. Returns `(a, b)`.
    pub fn as_affine(&self) -> Option<(BigInt, BigInt)> {
        match self {
            Expr::Int(v) => Some((BigInt::zero(), v.clone())),
            Expr::Index => Some((BigInt::one(), BigInt::zero())),
            Expr::Neg(a) => a.as_affine().map(|(x, y)| (-x, -y)),
            Expr::Add(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                Some((a1 + a2, b1 + b2))
            }
            Expr::Sub(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                Some((a1 - a2, b1 - b2))
            }
            Expr::Mul(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                if !a1.is_zero() && !a2.is_zero() {
                    return None;
                }
                Some((a1 * &b2 + a2 * &b1, b1 * b2))
            }
            Expr::Pow(a, b) => {
                let (a1, b1) = a.as_affine()?;
                let (a2, b2) = b.as_affine()?;
                if !a1.is_zero() || !a2.is_zero() || b2.is_negative() {
                    return None;
                }
                Some((BigInt::zero(), num_traits::pow(b1, b2.to_usize()?)))
            }
            Expr::Seq(..) | Expr::Prime(_) => None,
        }
    }

    /// Constant value if the expression does not mention the index or any
    /// sequence.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.as_affine()? {
            (a, b) if a.is_zero() => Some(b),
            _ => None,
        }
    }

    pub fn mentions_index(&self) -> bool {
        match self {
            Expr::Int(_) => false,
            Expr::Index => true,
            Expr::Seq(_, a) | Expr::Prime(a) | Expr::Neg(a) => a.mentions_index(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Pow(a, b) => {
                a.mentions_index() || b.mentions_index()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(v) if v.is_negative() => 3,
            _ => 5,
        }
    }

    /// Writes the expression with the rule index printed as `var`.
    pub fn write(&self, f: &mut impl fmt::Write, var: &str) -> fmt::Result {
        fn wrap(f: &mut impl fmt::Write, e: &Expr, min: u8, var: &str) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "(")?;
                e.write(f, var)?;
                write!(f, ")")
            } else {
                e.write(f, var)
            }
        }
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Index => write!(f, "{var}"),
            Expr::Seq(name, a) => {
                write!(f, "{name}_")?;
                write_subscript(f, a, var)
            }
            Expr::Prime(a) => {
                write!(f, "prime(")?;
                a.write(f, var)?;
                write!(f, ")")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4, var)
            }
            Expr::Add(a, b) => {
                wrap(f, a, 1, var)?;
                write!(f, " + ")?;
                wrap(f, b, 2, var)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1, var)?;
                write!(f, " - ")?;
                wrap(f, b, 2, var)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2, var)?;
                write!(f, "*")?;
                wrap(f, b, 3, var)
            }
            Expr::Pow(a, b) => {
                wrap(f, a, 5, var)?;
                write!(f, "^")?;
                wrap(f, b, 4, var)
            }
        }
    }

    pub fn render(&self, var: &str) -> String {
        let mut s = String::new();
        self.write(&mut s, var).expect("writing to a String cannot fail");
        s
    }
}

/// Subscripts print bare when they are a plain literal or the index.
pub(crate) fn write_subscript(f: &mut impl fmt::Write, e: &Expr, var: &str) -> fmt::Result {
    match e {
        Expr::Int(v) if !v.is_negative() => write!(f, "{v}"),
        Expr::Index => write!(f, "{var}"),
        _ => {
            write!(f, "{{")?;
            e.write(f, var)?;
            write!(f, "}}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_doubling() -> SeqTable {
        let mut t = SeqTable::default();
        t.define_base("k", 0, Expr::int(0));
        t.define_base("k", 1, Expr::int(2));
        // k_i = 2*k_{i-1} + 1
        t.define_general(
            "k",
            2,
            Expr::Add(
                Box::new(Expr::Mul(
                    Box::new(Expr::int(2)),
                    Box::new(Expr::Seq(
                        "k".into(),
                        Box::new(Expr::Sub(Box::new(Expr::Index), Box::new(Expr::int(1)))),
                    )),
                )),
                Box::new(Expr::int(1)),
            ),
        );
        t
    }

    #[test]
    fn recurrence_values() {
        let t = seq_doubling();
        let mut ev = Evaluator::new(&t);
        let ks: Vec<BigInt> = (0..6).map(|i| ev.seq_value("k", &BigInt::from(i)).unwrap()).collect();
        let expect: Vec<BigInt> = [0, 2, 5, 11, 23, 47].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(ks, expect);
    }

    #[test]
    fn deep_recurrence_is_linear() {
        let t = seq_doubling();
        let mut ev = Evaluator::new(&t);
        let k = ev.seq_value("k", &BigInt::from(200)).unwrap();
        // k_i + 1 = 3 * 2^(i-1)
        assert_eq!(k + 1, BigInt::from(3) * num_traits::pow(BigInt::from(2), 199));
    }

    #[test]
    fn undefined_index() {
        let t = seq_doubling();
        let mut ev = Evaluator::new(&t);
        assert!(matches!(ev.seq_value("q", &BigInt::from(1)), Err(ExprError::UndefinedSeq { .. })));
        let mut t2 = SeqTable::default();
        t2.define_base("p", 1, Expr::int(2));
        let mut ev2 = Evaluator::new(&t2);
        assert!(ev2.seq_value("p", &BigInt::from(2)).is_err());
    }

    #[test]
    fn affine_recognition() {
        let e = Expr::Add(Box::new(Expr::Index), Box::new(Expr::int(1)));
        assert_eq!(e.as_affine(), Some((BigInt::one(), BigInt::one())));
        let sq = Expr::Mul(Box::new(Expr::Index), Box::new(Expr::Index));
        assert_eq!(sq.as_affine(), None);
        assert_eq!(Expr::Prime(Box::new(Expr::Index)).as_affine(), None);
    }

    #[test]
    fn render_round_shape() {
        let e = Expr::Pow(
            Box::new(Expr::int(2)),
            Box::new(Expr::Sub(
                Box::new(Expr::Seq("k".into(), Box::new(Expr::Index))),
                Box::new(Expr::Seq(
                    "k".into(),
                    Box::new(Expr::Sub(Box::new(Expr::Index), Box::new(Expr::int(1)))),
                )),
            )),
        );
        assert_eq!(e.render("i"), "2^(k_i - k_{i - 1})");
    }
}
