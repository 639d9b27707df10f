//! Words in the free product of an abstract coefficient alphabet and a free
//! group on variables.
//!
//! A [`GroupWord`] is kept freely reduced: adjacent letters on the same
//! symbol are merged and cancelled. Coefficients are opaque symbols that only
//! acquire meaning when a word is evaluated in a concrete [`Group`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::group::Group;
use crate::system::Declarations;

/// A named symbol, optionally carrying a family index (`x_3`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub index: Option<u64>,
}

/// Variables and coefficient ids are both plain symbols; the letter kind
/// records which role a symbol plays.
pub type Variable = Symbol;
pub type CoeffId = Symbol;

impl Symbol {
    pub fn plain(name: &str) -> Self {
        Symbol { name: name.to_string(), index: None }
    }

    pub fn indexed(name: &str, index: u64) -> Self {
        Symbol { name: name.to_string(), index: Some(index) }
    }
}

/// `name` or `name_index`.
impl std::str::FromStr for Symbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let valid = |n: &str| {
            n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '\'')
        };
        let (name, index) = match s.split_once('_') {
            Some((n, i)) => (n, Some(i.parse::<u64>().map_err(|_| format!("bad index in symbol `{s}`"))?)),
            None => (s, None),
        };
        if !valid(name) {
            return Err(format!("bad symbol `{s}`"));
        }
        Ok(Symbol { name: name.to_string(), index })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}_{}", self.name, i),
            None => write!(f, "{}", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    Coeff { id: CoeffId, exponent: BigInt },
    Var { var: Variable, exponent: BigInt },
}

impl Letter {
    pub fn var(var: Variable, exponent: impl Into<BigInt>) -> Self {
        Letter::Var { var, exponent: exponent.into() }
    }

    pub fn coeff(id: CoeffId, exponent: impl Into<BigInt>) -> Self {
        Letter::Coeff { id, exponent: exponent.into() }
    }

    pub fn symbol(&self) -> &Symbol {
        match self {
            Letter::Coeff { id, .. } => id,
            Letter::Var { var, .. } => var,
        }
    }

    pub fn exponent(&self) -> &BigInt {
        match self {
            Letter::Coeff { exponent, .. } | Letter::Var { exponent, .. } => exponent,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Letter::Var { .. })
    }

    fn same_base(&self, other: &Letter) -> bool {
        self.is_var() == other.is_var() && self.symbol() == other.symbol()
    }

    fn with_exponent(&self, e: BigInt) -> Letter {
        match self {
            Letter::Coeff { id, .. } => Letter::Coeff { id: id.clone(), exponent: e },
            Letter::Var { var, .. } => Letter::Var { var: var.clone(), exponent: e },
        }
    }

    pub fn inverse(&self) -> Letter {
        self.with_exponent(-self.exponent())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())?;
        let e = self.exponent();
        if !e.is_one() {
            write!(f, "^{e}")?;
        }
        Ok(())
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    /// Builds the free reduction of the given letter sequence. Zero exponents
    /// are dropped.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l.exponent().is_zero() {
                continue;
            }
            match out.last_mut() {
                Some(top) if top.same_base(&l) => {
                    let e = top.exponent() + l.exponent();
                    if e.is_zero() {
                        out.pop();
                    } else {
                        *top = top.with_exponent(e);
                    }
                }
                _ => out.push(l),
            }
        }
        GroupWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        GroupWord::from_letters(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord::from_letters(self.letters.iter().rev().map(Letter::inverse))
    }

    /// `[u, v] = u^-1 v^-1 u v`.
    pub fn commutator(u: &GroupWord, v: &GroupWord) -> GroupWord {
        u.inverse().mul(&v.inverse()).mul(u).mul(v)
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let reps = n.unsigned_abs() as usize;
        GroupWord::from_letters(std::iter::repeat_n(base.letters, reps).flatten())
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Variable> {
        let mut seen = Vec::new();
        for l in &self.letters {
            if let Letter::Var { var, .. } = l {
                if !seen.contains(var) {
                    seen.push(var.clone());
                }
            }
        }
        seen
    }

    pub fn coefficients(&self) -> Vec<CoeffId> {
        let mut seen = Vec::new();
        for l in &self.letters {
            if let Letter::Coeff { id, .. } = l {
                if !seen.contains(id) {
                    seen.push(id.clone());
                }
            }
        }
        seen
    }

    /// Cyclic rotation by `k` letters (not re-reduced at the seam).
    pub fn rotate(&self, k: usize) -> GroupWord {
        if self.letters.is_empty() {
            return self.clone();
        }
        let k = k % self.letters.len();
        let mut v = self.letters[k..].to_vec();
        v.extend_from_slice(&self.letters[..k]);
        GroupWord::from_letters(v)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses a word. Identifiers declared as variables in `decls` become
/// variable letters; everything else follows the declarations' policy for
/// unknown symbols.
pub fn parse_word(text: &str, decls: &Declarations) -> Result<GroupWord, crate::syntax::ParseError> {
    crate::syntax::parse_word(text, decls)
}

/// Total signed exponent of `v` in `w`.
pub fn exponent_sum(w: &GroupWord, v: &Variable) -> BigInt {
    w.letters
        .iter()
        .filter_map(|l| match l {
            Letter::Var { var, exponent } if var == v => Some(exponent),
            _ => None,
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(Variable),
    #[error("coefficient `{0}` is not bound")]
    UnboundCoefficient(CoeffId),
}

/// Source of values for variables and coefficients.
pub trait Bindings<E> {
    fn variable(&self, v: &Variable) -> Option<&E>;
    fn coefficient(&self, c: &CoeffId) -> Option<&E>;
}

pub struct MapBindings<'a, E> {
    pub vars: &'a HashMap<Variable, E>,
    pub coeffs: &'a HashMap<CoeffId, E>,
}

impl<E> Bindings<E> for MapBindings<'_, E> {
    fn variable(&self, v: &Variable) -> Option<&E> {
        self.vars.get(v)
    }

    fn coefficient(&self, c: &CoeffId) -> Option<&E> {
        self.coeffs.get(c)
    }
}

/// Variables bound positionally against a fixed variable list; used by the
/// brute-force search to avoid building a map per candidate.
pub struct SlotBindings<'a, E> {
    pub names: &'a [Variable],
    pub values: &'a [E],
    pub coeffs: &'a HashMap<CoeffId, E>,
}

impl<E> Bindings<E> for SlotBindings<'_, E> {
    fn variable(&self, v: &Variable) -> Option<&E> {
        self.names.iter().position(|n| n == v).map(|i| &self.values[i])
    }

    fn coefficient(&self, c: &CoeffId) -> Option<&E> {
        self.coeffs.get(c)
    }
}

/// Product of the letters' images, left to right.
pub fn evaluate<G: Group>(
    w: &GroupWord,
    assignment: &HashMap<Variable, G::Elem>,
    coeffs: &HashMap<CoeffId, G::Elem>,
    g: &G,
) -> Result<G::Elem, EvalError> {
    evaluate_with(w, &MapBindings { vars: assignment, coeffs }, g)
}

pub fn evaluate_with<G: Group, B: Bindings<G::Elem>>(
    w: &GroupWord,
    bindings: &B,
    g: &G,
) -> Result<G::Elem, EvalError> {
    let mut acc = g.identity();
    for l in &w.letters {
        let base = match l {
            Letter::Var { var, .. } => {
                bindings.variable(var).ok_or_else(|| EvalError::UnboundVariable(var.clone()))?
            }
            Letter::Coeff { id, .. } => {
                bindings.coefficient(id).ok_or_else(|| EvalError::UnboundCoefficient(id.clone()))?
            }
        };
        let e = l.exponent();
        let term = if e.is_one() {
            base.clone()
        } else if e.is_negative() && e.magnitude().is_one() {
            g.inv(base)
        } else {
            g.pow(base, e)
        };
        acc = g.mul(&acc, &term);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Declarations;

    fn decls_xy() -> Declarations {
        Declarations::with_vars(&["x", "y"])
    }

    const PAPER_WORD: &str = "x^2 y^-3 g1 x y^2 x y^2 x^-1 y^-2 g2";

    #[test]
    fn example_word_shape() {
        let w = parse_word(PAPER_WORD, &decls_xy()).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w.variables(), vec![Symbol::plain("x"), Symbol::plain("y")]);
        assert_eq!(w.coefficients(), vec![Symbol::plain("g1"), Symbol::plain("g2")]);
    }

    #[test]
    fn example_exponent_sums() {
        let w = parse_word(PAPER_WORD, &decls_xy()).unwrap();
        assert_eq!(exponent_sum(&w, &Symbol::plain("y")), BigInt::from(-1));
        // independent fold over the raw syllables of the text
        let x_sum: i64 = PAPER_WORD
            .split_whitespace()
            .filter(|t| t.starts_with('x'))
            .map(|t| t.split_once('^').map_or(1, |(_, e)| e.parse::<i64>().unwrap()))
            .sum();
        assert_eq!(x_sum, 3);
        assert_eq!(exponent_sum(&w, &Symbol::plain("x")), BigInt::from(x_sum));
        assert_eq!(exponent_sum(&GroupWord::identity(), &Symbol::plain("x")), BigInt::zero());
    }

    #[test]
    fn empty_and_commutator() {
        let d = Declarations::with_vars(&["x"]);
        assert!(parse_word("", &d).unwrap().is_empty());
        let w = parse_word("[x,g] ", &d).unwrap();
        assert_eq!(w.to_string(), "x^-1 g^-1 x g");
        assert_eq!(w.len(), 4);
        assert!(matches!(w.letters()[1], Letter::Coeff { .. }));
    }

    #[test]
    fn reduction_cancels() {
        let d = decls_xy();
        let w = parse_word("x y y^-1 x^-1 g g^-1", &d).unwrap();
        assert!(w.is_empty());
        let w = parse_word("x x x^2", &d).unwrap();
        assert_eq!(w.to_string(), "x^4");
    }

    #[test]
    fn zero_exponent_rejected() {
        assert!(parse_word("x^0", &decls_xy()).is_err());
    }

    #[test]
    fn rotation_preserves_sums() {
        let w = parse_word(PAPER_WORD, &decls_xy()).unwrap();
        for k in 0..w.len() {
            let r = w.rotate(k);
            assert_eq!(exponent_sum(&r, &Symbol::plain("y")), BigInt::from(-1));
        }
    }
}
