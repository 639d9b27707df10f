//! Recognition of rule shapes whose every truncation is unimodular.
//!
//! Two shapes are recognized from the rule template alone:
//!
//! * `Chain`: all variables belong to one family and are indexed `i + c`;
//!   the letters at the smallest offset have exponent sum `±1`. Row `i` then
//!   has a unit in column `i + c_min` and nothing to its left, so the
//!   truncation has a unit upper triangular maximal minor.
//! * `Star`: one plain variable with exponent sum `±1`, plus a single family
//!   letter `y_{i+c}` whose exponent is `±q_i^e` with `q_i` pairwise distinct
//!   primes. The maximal minors are the products of all but one `q_i^e`
//!   together with the product of all of them, and their gcd is 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::is_prime_u64;
use crate::expr::{Evaluator, Expr, SeqTable};
use crate::system::{Decl, EquationSystem, SystemSource, TBase, TFactor, TWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructuralShape {
    Chain,
    Star,
}

impl fmt::Display for StructuralShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructuralShape::Chain => "chain",
            StructuralShape::Star => "star",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Column {
    Plain(String),
    Family(String, BigInt),
}

/// The recognized shape of a generated system, if any.
pub fn structural_shape(sys: &EquationSystem) -> Option<StructuralShape> {
    let SystemSource::Generated(rule) = &sys.source else {
        return None;
    };
    let mut combined = rule.lhs.0.clone();
    combined.push(TFactor { base: TBase::Group(rule.rhs.clone()), exp: Some(Expr::int(-1)) });
    let letters = TWord(combined).flatten_symbolic()?;

    let mut sums: BTreeMap<Column, Vec<Expr>> = BTreeMap::new();
    for l in letters {
        let Some(decl) = sys.decls.vars.iter().find(|d| d.name() == l.name) else {
            continue;
        };
        let col = match (decl, &l.index) {
            (Decl::Plain(n), None) => Column::Plain(n.clone()),
            (Decl::Family { name, .. }, Some(ix)) => match ix.as_affine()? {
                (a, b) if a.is_one() => Column::Family(name.clone(), b),
                _ => return None,
            },
            _ => return None,
        };
        sums.entry(col).or_default().push(l.exp);
    }

    let unit = |parts: &[Expr]| {
        let mut total = BigInt::from(0);
        for e in parts {
            total += e.as_constant()?;
        }
        Some(total.abs().is_one())
    };

    let plain: Vec<_> = sums.iter().filter(|(c, _)| matches!(c, Column::Plain(_))).collect();
    let family: Vec<_> = sums.iter().filter(|(c, _)| matches!(c, Column::Family(..))).collect();
    let family_names: BTreeSet<&str> = family
        .iter()
        .map(|(c, _)| match c {
            Column::Family(n, _) => n.as_str(),
            Column::Plain(_) => unreachable!(),
        })
        .collect();

    if plain.is_empty() && family_names.len() == 1 {
        // BTreeMap order puts the smallest offset first
        if unit(family[0].1) == Some(true) {
            return Some(StructuralShape::Chain);
        }
        return None;
    }
    if plain.len() == 1 && family.len() == 1 && unit(plain[0].1) == Some(true) {
        let parts = family[0].1;
        if parts.len() == 1 && coprime_prime_powers(&parts[0], &sys.seqs) {
            return Some(StructuralShape::Star);
        }
    }
    None
}

/// True when `e(i) = ±q_i^k` with `q_i` distinct primes over every index the
/// rule can produce.
fn coprime_prime_powers(e: &Expr, seqs: &SeqTable) -> bool {
    let e = match e {
        Expr::Neg(inner) => inner.as_ref(),
        other => other,
    };
    let base = match e {
        Expr::Pow(b, _) => b.as_ref(),
        other => other,
    };
    match base {
        Expr::Prime(arg) => match arg.as_affine() {
            // injective in i, so distinct primes
            Some((a, b)) => a >= BigInt::one() && &a + &b >= BigInt::one(),
            None => false,
        },
        Expr::Seq(name, arg) => {
            let Some((a, b)) = arg.as_affine() else { return false };
            if !a.is_one() {
                return false;
            }
            let Some(domain) = seqs.get(name).and_then(|d| d.finite_domain()) else {
                return false;
            };
            let mut ev = Evaluator::new(seqs);
            let mut seen = BTreeSet::new();
            for at in domain {
                // only indices i >= 1 are ever produced
                if BigInt::from(at) - &b < BigInt::one() {
                    continue;
                }
                let Ok(v) = ev.seq_value(name, &BigInt::from(at)) else { return false };
                match v.to_u64() {
                    Some(q) if is_prime_u64(q) && seen.insert(q) => {}
                    _ => return false,
                }
            }
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn shape(text: &str) -> Option<StructuralShape> {
        structural_shape(&parse_system(text).unwrap())
    }

    #[test]
    fn chain_shape() {
        let text = "varfamily x\nseq k_0 = 0\nseq k_1 = 2\nseq k_i = 2*k_{i-1} + 1 for i>=2\n\
                    rule i: x_i x_{i+1}^-{2^(k_i - k_{i-1})} = a_i\n";
        assert_eq!(shape(text), Some(StructuralShape::Chain));
        // unit at the larger offset only: not recognized
        assert_eq!(shape("varfamily x\nrule i: x_i^2 x_{i+1} = a_i\n"), None);
        // unit cancelled by another letter
        assert_eq!(shape("varfamily x\nrule i: x_i x_{i+1} x_i = a_i\n"), None);
    }

    #[test]
    fn star_shape() {
        assert_eq!(shape("var x\nvarfamily y\nrule i: x y_i^-{prime(i)} = a_i\n"), Some(StructuralShape::Star));
        let list = "var x\nvarfamily y\nseq p_1 = 2\nseq p_2 = 3\nseq m_1 = 1\nseq m_2 = 4\n\
                    rule i: x y_i^-{p_i^m_i} = a_i\n";
        assert_eq!(shape(list), Some(StructuralShape::Star));
        let repeated = "var x\nvarfamily y\nseq p_1 = 2\nseq p_2 = 2\nrule i: x y_i^-{p_i} = a_i\n";
        assert_eq!(shape(repeated), None);
    }

    #[test]
    fn constant_rule_not_structural() {
        assert_eq!(shape("var x\nrule i: x^2 = a\n"), None);
    }
}
