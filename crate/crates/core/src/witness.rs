//! The explicit unimodular systems with no solution in the groups the
//! criteria reject, and their verification on finite truncations.
//!
//! The bidiagonal family `x_i x_{i+1}^{-p^{k_i - k_{i-1}}} = a_i` forces the
//! order of `x_1` up as more equations are added; the cross-prime family
//! `x y_i^{-p_i^{m_i}} = a_i` forces `x` to have a nontrivial component at
//! every prime.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rayon::prelude::*;

use crate::abelian::{min_prime_parts, solve_over_finite_abelian, AbelianSolveError, FiniteAbelianGroup};
use crate::arith::{is_prime_u64, nth_prime};
use crate::syntax::parse_system;
use crate::system::{EquationSystem, GenError};
use crate::word::{evaluate, GroupWord, Letter, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("k_1 = {k1} must exceed m = {m}")]
    FirstTooSmall { k1: u64, m: u64 },
    #[error("k_{next} = {value} must exceed 2*k_{prev} = {bound}", next = .index + 1, prev = .index)]
    NotDoubling { index: usize, value: u64, bound: u64 },
    #[error("k_{0} does not fit in 64 bits")]
    Overflow(usize),
    #[error("k sequence has only {have} terms, {want} needed")]
    TooShort { have: usize, want: usize },
    #[error("prime {0} appears twice")]
    RepeatedPrime(u64),
    #[error("no (prime, exponent) pairs given")]
    EmptyData,
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] AbelianSolveError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KRule {
    /// `k_1 = first`, `k_{i+1} = 2 k_i + offset`.
    Doubling { first: u64, offset: u64 },
    /// Finitely many explicit terms.
    Explicit(Vec<u64>),
}

/// Exponents `k_1 < k_2 < …` with `k_1 > m` and `k_{i+1} > 2 k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSequence {
    pub p: u64,
    pub m: u64,
    pub rule: KRule,
}

impl KSequence {
    /// `k_1 = m + 1`, `k_{i+1} = 2 k_i + 1`: the smallest admissible choice.
    pub fn default_rule(p: u64, m: u64) -> Result<Self, WitnessError> {
        Self::new(p, m, KRule::Doubling { first: m + 1, offset: 1 })
    }

    pub fn new(p: u64, m: u64, rule: KRule) -> Result<Self, WitnessError> {
        if !is_prime_u64(p) {
            return Err(WitnessError::NotPrime(p));
        }
        let ks = KSequence { p, m, rule };
        match &ks.rule {
            KRule::Doubling { first, offset } => {
                if *first <= m {
                    return Err(WitnessError::FirstTooSmall { k1: *first, m });
                }
                if *offset == 0 {
                    return Err(WitnessError::NotDoubling { index: 1, value: 2 * first, bound: 2 * first });
                }
            }
            KRule::Explicit(v) => {
                // every term is checked once here; `k` re-checks on emission
                ks.terms(v.len())?;
            }
        }
        Ok(ks)
    }

    /// Number of available terms; `None` for an unbounded rule.
    pub fn len(&self) -> Option<usize> {
        match &self.rule {
            KRule::Doubling { .. } => None,
            KRule::Explicit(v) => Some(v.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// `k_1, …, k_n`, enforcing both inequalities on every emitted term.
    pub fn terms(&self, n: usize) -> Result<Vec<u64>, WitnessError> {
        let mut out: Vec<u64> = Vec::with_capacity(n);
        for i in 1..=n {
            let k = match &self.rule {
                KRule::Doubling { first, offset } => match out.last() {
                    None => *first,
                    Some(&prev) => prev
                        .checked_mul(2)
                        .and_then(|d| d.checked_add(*offset))
                        .ok_or(WitnessError::Overflow(i))?,
                },
                KRule::Explicit(v) => *v.get(i - 1).ok_or(WitnessError::TooShort { have: v.len(), want: n })?,
            };
            match out.last() {
                None if k <= self.m => return Err(WitnessError::FirstTooSmall { k1: k, m: self.m }),
                Some(&prev) if k <= 2 * prev => {
                    return Err(WitnessError::NotDoubling { index: i - 1, value: k, bound: 2 * prev })
                }
                _ => {}
            }
            out.push(k);
        }
        Ok(out)
    }

    /// `k_i` for `i >= 1`, and `k_0 = 0`.
    pub fn k(&self, i: usize) -> Result<u64, WitnessError> {
        if i == 0 {
            return Ok(0);
        }
        Ok(*self.terms(i)?.last().expect("i >= 1"))
    }
}

impl fmt::Display for KSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            KRule::Doubling { first, offset } => {
                write!(f, "p={}, m={}, k_1 = {first}, k_(i+1) = 2*k_i + {offset}", self.p, self.m)
            }
            KRule::Explicit(v) => {
                let s: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "p={}, m={}, k = ({})", self.p, self.m, s.join(", "))
            }
        }
    }
}

fn big_pow(p: u64, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(p), e as usize)
}

/// The bidiagonal system as a rule: equation `n` is
/// `x_n x_{n+1}^{-p^{k_n - k_{n-1}}} = a_n`.
pub fn ulmbad_system(ks: &KSequence) -> Result<EquationSystem, WitnessError> {
    let mut text = String::from("varfamily x\ncoefffamily a\nseq k_0 = 0\n");
    match &ks.rule {
        KRule::Doubling { first, offset } => {
            writeln!(text, "seq k_1 = {first}").unwrap();
            writeln!(text, "seq k_i = 2*k_{{i-1}} + {offset} for i>=2").unwrap();
        }
        KRule::Explicit(v) => {
            for (i, k) in v.iter().enumerate() {
                writeln!(text, "seq k_{} = {k}", i + 1).unwrap();
            }
        }
    }
    writeln!(text, "rule i: x_i x_{{i+1}}^-{{{}^(k_i - k_{{i-1}})}} = a_i", ks.p).unwrap();
    Ok(parse_system(&text).expect("generated system text is well formed"))
}

/// Result of multiplying the first `n` equations after raising equation `i`
/// to `p^{k_{i-1}}`: `x_1 x_{n+1}^{-p^{k_n}} = word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Telescoped {
    pub word: GroupWord,
    /// Order of `word` in `⊕ ⟨a_i⟩_{p^{k_i}}`, computed in that group.
    pub order: BigUint,
    /// `p^{k_n - k_{n-1}}`.
    pub closed_form: BigUint,
}

pub fn telescope(ks: &KSequence, n: usize) -> Result<Telescoped, WitnessError> {
    assert!(n >= 1, "telescoping needs at least one equation");
    let k = ks.terms(n)?;
    let prev = |i: usize| if i == 0 { 0 } else { k[i - 1] };
    let word = GroupWord::from_letters(
        (0..n).map(|i| Letter::coeff(Symbol::indexed("a", i as u64 + 1), BigInt::from(big_pow(ks.p, prev(i))))),
    );
    let group = FiniteAbelianGroup::new(k.iter().map(|&ki| BigInt::from(big_pow(ks.p, ki))).collect())
        .expect("moduli at least p");
    let coeffs: HashMap<_, _> = (0..n).map(|i| (Symbol::indexed("a", i as u64 + 1), group.basis(i))).collect();
    let value = evaluate(&word, &HashMap::new(), &coeffs, &group).expect("every a_i is bound");
    let order = group.order_of(&value);
    Ok(Telescoped { word, order, closed_form: big_pow(ks.p, k[n - 1] - prev(n - 1)) })
}

/// A prime power `p^e`, kept symbolic so huge orders print compactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    pub p: u64,
    pub e: u64,
}

impl PrimePower {
    pub fn value(&self) -> BigUint {
        big_pow(self.p, self.e)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.e)
    }
}

/// One truncation of the bidiagonal family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub n: usize,
    pub k_n: u64,
    pub telescoped_order: PrimePower,
    /// Minimal order of `x_1` over all solutions of the truncation.
    pub min_order: PrimePower,
    /// `p^{m 2^{n-2}}` for `n >= 2`, else 1.
    pub doubling_bound: PrimePower,
    pub holds: bool,
}

pub fn doubling_bound(ks: &KSequence, n: usize) -> PrimePower {
    let e = if n >= 2 { ks.m.checked_shl((n - 2) as u32).unwrap_or(u64::MAX) } else { 0 };
    PrimePower { p: ks.p, e }
}

fn ulmbad_truncation(ks: &KSequence, sys: &EquationSystem, n: usize) -> Result<WitnessReport, WitnessError> {
    let k = ks.terms(n)?;
    let eqs = sys.truncate(n)?;
    let group = FiniteAbelianGroup::new(k.iter().map(|&ki| BigInt::from(big_pow(ks.p, ki))).collect())
        .expect("moduli at least p");
    let coeffs: HashMap<_, _> = (0..n).map(|i| (Symbol::indexed("a", i as u64 + 1), group.basis(i))).collect();
    let sol = solve_over_finite_abelian(&sys.decls, &eqs, &group, &coeffs)?;
    let parts = min_prime_parts(&sol, &Symbol::indexed("x", 1))?;
    let e = parts.get(&BigUint::from(ks.p)).copied().unwrap_or(0);
    let min_order = PrimePower { p: ks.p, e };
    let tele = telescope(ks, n)?;
    let tele_e = k[n - 1] - if n >= 2 { k[n - 2] } else { 0 };
    debug_assert_eq!(tele.order, tele.closed_form);
    let bound = doubling_bound(ks, n);
    let holds = tele.order == tele.closed_form && min_order.e >= tele_e && min_order.e >= bound.e;
    Ok(WitnessReport {
        n,
        k_n: k[n - 1],
        telescoped_order: PrimePower { p: ks.p, e: tele_e },
        min_order,
        doubling_bound: bound,
        holds,
    })
}

/// Solves truncations `1..=n_max` over `⊕_{i<=n} ⟨a_i⟩_{p^{k_i}}` and
/// measures the smallest possible order of `x_1`.
pub fn verify_ulmbad(ks: &KSequence, n_max: usize) -> Result<Vec<WitnessReport>, WitnessError> {
    let sys = ulmbad_system(ks)?;
    (1..=n_max).into_par_iter().map(|n| ulmbad_truncation(ks, &sys, n)).collect()
}

/// Whether the min-order column strictly increases.
pub fn growth_is_strict(reports: &[WitnessReport]) -> bool {
    reports.windows(2).all(|w| w[0].min_order.e < w[1].min_order.e)
}

/// Tab-separated growth table with a header line.
pub fn growth_table(reports: &[WitnessReport]) -> String {
    let mut out = String::from("n\tk_n\ttelescoped_order\tmin_order_bound\tdoubling_bound\tverdict\n");
    for r in reports {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.n,
            r.k_n,
            r.telescoped_order,
            r.min_order,
            r.doubling_bound,
            if r.holds { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    out
}

fn check_pairs(data: &[(u64, u64)]) -> Result<(), WitnessError> {
    if data.is_empty() {
        return Err(WitnessError::EmptyData);
    }
    let mut seen = BTreeSet::new();
    for &(p, _) in data {
        if !is_prime_u64(p) {
            return Err(WitnessError::NotPrime(p));
        }
        if !seen.insert(p) {
            return Err(WitnessError::RepeatedPrime(p));
        }
    }
    Ok(())
}

/// `x y_i^{-p_i^{m_i}} = a_i` for the listed pairs.
pub fn crossprime_system(data: &[(u64, u64)]) -> Result<EquationSystem, WitnessError> {
    check_pairs(data)?;
    let mut text = String::from("var x\nvarfamily y\ncoefffamily a\n");
    for (i, (p, m)) in data.iter().enumerate() {
        writeln!(text, "seq p_{0} = {p}; seq m_{0} = {m}", i + 1).unwrap();
    }
    text.push_str("rule i: x y_i^-{p_i^m_i} = a_i\n");
    Ok(parse_system(&text).expect("generated system text is well formed"))
}

/// The same family over every prime, `p_i` the `i`-th prime, fixed `m`.
pub fn crossprime_all_primes(m: u64) -> EquationSystem {
    parse_system(&format!("var x\nvarfamily y\ncoefffamily a\nrule i: x y_i^-{{prime(i)^{m}}} = a_i\n"))
        .expect("generated system text is well formed")
}

/// `(p_i, m)` for the first `n` primes.
pub fn first_primes(n: usize, m: u64) -> Vec<(u64, u64)> {
    (1..=n).map(|i| (nth_prime(i), m)).collect()
}

/// Minimal order of the `p_i`-part of `x`, per prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossprimeReport {
    pub n: usize,
    pub parts: Vec<PrimePower>,
    pub holds: bool,
}

/// Solves truncation `n` over `⊕_{i<=n} Z/p_i^{m_i + 1}` with `a_i` the
/// generators, and checks that every solution's `x` has a nontrivial
/// `p_i`-component for each `i <= n`.
pub fn verify_crossprime(data: &[(u64, u64)], n: usize) -> Result<CrossprimeReport, WitnessError> {
    let sys = crossprime_system(data)?;
    if n > data.len() {
        return Err(WitnessError::TooShort { have: data.len(), want: n });
    }
    let eqs = sys.truncate(n)?;
    let group = FiniteAbelianGroup::new(data[..n].iter().map(|&(p, m)| BigInt::from(big_pow(p, m + 1))).collect())
        .expect("moduli at least p");
    let coeffs: HashMap<_, _> = (0..n).map(|i| (Symbol::indexed("a", i as u64 + 1), group.basis(i))).collect();
    let sol = solve_over_finite_abelian(&sys.decls, &eqs, &group, &coeffs)?;
    let found = min_prime_parts(&sol, &Symbol::plain("x"))?;
    let parts: Vec<PrimePower> = data[..n]
        .iter()
        .map(|&(p, _)| PrimePower { p, e: found.get(&BigUint::from(p)).copied().unwrap_or(0) })
        .collect();
    let holds = parts.iter().all(|pp| !pp.value().is_one());
    Ok(CrossprimeReport { n, parts, holds })
}
