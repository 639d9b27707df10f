//! Exact classification of exponent-sum matrices: nonsingular over the
//! rationals, nonsingular modulo p, and unimodular (nonsingular modulo every
//! prime), all read off the Smith normal form.

mod matrix;
mod snf;
mod structural;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

pub use matrix::{det, identity, mat_mul, Dense, ExponentMatrix, MatrixParseError};
pub use snf::{smith_normal_form, SnfResult};
pub use structural::{structural_shape, StructuralShape};

use crate::arith::prime_divisors;
use crate::report::Report;
use crate::system::{exponent_matrix, EquationSystem, GenError};

/// Primes modulo which the rows become dependent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularPrimes {
    /// No prime is singular: the system is unimodular.
    None,
    Finite(BTreeSet<BigUint>),
    /// The rows are dependent over the rationals, hence modulo every prime.
    All,
}

impl SingularPrimes {
    pub fn contains(&self, p: &BigUint) -> bool {
        match self {
            SingularPrimes::None => false,
            SingularPrimes::Finite(s) => s.contains(p),
            SingularPrimes::All => true,
        }
    }
}

impl fmt::Display for SingularPrimes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularPrimes::None => f.write_str("none"),
            SingularPrimes::All => f.write_str("all"),
            SingularPrimes::Finite(s) => {
                let v: Vec<String> = s.iter().map(BigUint::to_string).collect();
                f.write_str(&v.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub n_rows: usize,
    pub n_cols: usize,
    pub rank: usize,
    pub nonsingular: bool,
    pub elementary_divisors: Vec<BigInt>,
    pub singular_primes: SingularPrimes,
    pub unimodular: bool,
}

impl Classification {
    pub fn rank_mod_p(&self, p: &BigUint) -> usize {
        let p = BigInt::from(p.clone());
        self.elementary_divisors.iter().filter(|d| !d.is_zero() && !(*d % &p).is_zero()).count()
    }

    pub fn is_p_nonsingular(&self, p: &BigUint) -> bool {
        !self.singular_primes.contains(p)
    }

    /// Nonsingular modulo every prime of `primes`.
    pub fn is_pi_nonsingular(&self, primes: &[BigUint]) -> bool {
        primes.iter().all(|p| self.is_p_nonsingular(p))
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        let divisors: Vec<String> = self.elementary_divisors.iter().map(short_int).collect();
        r.push("rows", self.n_rows)
            .push("cols", self.n_cols)
            .push("rank", self.rank)
            .push("nonsingular", self.nonsingular)
            .push("elementary_divisors", divisors.join(","))
            .push("singular_primes", &self.singular_primes)
            .push("unimodular", self.unimodular);
        r
    }

    /// One-line verdict such as `nonsingular; singular primes: {2}; not unimodular`.
    pub fn summary(&self) -> String {
        let ns = if self.nonsingular { "nonsingular" } else { "not nonsingular" };
        let primes = match &self.singular_primes {
            SingularPrimes::None => "{}".to_string(),
            SingularPrimes::All => "all".to_string(),
            SingularPrimes::Finite(s) => {
                let v: Vec<String> = s.iter().map(BigUint::to_string).collect();
                format!("{{{}}}", v.join(", "))
            }
        };
        let um = if self.unimodular { "unimodular" } else { "not unimodular" };
        format!("{ns}; singular primes: {primes}; {um}")
    }
}

/// Huge divisors print as `2^k` when they are powers of two; otherwise in full.
fn short_int(v: &BigInt) -> String {
    let bits = v.bits();
    if bits > 64 && v.magnitude().count_ones() == 1 {
        format!("2^{}", bits - 1)
    } else {
        v.to_string()
    }
}

pub fn classify(m: &ExponentMatrix) -> Classification {
    let snf = smith_normal_form(m);
    debug_assert_eq!(snf.verify(m), Ok(()));
    let rank = snf.rank();
    let n = m.n_rows();
    let nonsingular = rank == n;
    let singular_primes = if !nonsingular {
        SingularPrimes::All
    } else if n == 0 || snf.diagonal[n - 1].is_one() {
        SingularPrimes::None
    } else {
        // d_n carries every prime at which some d_i vanishes mod p
        let last = snf.diagonal[n - 1].magnitude().clone();
        SingularPrimes::Finite(prime_divisors(&last).into_iter().collect())
    };
    let unimodular = singular_primes == SingularPrimes::None;
    Classification {
        n_rows: n,
        n_cols: m.n_cols(),
        rank,
        nonsingular,
        elementary_divisors: snf.diagonal,
        singular_primes,
        unimodular,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationReport {
    /// Entry `i` classifies the first `i + 1` equations.
    pub truncations: Vec<Classification>,
    /// Set when the rule shape guarantees unimodularity for every truncation.
    pub structural: Option<StructuralShape>,
}

impl TruncationReport {
    pub fn all_unimodular(&self) -> bool {
        self.truncations.iter().all(|c| c.unimodular)
    }

    /// `unimodular (structural)`, `unimodular up to n=…; undetermined beyond`, …
    pub fn verdict(&self) -> String {
        let n = self.truncations.len();
        match (self.all_unimodular(), self.structural) {
            (true, Some(shape)) => format!("unimodular (structural: {shape})"),
            (true, None) => format!("unimodular for every truncation n <= {n}; undetermined beyond truncation {n}"),
            (false, _) => {
                let first = self.truncations.iter().position(|c| !c.unimodular).unwrap_or(0) + 1;
                format!("not unimodular at truncation {first}")
            }
        }
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("truncations", self.truncations.len());
        r.push("structural", self.structural.map_or("none".to_string(), |s| s.to_string()));
        r.push("verdict", self.verdict());
        for (i, c) in self.truncations.iter().enumerate() {
            r.extend_prefixed(&format!("n{}", i + 1), &c.to_report());
        }
        r
    }
}

/// Classifies truncations `1..=n_max` of a generated system.
pub fn classify_truncations(sys: &EquationSystem, n_max: usize) -> Result<TruncationReport, GenError> {
    let mut truncations = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        truncations.push(classify(&exponent_matrix(sys, n)?.matrix));
    }
    Ok(TruncationReport { truncations, structural: structural_shape(sys) })
}
