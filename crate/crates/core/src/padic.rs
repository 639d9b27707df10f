//! Integer p-adic numbers at a fixed precision, the digit-series solution of
//! the bidiagonal system `x_k - p x_{k+1} = c_k`, periodicity detection and
//! rational reconstruction.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, mod_inverse};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PAdicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot combine a {0}-adic and a {1}-adic number")]
    PrimeMismatch(u64, u64),
    #[error("digit {digit} at position {position} is not below {p}")]
    DigitOutOfRange { position: usize, digit: u64, p: u64 },
    #[error("denominator {0} is not a unit: it is zero or divisible by p")]
    BadDenominator(BigInt),
    #[error("reconstruction bound {bound} is outside the sound window: 2*B^2 must not exceed p^N")]
    WindowViolated { bound: BigUint },
    #[error("{0}")]
    Parameters(String),
}

/// An element of `Z_p / p^N`, i.e. the first `N` base-`p` digits of a
/// p-adic integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicInt {
    p: u64,
    precision: usize,
    /// Least nonnegative residue mod `p^N`.
    residue: BigUint,
}

fn modulus(p: u64, n: usize) -> BigUint {
    num_traits::pow(BigUint::from(p), n)
}

impl PAdicInt {
    pub fn from_integer(n: &BigInt, p: u64, precision: usize) -> Result<Self, PAdicError> {
        if !is_prime_u64(p) {
            return Err(PAdicError::NotPrime(p));
        }
        let m = BigInt::from(modulus(p, precision));
        let residue = n.mod_floor(&m).to_biguint().expect("nonnegative");
        Ok(PAdicInt { p, precision, residue })
    }

    /// `num / den` with `den` prime to `p`.
    pub fn from_rational(num: &BigInt, den: &BigInt, p: u64, precision: usize) -> Result<Self, PAdicError> {
        if !is_prime_u64(p) {
            return Err(PAdicError::NotPrime(p));
        }
        if den.is_zero() || den.is_multiple_of(&BigInt::from(p)) {
            return Err(PAdicError::BadDenominator(den.clone()));
        }
        let m = BigInt::from(modulus(p, precision));
        if m.is_one() {
            return Self::from_integer(&BigInt::zero(), p, precision);
        }
        let inv = mod_inverse(den, &m).expect("unit mod p^N");
        Self::from_integer(&(num * inv), p, precision)
    }

    /// Least significant digit first.
    pub fn from_digits(p: u64, digits: &[u64]) -> Result<Self, PAdicError> {
        if !is_prime_u64(p) {
            return Err(PAdicError::NotPrime(p));
        }
        let mut residue = BigUint::zero();
        for (position, &d) in digits.iter().enumerate().rev() {
            if d >= p {
                return Err(PAdicError::DigitOutOfRange { position: position + 1, digit: d, p });
            }
            residue = residue * p + d;
        }
        Ok(PAdicInt { p, precision: digits.len(), residue })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn digits(&self) -> Vec<u64> {
        let mut r = self.residue.clone();
        let pb = BigUint::from(self.p);
        (0..self.precision)
            .map(|_| {
                let (q, d) = r.div_rem(&pb);
                r = q;
                d.to_u64().expect("digit below p")
            })
            .collect()
    }

    /// Drops digits beyond `precision`.
    pub fn truncate(&self, precision: usize) -> Self {
        let n = precision.min(self.precision);
        PAdicInt { p: self.p, precision: n, residue: &self.residue % modulus(self.p, n) }
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn combine(&self, other: &Self, f: impl Fn(BigInt, BigInt) -> BigInt) -> Result<Self, PAdicError> {
        if self.p != other.p {
            return Err(PAdicError::PrimeMismatch(self.p, other.p));
        }
        let n = self.precision.min(other.precision);
        Self::from_integer(&f(BigInt::from(self.residue.clone()), BigInt::from(other.residue.clone())), self.p, n)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PAdicError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PAdicError> {
        self.combine(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PAdicError> {
        self.combine(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Self {
        Self::from_integer(&-BigInt::from(self.residue.clone()), self.p, self.precision).expect("same prime")
    }

    /// Whether `self ≡ other` modulo `p^n` (both must carry `n` digits).
    pub fn agrees_to(&self, other: &Self, n: usize) -> bool {
        self.p == other.p && n <= self.precision.min(other.precision) && {
            let m = modulus(self.p, n);
            &self.residue % &m == &other.residue % &m
        }
    }
}

/// Digits least significant first; comma separated when `p > 10`.
impl fmt::Display for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.digits().iter().map(u64::to_string).collect();
        f.write_str(&d.join(if self.p > 10 { "," } else { "" }))
    }
}

/// What is known in advance about a digit rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Declared {
    Periodic(usize),
    Aperiodic,
    Unknown,
}

/// A digit sequence `c_1, c_2, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigitRule {
    Constant(u64),
    /// `c_i = digits[(i - 1) mod t]`.
    Periodic(Vec<u64>),
    /// `c_i = 1` exactly when `i` is a triangular number 1, 3, 6, 10, …, so
    /// the zero runs between ones keep growing.
    Triangular,
    /// Given digits, zero afterwards.
    Explicit(Vec<u64>),
}

impl DigitRule {
    pub fn digit(&self, i: usize) -> u64 {
        assert!(i >= 1, "digit positions start at 1");
        match self {
            DigitRule::Constant(d) => *d,
            DigitRule::Periodic(v) => v[(i - 1) % v.len()],
            DigitRule::Triangular => {
                // i = t(t+1)/2 for some t
                let t = (((8 * i + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
                let hit = (t.saturating_sub(1)..=t + 1).any(|t| t * (t + 1) / 2 == i);
                u64::from(hit)
            }
            DigitRule::Explicit(v) => v.get(i - 1).copied().unwrap_or(0),
        }
    }

    pub fn declared(&self) -> Declared {
        match self {
            DigitRule::Constant(_) => Declared::Periodic(1),
            DigitRule::Periodic(v) => Declared::Periodic(v.len()),
            DigitRule::Triangular => Declared::Aperiodic,
            DigitRule::Explicit(_) => Declared::Unknown,
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (1..=n).map(|i| self.digit(i)).collect()
    }
}

/// `triangular`, `constant:<d>`, `periodic:<d1,d2,…>` or `digits:<d1,d2,…>`.
impl FromStr for DigitRule {
    type Err = PAdicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let list = |t: &str| -> Result<Vec<u64>, PAdicError> {
            let v: Vec<u64> = t
                .split(',')
                .map(|d| d.trim().parse().map_err(|_| PAdicError::Parameters(format!("bad digit `{d}`"))))
                .collect::<Result<_, _>>()?;
            Ok(v)
        };
        match s.split_once(':') {
            None if s == "triangular" => Ok(DigitRule::Triangular),
            Some(("constant", d)) => Ok(DigitRule::Constant(
                d.trim().parse().map_err(|_| PAdicError::Parameters(format!("bad digit `{d}`")))?,
            )),
            Some(("periodic", t)) => Ok(DigitRule::Periodic(list(t)?)),
            Some(("digits", t)) => Ok(DigitRule::Explicit(list(t)?)),
            _ => Err(PAdicError::Parameters(format!(
                "unknown digit rule `{s}`; expected triangular, constant:<d>, periodic:<d,...> or digits:<d,...>"
            ))),
        }
    }
}

impl fmt::Display for DigitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            DigitRule::Constant(d) => write!(f, "constant:{d}"),
            DigitRule::Periodic(v) => write!(f, "periodic:{}", join(v)),
            DigitRule::Triangular => f.write_str("triangular"),
            DigitRule::Explicit(v) => write!(f, "digits:{}", join(v)),
        }
    }
}

/// `x_1 = Σ p^{i-1} c_i` together with the chain `x_k = Σ_{i>=k} p^{i-k} c_i`,
/// where `x_k` carries `N - k + 1` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSolution {
    pub chain: Vec<PAdicInt>,
    pub digits: Vec<u64>,
}

impl SeriesSolution {
    pub fn x1(&self) -> &PAdicInt {
        &self.chain[0]
    }

    /// First `k` (1-based) where `x_k - p x_{k+1} ≢ c_k (mod p^{N-k})`.
    pub fn recurrence_failure(&self) -> Option<usize> {
        let n = self.chain.len();
        for k in 1..n {
            let xk = &self.chain[k - 1];
            let next = &self.chain[k];
            let p = xk.p();
            let lhs = BigInt::from(xk.residue().clone()) - BigInt::from(p) * BigInt::from(next.residue().clone());
            let m = BigInt::from(modulus(p, n - k));
            if (lhs - BigInt::from(self.digits[k - 1])).mod_floor(&m) != BigInt::zero() {
                return Some(k);
            }
        }
        None
    }
}

pub fn solve_series(rule: &DigitRule, p: u64, precision: usize) -> Result<SeriesSolution, PAdicError> {
    if precision == 0 {
        return Err(PAdicError::Parameters("precision must be at least 1".into()));
    }
    let digits = rule.prefix(precision);
    if let Some((i, &d)) = digits.iter().enumerate().find(|(_, &d)| d >= p) {
        return Err(PAdicError::DigitOutOfRange { position: i + 1, digit: d, p });
    }
    let chain = (1..=precision).map(|k| PAdicInt::from_digits(p, &digits[k - 1..])).collect::<Result<Vec<_>, _>>()?;
    let sol = SeriesSolution { chain, digits };
    debug_assert_eq!(sol.recurrence_failure(), None);
    Ok(sol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Periodicity {
    Periodic { period: usize, preperiod: usize },
    NotPeriodicWithin(usize),
    Inconclusive,
}

/// A periodicity verdict together with the precision it refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicityVerdict {
    pub verdict: Periodicity,
    pub precision: usize,
}

impl fmt::Display for PeriodicityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Periodicity::Periodic { period, preperiod } => {
                write!(f, "PERIODIC(period {period}, preperiod {preperiod})")?
            }
            Periodicity::NotPeriodicWithin(l) => write!(f, "NOT_PERIODIC_WITHIN({l})")?,
            Periodicity::Inconclusive => f.write_str("INCONCLUSIVE")?,
        }
        write!(f, " [claim about the first {} digits only]", self.precision)
    }
}

pub const DEFAULT_MIN_REPEATS: usize = 2;
pub const DEFAULT_MAX_PERIOD: usize = 8;

/// Smallest period `t <= max_period` whose periodic tail, after the shortest
/// preperiod, spans at least `min_repeats * max_period` digits; every period
/// is held to the same window so a short trailing run cannot pass. With no
/// such period the verdict is `INCONCLUSIVE` if some period still fits at
/// least half of the digits, else `NOT_PERIODIC_WITHIN(max_period)`.
pub fn periodicity_verdict(
    x: &PAdicInt,
    max_period: usize,
    min_repeats: usize,
) -> Result<PeriodicityVerdict, PAdicError> {
    let n = x.precision();
    if max_period == 0 || min_repeats == 0 || max_period * min_repeats > n {
        return Err(PAdicError::Parameters(format!(
            "need 1 <= max_period * min_repeats <= precision, got {max_period} * {min_repeats} with precision {n}"
        )));
    }
    let window = max_period * min_repeats;
    let d = x.digits();
    let mut inconclusive = false;
    for t in 1..=max_period {
        // shortest preperiod: one past the last position breaking period t
        let s = (0..n - t).rev().find(|&i| d[i] != d[i + t]).map_or(0, |i| i + 1);
        let tail = n - s;
        if tail >= window {
            return Ok(PeriodicityVerdict { verdict: Periodicity::Periodic { period: t, preperiod: s }, precision: n });
        }
        inconclusive |= 2 * tail >= n && tail >= 2 * t;
    }
    let verdict = if inconclusive { Periodicity::Inconclusive } else { Periodicity::NotPeriodicWithin(max_period) };
    Ok(PeriodicityVerdict { verdict, precision: n })
}

/// `a / b ≡ x (mod p^N)` with `|a| <= B`, `0 < b <= B`, `p ∤ b`, found by
/// stopping the extended Euclidean algorithm on `(p^N, x)` once the
/// remainder drops to `B`. Requires `2 B^2 <= p^N`, which makes the pair
/// unique when it exists.
pub fn rational_reconstruct(x: &PAdicInt, bound: &BigUint) -> Result<Option<(BigInt, BigInt)>, PAdicError> {
    let m = modulus(x.p(), x.precision());
    if bound.is_zero() || BigUint::from(2u8) * bound * bound > m {
        return Err(PAdicError::WindowViolated { bound: bound.clone() });
    }
    let b = BigInt::from(bound.clone());
    let mb = BigInt::from(m);
    let (mut r0, mut r1) = (mb.clone(), BigInt::from(x.residue().clone()));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > b {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let (mut num, mut den) = (r1, t1);
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    let ok = !den.is_zero()
        && den <= b
        && !den.is_multiple_of(&BigInt::from(x.p()))
        && num.gcd(&den).is_one()
        && (&num - &den * BigInt::from(x.residue().clone())).mod_floor(&mb).is_zero();
    Ok(ok.then_some((num, den)))
}
