//! Small number-theory helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The n-th prime, 1-indexed.
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1);
    let mut count = 0;
    let mut c = 1u64;
    loop {
        c += 1;
        if is_prime_u64(c) {
            count += 1;
            if count == n {
                return c;
            }
        }
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powm = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `Some((p, k))` when `n = p^k` with `p` prime and `k >= 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factor_u64(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// Prime factorization by trial division; fine for the desk-scale moduli
/// this is used on.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// Extended gcd: `(g, s, t)` with `a*s + b*t = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Inverse of `a` modulo `m > 1`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, s, _) = ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(s.mod_floor(m))
    } else {
        None
    }
}

fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return false;
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut rng = SplitMix(0x9e37_79b9_7f4a_7c15 ^ n.bits());
    'witness: for round in 0..24 {
        let a = if round < 12 {
            BigUint::from([2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37][round])
        } else {
            rng.below(&(n - 3u32)) + 2u32
        };
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint, seed: u64) -> Option<BigUint> {
    let mut rng = SplitMix(seed);
    let c = rng.below(n) + 1u32;
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut x = rng.below(n);
    let mut y = x.clone();
    let mut d = BigUint::one();
    let mut steps = 0u64;
    while d.is_one() {
        x = f(&x);
        y = f(&f(&y));
        let diff = if x > y { &x - &y } else { &y - &x };
        d = diff.gcd(n);
        steps += 1;
        if steps > 2_000_000 {
            return None;
        }
    }
    if &d == n {
        None
    } else {
        Some(d)
    }
}

/// Distinct prime divisors of `n > 0`, ascending.
pub fn prime_divisors(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = 2u64;
    while p < 100_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        if (&n % &bp).is_zero() {
            out.push(bp.clone());
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            out.push(m);
            continue;
        }
        let mut seed = 1;
        let d = loop {
            if let Some(d) = pollard_rho(&m, seed) {
                break d;
            }
            seed += 1;
        };
        let mut rest = m.clone();
        while (&rest % &d).is_zero() {
            rest /= &d;
        }
        stack.push(d);
        stack.push(rest);
    }
    // the two halves of a split may share primes
    out.sort();
    out.dedup();
    out
}

/// Tiny deterministic generator so factoring does not depend on a global
/// RNG.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: &BigUint) -> BigUint {
        if n.is_zero() {
            return BigUint::zero();
        }
        let words = (n.bits() / 64 + 2) as usize;
        let digits: Vec<u64> = (0..words).map(|_| self.next()).collect();
        let mut v = BigUint::zero();
        for d in digits {
            v = (v << 64u32) + d;
        }
        v % n
    }
}
