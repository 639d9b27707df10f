//! Smith normal form over the integers with transform tracking.
//!
//! Pivot rule: the nonzero entry of smallest absolute value in the remaining
//! block, ties broken by lowest (row, col). The output is deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{det, identity, mat_mul, Dense, ExponentMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `d_1 | d_2 | ...`, length `min(n_rows, n_cols)`, all `>= 0`.
    pub diagonal: Vec<BigInt>,
    /// `n_rows × n_rows`, unimodular.
    pub u: Dense,
    /// `n_cols × n_cols`, unimodular.
    pub v: Dense,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl SnfResult {
    /// Number of nonzero elementary divisors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    /// Rank of the matrix over the field with `p` elements.
    pub fn rank_mod(&self, p: &BigInt) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero() && !d.is_multiple_of(p)).count()
    }

    /// `D` as a full `n_rows × n_cols` matrix.
    pub fn d_matrix(&self) -> Dense {
        let mut d = vec![vec![BigInt::zero(); self.n_cols]; self.n_rows];
        for (i, x) in self.diagonal.iter().enumerate() {
            d[i][i] = x.clone();
        }
        d
    }

    /// Checks `U·M·V = D`, `|det U| = |det V| = 1` and the divisibility chain.
    pub fn verify(&self, m: &ExponentMatrix) -> Result<(), String> {
        if mat_mul(&mat_mul(&self.u, &m.to_dense()), &self.v) != self.d_matrix() {
            return Err("U·M·V != D".into());
        }
        for (name, t) in [("U", &self.u), ("V", &self.v)] {
            if det(t).abs() != BigInt::from(1) {
                return Err(format!("det {name} is not ±1"));
            }
        }
        for w in self.diagonal.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            if !divides {
                return Err(format!("divisibility chain broken at {} | {}", w[0], w[1]));
            }
        }
        if self.diagonal.iter().any(Signed::is_negative) {
            return Err("negative elementary divisor".into());
        }
        Ok(())
    }
}

struct Work {
    a: Dense,
    u: Dense,
    v: Dense,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut().chain(self.v.iter_mut()) {
                row.swap(i, j);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let (s, d) = if src < dst {
                let (lo, hi) = m.split_at_mut(dst);
                (&lo[src], &mut hi[0])
            } else {
                let (lo, hi) = m.split_at_mut(src);
                (&hi[0], &mut lo[dst])
            };
            for (x, y) in d.iter_mut().zip(s) {
                if !y.is_zero() {
                    *x += k * y;
                }
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for row in m.iter_mut() {
                if !row[src].is_zero() {
                    let t = k * &row[src];
                    row[dst] += t;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
}

pub fn smith_normal_form(m: &ExponentMatrix) -> SnfResult {
    let (r, c) = (m.n_rows(), m.n_cols());
    let mut w = Work { a: m.to_dense(), u: identity(r), v: identity(c) };
    let steps = r.min(c);
    for t in 0..steps {
        loop {
            let Some((pi, pj)) = pivot(&w.a, t) else {
                return finish(w, r, c);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let p = w.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..r {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&p);
                    w.add_row(i, t, &-q);
                    clean &= w.a[i][t].is_zero();
                }
            }
            for j in t + 1..c {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&p);
                    w.add_col(j, t, &-q);
                    clean &= w.a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the whole remaining block
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a[i][j].is_multiple_of(&p)));
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    finish(w, r, c)
}

fn pivot(a: &Dense, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.magnitude() < a[bi][bj].magnitude(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

fn finish(w: Work, r: usize, c: usize) -> SnfResult {
    let diagonal = (0..r.min(c)).map(|i| w.a[i][i].clone()).collect();
    SnfResult { diagonal, u: w.u, v: w.v, n_rows: r, n_cols: c }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check(rows: &[&[i64]], expect: &[i64]) {
        let m = ExponentMatrix::from_i64(rows);
        let s = smith_normal_form(&m);
        s.verify(&m).unwrap();
        assert_eq!(s.diagonal, ints(expect));
    }

    #[test]
    fn small_cases() {
        check(&[&[1, -4], &[0, 1]], &[1, 1]);
        check(&[&[2]], &[2]);
        check(&[&[0]], &[0]);
        check(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]], &[2, 6, 12]);
        check(&[&[6, 0], &[0, 4]], &[2, 12]);
        check(&[&[1, -2, 0], &[1, 0, -3]], &[1, 1]);
        check(&[&[2], &[2]], &[2]);
        check(&[&[0, 0], &[0, 0], &[0, 0]], &[0, 0]);
    }

    #[test]
    fn empty_shapes() {
        let m = ExponentMatrix::zeros(0, 3);
        let s = smith_normal_form(&m);
        assert!(s.diagonal.is_empty());
        s.verify(&m).unwrap();
        let m = ExponentMatrix::zeros(2, 0);
        smith_normal_form(&m).verify(&m).unwrap();
    }

    #[test]
    fn huge_entries() {
        let big = num_traits::pow(BigInt::from(2), 3000);
        let m = ExponentMatrix::from_dense(&[
            vec![BigInt::from(1), -big.clone(), BigInt::zero()],
            vec![BigInt::zero(), BigInt::from(1), -big],
        ]);
        let s = smith_normal_form(&m);
        s.verify(&m).unwrap();
        assert_eq!(s.diagonal, ints(&[1, 1]));
    }

    #[test]
    fn ranks_mod_p() {
        let m = ExponentMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.rank(), 2);
        assert_eq!(s.rank_mod(&BigInt::from(2)), 1);
        assert_eq!(s.rank_mod(&BigInt::from(3)), 1);
        assert_eq!(s.rank_mod(&BigInt::from(5)), 2);
    }
}
