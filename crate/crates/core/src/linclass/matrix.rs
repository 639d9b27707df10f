use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Dense integer matrix, row-major.
pub type Dense = Vec<Vec<BigInt>>;

/// Sparse integer matrix of exponent sums. Only nonzero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExponentMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl ExponentMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        ExponentMatrix { n_rows, n_cols, entries: BTreeMap::new() }
    }

    pub fn from_dense(rows: &[Vec<BigInt>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Dense = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        assert!(i < self.n_rows && j < self.n_cols, "index ({i}, {j}) out of bounds");
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.n_rows && j < self.n_cols, "index ({i}, {j}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn to_dense(&self) -> Dense {
        let mut d = vec![vec![BigInt::zero(); self.n_cols]; self.n_rows];
        for (&(i, j), v) in &self.entries {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn with_rows_swapped(&self, a: usize, b: usize) -> Self {
        let swap = |i: usize| if i == a { b } else if i == b { a } else { i };
        let entries = self.entries.iter().map(|(&(i, j), v)| ((swap(i), j), v.clone())).collect();
        ExponentMatrix { entries, ..*self }
    }

    pub fn with_col_negated(&self, j: usize) -> Self {
        let mut out = self.clone();
        for ((_, c), v) in out.entries.iter_mut() {
            if *c == j {
                *v = -std::mem::take(v);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("matrix line {line}: {message}")]
pub struct MatrixParseError {
    pub line: usize,
    pub message: String,
}

/// Rows of whitespace-separated integers; `#` starts a comment.
impl FromStr for ExponentMatrix {
    type Err = MatrixParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows: Dense = Vec::new();
        for (ln, raw) in s.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let row = body
                .split_whitespace()
                .map(|t| t.parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| MatrixParseError { line: ln + 1, message: e.to_string() })?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(MatrixParseError {
                        line: ln + 1,
                        message: format!("row has {} entries, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push(row);
        }
        Ok(Self::from_dense(&rows))
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(BigInt::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &Dense) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
