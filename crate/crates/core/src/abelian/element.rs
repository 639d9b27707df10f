//! Elements of symbolic periodic abelian groups and their p-heights.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::descriptor::PeriodicAbelianDescriptor;
use crate::arith::valuation;

/// A summand of a p-component: the `index`-th member of cyclic family
/// `family`, or the `index`-th Prüfer summand (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Summand {
    Cyclic { family: usize, index: u64 },
    Pruefer { index: u64 },
}

/// Coordinate in one summand: `r mod p^k` for cyclic summands, `num / p^t
/// mod 1` for Prüfer summands.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Residue {
    Cyclic(BigInt),
    Pruefer { num: BigInt, den_exp: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(n) => write!(f, "{n}"),
            Height::Infinite => f.write_str("INFINITE"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ElementError {
    #[error("summand {summand:?} does not exist in the {p}-component")]
    NoSuchSummand { p: u64, summand: Summand },
    #[error("residue kind does not match summand {0:?}")]
    KindMismatch(Summand),
    #[error("element has support outside the {0}-component")]
    OutsideComponent(u64),
}

/// Finitely supported element; zero coordinates are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AbelianElement {
    support: BTreeMap<(u64, Summand), Residue>,
}

fn pow_big(p: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Reduces a Prüfer coordinate; `None` when it is zero.
fn reduce_pruefer(p: u64, num: BigInt, mut den_exp: u32) -> Option<Residue> {
    let pb = BigInt::from(p);
    let mut num = num.mod_floor(&pow_big(p, u64::from(den_exp)));
    while den_exp > 0 && !num.is_zero() && num.is_multiple_of(&pb) {
        num /= &pb;
        den_exp -= 1;
    }
    if num.is_zero() || den_exp == 0 {
        None
    } else {
        Some(Residue::Pruefer { num, den_exp })
    }
}

impl AbelianElement {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds an element from `(p, summand, residue)` coordinates, checking
    /// that each summand exists in `g`.
    pub fn new(
        coords: impl IntoIterator<Item = (u64, Summand, Residue)>,
        g: &PeriodicAbelianDescriptor,
    ) -> Result<Self, ElementError> {
        let mut out = Self::identity();
        for (p, s, r) in coords {
            let single = Self::single(p, s, r, g)?;
            out = out.add(&single, g)?;
        }
        Ok(out)
    }

    fn single(p: u64, s: Summand, r: Residue, g: &PeriodicAbelianDescriptor) -> Result<Self, ElementError> {
        let shape = g.component(p).shape;
        let reduced = match (s, r) {
            (Summand::Cyclic { family, index }, Residue::Cyclic(v)) => {
                let k = shape
                    .cyclic
                    .get(family)
                    .and_then(|f| f.exponent(index))
                    .ok_or(ElementError::NoSuchSummand { p, summand: s })?;
                let v = v.mod_floor(&pow_big(p, k));
                (!v.is_zero()).then_some(Residue::Cyclic(v))
            }
            (Summand::Pruefer { index }, Residue::Pruefer { num, den_exp }) => {
                if !shape.pruefer.contains(index) {
                    return Err(ElementError::NoSuchSummand { p, summand: s });
                }
                reduce_pruefer(p, num, den_exp)
            }
            _ => return Err(ElementError::KindMismatch(s)),
        };
        let mut e = Self::identity();
        if let Some(r) = reduced {
            e.support.insert((p, s), r);
        }
        Ok(e)
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&(u64, Summand), &Residue)> {
        self.support.iter()
    }

    pub fn add(&self, other: &Self, g: &PeriodicAbelianDescriptor) -> Result<Self, ElementError> {
        let mut out = self.clone();
        for (&(p, s), r) in &other.support {
            let merged = match (out.support.remove(&(p, s)), r) {
                (None, r) => Some(r.clone()),
                (Some(Residue::Cyclic(a)), Residue::Cyclic(b)) => Some(Residue::Cyclic(a + b)),
                (Some(Residue::Pruefer { num: a, den_exp: ta }), Residue::Pruefer { num: b, den_exp: tb }) => {
                    let t = ta.max(*tb);
                    let num = a * pow_big(p, u64::from(t - ta)) + b * pow_big(p, u64::from(t - tb));
                    Some(Residue::Pruefer { num, den_exp: t })
                }
                _ => return Err(ElementError::KindMismatch(s)),
            };
            if let Some(r) = merged {
                out.support.extend(Self::single(p, s, r, g)?.support);
            }
        }
        Ok(out)
    }

    /// `n·self` for `n >= 0`.
    pub fn scale(&self, n: &BigInt, g: &PeriodicAbelianDescriptor) -> Result<Self, ElementError> {
        let coords = self.support.iter().map(|(&(p, s), r)| {
            let r = match r {
                Residue::Cyclic(v) => Residue::Cyclic(v * n),
                Residue::Pruefer { num, den_exp } => Residue::Pruefer { num: num * n, den_exp: *den_exp },
            };
            (p, s, r)
        });
        Self::new(coords.collect::<Vec<_>>(), g)
    }
}

/// p-height of `g` in `desc`. The identity has infinite height.
pub fn height(g: &AbelianElement, p: u64, desc: &PeriodicAbelianDescriptor) -> Result<Height, ElementError> {
    let mut h = Height::Infinite;
    for (&(q, s), r) in g.support() {
        if q != p {
            return Err(ElementError::OutsideComponent(p));
        }
        // re-validate against the descriptor
        AbelianElement::single(q, s, r.clone(), desc)?;
        let here = match r {
            Residue::Cyclic(v) => Height::Finite(u64::from(valuation(v, p).expect("stored residues are nonzero"))),
            Residue::Pruefer { .. } => Height::Infinite,
        };
        h = h.min(here);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::descriptor::{parse_descriptor, GroupDescriptor};

    fn desc(text: &str) -> PeriodicAbelianDescriptor {
        match parse_descriptor(text).unwrap() {
            GroupDescriptor::Periodic(d) => d,
            _ => unreachable!(),
        }
    }

    fn cyc(v: i64) -> Residue {
        Residue::Cyclic(BigInt::from(v))
    }

    #[test]
    fn heights() {
        let g = desc("component p=2 cyclic [3]");
        let a4 = AbelianElement::new([(2, Summand::Cyclic { family: 0, index: 1 }, cyc(4))], &g).unwrap();
        assert_eq!(height(&a4, 2, &g).unwrap(), Height::Finite(2));
        assert_eq!(height(&AbelianElement::identity(), 2, &g).unwrap(), Height::Infinite);

        let h = desc("component p=3 cyclic [2]\ncomponent p=3 pruefer count=1");
        let x = AbelianElement::new(
            [
                (3, Summand::Cyclic { family: 0, index: 1 }, cyc(3)),
                (3, Summand::Pruefer { index: 1 }, Residue::Pruefer { num: BigInt::from(1), den_exp: 2 }),
            ],
            &h,
        )
        .unwrap();
        assert_eq!(height(&x, 3, &h).unwrap(), Height::Finite(1));
        let pr = AbelianElement::new(
            [(3, Summand::Pruefer { index: 1 }, Residue::Pruefer { num: BigInt::from(2), den_exp: 5 })],
            &h,
        )
        .unwrap();
        assert_eq!(height(&pr, 3, &h).unwrap(), Height::Infinite);
        assert!(height(&pr, 2, &h).is_err());
    }

    #[test]
    fn missing_summands_rejected() {
        let g = desc("component p=2 cyclic [3]");
        assert!(AbelianElement::new([(2, Summand::Cyclic { family: 0, index: 2 }, cyc(1))], &g).is_err());
        assert!(AbelianElement::new([(2, Summand::Pruefer { index: 1 }, cyc(1))], &g).is_err());
    }

    #[test]
    fn pruefer_arithmetic() {
        let g = desc("component p=2 pruefer count=omega");
        let half =
            AbelianElement::new([(2, Summand::Pruefer { index: 7 }, Residue::Pruefer { num: BigInt::from(1), den_exp: 1 })], &g)
                .unwrap();
        assert!(half.add(&half, &g).unwrap().is_identity());
        let quarter = AbelianElement::new(
            [(2, Summand::Pruefer { index: 7 }, Residue::Pruefer { num: BigInt::from(6), den_exp: 3 })],
            &g,
        )
        .unwrap();
        assert_eq!(quarter.scale(&BigInt::from(2), &g).unwrap(), half);
    }

    /// Largest n such that some h has p^n h = g, by enumerating every h.
    fn height_by_search(coords: &[i64], exps: &[u32], p: i64) -> Height {
        if coords.iter().all(|&c| c == 0) {
            return Height::Infinite;
        }
        let mods: Vec<i64> = exps.iter().map(|&k| p.pow(k)).collect();
        let total: i64 = mods.iter().product();
        let mut best = 0;
        for n in 0..=*exps.iter().max().unwrap() {
            let pn = p.pow(n);
            let hit = (0..total).any(|code| {
                let mut rest = code;
                mods.iter().zip(coords).all(|(&m, &c)| {
                    let h = rest % m;
                    rest /= m;
                    (pn * h - c).rem_euclid(m) == 0
                })
            });
            if hit {
                best = n as u64;
            }
        }
        Height::Finite(best)
    }

    #[test]
    fn search_oracle_agrees_on_small_groups() {
        // every element of Z/8 + Z/4 + Z/2
        let exps = [3u32, 2, 1];
        let g = desc("component p=2 cyclic [3, 2, 1]");
        for a in 0..8 {
            for b in 0..4 {
                for c in 0..2 {
                    let coords = [a, b, c];
                    let e = AbelianElement::new(
                        (0..3).map(|i| (2, Summand::Cyclic { family: 0, index: i as u64 + 1 }, cyc(coords[i]))),
                        &g,
                    )
                    .unwrap();
                    assert_eq!(height(&e, 2, &g).unwrap(), height_by_search(&coords, &exps, 2));
                }
            }
        }
    }
}
