//! Central series and power-subgroup checks by exhaustive closure.

use std::collections::BTreeSet;
use std::fmt;

use crate::group::{CayleyTable, FiniteGroup, Group};

/// Largest group order the exhaustive routines accept.
pub const SERIES_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Upper,
    Lower,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Upper => "upper",
            SeriesKind::Lower => "lower",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("group of order {0} exceeds the exhaustive limit of {SERIES_LIMIT}")]
    TooLarge(usize),
    #[error("group is not nilpotent: the {0} central series stalls")]
    NotNilpotent(SeriesKind),
}

/// A subgroup as a sorted element set plus a generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup<E> {
    pub elements: Vec<E>,
    pub generators: Vec<E>,
}

impl<E: Ord> Subgroup<E> {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &E) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Upper series `Z_0 = 1 ⊂ Z_1 ⊂ …` ascending to the whole group, or the
/// lower series `γ_1 = G ⊃ γ_2 ⊃ …` descending to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralSeries<E> {
    pub kind: SeriesKind,
    pub subgroups: Vec<Subgroup<E>>,
}

impl<E> CentralSeries<E> {
    /// Number of steps between 1 and the whole group.
    pub fn class(&self) -> usize {
        self.subgroups.len() - 1
    }
}

/// Subgroup closure over table indices.
pub(crate) fn closure(t: &CayleyTable, gens: &[u32]) -> BTreeSet<u32> {
    let mut set = BTreeSet::from([t.identity()]);
    let mut frontier = vec![t.identity()];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = t.mul(&x, g);
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// Greedy generating set, trying elements of larger order first.
fn generating_set(t: &CayleyTable, elems: &BTreeSet<u32>) -> Vec<u32> {
    let mut gens = Vec::new();
    let mut span = BTreeSet::from([t.identity()]);
    let mut candidates: Vec<u32> = elems.iter().copied().collect();
    candidates.sort_by_key(|x| std::cmp::Reverse(t.element_order(x)));
    for x in candidates {
        if !span.contains(&x) {
            gens.push(x);
            span = closure(t, &gens);
        }
    }
    gens
}

fn table_of<G: FiniteGroup>(g: &G) -> Result<(CayleyTable, Vec<G::Elem>), SeriesError> {
    let n = g.order();
    if n > SERIES_LIMIT {
        return Err(SeriesError::TooLarge(n));
    }
    Ok(CayleyTable::from_group(g))
}

fn lift<E: Clone + Ord>(t: &CayleyTable, elems: &[E], set: &BTreeSet<u32>) -> Subgroup<E> {
    let mut members: Vec<E> = set.iter().map(|&i| elems[i as usize].clone()).collect();
    members.sort();
    let generators = generating_set(t, set).into_iter().map(|i| elems[i as usize].clone()).collect();
    Subgroup { elements: members, generators }
}

pub(crate) fn upper_sets(t: &CayleyTable) -> Result<Vec<BTreeSet<u32>>, SeriesError> {
    let all: Vec<u32> = t.elements();
    let mut chain = vec![BTreeSet::from([t.identity()])];
    loop {
        let prev = chain.last().expect("nonempty");
        if prev.len() == all.len() {
            return Ok(chain);
        }
        // preimage of the center of G / prev
        let next: BTreeSet<u32> =
            all.iter().copied().filter(|x| all.iter().all(|y| prev.contains(&t.commutator(x, y)))).collect();
        if next.len() == prev.len() {
            return Err(SeriesError::NotNilpotent(SeriesKind::Upper));
        }
        chain.push(next);
    }
}

pub(crate) fn lower_sets(t: &CayleyTable) -> Result<Vec<BTreeSet<u32>>, SeriesError> {
    let all: Vec<u32> = t.elements();
    let mut chain = vec![all.iter().copied().collect::<BTreeSet<u32>>()];
    loop {
        let prev = chain.last().expect("nonempty");
        if prev.len() == 1 {
            return Ok(chain);
        }
        let comms: BTreeSet<u32> = all.iter().flat_map(|x| prev.iter().map(move |y| t.commutator(x, y))).collect();
        let gens: Vec<u32> = comms.into_iter().collect();
        let next = closure(t, &gens);
        if next.len() == prev.len() {
            return Err(SeriesError::NotNilpotent(SeriesKind::Lower));
        }
        chain.push(next);
    }
}

pub fn central_series<G: FiniteGroup>(g: &G, kind: SeriesKind) -> Result<CentralSeries<G::Elem>, SeriesError> {
    let (t, elems) = table_of(g)?;
    let sets = match kind {
        SeriesKind::Upper => upper_sets(&t)?,
        SeriesKind::Lower => lower_sets(&t)?,
    };
    Ok(CentralSeries { kind, subgroups: sets.iter().map(|s| lift(&t, &elems, s)).collect() })
}

pub fn nilpotency_class<G: FiniteGroup>(g: &G) -> Result<usize, SeriesError> {
    let (t, _) = table_of(g)?;
    Ok(lower_sets(&t)?.len() - 1)
}

/// Whether `⟨x^{n^s} : x ∈ G⟩ ⊆ {x^n : x ∈ G}` with `s` the nilpotency class.
pub fn power_subgroup_check<G: FiniteGroup>(g: &G, n: u32) -> Result<bool, SeriesError> {
    let (t, _) = table_of(g)?;
    let s = lower_sets(&t)?.len() - 1;
    let all = t.elements();
    let e = i64::from(n).pow(s as u32);
    let gens: Vec<u32> = all.iter().map(|x| t.pow_i64(x, e)).collect::<BTreeSet<_>>().into_iter().collect();
    let generated = closure(&t, &gens);
    let nth_powers: BTreeSet<u32> = all.iter().map(|x| t.pow_i64(x, i64::from(n))).collect();
    Ok(generated.is_subset(&nth_powers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::pcgroup::{cyclic, dihedral, heisenberg};

    #[test]
    fn cyclic_has_class_one() {
        let c8 = cyclic(2, 3).unwrap();
        let up = central_series(&c8, SeriesKind::Upper).unwrap();
        assert_eq!(up.class(), 1);
        assert_eq!(up.subgroups[1].order(), 8);
        assert_eq!(up.subgroups[1].generators.len(), 1);
    }

    #[test]
    fn heisenberg_mod_3() {
        let h = heisenberg(3, 1).unwrap();
        let up = central_series(&h, SeriesKind::Upper).unwrap();
        let low = central_series(&h, SeriesKind::Lower).unwrap();
        assert_eq!(up.class(), 2);
        assert_eq!(low.class(), 2);
        assert_eq!(up.subgroups[1], low.subgroups[1]);
        assert_eq!(up.subgroups[1].order(), 3);
        assert!(up.subgroups[1].contains(&h.generator(2)));
    }

    #[test]
    fn center_by_brute_force() {
        // independent: center = elements commuting with everything
        let d = dihedral(3).unwrap();
        let elems = d.elements();
        let mut center: Vec<_> =
            elems.iter().filter(|x| elems.iter().all(|y| d.mul(x, y) == d.mul(y, x))).cloned().collect();
        center.sort();
        let up = central_series(&d, SeriesKind::Upper).unwrap();
        assert_eq!(up.subgroups[1].elements, center);
        assert_eq!(center.len(), 2);
        assert_eq!(up.class(), 2);
    }

    #[test]
    fn classes_agree() {
        for n in 2..=6 {
            let d = dihedral(n).unwrap();
            let up = central_series(&d, SeriesKind::Upper).unwrap().class();
            let low = central_series(&d, SeriesKind::Lower).unwrap().class();
            assert_eq!(up, low);
            assert_eq!(up, (n - 1) as usize);
        }
    }

    #[test]
    fn symmetric_group_is_not_nilpotent() {
        // S3 as a table over permutations of {0,1,2}
        #[derive(Clone)]
        struct S3;
        impl Group for S3 {
            type Elem = [u8; 3];
            fn identity(&self) -> [u8; 3] {
                [0, 1, 2]
            }
            fn mul(&self, a: &[u8; 3], b: &[u8; 3]) -> [u8; 3] {
                [b[a[0] as usize], b[a[1] as usize], b[a[2] as usize]]
            }
            fn inv(&self, a: &[u8; 3]) -> [u8; 3] {
                let mut r = [0; 3];
                for i in 0..3 {
                    r[a[i] as usize] = i as u8;
                }
                r
            }
        }
        impl FiniteGroup for S3 {
            fn elements(&self) -> Vec<[u8; 3]> {
                vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
            }
        }
        assert_eq!(central_series(&S3, SeriesKind::Upper).unwrap_err(), SeriesError::NotNilpotent(SeriesKind::Upper));
        assert_eq!(central_series(&S3, SeriesKind::Lower).unwrap_err(), SeriesError::NotNilpotent(SeriesKind::Lower));
    }

    #[test]
    fn power_subgroups() {
        assert!(power_subgroup_check(&heisenberg(2, 1).unwrap(), 2).unwrap());
        assert!(power_subgroup_check(&dihedral(3).unwrap(), 2).unwrap());
        let a = FiniteAbelianGroup::from_orders(&[4, 6]).unwrap();
        for n in 1..6 {
            assert!(power_subgroup_check(&a, n).unwrap());
        }
    }
}
