//! Infinite-height subgroups, first Ulm factors and the solution-closedness
//! criteria for periodic and torsion-free groups.

use std::fmt;

use super::descriptor::{PComponentDescriptor, PeriodicAbelianDescriptor};

/// Prime index of a reason: a concrete prime, or the `p=*` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeRef {
    Prime(u64),
    Every,
}

impl fmt::Display for PrimeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeRef::Prime(p) => write!(f, "p={p}"),
            PrimeRef::Every => f.write_str("every prime"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    InfinitelyManyNontrivialUlmFactors,
    UnboundedUlmFactor(PrimeRef),
    UnboundedReducedPart(PrimeRef),
    ReducedPartAtInfinitelyManyPrimes,
    NotDivisible,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::InfinitelyManyNontrivialUlmFactors => f.write_str("infinitely many nontrivial first Ulm factors"),
            Reason::UnboundedUlmFactor(p) => write!(f, "unbounded first Ulm factor at {p}"),
            Reason::UnboundedReducedPart(p) => write!(f, "reduced part has unbounded period at {p}"),
            Reason::ReducedPartAtInfinitelyManyPrimes => {
                f.write_str("reduced part is nontrivial at infinitely many primes, so its period is unbounded")
            }
            Reason::NotDivisible => f.write_str("group is not divisible"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Closed,
    NotClosed(Vec<Reason>),
}

impl Verdict {
    pub fn is_closed(&self) -> bool {
        *self == Verdict::Closed
    }

    fn from_reasons(reasons: Vec<Reason>) -> Self {
        if reasons.is_empty() {
            Verdict::Closed
        } else {
            Verdict::NotClosed(reasons)
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Closed => f.write_str("CLOSED"),
            Verdict::NotClosed(rs) => {
                let v: Vec<String> = rs.iter().map(Reason::to_string).collect();
                write!(f, "NOT_CLOSED({})", v.join("; "))
            }
        }
    }
}

/// Elements of infinite p-height. In a sum of cyclic and Prüfer groups the
/// cyclic part is separable, so this is the Prüfer part, which is divisible.
pub fn infinite_height_subgroup(g: &PeriodicAbelianDescriptor, p: u64) -> PComponentDescriptor {
    let c = g.component(p);
    PComponentDescriptor { p, shape: c.shape.pruefer_part() }
}

/// The quotient by the infinite-height subgroup: the cyclic part.
pub fn first_ulm_factor(g: &PeriodicAbelianDescriptor, p: u64) -> PComponentDescriptor {
    let c = g.component(p);
    PComponentDescriptor { p, shape: c.shape.cyclic_part() }
}

/// Closed iff only finitely many components have a nontrivial first Ulm
/// factor and each of those factors has bounded period.
pub fn theorem1_criterion(g: &PeriodicAbelianDescriptor) -> Verdict {
    let mut reasons = Vec::new();
    if let Some(shape) = &g.every_prime {
        if shape.has_cyclic() {
            reasons.push(Reason::InfinitelyManyNontrivialUlmFactors);
            if !shape.cyclic_bounded() {
                reasons.push(Reason::UnboundedUlmFactor(PrimeRef::Every));
            }
        }
    }
    for &p in g.components.keys() {
        let ulm = first_ulm_factor(g, p);
        if ulm.shape.has_cyclic() && !ulm.shape.cyclic_bounded() {
            reasons.push(Reason::UnboundedUlmFactor(PrimeRef::Prime(p)));
        }
    }
    Verdict::from_reasons(reasons)
}

/// Closed iff the reduced part (all cyclic summands) has bounded period.
pub fn abelian_reduced_criterion(g: &PeriodicAbelianDescriptor) -> Verdict {
    let mut reasons = Vec::new();
    if let Some(shape) = &g.every_prime {
        if shape.has_cyclic() {
            reasons.push(Reason::ReducedPartAtInfinitelyManyPrimes);
        }
    }
    for (&p, shape) in &g.components {
        if !shape.cyclic_bounded() {
            reasons.push(Reason::UnboundedReducedPart(PrimeRef::Prime(p)));
        }
    }
    Verdict::from_reasons(reasons)
}

/// Torsion-free case: closed iff divisible.
pub fn theorem2_criterion(divisible: bool) -> Verdict {
    if divisible {
        Verdict::Closed
    } else {
        Verdict::NotClosed(vec![Reason::NotDivisible])
    }
}
