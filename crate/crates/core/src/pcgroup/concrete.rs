//! Solving a parsed system over a group read from a file.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::file::{abelian_bindings, pc_bindings, ConcreteGroup};
use super::solve::{brute_force_solve, candidate_count, lift_solve, SolveError};
use crate::abelian::{solve_over_finite_abelian, AbelianSolveError, FiniteAbelianGroup};
use crate::group::FiniteGroup;
use crate::report::Report;
use crate::system::{Declarations, Equation};
use crate::word::{Symbol, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lift { cross_checked: bool },
    Exhaustive,
    AbelianSnf,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Lift { cross_checked: true } => "lift, cross-checked by exhaustive search",
            Method::Lift { cross_checked: false } => "lift",
            Method::Exhaustive => "exhaustive search",
            Method::AbelianSnf => "abelian smith form",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcreteSolution {
    pub variables: Vec<Variable>,
    /// Listed solutions, values written as words in the generator names.
    /// Holds every solution when `count` is small enough, else one.
    pub solutions: Vec<Vec<String>>,
    pub count: BigUint,
    pub method: Method,
    pub obstruction: Option<String>,
}

impl ConcreteSolution {
    pub fn is_sat(&self) -> bool {
        !self.count.is_zero()
    }

    /// `x = a^3, y = b` for listed solution `i`.
    pub fn format_solution(&self, i: usize) -> String {
        let parts: Vec<String> =
            self.variables.iter().zip(&self.solutions[i]).map(|(v, val)| format!("{v} = {val}")).collect();
        if parts.is_empty() {
            "(no variables)".into()
        } else {
            parts.join(", ")
        }
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("method", self.method);
        r.push("solutions", &self.count);
        if let Some(why) = &self.obstruction {
            r.push("verdict", "UNSAT").push("reason", why);
        } else {
            r.push("verdict", if self.count == BigUint::from(1u32) { "UNIQUE" } else { "SAT" });
            for i in 0..self.solutions.len() {
                r.push("solution", self.format_solution(i));
            }
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConcreteSolveError {
    #[error(transparent)]
    Pc(#[from] SolveError),
    #[error(transparent)]
    Abelian(#[from] AbelianSolveError),
    #[error("lift and exhaustive search disagree: {0}")]
    Mismatch(String),
}

impl ConcreteSolveError {
    pub fn is_budget(&self) -> bool {
        matches!(self, ConcreteSolveError::Pc(SolveError::Budget { .. }) | ConcreteSolveError::Abelian(AbelianSolveError::Budget { .. }))
    }
}

/// Writes `x` as `Π name_i^{x_i}` over the nonzero coordinates.
pub fn format_abelian_element(names: &[Symbol], x: &[BigInt]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(x)
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| if *c == BigInt::from(1) { n.to_string() } else { format!("{n}^{c}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// Solves over a file group. A pc group gets the lifting solver when the
/// system is square with exponent matrix invertible modulo the order,
/// cross-checked by enumeration when `|G|^vars <= budget`; other systems are
/// enumerated. Abelian groups use the Smith-form solver. At most
/// `list_limit` solutions are listed (at least one when any exist).
pub fn solve_concrete(
    decls: &Declarations,
    equations: &[Equation],
    group: &ConcreteGroup,
    budget: u64,
    list_limit: usize,
) -> Result<ConcreteSolution, ConcreteSolveError> {
    match group {
        ConcreteGroup::Pc(g) => {
            let coeffs = pc_bindings(g);
            let lifted = match lift_solve(decls, equations, g, &coeffs) {
                Ok(found) => Some(found),
                Err(SolveError::NotSquare { .. } | SolveError::NotUnimodular(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let show = |vals: &[super::PcElement]| vals.iter().map(|x| g.format_element(x)).collect::<Vec<_>>();
            if let Some((variables, x)) = lifted {
                let affordable = candidate_count(g.order(), variables.len()).is_some_and(|c| c <= budget);
                if affordable {
                    let all = brute_force_solve(decls, equations, g, &coeffs, budget)?;
                    if all.solutions != [x.clone()] {
                        return Err(ConcreteSolveError::Mismatch(format!(
                            "exhaustive search found {} solutions",
                            all.solutions.len()
                        )));
                    }
                }
                return Ok(ConcreteSolution {
                    solutions: vec![show(&x)],
                    variables,
                    count: BigUint::from(1u32),
                    method: Method::Lift { cross_checked: affordable },
                    obstruction: None,
                });
            }
            let all = brute_force_solve(decls, equations, g, &coeffs, budget)?;
            let count = BigUint::from(all.solutions.len());
            let obstruction = all.solutions.is_empty().then(|| {
                format!(
                    "no assignment satisfies the system: exhaustive search over {}^{} candidates",
                    g.order(),
                    all.variables.len()
                )
            });
            Ok(ConcreteSolution {
                solutions: all.solutions.iter().take(list_limit.max(1)).map(|s| show(s)).collect(),
                variables: all.variables,
                count,
                method: Method::Exhaustive,
                obstruction,
            })
        }
        ConcreteGroup::Abelian { group, names } => solve_abelian(decls, equations, group, names, list_limit),
    }
}

fn solve_abelian(
    decls: &Declarations,
    equations: &[Equation],
    group: &FiniteAbelianGroup,
    names: &[Symbol],
    list_limit: usize,
) -> Result<ConcreteSolution, ConcreteSolveError> {
    let coeffs = abelian_bindings(group, names);
    let sol = solve_over_finite_abelian(decls, equations, group, &coeffs)?;
    let count = sol.size();
    let listed: Vec<Vec<Vec<BigInt>>> = match &sol.particular {
        None => Vec::new(),
        Some(p) if count.to_usize().is_some_and(|c| c <= list_limit) => sol.enumerate(list_limit as u64)?,
        Some(p) => vec![p.clone()],
    };
    Ok(ConcreteSolution {
        solutions: listed.iter().map(|s| s.iter().map(|x| format_abelian_element(names, x)).collect()).collect(),
        variables: sol.variables.clone(),
        count,
        method: Method::AbelianSnf,
        obstruction: sol.obstruction.clone(),
    })
}
