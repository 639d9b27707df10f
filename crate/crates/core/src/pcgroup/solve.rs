//! Exhaustive solving over finite groups, and the central-series lifting
//! solver for square systems over nilpotent groups.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;

use super::series::{lower_sets, SeriesError, SERIES_LIMIT};
use crate::arith::mod_inverse;
use crate::group::{CayleyTable, FiniteGroup, Group};
use crate::linclass::{mat_mul, smith_normal_form};
use crate::system::{exponent_table, variable_columns, Declarations, Equation};
use crate::word::{evaluate_with, CoeffId, EvalError, SlotBindings, Variable};

/// Default cap on the number of candidate assignments.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("{candidates} candidate assignments exceed the budget of {budget}")]
    Budget { candidates: BigUint, budget: u64 },
    #[error("coefficient `{0}` is not bound to a group element")]
    UnboundCoefficient(CoeffId),
    #[error("system is not square: {rows} equations in {cols} variables")]
    NotSquare { rows: usize, cols: usize },
    #[error("exponent matrix is not invertible modulo the group order (elementary divisors {0})")]
    NotUnimodular(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("lifting failed: {0}")]
    Internal(String),
}

/// All solutions, each a value per variable in `variables` order, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignments<E> {
    pub variables: Vec<Variable>,
    pub solutions: Vec<Vec<E>>,
}

struct Tabled<E> {
    table: CayleyTable,
    elems: Vec<E>,
    coeffs: HashMap<CoeffId, u32>,
}

fn tabulate<G: FiniteGroup>(
    g: &G,
    equations: &[Equation],
    coeffs: &HashMap<CoeffId, G::Elem>,
) -> Result<Tabled<G::Elem>, SolveError> {
    let (table, elems) = CayleyTable::from_group(g);
    let index: HashMap<&G::Elem, u32> = elems.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
    let mut out = HashMap::new();
    for eq in equations {
        for c in eq.word.coefficients() {
            let v = coeffs.get(&c).ok_or_else(|| SolveError::UnboundCoefficient(c.clone()))?;
            out.insert(c, index[v]);
        }
    }
    Ok(Tabled { table, elems, coeffs: out })
}

fn eval_all(t: &CayleyTable, equations: &[Equation], vars: &[Variable], x: &[u32], coeffs: &HashMap<CoeffId, u32>) -> Vec<u32> {
    let b = SlotBindings { names: vars, values: x, coeffs };
    equations
        .iter()
        .map(|e| match evaluate_with(&e.word, &b, t) {
            Ok(v) => v,
            Err(EvalError::UnboundVariable(v)) => unreachable!("variable {v} is a column"),
            Err(EvalError::UnboundCoefficient(c)) => unreachable!("coefficient {c} was checked"),
        })
        .collect()
}

/// Every assignment satisfying all equations, by enumeration. Work is split
/// across threads by the value of the first variable; output is sorted.
pub fn brute_force_solve<G: FiniteGroup>(
    decls: &Declarations,
    equations: &[Equation],
    g: &G,
    coeffs: &HashMap<CoeffId, G::Elem>,
    budget: u64,
) -> Result<Assignments<G::Elem>, SolveError> {
    let vars = variable_columns(decls, equations);
    let order = g.order() as u64;
    let candidates: BigUint = BigUint::from(order).pow(vars.len() as u32);
    if candidates > BigUint::from(budget) {
        return Err(SolveError::Budget { candidates, budget });
    }
    let tab = tabulate(g, equations, coeffs)?;
    let t = &tab.table;
    let n = t.len() as u32;
    let ok = |x: &[u32]| eval_all(t, equations, &vars, x, &tab.coeffs).iter().all(|v| t.is_identity(v));

    let found: Vec<Vec<u32>> = if vars.is_empty() {
        if ok(&[]) { vec![Vec::new()] } else { Vec::new() }
    } else {
        (0..n)
            .into_par_iter()
            .flat_map_iter(|first| {
                let mut hits = Vec::new();
                let mut x = vec![0u32; vars.len()];
                x[0] = first;
                loop {
                    if ok(&x) {
                        hits.push(x.clone());
                    }
                    // odometer over the remaining variables
                    let mut i = vars.len() - 1;
                    loop {
                        if i == 0 {
                            return hits;
                        }
                        x[i] += 1;
                        if x[i] < n {
                            break;
                        }
                        x[i] = 0;
                        i -= 1;
                    }
                }
            })
            .collect()
    };
    let mut solutions: Vec<Vec<G::Elem>> =
        found.into_iter().map(|x| x.into_iter().map(|i| tab.elems[i as usize].clone()).collect()).collect();
    solutions.sort();
    Ok(Assignments { variables: vars, solutions })
}

/// The unique solution of a square system over a finite nilpotent group,
/// for exponent matrices invertible modulo the group order (in particular
/// every unimodular one).
///
/// Starting from the trivial assignment, stage `c` sees defects in `γ_c`;
/// these are central modulo `γ_{c+1}`, so right-multiplying variable `j` by
/// `z_j` changes equation `i` by `Π z_j^{M_ij}` there. Taking
/// `z = M^{-1}(-defect)` pushes every defect into `γ_{c+1}`.
pub fn lift_solve<G: FiniteGroup>(
    decls: &Declarations,
    equations: &[Equation],
    g: &G,
    coeffs: &HashMap<CoeffId, G::Elem>,
) -> Result<(Vec<Variable>, Vec<G::Elem>), SolveError> {
    let table = exponent_table(decls, equations);
    let (rows, cols) = (table.matrix.n_rows(), table.matrix.n_cols());
    if rows != cols {
        return Err(SolveError::NotSquare { rows, cols });
    }
    if g.order() > SERIES_LIMIT {
        return Err(SeriesError::TooLarge(g.order()).into());
    }
    // every element order divides |G|, so M only has to be invertible mod |G|
    let modulus = BigInt::from(g.order());
    let snf = smith_normal_form(&table.matrix);
    let inv_diag: Option<Vec<BigInt>> = (0..rows)
        .map(|i| snf.diagonal.get(i).and_then(|d| mod_inverse(d, &modulus)))
        .collect();
    let Some(inv_diag) = inv_diag else {
        let d: Vec<String> = snf.diagonal.iter().map(BigInt::to_string).collect();
        return Err(SolveError::NotUnimodular(format!("[{}], group order {}", d.join(", "), modulus)));
    };
    // U M V = D, so M^-1 = V D^-1 U modulo |G|
    let scaled_u: Vec<Vec<BigInt>> =
        snf.u.iter().zip(&inv_diag).map(|(row, d)| row.iter().map(|x| x * d).collect()).collect();
    let inverse = mat_mul(&snf.v, &scaled_u);

    let tab = tabulate(g, equations, coeffs)?;
    let t = &tab.table;
    let gamma = lower_sets(t)?;
    let vars = table.columns;
    let mut x = vec![t.identity(); cols];
    for (c, layer) in gamma.iter().enumerate() {
        let defects = eval_all(t, equations, &vars, &x, &tab.coeffs);
        if let Some(i) = defects.iter().position(|d| !layer.contains(d)) {
            return Err(SolveError::Internal(format!("defect of equation {} left γ_{}", i + 1, c + 1)));
        }
        if defects.iter().all(|d| t.is_identity(d)) {
            break;
        }
        for (j, xj) in x.iter_mut().enumerate() {
            let mut z = t.identity();
            for (k, d) in defects.iter().enumerate() {
                z = t.mul(&z, &t.pow(d, &-&inverse[j][k]));
            }
            *xj = t.mul(xj, &z);
        }
    }
    let residual = eval_all(t, equations, &vars, &x, &tab.coeffs);
    if !residual.iter().all(|d| t.is_identity(d)) {
        return Err(SolveError::Internal("defects remain after the last stage".into()));
    }
    Ok((vars, x.into_iter().map(|i| tab.elems[i as usize].clone()).collect()))
}

/// Order of the search space `|G|^vars`, as a float-free estimate for
/// budgeting decisions.
pub fn candidate_count(group_order: usize, n_vars: usize) -> Option<u64> {
    BigUint::from(group_order).pow(n_vars as u32).to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::pcgroup::{cyclic, direct_product, heisenberg, PcElement, PcGroup};
    use crate::syntax::parse_system;
    use crate::word::Symbol;

    fn eqs(text: &str) -> (Declarations, Vec<Equation>) {
        let sys = parse_system(text).unwrap();
        let e = sys.equations_or_truncation(0).unwrap();
        (sys.decls, e)
    }

    fn named(g: &PcGroup) -> HashMap<CoeffId, PcElement> {
        g.names().iter().enumerate().map(|(i, n)| (n.clone(), g.generator(i))).collect()
    }

    #[test]
    fn cube_roots_in_heisenberg_mod_2() {
        let h = heisenberg(2, 1).unwrap();
        let (d, e) = eqs("var x\nx^3 = g3\n");
        let all = brute_force_solve(&d, &e, &h, &named(&h), DEFAULT_BUDGET).unwrap();
        // oracle: every element whose cube is g3
        let want: Vec<Vec<PcElement>> = h
            .elements()
            .into_iter()
            .filter(|x| h.pow_i64(x, 3) == h.generator(2))
            .map(|x| vec![x])
            .collect();
        assert_eq!(all.solutions, want);
        assert_eq!(all.solutions.len(), 1);
        let (_, x) = lift_solve(&d, &e, &h, &named(&h)).unwrap();
        assert_eq!(vec![x], all.solutions);
    }

    #[test]
    fn inconsistent_and_abelian() {
        let c4 = cyclic(2, 2).unwrap();
        let co = named(&c4);
        let (d, e) = eqs("var x\nx = g1\nx = g2\n");
        assert!(brute_force_solve(&d, &e, &c4, &co, DEFAULT_BUDGET).unwrap().solutions.is_empty());
        let (d, e) = eqs("var x, y\n[x, y] = 1\n");
        assert_eq!(brute_force_solve(&d, &e, &c4, &co, DEFAULT_BUDGET).unwrap().solutions.len(), 16);
    }

    #[test]
    fn budget_and_errors() {
        let h = heisenberg(3, 1).unwrap();
        let (d, e) = eqs("var x, y, z\nx y z = 1\n");
        assert!(matches!(brute_force_solve(&d, &e, &h, &named(&h), 1000), Err(SolveError::Budget { .. })));
        let (d, e) = eqs("var x\nx^3 = a\n");
        assert!(matches!(lift_solve(&d, &e, &h, &HashMap::new()), Err(SolveError::NotUnimodular(_))));
        let (d, e) = eqs("var x, y\nx y = 1\n");
        assert!(matches!(lift_solve(&d, &e, &h, &HashMap::new()), Err(SolveError::NotSquare { rows: 1, cols: 2 })));
        let (d, e) = eqs("var x\nx = q\n");
        assert!(matches!(lift_solve(&d, &e, &h, &HashMap::new()), Err(SolveError::UnboundCoefficient(_))));
    }

    #[test]
    fn two_by_two_over_product_of_cyclics() {
        // matrix [[1, -4], [2, 1]], det 9
        let (d, e) = eqs("var x, y\nx y^-4 = a\ny x^2 = b\n");
        let g = direct_product(&cyclic(3, 2).unwrap(), &cyclic(3, 3).unwrap()).unwrap();
        let co: HashMap<CoeffId, PcElement> =
            [(Symbol::plain("a"), g.generator(0)), (Symbol::plain("b"), g.generator(2))].into_iter().collect();
        // det 9 shares the prime 3 with the group order: lifting refuses
        assert!(matches!(lift_solve(&d, &e, &g, &co), Err(SolveError::NotUnimodular(_))));
        let all = brute_force_solve(&d, &e, &g, &co, DEFAULT_BUDGET).unwrap();
        for s in &all.solutions {
            let x = &s[0];
            let y = &s[1];
            assert_eq!(g.mul(x, &g.pow_i64(y, -4)), co[&Symbol::plain("a")]);
        }
        // a unimodular variant [[1, -4], [1, -3]] has exactly one solution
        let (d, e) = eqs("var x, y\nx y^-4 = a\nx y^-3 = b\n");
        let all = brute_force_solve(&d, &e, &g, &co, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.solutions.len(), 1);
        assert_eq!(lift_solve(&d, &e, &g, &co).unwrap().1, all.solutions[0]);
    }

    #[test]
    fn identity_equation() {
        let h = heisenberg(2, 1).unwrap();
        let (d, e) = eqs("var x\nx = g1 g2\n");
        let (_, x) = lift_solve(&d, &e, &h, &named(&h)).unwrap();
        assert_eq!(x[0], h.mul(&h.generator(0), &h.generator(1)));
    }

    #[test]
    fn works_over_abelian_groups() {
        let a = FiniteAbelianGroup::from_orders(&[4, 8]).unwrap();
        let co: HashMap<CoeffId, Vec<BigInt>> = [(Symbol::plain("a"), a.basis(0))].into_iter().collect();
        let (d, e) = eqs("var x\nx^3 = a\n");
        let bf = brute_force_solve(&d, &e, &a, &co, DEFAULT_BUDGET).unwrap();
        assert_eq!(bf.solutions.len(), 1);
        assert_eq!(lift_solve(&d, &e, &a, &co).unwrap().1, bf.solutions[0]);
        assert_eq!(candidate_count(12, 2), Some(144));
    }
}
