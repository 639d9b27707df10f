//! Concrete finite abelian groups `Z/n_1 ⊕ … ⊕ Z/n_r` and exact solution of
//! finite systems over them via the Smith normal form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{mod_inverse, prime_divisors};
use crate::group::{FiniteGroup, Group};
use crate::linclass::smith_normal_form;
use crate::system::{exponent_table, Declarations, Equation};
use crate::word::{CoeffId, Letter, Variable};

/// `Z/n_1 ⊕ … ⊕ Z/n_r`; elements are residue vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    moduli: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    /// Every modulus must be at least 2.
    pub fn new(moduli: Vec<BigInt>) -> Result<Self, String> {
        if let Some(m) = moduli.iter().find(|m| **m < BigInt::from(2)) {
            return Err(format!("cyclic factor order {m} must be at least 2"));
        }
        Ok(FiniteAbelianGroup { moduli })
    }

    pub fn from_orders(orders: &[u64]) -> Result<Self, String> {
        Self::new(orders.iter().map(|&n| BigInt::from(n)).collect())
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn size(&self) -> BigUint {
        self.moduli.iter().map(|m| m.magnitude().clone()).product()
    }

    /// The generator of factor `i`.
    pub fn basis(&self, i: usize) -> Vec<BigInt> {
        (0..self.rank()).map(|j| BigInt::from(u8::from(i == j))).collect()
    }

    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.moduli).map(|(v, m)| v.mod_floor(m)).collect()
    }

    pub fn scale(&self, x: &[BigInt], k: &BigInt) -> Vec<BigInt> {
        x.iter().zip(&self.moduli).map(|(v, m)| (v * k).mod_floor(m)).collect()
    }

    /// Order of `x`: lcm over factors of `n / gcd(x, n)`.
    pub fn order_of(&self, x: &[BigInt]) -> BigUint {
        let mut acc = BigUint::one();
        for (v, m) in x.iter().zip(&self.moduli) {
            let o = (m / v.gcd(m)).magnitude().clone();
            acc = acc.lcm(&o);
        }
        acc
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        f.write_str(&v.join(" + "))
    }
}

impl Group for FiniteAbelianGroup {
    type Elem = Vec<BigInt>;

    fn identity(&self) -> Self::Elem {
        vec![BigInt::zero(); self.rank()]
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).zip(&self.moduli).map(|((x, y), m)| (x + y).mod_floor(m)).collect()
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().zip(&self.moduli).map(|(x, m)| (-x).mod_floor(m)).collect()
    }

    fn pow(&self, a: &Self::Elem, e: &BigInt) -> Self::Elem {
        self.scale(a, e)
    }

    fn commutator(&self, _: &Self::Elem, _: &Self::Elem) -> Self::Elem {
        self.identity()
    }
}

impl FiniteGroup for FiniteAbelianGroup {
    fn elements(&self) -> Vec<Self::Elem> {
        let sizes: Vec<u64> = self.moduli.iter().map(|m| m.to_u64().expect("group too large to enumerate")).collect();
        let total: u64 = sizes.iter().product();
        (0..total)
            .map(|mut code| {
                // last factor varies fastest
                let mut x = vec![BigInt::zero(); sizes.len()];
                for i in (0..sizes.len()).rev() {
                    x[i] = BigInt::from(code % sizes[i]);
                    code /= sizes[i];
                }
                x
            })
            .collect()
    }

    fn order(&self) -> usize {
        self.size().to_usize().expect("group too large")
    }

    fn element_order(&self, a: &Self::Elem) -> usize {
        self.order_of(a).to_usize().expect("order too large")
    }
}

/// One generator of the homogeneous solutions, living in a single factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub factor: usize,
    /// Additive order of the generator.
    pub order: BigInt,
    /// Residue of each variable in `factor`.
    pub values: Vec<BigInt>,
}

/// The full solution set as a coset `particular + ⟨generators⟩`. Every
/// solution has a unique expression `particular + Σ t_j g_j` with
/// `0 <= t_j < order_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    pub variables: Vec<Variable>,
    pub group: FiniteAbelianGroup,
    /// Per variable an element of the group; `None` when unsolvable.
    pub particular: Option<Vec<Vec<BigInt>>>,
    pub generators: Vec<Generator>,
    /// Why the system has no solution, when it has none.
    pub obstruction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AbelianSolveError {
    #[error("coefficient `{0}` is not bound to an element of the group")]
    UnboundCoefficient(CoeffId),
    #[error("coefficient `{id}` has {got} coordinates, the group has {want}")]
    WrongRank { id: CoeffId, got: usize, want: usize },
    #[error("solution set has {size} elements, above the budget of {budget}")]
    Budget { size: BigUint, budget: u64 },
    #[error("the solution set is empty")]
    Empty,
    #[error("variable `{0}` does not occur in the system")]
    UnknownVariable(Variable),
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn size(&self) -> BigUint {
        if self.particular.is_none() {
            return BigUint::zero();
        }
        self.generators.iter().map(|g| g.order.magnitude().clone()).product()
    }

    /// Whether this is a single point.
    pub fn is_unique(&self) -> bool {
        self.size().is_one()
    }

    /// Every solution, sorted, when there are at most `budget` of them.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<Vec<Vec<BigInt>>>, AbelianSolveError> {
        let size = self.size();
        if size > BigUint::from(budget) {
            return Err(AbelianSolveError::Budget { size, budget });
        }
        let Some(base) = &self.particular else {
            return Ok(Vec::new());
        };
        let mut out = vec![base.clone()];
        for g in &self.generators {
            let m = &self.group.moduli[g.factor];
            let order = g.order.to_u64().expect("within budget");
            let mut next = Vec::with_capacity(out.len() * order as usize);
            for sol in &out {
                for t in 0..order {
                    let mut s = sol.clone();
                    for (var, v) in s.iter_mut().zip(&g.values) {
                        var[g.factor] = (&var[g.factor] + v * BigInt::from(t)).mod_floor(m);
                    }
                    next.push(s);
                }
            }
            out = next;
        }
        out.sort();
        Ok(out)
    }

    fn var_index(&self, v: &Variable) -> Result<usize, AbelianSolveError> {
        self.variables.iter().position(|x| x == v).ok_or_else(|| AbelianSolveError::UnknownVariable(v.clone()))
    }
}

/// Solves `equations` over `group`, variables commuting. Coefficients are
/// looked up in `coeffs`.
pub fn solve_over_finite_abelian(
    decls: &Declarations,
    equations: &[Equation],
    group: &FiniteAbelianGroup,
    coeffs: &HashMap<CoeffId, Vec<BigInt>>,
) -> Result<SolutionSet, AbelianSolveError> {
    let table = exponent_table(decls, equations);
    let (r, c) = (table.matrix.n_rows(), table.matrix.n_cols());
    let rank = group.rank();

    // right-hand sides: b_i = -(sum of coefficient letters of equation i)
    let mut rhs = vec![group.identity(); r];
    for (i, eq) in equations.iter().enumerate() {
        for l in eq.word.letters() {
            if let Letter::Coeff { id, exponent } = l {
                let val = coeffs.get(id).ok_or_else(|| AbelianSolveError::UnboundCoefficient(id.clone()))?;
                if val.len() != rank {
                    return Err(AbelianSolveError::WrongRank { id: id.clone(), got: val.len(), want: rank });
                }
                rhs[i] = group.mul(&rhs[i], &group.scale(val, &-exponent));
            }
        }
    }

    let snf = smith_normal_form(&table.matrix);
    let mut particular = vec![group.identity(); c];
    let mut generators = Vec::new();
    for f in 0..rank {
        let n = &group.moduli[f];
        // D y = U b in Z/n
        let ub: Vec<BigInt> = (0..r)
            .map(|i| {
                let mut s = BigInt::zero();
                for k in 0..r {
                    s += &snf.u[i][k] * &rhs[k][f];
                }
                s.mod_floor(n)
            })
            .collect();
        let mut y = vec![BigInt::zero(); c];
        let mut steps: Vec<(usize, BigInt, BigInt)> = Vec::new();
        for i in 0..r.max(c) {
            let d = if i < r.min(c) { snf.diagonal[i].clone() } else { BigInt::zero() };
            let target = if i < r { ub[i].clone() } else { BigInt::zero() };
            let g = d.gcd(n);
            if !target.is_multiple_of(&g) {
                let message = format!(
                    "in factor Z/{n}: reduced equation {} reads {d}*y = {target}, unsolvable because gcd({d}, {n}) = {g} does not divide {target}",
                    i + 1
                );
                return Ok(SolutionSet {
                    variables: table.columns,
                    group: group.clone(),
                    particular: None,
                    generators: Vec::new(),
                    obstruction: Some(message),
                });
            }
            if i >= c {
                continue;
            }
            let m = n / &g;
            if !d.is_zero() && !m.is_one() {
                let inv = mod_inverse(&(&d / &g), &m).expect("coprime after dividing by the gcd");
                y[i] = ((&target / &g) * inv).mod_floor(&m);
            }
            if !g.is_one() {
                steps.push((i, m, g));
            }
        }
        // x = V y
        for (j, slot) in particular.iter_mut().enumerate() {
            let mut s = BigInt::zero();
            for k in 0..c {
                s += &snf.v[j][k] * &y[k];
            }
            slot[f] = s.mod_floor(n);
        }
        for (k, step, order) in steps {
            let values = (0..c).map(|j| (&snf.v[j][k] * &step).mod_floor(n)).collect();
            generators.push(Generator { factor: f, order, values });
        }
    }
    Ok(SolutionSet {
        variables: table.columns,
        group: group.clone(),
        particular: Some(particular),
        generators,
        obstruction: None,
    })
}

fn valuation_big(n: &BigUint, q: &BigUint) -> u64 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % q).is_zero() {
        n /= q;
        v += 1;
    }
    v
}

/// Smallest possible `q`-part of the order of the `v`-coordinate over the
/// solution coset, as `q -> exponent` for each prime `q` of the group order.
///
/// Per factor `Z/n` and prime `q | n` the coordinate ranges over
/// `p + ⟨q^b⟩` in the `q`-part `Z/q^a`; its smallest order there is
/// `q^(a - v_q(p))` when `v_q(p) < b`, and 1 otherwise. Factors are
/// independent, so the overall minimum takes the largest exponent per prime.
pub fn min_prime_parts(sol: &SolutionSet, v: &Variable) -> Result<BTreeMap<BigUint, u64>, AbelianSolveError> {
    let j = sol.var_index(v)?;
    let base = sol.particular.as_ref().ok_or(AbelianSolveError::Empty)?;
    let mut best: BTreeMap<BigUint, u64> = BTreeMap::new();
    for (f, n) in sol.group.moduli.iter().enumerate() {
        let mut h = n.clone();
        for g in sol.generators.iter().filter(|g| g.factor == f) {
            h = h.gcd(&g.values[j]);
        }
        let n_mag = n.magnitude();
        let p = base[j][f].magnitude();
        for q in prime_divisors(n_mag) {
            let a = valuation_big(n_mag, &q);
            let b = valuation_big(h.magnitude(), &q).min(a);
            let vp = if p.is_zero() { a } else { valuation_big(p, &q).min(a) };
            let e = if vp < b { a - vp } else { 0 };
            let slot = best.entry(q).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    Ok(best)
}

/// Minimal order of the `v`-coordinate over the whole solution coset.
pub fn min_order_of_variable(sol: &SolutionSet, v: &Variable) -> Result<BigUint, AbelianSolveError> {
    Ok(min_prime_parts(sol, v)?.into_iter().map(|(q, e)| num_traits::pow(q, e as usize)).product())
}

/// Checks that `assignment` (one element per solution variable) satisfies
/// every equation.
pub fn satisfies(
    equations: &[Equation],
    variables: &[Variable],
    assignment: &[Vec<BigInt>],
    group: &FiniteAbelianGroup,
    coeffs: &HashMap<CoeffId, Vec<BigInt>>,
) -> bool {
    let bindings = crate::word::SlotBindings { names: variables, values: assignment, coeffs };
    equations.iter().all(|e| {
        crate::word::evaluate_with(&e.word, &bindings, group).is_ok_and(|x| x.iter().all(Zero::is_zero))
    })
}
