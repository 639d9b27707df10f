//! Systems of equations: declarations, finite equation lists and
//! rule-generated infinite systems, plus the exponent-sum matrix.
//!
//! An infinite system is only ever a rule `i ↦ equation_i`; every computation
//! works on a finite truncation of it.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::expr::{write_subscript, Evaluator, Expr, ExprError, SeqTable};
use crate::linclass::ExponentMatrix;
use crate::word::{exponent_sum, GroupWord, Letter, Symbol, Variable};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SymbolPolicy {
    /// Undeclared identifiers are coefficients.
    #[default]
    UnknownIsCoefficient,
    /// Every identifier must be declared.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Plain(String),
    Family { name: String, from: u64 },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Plain(n) | Decl::Family { name: n, .. } => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Var,
    Coeff,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Declarations {
    pub vars: Vec<Decl>,
    pub coeffs: Vec<Decl>,
    pub policy: SymbolPolicy,
}

impl Declarations {
    pub fn with_vars(names: &[&str]) -> Self {
        Declarations {
            vars: names.iter().map(|n| Decl::Plain(n.to_string())).collect(),
            ..Default::default()
        }
    }

    pub fn strict(mut self) -> Self {
        self.policy = SymbolPolicy::Strict;
        self
    }

    fn find<'a>(decls: &'a [Decl], name: &str) -> Option<(usize, &'a Decl)> {
        decls.iter().enumerate().find(|(_, d)| d.name() == name)
    }

    fn check_index(d: &Decl, index: Option<u64>) -> Result<(), String> {
        match (d, index) {
            (Decl::Plain(n), Some(i)) => Err(format!("`{n}` is not a family; `{n}_{i}` is invalid")),
            (Decl::Family { name, .. }, None) => Err(format!("family `{name}` needs an index")),
            (Decl::Family { name, from }, Some(i)) if i < *from => {
                Err(format!("`{name}_{i}` is below the family start {from}"))
            }
            _ => Ok(()),
        }
    }

    /// Decides whether `name[_index]` is a variable or a coefficient.
    pub fn classify(&self, name: &str, index: Option<u64>) -> Result<SymbolKind, String> {
        if let Some((_, d)) = Self::find(&self.vars, name) {
            Self::check_index(d, index)?;
            return Ok(SymbolKind::Var);
        }
        if let Some((_, d)) = Self::find(&self.coeffs, name) {
            Self::check_index(d, index)?;
            return Ok(SymbolKind::Coeff);
        }
        match self.policy {
            SymbolPolicy::UnknownIsCoefficient => Ok(SymbolKind::Coeff),
            SymbolPolicy::Strict => Err(format!("undeclared symbol `{name}`")),
        }
    }

    /// Column ordering key: declaration position, then family index.
    pub fn var_key(&self, v: &Variable) -> (usize, u64) {
        let pos = Self::find(&self.vars, &v.name).map_or(usize::MAX, |(i, _)| i);
        (pos, v.index.unwrap_or(0))
    }

    pub fn declare(&mut self, kind: SymbolKind, d: Decl) -> Result<(), String> {
        if Self::find(&self.vars, d.name()).is_some() || Self::find(&self.coeffs, d.name()).is_some() {
            return Err(format!("`{}` declared twice", d.name()));
        }
        match kind {
            SymbolKind::Var => self.vars.push(d),
            SymbolKind::Coeff => self.coeffs.push(d),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("{0}")]
    Symbol(String),
    #[error("exponent evaluates to zero")]
    ZeroExponent,
    #[error("index {0} is not a natural number")]
    BadIndex(BigInt),
    #[error("group power {0} too large to expand")]
    RepetitionTooLarge(BigInt),
    #[error("system has only {available} equations, {requested} requested")]
    TooFewEquations { available: usize, requested: usize },
    #[error("truncation length must be at least 1")]
    EmptyTruncation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TBase {
    Symbol { name: String, index: Option<Expr> },
    One,
    Group(TWord),
    Comm(TWord, TWord),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TFactor {
    pub base: TBase,
    pub exp: Option<Expr>,
}

/// A word whose subscripts and exponents may be integer expressions in the
/// rule index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TWord(pub Vec<TFactor>);

/// One letter of a symbolically flattened template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymLetter {
    pub name: String,
    pub index: Option<Expr>,
    pub exp: Expr,
}

const MAX_GROUP_REPS: u64 = 1 << 16;

impl TWord {
    pub fn instantiate(
        &self,
        decls: &Declarations,
        ev: &mut Evaluator<'_>,
        index: Option<&BigInt>,
    ) -> Result<GroupWord, GenError> {
        let mut letters = Vec::new();
        self.push_letters(decls, ev, index, &mut letters)?;
        Ok(GroupWord::from_letters(letters))
    }

    fn push_letters(
        &self,
        decls: &Declarations,
        ev: &mut Evaluator<'_>,
        index: Option<&BigInt>,
        out: &mut Vec<Letter>,
    ) -> Result<(), GenError> {
        for f in &self.0 {
            let e = match &f.exp {
                Some(x) => ev.eval(x, index)?,
                None => BigInt::from(1),
            };
            if e.is_zero() {
                return Err(GenError::ZeroExponent);
            }
            match &f.base {
                TBase::One => {}
                TBase::Symbol { name, index: sub } => {
                    let idx = match sub {
                        Some(s) => {
                            let v = ev.eval(s, index)?;
                            Some(v.to_u64().filter(|&k| k >= 1).ok_or(GenError::BadIndex(v))?)
                        }
                        None => None,
                    };
                    let sym = Symbol { name: name.clone(), index: idx };
                    let kind = decls.classify(name, idx).map_err(GenError::Symbol)?;
                    out.push(match kind {
                        SymbolKind::Var => Letter::Var { var: sym, exponent: e },
                        SymbolKind::Coeff => Letter::Coeff { id: sym, exponent: e },
                    });
                }
                TBase::Group(w) => {
                    let inner = w.instantiate(decls, ev, index)?;
                    out.extend(repeat_word(&inner, &e)?);
                }
                TBase::Comm(u, v) => {
                    let u = u.instantiate(decls, ev, index)?;
                    let v = v.instantiate(decls, ev, index)?;
                    out.extend(repeat_word(&GroupWord::commutator(&u, &v), &e)?);
                }
            }
        }
        Ok(())
    }

    /// Flattens into symbol letters with symbolic exponents. Group powers must
    /// be small constants; otherwise `None`.
    pub fn flatten_symbolic(&self) -> Option<Vec<SymLetter>> {
        let mut out = Vec::new();
        for f in &self.0 {
            let e = f.exp.clone().unwrap_or(Expr::int(1));
            match &f.base {
                TBase::One => {}
                TBase::Symbol { name, index } => out.push(SymLetter {
                    name: name.clone(),
                    index: index.clone(),
                    exp: e,
                }),
                TBase::Group(w) => out.extend(repeat_sym(w.flatten_symbolic()?, &e)?),
                TBase::Comm(u, v) => {
                    let u = u.flatten_symbolic()?;
                    let v = v.flatten_symbolic()?;
                    let mut c = invert_sym(&u);
                    c.extend(invert_sym(&v));
                    c.extend(u);
                    c.extend(v);
                    out.extend(repeat_sym(c, &e)?);
                }
            }
        }
        Some(out)
    }

    pub fn write(&self, f: &mut impl fmt::Write, var: &str) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, fac) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match &fac.base {
                TBase::One => write!(f, "1")?,
                TBase::Symbol { name, index } => {
                    write!(f, "{name}")?;
                    if let Some(ix) = index {
                        write!(f, "_")?;
                        write_subscript(f, ix, var)?;
                    }
                }
                TBase::Group(w) => {
                    write!(f, "(")?;
                    w.write(f, var)?;
                    write!(f, ")")?;
                }
                TBase::Comm(u, v) => {
                    write!(f, "[")?;
                    u.write(f, var)?;
                    write!(f, ", ")?;
                    v.write(f, var)?;
                    write!(f, "]")?;
                }
            }
            if let Some(e) = &fac.exp {
                write_exponent(f, e, var)?;
            }
        }
        Ok(())
    }
}

fn write_exponent(f: &mut impl fmt::Write, e: &Expr, var: &str) -> fmt::Result {
    match e {
        Expr::Int(v) => write!(f, "^{v}"),
        Expr::Index => write!(f, "^{{{var}}}"),
        Expr::Neg(inner) => {
            write!(f, "^-{{")?;
            inner.write(f, var)?;
            write!(f, "}}")
        }
        _ => {
            write!(f, "^{{")?;
            e.write(f, var)?;
            write!(f, "}}")
        }
    }
}

fn repeat_word(w: &GroupWord, e: &BigInt) -> Result<Vec<Letter>, GenError> {
    let reps = e.magnitude().to_u64().filter(|&r| r <= MAX_GROUP_REPS);
    let reps = reps.ok_or_else(|| GenError::RepetitionTooLarge(e.clone()))?;
    let base = if e.sign() == num_bigint::Sign::Minus { w.inverse() } else { w.clone() };
    Ok(std::iter::repeat_n(base.letters().to_vec(), reps as usize).flatten().collect())
}

fn invert_sym(w: &[SymLetter]) -> Vec<SymLetter> {
    w.iter()
        .rev()
        .map(|l| SymLetter { name: l.name.clone(), index: l.index.clone(), exp: Expr::Neg(Box::new(l.exp.clone())) })
        .collect()
}

fn repeat_sym(w: Vec<SymLetter>, e: &Expr) -> Option<Vec<SymLetter>> {
    let c = e.as_constant()?;
    let reps = c.magnitude().to_u64().filter(|&r| r <= 64)?;
    let base = if c.sign() == num_bigint::Sign::Minus { invert_sym(&w) } else { w };
    Some(std::iter::repeat_n(base, reps as usize).flatten().collect())
}

/// Equation `word = 1`. An input `lhs = rhs` is stored as `lhs rhs^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub word: GroupWord,
}

impl Equation {
    pub fn new(word: GroupWord) -> Self {
        Equation { word }
    }

    pub fn from_sides(lhs: &GroupWord, rhs: &GroupWord) -> Self {
        Equation { word: lhs.mul(&rhs.inverse()) }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 1", self.word)
    }
}

/// `rule <var>: lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub var: String,
    pub lhs: TWord,
    pub rhs: TWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemSource {
    Finite(Vec<Equation>),
    Generated(Rule),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub decls: Declarations,
    pub seqs: SeqTable,
    pub source: SystemSource,
}

impl EquationSystem {
    pub fn finite(decls: Declarations, equations: Vec<Equation>) -> Self {
        EquationSystem { decls, seqs: SeqTable::default(), source: SystemSource::Finite(equations) }
    }

    pub fn is_generated(&self) -> bool {
        matches!(self.source, SystemSource::Generated(_))
    }

    /// Number of equations for finite systems.
    pub fn len(&self) -> Option<usize> {
        match &self.source {
            SystemSource::Finite(eqs) => Some(eqs.len()),
            SystemSource::Generated(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Equation `i`, 1-based.
    pub fn equation(&self, i: usize) -> Result<Equation, GenError> {
        let mut ev = Evaluator::new(&self.seqs);
        self.equation_with(i, &mut ev)
    }

    fn equation_with(&self, i: usize, ev: &mut Evaluator<'_>) -> Result<Equation, GenError> {
        match &self.source {
            SystemSource::Finite(eqs) => eqs.get(i.wrapping_sub(1)).cloned().ok_or(GenError::TooFewEquations {
                available: eqs.len(),
                requested: i,
            }),
            SystemSource::Generated(rule) => {
                let at = BigInt::from(i);
                let lhs = rule.lhs.instantiate(&self.decls, ev, Some(&at))?;
                let rhs = rule.rhs.instantiate(&self.decls, ev, Some(&at))?;
                Ok(Equation::from_sides(&lhs, &rhs))
            }
        }
    }

    /// The first `n` equations.
    pub fn truncate(&self, n: usize) -> Result<Vec<Equation>, GenError> {
        if n == 0 && self.is_generated() {
            return Err(GenError::EmptyTruncation);
        }
        let mut ev = Evaluator::new(&self.seqs);
        (1..=n).map(|i| self.equation_with(i, &mut ev)).collect()
    }

    /// All equations of a finite system; the first `n` of a generated one.
    pub fn equations_or_truncation(&self, n: usize) -> Result<Vec<Equation>, GenError> {
        match &self.source {
            SystemSource::Finite(eqs) => Ok(eqs.clone()),
            SystemSource::Generated(_) => self.truncate(n),
        }
    }

    /// A finite system holding the first `n` equations.
    pub fn truncated_system(&self, n: usize) -> Result<EquationSystem, GenError> {
        Ok(EquationSystem {
            decls: self.decls.clone(),
            seqs: self.seqs.clone(),
            source: SystemSource::Finite(self.truncate(n)?),
        })
    }

    /// Variables occurring in `equations`, in declared order.
    pub fn columns(&self, equations: &[Equation]) -> Vec<Variable> {
        variable_columns(&self.decls, equations)
    }
}

pub fn variable_columns(decls: &Declarations, equations: &[Equation]) -> Vec<Variable> {
    let set: BTreeSet<Variable> = equations.iter().flat_map(|e| e.word.variables()).collect();
    let mut cols: Vec<Variable> = set.into_iter().collect();
    cols.sort_by_key(|v| (decls.var_key(v), v.clone()));
    cols
}

/// Exponent matrix with its column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentTable {
    pub matrix: ExponentMatrix,
    pub columns: Vec<Variable>,
}

/// Row `i` holds the exponent sums of equation `i` over the variables that
/// occur in the first `n_equations` equations.
pub fn exponent_matrix(sys: &EquationSystem, n_equations: usize) -> Result<ExponentTable, GenError> {
    let eqs = sys.truncate(n_equations)?;
    Ok(exponent_table(&sys.decls, &eqs))
}

pub fn exponent_table(decls: &Declarations, equations: &[Equation]) -> ExponentTable {
    let columns = variable_columns(decls, equations);
    let mut m = ExponentMatrix::zeros(equations.len(), columns.len());
    for (i, eq) in equations.iter().enumerate() {
        for (j, v) in columns.iter().enumerate() {
            m.set(i, j, exponent_sum(&eq.word, v));
        }
    }
    ExponentTable { matrix: m, columns }
}

fn write_decls(f: &mut fmt::Formatter<'_>, keyword: &str, decls: &[Decl]) -> fmt::Result {
    let mut plain: Vec<&str> = Vec::new();
    let flush = |f: &mut fmt::Formatter<'_>, plain: &mut Vec<&str>| -> fmt::Result {
        if !plain.is_empty() {
            writeln!(f, "{keyword} {}", plain.join(", "))?;
            plain.clear();
        }
        Ok(())
    };
    for d in decls {
        match d {
            Decl::Plain(n) => plain.push(n),
            Decl::Family { name, from } => {
                flush(f, &mut plain)?;
                writeln!(f, "{keyword}family {name} i>={from}")?;
            }
        }
    }
    flush(f, &mut plain)
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_decls(f, "var", &self.decls.vars)?;
        write_decls(f, "coeff", &self.decls.coeffs)?;
        for (name, def) in &self.seqs.defs {
            for (i, e) in &def.bases {
                writeln!(f, "seq {name}_{i} = {}", e.render("i"))?;
            }
            if let Some((from, e)) = &def.general {
                writeln!(f, "seq {name}_i = {} for i>={from}", e.render("i"))?;
            }
        }
        match &self.source {
            SystemSource::Finite(eqs) => {
                for e in eqs {
                    writeln!(f, "{e}")?;
                }
            }
            SystemSource::Generated(rule) => {
                let mut s = String::new();
                rule.lhs.write(&mut s, &rule.var)?;
                s.push_str(" = ");
                rule.rhs.write(&mut s, &rule.var)?;
                writeln!(f, "rule {}: {s}", rule.var)?;
            }
        }
        Ok(())
    }
}
