//! Text format for concrete finite groups.
//!
//! ```text
//! gens 3; orders 2 2 2
//! comm 2 1: g3          # [g2, g1] = g3
//! pow 1: g2^1           # optional; empty right side means trivial
//! names a b c           # optional coefficient names for the generators
//! ```
//!
//! Alternatively `builtin cyclic <p> <k>`, `builtin heisenberg <p> <k>` or
//! `builtin dihedral <n>` (repeated lines form a direct product), or
//! `abelian <n_1> … <n_r>` for `Z/n_1 ⊕ … ⊕ Z/n_r`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::presentation::{cyclic, dihedral, direct_product, heisenberg, PcGroup, PcPresentation, PcWord};
use crate::abelian::FiniteAbelianGroup;
use crate::syntax::{statements, ParseError};
use crate::word::{CoeffId, Symbol};

/// A group read from a file, with a coefficient name per generator.
#[derive(Clone, Debug)]
pub enum ConcreteGroup {
    Pc(PcGroup),
    Abelian { group: FiniteAbelianGroup, names: Vec<Symbol> },
}

impl ConcreteGroup {
    pub fn names(&self) -> &[Symbol] {
        match self {
            ConcreteGroup::Pc(g) => g.names(),
            ConcreteGroup::Abelian { names, .. } => names,
        }
    }

    pub fn order(&self) -> num_bigint::BigUint {
        match self {
            ConcreteGroup::Pc(g) => g.size().into(),
            ConcreteGroup::Abelian { group, .. } => group.size(),
        }
    }
}

/// Coefficient bindings for an abelian group: name `i` is basis vector `i`.
pub fn abelian_bindings(group: &FiniteAbelianGroup, names: &[Symbol]) -> HashMap<CoeffId, Vec<BigInt>> {
    names.iter().enumerate().map(|(i, n)| (n.clone(), group.basis(i))).collect()
}

pub fn pc_bindings(group: &PcGroup) -> HashMap<CoeffId, super::PcElement> {
    group.names().iter().enumerate().map(|(i, n)| (n.clone(), group.generator(i))).collect()
}

fn perr(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col: col + 1, message: message.into() }
}

fn parse_gen(tok: &str, n: usize) -> Option<usize> {
    let k: usize = tok.strip_prefix('g')?.parse().ok()?;
    (1..=n).contains(&k).then_some(k - 1)
}

fn parse_pc_word(text: &str, n: usize) -> Result<PcWord, String> {
    text.split_whitespace()
        .map(|tok| {
            let (g, e) = tok.split_once('^').unwrap_or((tok, "1"));
            let g = parse_gen(g, n).ok_or_else(|| format!("bad generator `{g}`"))?;
            let e: u32 = e.parse().map_err(|_| format!("bad exponent in `{tok}`"))?;
            Ok((g, e))
        })
        .filter(|r| !matches!(r, Ok((_, 0))))
        .collect()
}

fn parse_nums<T: std::str::FromStr>(text: &str) -> Option<Vec<T>> {
    text.split_whitespace().map(|t| t.parse().ok()).collect()
}

pub fn parse_group_file(text: &str) -> Result<ConcreteGroup, ParseError> {
    let mut gens: Option<usize> = None;
    let mut orders: Option<Vec<u32>> = None;
    let mut powers: BTreeMap<usize, PcWord> = BTreeMap::new();
    let mut comms: BTreeMap<(usize, usize), PcWord> = BTreeMap::new();
    let mut names: Option<Vec<Symbol>> = None;
    let mut builtins: Vec<PcGroup> = Vec::new();
    let mut abelian: Option<Vec<BigInt>> = None;
    let mut last_line = 1;

    for (line, col, stmt) in statements(text) {
        last_line = line;
        let (head, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let rest = rest.trim();
        match head {
            "gens" => gens = Some(rest.parse().map_err(|_| perr(line, col, "expected `gens <count>`"))?),
            "orders" => orders = Some(parse_nums(rest).ok_or_else(|| perr(line, col, "bad relative order"))?),
            "names" => {
                let v = rest
                    .split_whitespace()
                    .map(str::parse::<Symbol>)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|m| perr(line, col, m))?;
                names = Some(v);
            }
            "pow" | "comm" => {
                let n = gens.ok_or_else(|| perr(line, col, "`gens` must come before relations"))?;
                let (lhs, rhs) = rest.split_once(':').ok_or_else(|| perr(line, col, "expected `:`"))?;
                let idx: Vec<usize> = parse_nums(lhs).ok_or_else(|| perr(line, col, "bad generator index"))?;
                if idx.iter().any(|&i| i == 0 || i > n) {
                    return Err(perr(line, col, format!("generator index out of range 1..{n}")));
                }
                let w = parse_pc_word(rhs, n).map_err(|m| perr(line, col, m))?;
                match (head, idx.as_slice()) {
                    ("pow", [i]) => {
                        powers.insert(i - 1, w);
                    }
                    ("comm", [j, i]) if j > i => {
                        comms.insert((j - 1, i - 1), w);
                    }
                    ("comm", [_, _]) => return Err(perr(line, col, "`comm j i` needs j > i")),
                    _ => return Err(perr(line, col, format!("wrong number of indices for `{head}`"))),
                }
            }
            "builtin" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let nums: Vec<u32> = parse_nums(&parts[1.min(parts.len())..].join(" "))
                    .ok_or_else(|| perr(line, col, "builtin arguments must be integers"))?;
                let g = match (parts.first().copied(), nums.as_slice()) {
                    (Some("cyclic"), [p, k]) => cyclic(*p, *k),
                    (Some("heisenberg"), [p, k]) => heisenberg(*p, *k),
                    (Some("dihedral"), [n]) if *n >= 2 => dihedral(*n),
                    _ => {
                        return Err(perr(
                            line,
                            col,
                            "expected `builtin cyclic <p> <k>`, `builtin heisenberg <p> <k>` or `builtin dihedral <n>` with n >= 2",
                        ))
                    }
                };
                builtins.push(g.map_err(|e| perr(line, col, e.to_string()))?);
            }
            "abelian" => {
                let v: Vec<BigInt> = parse_nums(rest).ok_or_else(|| perr(line, col, "bad cyclic order"))?;
                if v.is_empty() {
                    return Err(perr(line, col, "`abelian` needs at least one order"));
                }
                abelian = Some(v);
            }
            other => return Err(perr(line, col, format!("unknown keyword `{other}`"))),
        }
    }

    let kinds = usize::from(gens.is_some() || orders.is_some()) + usize::from(!builtins.is_empty()) + usize::from(abelian.is_some());
    if kinds != 1 {
        return Err(perr(last_line, 0, "give exactly one of a presentation, `builtin` lines, or `abelian`"));
    }
    if let Some(moduli) = abelian {
        let group = FiniteAbelianGroup::new(moduli).map_err(|m| perr(last_line, 0, m))?;
        let names = match names {
            Some(v) if v.len() != group.rank() => {
                return Err(perr(last_line, 0, format!("expected {} names, got {}", group.rank(), v.len())))
            }
            Some(v) => v,
            None => (1..=group.rank() as u64).map(|i| Symbol::indexed("a", i)).collect(),
        };
        return Ok(ConcreteGroup::Abelian { group, names });
    }
    let group = if builtins.is_empty() {
        let n = gens.ok_or_else(|| perr(last_line, 0, "missing `gens`"))?;
        let orders = orders.ok_or_else(|| perr(last_line, 0, "missing `orders`"))?;
        if orders.len() != n {
            return Err(perr(last_line, 0, format!("`orders` lists {} values for {n} generators", orders.len())));
        }
        let pres = PcPresentation {
            relative_orders: orders,
            powers: (0..n).map(|i| powers.remove(&i).unwrap_or_default()).collect(),
            commutators: comms,
            names: Vec::new(),
        };
        PcGroup::new(pres)
    } else {
        let mut it = builtins.into_iter();
        let first = it.next().expect("nonempty");
        it.try_fold(first, |acc, g| direct_product(&acc, &g))
    };
    let mut group = group.map_err(|e| perr(last_line, 0, e.to_string()))?;
    if let Some(v) = names {
        group = group.with_names(v).map_err(|e| perr(last_line, 0, e.to_string()))?;
    }
    Ok(ConcreteGroup::Pc(group))
}
