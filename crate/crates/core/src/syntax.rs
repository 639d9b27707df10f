//! Lexer and recursive-descent parser for words, integer expressions and
//! system files. The grammar is documented in the README.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::expr::{Evaluator, Expr, SeqTable};
use crate::system::{
    Decl, Declarations, Equation, EquationSystem, Rule, SymbolKind, SymbolPolicy, SystemSource, TBase, TFactor,
    TWord,
};
use crate::word::GroupWord;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Caret,
    Minus,
    Plus,
    Star,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Underscore,
    Eq,
    Colon,
    Ge,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(v) => write!(f, "`{v}`"),
            other => {
                let s = match other {
                    Tok::Caret => "^",
                    Tok::Minus => "-",
                    Tok::Plus => "+",
                    Tok::Star => "*",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Underscore => "_",
                    Tok::Eq => "=",
                    Tok::Colon => ":",
                    Tok::Ge => ">=",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits parse")), col));
            continue;
        }
        let tok = match c {
            '^' => Tok::Caret,
            '-' => Tok::Minus,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '_' => Tok::Underscore,
            '=' => Tok::Eq,
            ':' => Tok::Colon,
            '>' if chars.get(i + 1) == Some(&'=') => {
                i += 1;
                Tok::Ge
            }
            _ => return Err(ParseError { line, col, message: format!("unexpected character `{c}`") }),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    index_var: Option<String>,
}

impl Parser {
    fn new(text: &str, line: usize, col0: usize) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, line, col0)?,
            pos: 0,
            line,
            end_col: col0 + text.chars().count() + 1,
            index_var: None,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col: self.col(), message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected {t}, found {found}")),
                None => self.err(format!("expected {t}, found end of input")),
            }
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => self.err(format!("unexpected {t}")),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(t) => self.err(format!("expected identifier, found {t}")),
            None => self.err("expected identifier, found end of input"),
        }
    }

    fn is_index_var(&self, s: &str) -> bool {
        self.index_var.as_deref() == Some(s)
    }

    // word := factor*
    fn word(&mut self) -> Result<TWord, ParseError> {
        let mut factors = Vec::new();
        while let Some(t) = self.peek() {
            match t {
                Tok::RParen | Tok::RBrack | Tok::Comma | Tok::Eq => break,
                _ => factors.push(self.factor()?),
            }
        }
        Ok(TWord(factors))
    }

    fn factor(&mut self) -> Result<TFactor, ParseError> {
        let base = match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                if self.is_index_var(&name) {
                    return self.err(format!("rule index `{name}` cannot be used as a symbol"));
                }
                self.pos += 1;
                let index = if self.eat(&Tok::Underscore) { Some(self.subscript()?) } else { None };
                TBase::Symbol { name, index }
            }
            Some(Tok::Int(v)) if v == BigInt::from(1) => {
                self.pos += 1;
                TBase::One
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(&Tok::RParen)?;
                TBase::Group(w)
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(&Tok::Comma)?;
                let v = self.word()?;
                self.expect(&Tok::RBrack)?;
                TBase::Comm(u, v)
            }
            Some(t) => return self.err(format!("unexpected {t} in word")),
            None => return self.err("unexpected end of input in word"),
        };
        let exp = if self.eat(&Tok::Caret) { Some(self.exponent()?) } else { None };
        Ok(TFactor { base, exp })
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        let neg = self.eat(&Tok::Minus);
        let e = match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                if v.is_zero() {
                    return self.err("zero exponent");
                }
                self.pos += 1;
                return Ok(Expr::Int(if neg { -v } else { v }));
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RBrace)?;
                e
            }
            Some(Tok::Ident(s)) if self.is_index_var(&s) => {
                self.pos += 1;
                Expr::Index
            }
            _ => return self.err("expected an integer or `{expression}` after `^`"),
        };
        Ok(if neg { Expr::Neg(Box::new(e)) } else { e })
    }

    fn subscript(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Ident(s)) if self.is_index_var(&s) => {
                self.pos += 1;
                Ok(Expr::Index)
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RBrace)?;
                Ok(e)
            }
            _ => self.err("expected an index: integer, rule index or `{expression}`"),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Star) {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(s)) if self.is_index_var(&s) => {
                self.pos += 1;
                Ok(Expr::Index)
            }
            Some(Tok::Ident(s)) if s == "prime" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.pos += 2;
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(Expr::Prime(Box::new(e)))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                if !self.eat(&Tok::Underscore) {
                    return self.err(format!("`{s}` must be the rule index or a sequence reference `{s}_...`"));
                }
                let at = self.subscript()?;
                Ok(Expr::Seq(s, Box::new(at)))
            }
            Some(t) => self.err(format!("unexpected {t} in expression")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses a plain word (no rule index) and instantiates it.
pub fn parse_word(text: &str, decls: &Declarations) -> Result<GroupWord, ParseError> {
    let mut p = Parser::new(text, 1, 0)?;
    let tw = p.word()?;
    p.expect_end()?;
    let seqs = SeqTable::default();
    let mut ev = Evaluator::new(&seqs);
    tw.instantiate(decls, &mut ev, None)
        .map_err(|e| ParseError { line: 1, col: 1, message: e.to_string() })
}

/// Parses an integer expression in the rule index `var`.
pub fn parse_expr(text: &str, var: Option<&str>) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, 1, 0)?;
    p.index_var = var.map(str::to_string);
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Splits a file into `(line number, column offset, statement)` triples:
/// `#` starts a comment, `;` separates statements on one line.
pub fn statements(text: &str) -> Vec<(usize, usize, &str)> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for piece in body.split(';') {
            let lead = piece.len() - piece.trim_start().len();
            let t = piece.trim();
            if !t.is_empty() {
                out.push((ln + 1, offset + lead, t));
            }
            offset += piece.len() + 1;
        }
    }
    out
}

pub fn parse_system(text: &str) -> Result<EquationSystem, ParseError> {
    parse_system_with(text, SymbolPolicy::default())
}

enum Pending {
    Equation(usize, TWord, TWord),
}

/// Parses a system file. Declarations may appear anywhere; equations are
/// instantiated after all declarations are read.
pub fn parse_system_with(text: &str, policy: SymbolPolicy) -> Result<EquationSystem, ParseError> {
    let mut decls = Declarations { policy, ..Default::default() };
    let mut seqs = SeqTable::default();
    let mut rule: Option<(usize, Rule)> = None;
    let mut pending = Vec::new();

    for (line, col0, stmt) in statements(text) {
        let mut p = Parser::new(stmt, line, col0)?;
        let keyword = match p.peek() {
            Some(Tok::Ident(k)) => k.clone(),
            _ => String::new(),
        };
        let declare = |decls: &mut Declarations, kind, d, p: &Parser| -> Result<(), ParseError> {
            decls.declare(kind, d).map_err(|m| ParseError { line, col: p.col(), message: m })
        };
        match keyword.as_str() {
            "var" | "coeff" => {
                p.bump();
                let kind = if keyword == "var" { SymbolKind::Var } else { SymbolKind::Coeff };
                loop {
                    let name = p.ident()?;
                    declare(&mut decls, kind, Decl::Plain(name), &p)?;
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
                p.expect_end()?;
            }
            "varfamily" | "coefffamily" => {
                p.bump();
                let kind = if keyword == "varfamily" { SymbolKind::Var } else { SymbolKind::Coeff };
                let mut names = vec![p.ident()?];
                while p.eat(&Tok::Comma) {
                    names.push(p.ident()?);
                }
                let mut from = 1;
                if !p.at_end() {
                    p.ident()?;
                    p.expect(&Tok::Ge)?;
                    from = match p.bump() {
                        Some(Tok::Int(v)) => v.to_u64().filter(|&k| k >= 1).map_or_else(
                            || p.err("family start must be a natural number >= 1"),
                            Ok,
                        )?,
                        _ => return p.err("expected the family start index"),
                    };
                }
                p.expect_end()?;
                for name in names {
                    declare(&mut decls, kind, Decl::Family { name, from }, &p)?;
                }
            }
            "seq" => {
                p.bump();
                let name = p.ident()?;
                p.expect(&Tok::Underscore)?;
                match p.bump() {
                    Some(Tok::Int(at)) => {
                        let at = at.to_u64().map_or_else(|| p.err("sequence index too large"), Ok)?;
                        p.expect(&Tok::Eq)?;
                        let e = p.expr()?;
                        p.expect_end()?;
                        seqs.define_base(&name, at, e);
                    }
                    Some(Tok::Ident(var)) => {
                        p.expect(&Tok::Eq)?;
                        p.index_var = Some(var.clone());
                        let e = p.expr()?;
                        let mut from = 1;
                        if p.peek() == Some(&Tok::Ident("for".into())) {
                            p.bump();
                            let v2 = p.ident()?;
                            if v2 != var {
                                return p.err(format!("`for` must bind `{var}`"));
                            }
                            p.expect(&Tok::Ge)?;
                            from = match p.bump() {
                                Some(Tok::Int(v)) => v.to_u64().map_or_else(|| p.err("start too large"), Ok)?,
                                _ => return p.err("expected the start index"),
                            };
                        }
                        p.expect_end()?;
                        if seqs.get(&name).is_some_and(|d| d.general.is_some()) {
                            return p.err(format!("sequence `{name}` has two general formulas"));
                        }
                        seqs.define_general(&name, from, e);
                    }
                    _ => return p.err("expected `seq name_<index> = ...`"),
                }
            }
            "rule" => {
                p.bump();
                if rule.is_some() {
                    return p.err("only one rule per system");
                }
                let var = p.ident()?;
                p.expect(&Tok::Colon)?;
                p.index_var = Some(var.clone());
                let lhs = p.word()?;
                p.expect(&Tok::Eq)?;
                let rhs = p.word()?;
                p.expect_end()?;
                rule = Some((line, Rule { var, lhs, rhs }));
            }
            _ => {
                let lhs = p.word()?;
                p.expect(&Tok::Eq)?;
                let rhs = p.word()?;
                p.expect_end()?;
                pending.push(Pending::Equation(line, lhs, rhs));
            }
        }
    }

    let source = match rule {
        Some((line, r)) => {
            if let Some(Pending::Equation(l2, ..)) = pending.first() {
                return Err(ParseError {
                    line: *l2.max(&line),
                    col: 1,
                    message: "a system is either a rule or a list of equations, not both".into(),
                });
            }
            SystemSource::Generated(r)
        }
        None => {
            let mut ev = Evaluator::new(&seqs);
            let mut eqs = Vec::new();
            for Pending::Equation(line, lhs, rhs) in pending {
                let inst = |w: &TWord, ev: &mut Evaluator<'_>| {
                    w.instantiate(&decls, ev, None)
                        .map_err(|e| ParseError { line, col: 1, message: e.to_string() })
                };
                let l = inst(&lhs, &mut ev)?;
                let r = inst(&rhs, &mut ev)?;
                eqs.push(Equation::from_sides(&l, &r));
            }
            SystemSource::Finite(eqs)
        }
    };
    let sys = EquationSystem { decls, seqs, source };
    if let SystemSource::Generated(_) = &sys.source {
        // the rule must at least produce its first equation
        sys.equation(1).map_err(|e| ParseError { line: 0, col: 0, message: format!("rule: {e}") })?;
    }
    Ok(sys)
}
