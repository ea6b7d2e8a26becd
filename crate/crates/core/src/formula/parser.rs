//! Recursive-descent parser for formulas and mixed-time atoms.
//!
//! Precedence, loosest first: `->` (right associative), `|`, `&`, binary
//! `U` (right associative), then prefix operators `! A E X F G K[i]`.
//! Runs of path quantifiers and temporal prefixes may be written without
//! spaces (`EF<=5`, `AG`), so identifiers made only of the letters
//! `A E X F G` are reserved.

use std::collections::BTreeSet;

use num::bigint::BigInt;
use num::{One, Zero};

use crate::rational::Rational;

use super::ast::{Bound, Formula, MixedTimeAtom, ProbTerm, Query, Rel};
use super::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("undeclared time variable `{0}`")]
    UndeclaredTimeVar(String),
    #[error("bound `{0}` overflows")]
    BoundOverflow(String),
    #[error("expected a formula, found a mixed-time atom")]
    UnexpectedMixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigInt, Option<BigInt>),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Plus,
    Minus,
    Star,
    Caret,
    At,
    Dot,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, msg: String| FormulaError::Syntax { col: col + 1, msg };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: BigInt = chars[start..i].iter().collect::<String>().parse().expect("digits");
            let mut den = None;
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                let ds = i + 1;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let d: BigInt = chars[ds..i].iter().collect::<String>().parse().expect("digits");
                if d.is_zero() {
                    return Err(err(start, "zero denominator".into()));
                }
                den = Some(d);
            }
            out.push((start, Tok::Num(num, den)));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match two.as_str() {
            "->" => (Tok::Arrow, 2),
            "<=" => (Tok::Le, 2),
            ">=" => (Tok::Ge, 2),
            _ => (
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    '!' => Tok::Bang,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '@' => Tok::At,
                    '.' => Tok::Dot,
                    _ => return Err(err(start, format!("unexpected character `{c}`"))),
                },
                1,
            ),
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

fn is_prefix_run(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| matches!(c, 'A' | 'E' | 'X' | 'F' | 'G'))
}

fn is_reserved(s: &str) -> bool {
    is_prefix_run(s) || matches!(s, "U" | "K" | "Pr" | "Prior" | "true" | "false" | "exists")
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
    /// Declared time variables; `None` outside a mixed-time atom.
    time_vars: Option<BTreeSet<String>>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c) + 1
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            col: self.col(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
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

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), FormulaError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, FormulaError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    fn int(&mut self) -> Result<u32, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Num(n, None)) => {
                self.pos += 1;
                u32::try_from(&n).map_err(|_| FormulaError::BoundOverflow(n.to_string()))
            }
            _ => self.error("expected an integer"),
        }
    }

    fn opt_bound(&mut self) -> Result<Bound, FormulaError> {
        if self.peek() == Some(&Tok::Le) && matches!(self.peek_at(1), Some(Tok::Num(_, None))) {
            self.pos += 1;
            Ok(Bound::Within(self.int()?))
        } else {
            Ok(Bound::Unbounded)
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Pipe) {
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, FormulaError> {
        let mut acc = self.until()?;
        while self.eat(&Tok::Amp) {
            acc = Formula::and(acc, self.until()?);
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == "U") {
            self.pos += 1;
            let bound = self.opt_bound()?;
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs, bound));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if is_prefix_run(&s) => {
                self.pos += 1;
                let letters: Vec<char> = s.chars().collect();
                let last_bound = match letters.last() {
                    Some('F' | 'G') => self.opt_bound()?,
                    _ => Bound::Unbounded,
                };
                let mut body = self.unary()?;
                for (k, c) in letters.iter().enumerate().rev() {
                    let bound = if k + 1 == letters.len() {
                        last_bound
                    } else {
                        Bound::Unbounded
                    };
                    body = match c {
                        'A' => Formula::all(body),
                        'E' => Formula::exists(body),
                        'X' => Formula::next(body),
                        'F' => Formula::eventually(body, bound),
                        'G' => Formula::globally(body, bound),
                        _ => unreachable!(),
                    };
                }
                Ok(body)
            }
            Some(Tok::Ident(s)) if s == "K" => {
                self.pos += 1;
                self.expect(&Tok::LBrack, "`[` after K")?;
                let agent = self.ident("agent id")?;
                self.expect(&Tok::RBrack, "`]`")?;
                Ok(Formula::knows(&agent, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                Ok(Formula::not(Formula::True))
            }
            Some(Tok::Ident(s)) if s == "Pr" || s == "Prior" => self.comparison(),
            Some(Tok::Num(..) | Tok::Minus | Tok::Plus) => self.comparison(),
            Some(Tok::Ident(s)) => {
                if is_reserved(&s) {
                    return self.error(format!("`{s}` is reserved"));
                }
                self.pos += 1;
                Ok(Formula::Prop(s))
            }
            Some(t) => self.error(format!("unexpected {t:?}")),
            None => self.error("unexpected end of input"),
        }
    }

    fn comparison(&mut self) -> Result<Formula, FormulaError> {
        let (poly, rel, rhs) = self.poly_rel()?;
        Ok(Formula::Cmp(poly, rel, rhs))
    }

    fn poly_rel(&mut self) -> Result<(Polynomial, Rel, Rational), FormulaError> {
        let poly = self.poly()?;
        let rel = match self.bump() {
            Some(Tok::Lt) => Rel::Lt,
            Some(Tok::Le) => Rel::Le,
            Some(Tok::Eq) => Rel::Eq,
            Some(Tok::Ge) => Rel::Ge,
            Some(Tok::Gt) => Rel::Gt,
            _ => {
                self.pos -= 1;
                return self.error("expected a relation (<, <=, =, >=, >)");
            }
        };
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let c = self.number()?;
        Ok((poly, rel, if neg { -c } else { c }))
    }

    fn number(&mut self) -> Result<Rational, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::Num(n, d)) => {
                self.pos += 1;
                Ok(Rational::new(n, d.unwrap_or_else(BigInt::one)))
            }
            _ => self.error("expected a rational constant"),
        }
    }

    fn poly(&mut self) -> Result<Polynomial, FormulaError> {
        let mut negate = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let mut acc = Polynomial::zero();
        loop {
            let mut prod = self.product()?;
            if negate {
                prod = prod.scale(&-Rational::one());
            }
            acc = acc.add(&prod);
            if self.eat(&Tok::Plus) {
                negate = false;
            } else if self.eat(&Tok::Minus) {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Polynomial, FormulaError> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, FormulaError> {
        if let Some(Tok::Num(..)) = self.peek() {
            return Ok(Polynomial::constant(self.number()?));
        }
        let term = self.term()?;
        let e = if self.eat(&Tok::Caret) { self.int()? } else { 1 };
        Ok(Polynomial::term(term).pow(e))
    }

    fn term(&mut self) -> Result<ProbTerm, FormulaError> {
        let head = self.ident("`Pr` or `Prior`")?;
        match head.as_str() {
            "Pr" if self.peek() == Some(&Tok::LParen) => {
                self.pos += 1;
                let prop = self.ident("proposition")?;
                self.expect(&Tok::At, "`@`")?;
                let time = self.time_var()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(ProbTerm::PropAt { prop, time })
            }
            "Pr" | "Prior" => {
                self.expect(&Tok::LBrack, "`[`")?;
                let agent = self.ident("agent id")?;
                let time = if head == "Pr" && self.eat(&Tok::Comma) {
                    Some(self.time_var()?)
                } else {
                    None
                };
                self.expect(&Tok::RBrack, "`]`")?;
                self.expect(&Tok::LParen, "`(`")?;
                // arguments are ordinary formulas: time variables are not in scope
                let saved = self.time_vars.take();
                let arg = self.formula();
                self.time_vars = saved;
                let arg = Box::new(arg?);
                self.expect(&Tok::RParen, "`)`")?;
                Ok(match (head.as_str(), time) {
                    ("Pr", Some(time)) => ProbTerm::PrAt { agent, time, arg },
                    ("Pr", None) => ProbTerm::Pr { agent, arg },
                    _ => ProbTerm::Prior { agent, arg },
                })
            }
            _ => {
                self.pos -= 1;
                self.error("expected `Pr` or `Prior`")
            }
        }
    }

    fn time_var(&mut self) -> Result<String, FormulaError> {
        let v = self.ident("time variable")?;
        match &self.time_vars {
            Some(decl) if decl.contains(&v) => Ok(v),
            _ => Err(FormulaError::UndeclaredTimeVar(v)),
        }
    }

    fn mixed(&mut self) -> Result<MixedTimeAtom, FormulaError> {
        let mut vars = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek().cloned() {
            if is_reserved(&s) {
                return self.error(format!("`{s}` is reserved"));
            }
            if vars.contains(&s) {
                return self.error(format!("time variable `{s}` declared twice"));
            }
            self.pos += 1;
            vars.push(s);
        }
        if vars.is_empty() {
            return self.error("expected at least one time variable");
        }
        self.expect(&Tok::Dot, "`.` after the time variables")?;
        self.time_vars = Some(vars.iter().cloned().collect());
        let (poly, rel, rhs) = self.poly_rel()?;
        Ok(MixedTimeAtom {
            time_vars: vars,
            poly,
            rel,
            rhs,
        })
    }
}

/// Parses a formula or a mixed-time atom (`exists t1 … . poly REL c`).
pub fn parse_query(text: &str) -> Result<Query, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count(),
        time_vars: None,
    };
    let q = if matches!(p.peek(), Some(Tok::Ident(s)) if s == "exists") {
        p.pos += 1;
        Query::Mixed(p.mixed()?)
    } else {
        Query::Formula(p.formula()?)
    };
    if p.pos < p.toks.len() {
        return p.error("trailing input");
    }
    Ok(q)
}

/// Parses a formula; mixed-time atoms are rejected.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    match parse_query(text)? {
        Query::Formula(f) => Ok(f),
        Query::Mixed(_) => Err(FormulaError::UnexpectedMixed),
    }
}

/// Parses a bare polynomial over `Pr[i](φ)` / `Prior[i](φ)` terms.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count(),
        time_vars: None,
    };
    let poly = p.poly()?;
    if p.pos < p.toks.len() {
        return p.error("trailing input");
    }
    Ok(poly)
}
