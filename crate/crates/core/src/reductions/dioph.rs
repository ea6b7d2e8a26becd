//! Diophantine polynomials and their encoding as a mixed-time atom over the
//! Hilbert chain.
//!
//! For `p(n_1,…,n_k) = Σ a_I n^I` with `d_j` the degree in `n_j`, each
//! monomial becomes `z_I = Π_j w(t_j)^{i_j} x(t_j)^{d_j−i_j}`. Since
//! `x(t) = (½)ᵗ` and `w(t) = t(½)ᵗ` on the chain,
//! `Z = Σ a_I z_I` evaluates to `(½)^{Σ d_j n_j} · p(n)` at `t_j = n_j`, and
//! `∃t (Z = 0)` holds iff `p` has a root in the naturals.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::formula::{MixedTimeAtom, Polynomial, Rel};
use crate::model::Podtmc;
use crate::rational::Rational;

use super::hilbert::{hilbert_chain, hilbert_w, hilbert_x};
use super::ReductionError;

/// Integer polynomial in named natural-number variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantinePoly {
    vars: Vec<String>,
    /// Exponent vector (one entry per variable) to nonzero coefficient.
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl DiophantinePoly {
    pub fn new(vars: Vec<String>, terms: Vec<(BigInt, Vec<u32>)>) -> Result<Self, ReductionError> {
        let mut merged: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (c, e) in terms {
            if e.len() != vars.len() {
                return Err(ReductionError::Parse(format!(
                    "monomial with {} exponents for {} variables",
                    e.len(),
                    vars.len()
                )));
            }
            *merged.entry(e).or_insert_with(BigInt::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        Ok(DiophantinePoly { vars, terms: merged })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// `(coefficient, exponents)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &[u32])> {
        self.terms.iter().map(|(e, c)| (c, e.as_slice()))
    }

    /// `d_j`: the largest exponent of each variable.
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.vars.len())
            .map(|j| self.terms.keys().map(|e| e[j]).max().unwrap_or(0))
            .collect()
    }

    pub fn eval(&self, at: &[u64]) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(at)
                    .fold(c.clone(), |acc, (k, n)| acc * num::pow(BigInt::from(*n), *k as usize))
            })
            .sum()
    }

    /// Parses `p(n1,n2) = 1*n1^1 - 1*n2^1 - 1` or just the right-hand side.
    /// Without a header the variables are ordered by length, then name.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let (header, body) = match text.split_once('=') {
            Some((h, b)) => (Some(h.trim()), b),
            None => (None, text),
        };
        let declared = match header {
            Some(h) => Some(parse_header(h)?),
            None => None,
        };
        let raw = parse_body(body)?;
        let vars = match declared {
            Some(v) => {
                for (_, fs) in &raw {
                    for (name, _) in fs {
                        if !v.contains(name) {
                            return Err(ReductionError::Parse(format!(
                                "variable `{name}` not declared in the header"
                            )));
                        }
                    }
                }
                v
            }
            None => {
                let mut v: Vec<String> = raw
                    .iter()
                    .flat_map(|(_, fs)| fs.iter().map(|(n, _)| n.clone()))
                    .collect();
                v.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
                v.dedup();
                v
            }
        };
        let terms = raw
            .into_iter()
            .map(|(c, fs)| {
                let mut e = vec![0u32; vars.len()];
                for (name, k) in fs {
                    let j = vars.iter().position(|v| *v == name).expect("collected");
                    e[j] += k;
                }
                (c, e)
            })
            .collect();
        DiophantinePoly::new(vars, terms)
    }
}

fn parse_header(h: &str) -> Result<Vec<String>, ReductionError> {
    let bad = || ReductionError::Parse(format!("malformed header `{h}`"));
    let open = h.find('(').ok_or_else(bad)?;
    let inner = h[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let vars: Vec<String> = inner
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    for v in &vars {
        if !is_var(v) {
            return Err(ReductionError::Parse(format!("bad variable name `{v}`")));
        }
    }
    let mut sorted = vars.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != vars.len() {
        return Err(ReductionError::Parse("variable declared twice".into()));
    }
    Ok(vars)
}

fn is_var(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

type RawTerm = (BigInt, Vec<(String, u32)>);

/// Sum of `[sign] factor (* factor)*`, factors being integers or `var[^k]`.
fn parse_body(body: &str) -> Result<Vec<RawTerm>, ReductionError> {
    let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(ReductionError::Parse("empty polynomial".into()));
    }
    let mut out = Vec::new();
    let mut rest = compact.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let neg = if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            true
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            false
        } else if first {
            false
        } else {
            return Err(ReductionError::Parse(format!("expected `+` or `-` before `{rest}`")));
        };
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (mono, tail) = rest.split_at(end);
        rest = tail;
        let mut coeff = BigInt::one();
        let mut factors = Vec::new();
        for f in mono.split('*') {
            if f.is_empty() {
                return Err(ReductionError::Parse(format!("empty factor in `{mono}`")));
            }
            if f.chars().all(|c| c.is_ascii_digit()) {
                coeff *= f.parse::<BigInt>().expect("digits");
                continue;
            }
            let (name, exp) = match f.split_once('^') {
                Some((n, k)) => (
                    n,
                    k.parse::<u32>()
                        .map_err(|_| ReductionError::Parse(format!("bad exponent in `{f}`")))?,
                ),
                None => (f, 1),
            };
            if !is_var(name) {
                return Err(ReductionError::Parse(format!("bad factor `{f}`")));
            }
            factors.push((name.to_string(), exp));
        }
        out.push((if neg { -coeff } else { coeff }, factors));
    }
    Ok(out)
}

impl fmt::Display for DiophantinePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}) = ", self.vars.join(","))?;
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            match (k, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}", c.abs())?;
            for (v, k) in self.vars.iter().zip(e) {
                if *k > 0 {
                    write!(f, "*{v}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// Time variable standing for the `j`-th unknown (1-based).
pub fn time_var(j: usize) -> String {
    format!("t{j}")
}

/// Builds `∃t_1…t_k (Z = 0)` over the Hilbert chain.
pub fn dioph_to_atom(p: &DiophantinePoly) -> (Podtmc, MixedTimeAtom) {
    let k = p.vars().len();
    let tv: Vec<String> = (1..=k).map(time_var).collect();
    let xs: Vec<Polynomial> = tv.iter().map(|t| hilbert_x(t)).collect();
    let ws: Vec<Polynomial> = tv.iter().map(|t| hilbert_w(t)).collect();
    let d = p.degrees();
    let mut z = Polynomial::zero();
    for (c, e) in p.terms() {
        let mut mono = Polynomial::constant(Rational::from_integer(c.clone()));
        for j in 0..k {
            mono = mono.mul(&ws[j].pow(e[j])).mul(&xs[j].pow(d[j] - e[j]));
        }
        z = z.add(&mono);
    }
    let atom = MixedTimeAtom {
        time_vars: tv,
        poly: z,
        rel: Rel::Eq,
        rhs: Rational::zero(),
    };
    (hilbert_chain(), atom)
}
