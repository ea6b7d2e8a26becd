//! Polynomials over basic probability expressions, kept in canonical form.
//!
//! Canonical form: inside a monomial the factors are sorted by term and
//! merged (exponents ≥ 1); monomials are sorted by their factor lists, like
//! monomials are merged, and zero coefficients are dropped. Structural
//! equality is therefore equality of polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};

use crate::rational::{fmt_rational, pow, Rational};

use super::ast::ProbTerm;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub coeff: Rational,
    pub factors: Vec<(ProbTerm, u32)>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    monos: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { monos: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_monomials(vec![Monomial {
            coeff: c,
            factors: vec![],
        }])
    }

    pub fn term(t: ProbTerm) -> Self {
        Self::from_monomials(vec![Monomial {
            coeff: Rational::one(),
            factors: vec![(t, 1)],
        }])
    }

    /// Canonicalizes an arbitrary list of monomials.
    pub fn from_monomials(monos: Vec<Monomial>) -> Self {
        let mut merged: BTreeMap<Vec<(ProbTerm, u32)>, Rational> = BTreeMap::new();
        for m in monos {
            let mut fs: BTreeMap<ProbTerm, u32> = BTreeMap::new();
            for (t, e) in m.factors {
                if e > 0 {
                    *fs.entry(t).or_insert(0) += e;
                }
            }
            let key: Vec<(ProbTerm, u32)> = fs.into_iter().collect();
            *merged.entry(key).or_insert_with(Rational::zero) += m.coeff;
        }
        Polynomial {
            monos: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(factors, coeff)| Monomial { coeff, factors })
                .collect(),
        }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn is_zero(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.monos.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Distinct probability terms, in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = &ProbTerm> {
        let mut seen: Vec<&ProbTerm> = self
            .monos
            .iter()
            .flat_map(|m| m.factors.iter().map(|(t, _)| t))
            .collect();
        seen.sort();
        seen.dedup();
        seen.into_iter()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Self::from_monomials(self.monos.iter().chain(&other.monos).cloned().collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Self::from_monomials(
            self.monos
                .iter()
                .map(|m| Monomial {
                    coeff: &m.coeff * c,
                    factors: m.factors.clone(),
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Vec::with_capacity(self.monos.len() * other.monos.len());
        for a in &self.monos {
            for b in &other.monos {
                out.push(Monomial {
                    coeff: &a.coeff * &b.coeff,
                    factors: a.factors.iter().chain(&b.factors).cloned().collect(),
                });
            }
        }
        Self::from_monomials(out)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Rebuilds the polynomial with every term replaced by a polynomial.
    pub fn substitute<E>(
        &self,
        f: &mut dyn FnMut(&ProbTerm) -> Result<Polynomial, E>,
    ) -> Result<Polynomial, E> {
        let mut acc = Polynomial::zero();
        for m in &self.monos {
            let mut prod = Polynomial::constant(m.coeff.clone());
            for (t, e) in &m.factors {
                prod = prod.mul(&f(t)?.pow(*e));
            }
            acc = acc.add(&prod);
        }
        Ok(acc)
    }

    /// Evaluates with `value` supplying each term's value.
    pub fn eval<E>(&self, value: &mut dyn FnMut(&ProbTerm) -> Result<Rational, E>) -> Result<Rational, E> {
        let mut cache: BTreeMap<&ProbTerm, Rational> = BTreeMap::new();
        let mut acc = Rational::zero();
        for m in &self.monos {
            let mut prod = m.coeff.clone();
            for (t, e) in &m.factors {
                let v = match cache.get(t) {
                    Some(v) => v.clone(),
                    None => {
                        let v = value(t)?;
                        cache.insert(t, v.clone());
                        v
                    }
                };
                prod *= pow(&v, u64::from(*e));
            }
            acc += prod;
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monos.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.monos.iter().enumerate() {
            let mag = m.coeff.abs();
            if i == 0 {
                if m.coeff.is_negative() {
                    f.write_str("-")?;
                }
            } else if m.coeff.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut sep = "";
            if !(mag.is_one() && !m.factors.is_empty()) {
                f.write_str(&fmt_rational(&mag))?;
                sep = "*";
            }
            for (t, e) in &m.factors {
                write!(f, "{sep}{t}")?;
                sep = "*";
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
