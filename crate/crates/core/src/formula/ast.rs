use std::fmt;

use crate::rational::{fmt_rational, Rational};

use super::poly::Polynomial;

/// Step bound on a temporal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Within(u32),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Rel::Lt => lhs < rhs,
            Rel::Le => lhs <= rhs,
            Rel::Eq => lhs == rhs,
            Rel::Ge => lhs >= rhs,
            Rel::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Basic probability expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProbTerm {
    /// `Pr[i](φ)`: agent's current probability.
    Pr { agent: String, arg: Box<Formula> },
    /// `Prior[i](φ)`: agent's probability at time 0.
    Prior { agent: String, arg: Box<Formula> },
    /// `Pr(p@t)`: probability that `p` holds at time `t`.
    PropAt { prop: String, time: String },
    /// `Pr[i,t](φ)`: agent's probability at time `t`.
    PrAt {
        agent: String,
        time: String,
        arg: Box<Formula>,
    },
}

impl ProbTerm {
    pub fn pr(agent: &str, arg: Formula) -> Self {
        ProbTerm::Pr {
            agent: agent.to_string(),
            arg: Box::new(arg),
        }
    }

    pub fn prop_at(prop: &str, time: &str) -> Self {
        ProbTerm::PropAt {
            prop: prop.to_string(),
            time: time.to_string(),
        }
    }

    pub fn time_var(&self) -> Option<&str> {
        match self {
            ProbTerm::PropAt { time, .. } | ProbTerm::PrAt { time, .. } => Some(time),
            _ => None,
        }
    }
}

impl fmt::Display for ProbTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbTerm::Pr { agent, arg } => write!(f, "Pr[{agent}]({arg})"),
            ProbTerm::Prior { agent, arg } => write!(f, "Prior[{agent}]({arg})"),
            ProbTerm::PropAt { prop, time } => write!(f, "Pr({prop}@{time})"),
            ProbTerm::PrAt { agent, time, arg } => write!(f, "Pr[{agent},{time}]({arg})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `A φ`: on every run through the current prefix.
    All(Box<Formula>),
    /// `E φ`: on some run through the current prefix.
    Exists(Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>, Bound),
    Eventually(Box<Formula>, Bound),
    Globally(Box<Formula>, Bound),
    Knows(String, Box<Formula>),
    Cmp(Polynomial, Rel, Rational),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn prop(p: &str) -> Formula {
        Formula::Prop(p.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn all(f: Formula) -> Formula {
        Formula::All(Box::new(f))
    }

    pub fn exists(f: Formula) -> Formula {
        Formula::Exists(Box::new(f))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula, bound: Bound) -> Formula {
        Formula::Until(Box::new(a), Box::new(b), bound)
    }

    pub fn eventually(f: Formula, bound: Bound) -> Formula {
        Formula::Eventually(Box::new(f), bound)
    }

    pub fn globally(f: Formula, bound: Bound) -> Formula {
        Formula::Globally(Box::new(f), bound)
    }

    pub fn knows(agent: &str, f: Formula) -> Formula {
        Formula::Knows(agent.to_string(), Box::new(f))
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn conj(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Formula::True,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Immediate subformulas, including arguments of probability terms.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::Prop(_) => vec![],
            Formula::Not(a)
            | Formula::All(a)
            | Formula::Exists(a)
            | Formula::Next(a)
            | Formula::Eventually(a, _)
            | Formula::Globally(a, _)
            | Formula::Knows(_, a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b, _) => vec![a, b],
            Formula::Cmp(p, _, _) => p
                .terms()
                .filter_map(|t| match t {
                    ProbTerm::Pr { arg, .. }
                    | ProbTerm::Prior { arg, .. }
                    | ProbTerm::PrAt { arg, .. } => Some(arg.as_ref()),
                    ProbTerm::PropAt { .. } => None,
                })
                .collect(),
        }
    }

    /// Pre-order search.
    pub fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }
}

fn fmt_bound(b: Bound) -> String {
    match b {
        Bound::Within(k) => format!("<={k}"),
        Bound::Unbounded => String::new(),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::Prop(p) => f.write_str(p),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::All(a) => write!(f, "A {a}"),
            Formula::Exists(a) => write!(f, "E {a}"),
            Formula::Next(a) => write!(f, "X {a}"),
            Formula::Until(a, b, k) => write!(f, "({a} U{} {b})", fmt_bound(*k)),
            Formula::Eventually(a, k) => write!(f, "F{} {a}", fmt_bound(*k)),
            Formula::Globally(a, k) => write!(f, "G{} {a}", fmt_bound(*k)),
            Formula::Knows(i, a) => write!(f, "K[{i}] {a}"),
            Formula::Cmp(p, r, c) => write!(f, "({p} {r} {})", fmt_rational(c)),
        }
    }
}

/// `exists t_1 … t_n . f(Pr(p@t_j), …) ⋈ c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedTimeAtom {
    pub time_vars: Vec<String>,
    pub poly: Polynomial,
    pub rel: Rel,
    pub rhs: Rational,
}

impl fmt::Display for MixedTimeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exists {} . {} {} {}",
            self.time_vars.join(" "),
            self.poly,
            self.rel,
            fmt_rational(&self.rhs)
        )
    }
}

/// Result of parsing a query string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Formula(Formula),
    Mixed(MixedTimeAtom),
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Formula(x) => x.fmt(f),
            Query::Mixed(x) => x.fmt(f),
        }
    }
}
