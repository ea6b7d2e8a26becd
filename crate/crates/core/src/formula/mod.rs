//! Formulas of the bounded branching-time logic of knowledge and probability.

mod ast;
mod parser;
mod poly;
pub mod rewrite;

pub use ast::{Bound, Formula, MixedTimeAtom, ProbTerm, Query, Rel};
pub use parser::{parse_formula, parse_polynomial, parse_query, FormulaError};
pub use poly::{Monomial, Polynomial};

/// How many steps past the current time a formula's truth may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Horizon {
    Bounded(u64),
    Unbounded,
}

impl Horizon {
    fn max(self, other: Horizon) -> Horizon {
        std::cmp::max(self, other)
    }

    fn plus(self, k: u64) -> Horizon {
        match self {
            Horizon::Bounded(h) => Horizon::Bounded(h + k),
            Horizon::Unbounded => Horizon::Unbounded,
        }
    }

    pub fn bounded(self) -> Option<u64> {
        match self {
            Horizon::Bounded(h) => Some(h),
            Horizon::Unbounded => None,
        }
    }
}

/// Dependence horizon: the truth of `f` at time `t` on a run is determined
/// by the run's prefix up to `t + h`.
pub fn dependence_horizon(f: &Formula) -> Horizon {
    use Horizon::*;
    match f {
        Formula::True | Formula::Prop(_) => Bounded(0),
        Formula::Not(a) | Formula::All(a) | Formula::Exists(a) | Formula::Knows(_, a) => {
            dependence_horizon(a)
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            dependence_horizon(a).max(dependence_horizon(b))
        }
        Formula::Next(a) => dependence_horizon(a).plus(1),
        Formula::Until(a, b, Bound::Within(k)) => {
            let k = u64::from(*k);
            let hb = dependence_horizon(b).plus(k);
            if k == 0 {
                hb
            } else {
                hb.max(dependence_horizon(a).plus(k - 1))
            }
        }
        Formula::Eventually(a, Bound::Within(k)) | Formula::Globally(a, Bound::Within(k)) => {
            dependence_horizon(a).plus(u64::from(*k))
        }
        Formula::Until(..) | Formula::Eventually(..) | Formula::Globally(..) => Unbounded,
        Formula::Cmp(..) => f
            .children()
            .into_iter()
            .map(dependence_horizon)
            .fold(Bounded(0), Horizon::max),
    }
}

/// Boolean combination of atomic propositions.
pub fn is_propositional(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Prop(_) => true,
        Formula::Not(a) => is_propositional(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_propositional(a) && is_propositional(b)
        }
        _ => false,
    }
}

/// True if no temporal operator occurs outside a path quantifier, knowledge
/// operator, or probability term, so that the truth value depends only on
/// the current point.
pub fn is_state_formula(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Prop(_) => true,
        Formula::Not(a) => is_state_formula(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_state_formula(a) && is_state_formula(b)
        }
        Formula::All(_) | Formula::Exists(_) | Formula::Knows(..) | Formula::Cmp(..) => true,
        Formula::Next(_) | Formula::Until(..) | Formula::Eventually(..) | Formula::Globally(..) => {
            false
        }
    }
}

/// CTLPK: every temporal operator sits directly under `A` or `E`, and the
/// arguments of probability terms are state formulas of the same shape.
pub fn is_ctlpk(f: &Formula) -> bool {
    fn state(f: &Formula) -> bool {
        match f {
            Formula::True | Formula::Prop(_) => true,
            Formula::Not(a) | Formula::Knows(_, a) => state(a),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => state(a) && state(b),
            Formula::All(p) | Formula::Exists(p) => match p.as_ref() {
                Formula::Next(a) | Formula::Eventually(a, _) | Formula::Globally(a, _) => state(a),
                Formula::Until(a, b, _) => state(a) && state(b),
                _ => false,
            },
            Formula::Cmp(..) => f.children().into_iter().all(state),
            Formula::Next(_) | Formula::Until(..) | Formula::Eventually(..) | Formula::Globally(..) => {
                false
            }
        }
    }
    state(f)
}

/// Agents mentioned by knowledge operators or probability terms.
pub fn agents_mentioned(f: &Formula) -> std::collections::BTreeSet<String> {
    let mut out = std::collections::BTreeSet::new();
    collect_agents(f, &mut out);
    out
}

fn collect_agents(f: &Formula, out: &mut std::collections::BTreeSet<String>) {
    match f {
        Formula::Knows(i, _) => {
            out.insert(i.clone());
        }
        Formula::Cmp(p, _, _) => {
            for t in p.terms() {
                match t {
                    ProbTerm::Pr { agent, .. }
                    | ProbTerm::Prior { agent, .. }
                    | ProbTerm::PrAt { agent, .. } => {
                        out.insert(agent.clone());
                    }
                    ProbTerm::PropAt { .. } => {}
                }
            }
        }
        _ => {}
    }
    for c in f.children() {
        collect_agents(c, out);
    }
}

/// Propositions mentioned anywhere, including inside probability terms.
pub fn props_mentioned(f: &Formula) -> std::collections::BTreeSet<String> {
    let mut out = std::collections::BTreeSet::new();
    collect_props(f, &mut out);
    out
}

fn collect_props(f: &Formula, out: &mut std::collections::BTreeSet<String>) {
    match f {
        Formula::Prop(p) => {
            out.insert(p.clone());
        }
        Formula::Cmp(p, _, _) => {
            for t in p.terms() {
                if let ProbTerm::PropAt { prop, .. } = t {
                    out.insert(prop.clone());
                }
            }
        }
        _ => {}
    }
    for c in f.children() {
        collect_props(c, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(src: &str) -> Horizon {
        dependence_horizon(&parse_formula(src).unwrap())
    }

    #[test]
    fn horizons() {
        assert_eq!(h("p & !q"), Horizon::Bounded(0));
        assert_eq!(h("X X p"), Horizon::Bounded(2));
        assert_eq!(h("F<=3 X p"), Horizon::Bounded(4));
        assert_eq!(h("p U<=0 q"), Horizon::Bounded(0));
        assert_eq!(h("X X p U<=2 q"), Horizon::Bounded(3));
        assert_eq!(h("K[i] (Pr[j](G<=4 p) > 1/2)"), Horizon::Bounded(4));
        assert_eq!(h("A F p"), Horizon::Unbounded);
    }

    #[test]
    fn classification() {
        assert!(is_ctlpk(&parse_formula("A G<=2 (K[i] p -> E X q)").unwrap()));
        assert!(!is_ctlpk(&parse_formula("A F G p").unwrap()));
        assert!(!is_ctlpk(&parse_formula("K[i] F p").unwrap()));
        assert!(is_state_formula(&parse_formula("K[i] F p").unwrap()));
        assert!(!is_state_formula(&parse_formula("p & X q").unwrap()));
        assert!(is_propositional(&parse_formula("p -> !q").unwrap()));
        let f = parse_formula("K[a] (Pr[b](p) + Prior[c](q) > 0)").unwrap();
        assert_eq!(agents_mentioned(&f).into_iter().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(props_mentioned(&f).into_iter().collect::<Vec<_>>(), ["p", "q"]);
    }
}
