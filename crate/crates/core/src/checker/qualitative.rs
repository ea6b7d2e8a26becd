//! Qualitative decisions by graph analysis of the transition support.
//!
//! Probability-0/1 questions about unbounded `F`, `G` and `U` depend only
//! on which transitions are possible, not on their exact probabilities, and
//! are decided here exactly. So are existence/universality questions over
//! time about `Pr(p@t) = 0` and `Pr(p@t) > 0`, via the eventually periodic
//! sequence of support sets.

use std::collections::HashMap;

use num::{Signed, Zero};

use crate::formula::{
    dependence_horizon, is_propositional, is_state_formula, Bound, Formula, Horizon, ProbTerm,
    Rel,
};
use crate::model::Podtmc;
use crate::rational::Rational;

use super::eval::Evaluator;
use super::CheckError;

/// Membership mask of a propositional formula.
pub fn prop_mask(m: &Podtmc, f: &Formula) -> Result<Vec<bool>, CheckError> {
    let n = m.num_states();
    Ok(match f {
        Formula::True => vec![true; n],
        Formula::Prop(p) => m
            .label(p)
            .ok_or_else(|| CheckError::UnknownProp(p.clone()))?
            .to_vec(),
        Formula::Not(a) => prop_mask(m, a)?.into_iter().map(|x| !x).collect(),
        Formula::And(a, b) => zip(prop_mask(m, a)?, prop_mask(m, b)?, |x, y| x && y),
        Formula::Or(a, b) => zip(prop_mask(m, a)?, prop_mask(m, b)?, |x, y| x || y),
        Formula::Implies(a, b) => zip(prop_mask(m, a)?, prop_mask(m, b)?, |x, y| !x || y),
        _ => return Err(CheckError::Unsupported(format!("`{f}` is not propositional"))),
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// States reachable from `start` by paths whose states before the last one
/// all satisfy `through`. The start state itself is always included.
fn reach_through(m: &Podtmc, start: &[usize], through: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; m.num_states()];
    let mut stack = Vec::new();
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        if !through[u] {
            continue;
        }
        for (v, _) in m.successors(u) {
            if !seen[*v] {
                seen[*v] = true;
                stack.push(*v);
            }
        }
    }
    seen
}

/// Strongly connected components (Tarjan) of the graph restricted to
/// `nodes`, with `edges(u)` giving successors.
fn sccs(nodes: &[usize], n: usize, edges: &dyn Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    struct St<'a> {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
        edges: &'a dyn Fn(usize) -> Vec<usize>,
    }
    fn visit(st: &mut St<'_>, u: usize) {
        st.index[u] = Some(st.next);
        st.low[u] = st.next;
        st.next += 1;
        st.stack.push(u);
        st.on_stack[u] = true;
        for v in (st.edges)(u) {
            match st.index[v] {
                None => {
                    visit(st, v);
                    st.low[u] = st.low[u].min(st.low[v]);
                }
                Some(iv) if st.on_stack[v] => st.low[u] = st.low[u].min(iv),
                Some(_) => {}
            }
        }
        if Some(st.low[u]) == st.index[u] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack");
                st.on_stack[w] = false;
                comp.push(w);
                if w == u {
                    break;
                }
            }
            comp.sort_unstable();
            st.out.push(comp);
        }
    }
    let mut st = St {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
        edges,
    };
    for &u in nodes {
        if st.index[u].is_none() {
            visit(&mut st, u);
        }
    }
    st.out
}

/// `Pr(safe U target) = 1` from every state of `start`.
///
/// Target states and states violating `safe` are made absorbing; the
/// probability is 1 iff every bottom SCC reachable in that graph consists
/// of target states.
pub fn almost_sure_until(m: &Podtmc, start: &[usize], safe: &[bool], target: &[bool]) -> bool {
    let n = m.num_states();
    let cont: Vec<bool> = (0..n).map(|i| safe[i] && !target[i]).collect();
    let reach = reach_through(m, start, &cont);
    let nodes: Vec<usize> = (0..n).filter(|&i| reach[i]).collect();
    let edges = |u: usize| -> Vec<usize> {
        if cont[u] {
            m.successors(u).iter().map(|(v, _)| *v).collect()
        } else {
            vec![u]
        }
    };
    let comps = sccs(&nodes, n, &edges);
    let mut comp_of = vec![usize::MAX; n];
    for (c, comp) in comps.iter().enumerate() {
        for &u in comp {
            comp_of[u] = c;
        }
    }
    comps.iter().enumerate().all(|(c, comp)| {
        let bottom = comp
            .iter()
            .all(|&u| edges(u).into_iter().all(|v| comp_of[v] == c));
        !bottom || comp.iter().all(|&u| target[u])
    })
}

/// `Pr(safe U target) > 0` from `start`, i.e. some path reaches a target
/// state through safe states.
pub fn possible_until(m: &Podtmc, start: usize, safe: &[bool], target: &[bool]) -> bool {
    let cont: Vec<bool> = (0..m.num_states()).map(|i| safe[i] && !target[i]).collect();
    let reach = reach_through(m, &[start], &cont);
    reach.iter().zip(target).any(|(r, t)| *r && *t)
}

/// States from which some infinite path stays in `inv` forever.
fn exists_globally(m: &Podtmc, inv: &[bool]) -> Vec<bool> {
    let mut z = inv.to_vec();
    loop {
        let next: Vec<bool> = (0..m.num_states())
            .map(|u| z[u] && m.successors(u).iter().any(|(v, _)| z[*v]))
            .collect();
        if next == z {
            return z;
        }
        z = next;
    }
}

/// Exact decision of `Pr(F target) = 1` from the initial distribution.
pub fn almost_sure_eventually(m: &Podtmc, target: &Formula) -> Result<bool, CheckError> {
    let t = prop_mask(m, target)?;
    Ok(almost_sure_until(m, &m.init_support(), &vec![true; m.num_states()], &t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportKind {
    /// Some time step satisfies the predicate.
    Exists,
    /// Every time step satisfies the predicate.
    Forall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportPred {
    /// `Pr(p@t) = 0`
    Zero,
    /// `Pr(p@t) > 0`
    Positive,
}

/// The support sequence `Supp_0, Supp_1, …` split into its distinct prefix
/// and the index at which it starts repeating.
pub fn support_lasso(m: &Podtmc) -> (Vec<Vec<bool>>, usize) {
    let n = m.num_states();
    let mut cur: Vec<bool> = (0..n).map(|i| !m.init()[i].is_zero()).collect();
    let mut seen: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut seq = Vec::new();
    loop {
        if let Some(&start) = seen.get(&cur) {
            return (seq, start);
        }
        seen.insert(cur.clone(), seq.len());
        let mut next = vec![false; n];
        for u in (0..n).filter(|&u| cur[u]) {
            for (v, _) in m.successors(u) {
                next[*v] = true;
            }
        }
        seq.push(std::mem::replace(&mut cur, next));
    }
}

/// Decides `∃t` / `∀t` of `Pr(p@t) = 0` or `Pr(p@t) > 0`.
pub fn decide_support_query(
    m: &Podtmc,
    kind: SupportKind,
    pred: SupportPred,
    prop: &str,
) -> Result<bool, CheckError> {
    let mask = m
        .label(prop)
        .ok_or_else(|| CheckError::UnknownProp(prop.to_string()))?;
    let (seq, _) = support_lasso(m);
    let test = |supp: &Vec<bool>| {
        let positive = supp.iter().zip(mask).any(|(s, p)| *s && *p);
        match pred {
            SupportPred::Zero => !positive,
            SupportPred::Positive => positive,
        }
    };
    // every set of the sequence occurs in the distinct prefix
    Ok(match kind {
        SupportKind::Exists => seq.iter().any(test),
        SupportKind::Forall => seq.iter().all(test),
    })
}

/// `(safe, target, globally)` masks of an unbounded path formula.
type PathShape = (Vec<bool>, Vec<bool>, bool);

/// Qualitative value of a probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Qual {
    Zero,
    One,
    Between,
}

/// Decides state formulas at time-0 points whose unbounded operators occur
/// in shapes with graph-decidable meaning: `A`/`E`/`K` over `F`, `G`, `U`
/// with propositional arguments, and single-term comparisons of such
/// probabilities against thresholds not strictly inside `(0, 1)`.
pub(crate) struct Qualitative<'a, 'm> {
    pub ev: &'a Evaluator<'m>,
}

impl Qualitative<'_, '_> {
    fn m(&self) -> &Podtmc {
        self.ev.model()
    }

    fn bounded(f: &Formula) -> bool {
        matches!(dependence_horizon(f), Horizon::Bounded(_))
    }

    /// Truth of the state formula `f` at the time-0 point of state `s`.
    pub fn state(&self, f: &Formula, s: usize) -> Result<bool, CheckError> {
        if Self::bounded(f) {
            return self.ev.eval(f, &[s], 0);
        }
        match f {
            Formula::Not(a) => Ok(!self.state(a, s)?),
            Formula::And(a, b) => Ok(self.state(a, s)? && self.state(b, s)?),
            Formula::Or(a, b) => Ok(self.state(a, s)? || self.state(b, s)?),
            Formula::Implies(a, b) => Ok(!self.state(a, s)? || self.state(b, s)?),
            Formula::All(p) => self.all_runs(p, s),
            Formula::Exists(p) => self.some_run(p, s),
            Formula::Knows(agent, a) => {
                for t in self.cell0(agent, s)? {
                    if !self.all_runs(a, t)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Cmp(poly, rel, c) => self.comparison(poly, *rel, c, s),
            _ => Err(CheckError::Unsupported(format!("`{f}` is not a state formula"))),
        }
    }

    /// Time-0 cell of `agent` at state `s`.
    fn cell0(&self, agent: &str, s: usize) -> Result<Vec<usize>, CheckError> {
        let obs = self.m().observations(agent)?;
        Ok(self
            .m()
            .init_support()
            .into_iter()
            .filter(|&t| obs[t] == obs[s])
            .collect())
    }

    /// Unbounded path formula with propositional arguments, as
    /// `(safe, target, globally)`: `F b` and `a U b` give `(a, b, false)`,
    /// `G a` gives `(a, -, true)`.
    fn path_shape(&self, p: &Formula) -> Result<Option<PathShape>, CheckError> {
        let n = self.m().num_states();
        Ok(match p {
            Formula::Eventually(b, Bound::Unbounded) if is_propositional(b) => {
                Some((vec![true; n], prop_mask(self.m(), b)?, false))
            }
            Formula::Until(a, b, Bound::Unbounded) if is_propositional(a) && is_propositional(b) => {
                Some((prop_mask(self.m(), a)?, prop_mask(self.m(), b)?, false))
            }
            Formula::Globally(a, Bound::Unbounded) if is_propositional(a) => {
                Some((prop_mask(self.m(), a)?, vec![false; n], true))
            }
            _ => None,
        })
    }

    fn all_runs(&self, p: &Formula, s: usize) -> Result<bool, CheckError> {
        if Self::bounded(p) {
            return Ok(!self.ev.some_branch(p, &[s], 0, false)?);
        }
        if is_state_formula(p) {
            return self.state(p, s);
        }
        match self.path_shape(p)? {
            Some((inv, _, true)) => {
                // A G a: no reachable state violates a
                let all = vec![true; inv.len()];
                Ok(!possible_until(self.m(), s, &all, &negate(&inv)))
            }
            Some((safe, target, false)) => {
                // A (a U b) = !E(!b U (!a & !b)) & !EG !b
                let nb = negate(&target);
                let bad: Vec<bool> = (0..safe.len()).map(|i| !safe[i] && !target[i]).collect();
                Ok(!possible_until(self.m(), s, &nb, &bad) && !exists_globally(self.m(), &nb)[s])
            }
            None => Err(CheckError::Unsupported(format!("`A {p}`"))),
        }
    }

    fn some_run(&self, p: &Formula, s: usize) -> Result<bool, CheckError> {
        if Self::bounded(p) {
            return self.ev.some_branch(p, &[s], 0, true);
        }
        if is_state_formula(p) {
            return self.state(p, s);
        }
        match self.path_shape(p)? {
            Some((inv, _, true)) => Ok(exists_globally(self.m(), &inv)[s]),
            Some((safe, target, false)) => Ok(possible_until(self.m(), s, &safe, &target)),
            None => Err(CheckError::Unsupported(format!("`E {p}`"))),
        }
    }

    /// Qualitative value of the probability of `p` from the time-0 point of `s`.
    fn qual_from(&self, p: &Formula, s: usize) -> Result<Qual, CheckError> {
        if is_state_formula(p) {
            return Ok(if self.state(p, s)? { Qual::One } else { Qual::Zero });
        }
        let Some((safe, target, globally)) = self.path_shape(p)? else {
            return Err(CheckError::Unsupported(format!("probability of `{p}`")));
        };
        let m = self.m();
        let (one, positive) = if globally {
            // Pr(G a) = 1 - Pr(F !a)
            let all = vec![true; safe.len()];
            let bad = negate(&safe);
            (
                !possible_until(m, s, &all, &bad),
                !almost_sure_until(m, &[s], &all, &bad),
            )
        } else {
            (
                almost_sure_until(m, &[s], &safe, &target),
                possible_until(m, s, &safe, &target),
            )
        };
        Ok(match (one, positive) {
            (true, _) => Qual::One,
            (false, false) => Qual::Zero,
            (false, true) => Qual::Between,
        })
    }

    fn comparison(
        &self,
        poly: &crate::formula::Polynomial,
        rel: Rel,
        c: &Rational,
        s: usize,
    ) -> Result<bool, CheckError> {
        let unsupported = || {
            CheckError::Unsupported(format!(
                "quantitative probability of an unbounded formula in `{poly} {rel} {c}`; \
                 such thresholds are undecidable in general"
            ))
        };
        let terms: Vec<&ProbTerm> = poly.terms().collect();
        let [term] = terms.as_slice() else { return Err(unsupported()) };
        if poly.degree() != 1 {
            return Err(unsupported());
        }
        let (agent, arg) = match term {
            ProbTerm::Pr { agent, arg } | ProbTerm::Prior { agent, arg } => (agent, arg),
            _ => return Err(CheckError::TimeTerm(term.to_string())),
        };
        let mut coeff = Rational::zero();
        let mut constant = Rational::zero();
        for mono in poly.monomials() {
            if mono.factors.is_empty() {
                constant = mono.coeff.clone();
            } else {
                coeff = mono.coeff.clone();
            }
        }
        let mut quals = Vec::new();
        for t in self.cell0(agent, s)? {
            quals.push(self.qual_from(arg, t)?);
        }
        let q = if quals.iter().all(|q| *q == Qual::One) {
            Qual::One
        } else if quals.iter().all(|q| *q == Qual::Zero) {
            Qual::Zero
        } else {
            Qual::Between
        };
        let value_at = |x: Rational| rel.holds(&(&coeff * x + &constant), c);
        match q {
            Qual::Zero => Ok(value_at(Rational::zero())),
            Qual::One => Ok(value_at(Rational::from_integer(1.into()))),
            Qual::Between => {
                // the truth value must not depend on where in (0,1) the value lies
                let d = (c - &constant) / &coeff;
                let flip = coeff.is_negative();
                let below = d <= Rational::zero();
                let above = d >= Rational::from_integer(1.into());
                if !(below || above) {
                    return Err(unsupported());
                }
                // x lies strictly above d when d <= 0, strictly below when d >= 1
                let x_gt_d = below != flip;
                Ok(match rel {
                    Rel::Eq => false,
                    Rel::Gt | Rel::Ge => x_gt_d,
                    Rel::Lt | Rel::Le => !x_gt_d,
                })
            }
        }
    }
}

fn negate(v: &[bool]) -> Vec<bool> {
    v.iter().map(|x| !x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Semantics;
    use crate::formula::parse_formula;

    const FIG: &str = "\
states: s u
init: s=1
trans: s -> s : 1/2
trans: s -> u : 1/2
trans: u -> u : 1
obs i: s=o u=o
label q: s
";

    const CYCLE: &str = "\
states: s0 s1
init: s0=1
trans: s0 -> s1 : 1
trans: s1 -> s0 : 1
label p: s1
";

    #[test]
    fn figure_almost_surely_leaves_q() {
        let m = Podtmc::parse(FIG).unwrap();
        assert!(almost_sure_eventually(&m, &parse_formula("!q").unwrap()).unwrap());
        assert!(!almost_sure_eventually(&m, &parse_formula("false").unwrap()).unwrap());
    }

    #[test]
    fn figure_knowledge_of_eventually_fails() {
        let m = Podtmc::parse(FIG).unwrap();
        let ev = Evaluator::new(&m, Semantics::Clk);
        let q = Qualitative { ev: &ev };
        assert!(!q.state(&parse_formula("K[i] F !q").unwrap(), 0).unwrap());
        assert!(q.state(&parse_formula("Pr[i](F !q) = 1").unwrap(), 0).unwrap());
        assert!(q.state(&parse_formula("E G q").unwrap(), 0).unwrap());
        assert!(q.state(&parse_formula("Pr[i](G q) = 0").unwrap(), 0).unwrap());
    }

    #[test]
    fn between_values_against_safe_thresholds() {
        let m = Podtmc::parse(FIG).unwrap();
        let ev = Evaluator::new(&m, Semantics::Clk);
        let q = Qualitative { ev: &ev };
        let m2 = Podtmc::parse(
            "states: a b c\ninit: a=1\ntrans: a -> b : 1/3\ntrans: a -> c : 2/3\n\
             trans: b -> b : 1\ntrans: c -> c : 1\nobs i: a=o b=o c=o\nlabel g: b\n",
        )
        .unwrap();
        let ev2 = Evaluator::new(&m2, Semantics::Clk);
        let q2 = Qualitative { ev: &ev2 };
        assert!(q2.state(&parse_formula("Pr[i](F g) > 0").unwrap(), 0).unwrap());
        assert!(q2.state(&parse_formula("Pr[i](F g) < 1").unwrap(), 0).unwrap());
        assert!(!q2.state(&parse_formula("Pr[i](F g) = 1").unwrap(), 0).unwrap());
        assert!(q2.state(&parse_formula("-1*Pr[i](F g) > -1").unwrap(), 0).unwrap());
        assert!(matches!(
            q2.state(&parse_formula("Pr[i](F g) > 1/2").unwrap(), 0),
            Err(CheckError::Unsupported(_))
        ));
        assert!(q.state(&parse_formula("A (q U !q)").unwrap(), 0).is_ok());
        assert!(!q.state(&parse_formula("A (q U !q)").unwrap(), 0).unwrap());
    }

    #[test]
    fn support_queries_on_cycle() {
        let m = Podtmc::parse(CYCLE).unwrap();
        use SupportKind::*;
        use SupportPred::*;
        assert!(decide_support_query(&m, Exists, Zero, "p").unwrap());
        assert!(decide_support_query(&m, Exists, Positive, "p").unwrap());
        assert!(!decide_support_query(&m, Forall, Zero, "p").unwrap());
        let (seq, start) = support_lasso(&m);
        assert_eq!((seq.len(), start), (2, 0));
    }

    #[test]
    fn absorbing_sure_start() {
        let m = Podtmc::parse("states: s\ninit: s=1\ntrans: s -> s : 1\nlabel p: s\n").unwrap();
        assert!(!decide_support_query(&m, SupportKind::Exists, SupportPred::Zero, "p").unwrap());
    }
}
