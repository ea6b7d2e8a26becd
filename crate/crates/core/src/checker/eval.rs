//! Exact evaluation of bounded formulas at points.
//!
//! A point is a run prefix together with a time index into it. Path
//! operators look forward along the given prefix; `A`/`E` re-branch from the
//! prefix up to the current time; `K`/`Pr` range over the agent's cell, i.e.
//! all positive-probability prefixes of the same length that the agent
//! cannot tell apart from the current one. Every run-set probability is a
//! finite sum of cylinder measures because each argument has a bounded
//! dependence horizon.

use std::cell::RefCell;
use std::collections::HashMap;

use num::{One, Zero};

use crate::belief::{Semantics, DEFAULT_MAX_PATHS};
use crate::formula::{dependence_horizon, Bound, Formula, Horizon, ProbTerm};
use crate::model::{FinitePath, ModelError, Podtmc};
use crate::rational::Rational;

use super::CheckError;

/// A run prefix and a position on it. The prefix may extend past `time`
/// when path operators need to look ahead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    path: FinitePath,
    time: usize,
}

impl Point {
    pub fn new(path: FinitePath, time: usize) -> Result<Point, CheckError> {
        if time > path.transitions() {
            return Err(CheckError::Model(ModelError::InvalidPath(format!(
                "time {time} beyond a path with {} transitions",
                path.transitions()
            ))));
        }
        Ok(Point { path, time })
    }

    /// The point at the last state of `path`.
    pub fn at_end(path: FinitePath) -> Point {
        let time = path.transitions();
        Point { path, time }
    }

    pub fn path(&self) -> &FinitePath {
        &self.path
    }

    pub fn time(&self) -> usize {
        self.time
    }
}

type CellKey = (usize, usize, Vec<String>);

/// Cell key (the agent's observation data) and its weighted prefixes.
type Cell = (Vec<String>, Vec<(Vec<usize>, Rational)>);

/// Evaluation context for one model and semantics. Memo tables are keyed by
/// node address and knowledge cell, so an evaluator must not outlive the
/// formulas it has seen; use a fresh one per query.
pub struct Evaluator<'m> {
    m: &'m Podtmc,
    sem: Semantics,
    max_paths: u64,
    horizons: RefCell<HashMap<usize, Horizon>>,
    knows: RefCell<HashMap<CellKey, bool>>,
    probs: RefCell<HashMap<CellKey, Rational>>,
}

impl<'m> Evaluator<'m> {
    pub fn new(m: &'m Podtmc, sem: Semantics) -> Self {
        Evaluator {
            m,
            sem,
            max_paths: DEFAULT_MAX_PATHS,
            horizons: RefCell::default(),
            knows: RefCell::default(),
            probs: RefCell::default(),
        }
    }

    pub fn with_max_paths(mut self, max_paths: u64) -> Self {
        self.max_paths = max_paths;
        self
    }

    pub fn model(&self) -> &'m Podtmc {
        self.m
    }

    pub fn max_paths(&self) -> u64 {
        self.max_paths
    }

    fn horizon(&self, f: &Formula) -> Result<usize, CheckError> {
        let key = f as *const Formula as usize;
        let h = *self
            .horizons
            .borrow_mut()
            .entry(key)
            .or_insert_with(|| dependence_horizon(f));
        match h {
            Horizon::Bounded(h) => Ok(h as usize),
            Horizon::Unbounded => Err(CheckError::Unbounded(f.to_string())),
        }
    }

    fn budget(&self, n: usize) -> Result<(), CheckError> {
        if n as u64 > self.max_paths {
            return Err(CheckError::EnumerationBound(self.max_paths));
        }
        Ok(())
    }

    /// All extensions of `prefix` by `extra` steps with their conditional
    /// probabilities.
    pub(crate) fn extensions(
        &self,
        prefix: &[usize],
        extra: usize,
    ) -> Result<Vec<(Vec<usize>, Rational)>, CheckError> {
        let mut out = vec![(prefix.to_vec(), Rational::one())];
        for _ in 0..extra {
            let mut next = Vec::new();
            for (p, w) in &out {
                for (s, q) in self.m.successors(*p.last().expect("nonempty")) {
                    let mut ext = p.clone();
                    ext.push(*s);
                    next.push((ext, w * q));
                }
            }
            self.budget(next.len())?;
            out = next;
        }
        Ok(out)
    }

    /// All paths with `len` transitions, with cylinder measures, whose
    /// states satisfy `keep(time, state)` at every step.
    fn paths_where(
        &self,
        len: usize,
        keep: &dyn Fn(usize, usize) -> bool,
    ) -> Result<Vec<(Vec<usize>, Rational)>, CheckError> {
        let mut out: Vec<(Vec<usize>, Rational)> = self
            .m
            .init_support()
            .into_iter()
            .filter(|&s| keep(0, s))
            .map(|s| (vec![s], self.m.init()[s].clone()))
            .collect();
        for t in 1..=len {
            let mut next = Vec::new();
            for (p, w) in &out {
                for (s, q) in self.m.successors(*p.last().expect("nonempty")) {
                    if keep(t, *s) {
                        let mut ext = p.clone();
                        ext.push(*s);
                        next.push((ext, w * q));
                    }
                }
            }
            self.budget(next.len())?;
            out = next;
        }
        Ok(out)
    }

    /// Prefixes of length `pos + 1` in the agent's cell at `run[..=pos]`.
    fn cell(
        &self,
        agent: &str,
        run: &[usize],
        pos: usize,
    ) -> Result<Cell, CheckError> {
        let obs = self.m.observations(agent)?;
        match self.sem {
            Semantics::Spr => {
                let hist: Vec<&String> = run[..=pos].iter().map(|&s| &obs[s]).collect();
                let members = self.paths_where(pos, &|t, s| obs[s] == *hist[t])?;
                Ok((hist.into_iter().cloned().collect(), members))
            }
            Semantics::Clk => {
                let cur = &obs[run[pos]];
                let members = self.paths_where(pos, &|t, s| t < pos || obs[s] == *cur)?;
                Ok((vec![cur.clone()], members))
            }
        }
    }

    fn require(&self, f: &Formula, run: &[usize], pos: usize) -> Result<(), CheckError> {
        let need = pos + self.horizon(f)? + 1;
        if run.len() < need {
            return Err(CheckError::RunNotDetermined {
                needed: need,
                have: run.len(),
            });
        }
        Ok(())
    }

    /// Whether some positive-probability continuation of `run[..=pos]`
    /// gives `a` the truth value `want` at `pos`.
    pub(crate) fn some_branch(
        &self,
        a: &Formula,
        run: &[usize],
        pos: usize,
        want: bool,
    ) -> Result<bool, CheckError> {
        let h = self.horizon(a)?;
        for (ext, _) in self.extensions(&run[..=pos], h)? {
            if self.eval(a, &ext, pos)? == want {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Truth of `f` at position `pos` of `run`.
    pub fn eval(&self, f: &Formula, run: &[usize], pos: usize) -> Result<bool, CheckError> {
        Ok(match f {
            Formula::True => true,
            Formula::Prop(p) => {
                let mask = self
                    .m
                    .label(p)
                    .ok_or_else(|| CheckError::UnknownProp(p.clone()))?;
                mask[run[pos]]
            }
            Formula::Not(a) => !self.eval(a, run, pos)?,
            Formula::And(a, b) => self.eval(a, run, pos)? && self.eval(b, run, pos)?,
            Formula::Or(a, b) => self.eval(a, run, pos)? || self.eval(b, run, pos)?,
            Formula::Implies(a, b) => !self.eval(a, run, pos)? || self.eval(b, run, pos)?,
            Formula::Next(a) => {
                self.require(f, run, pos)?;
                self.eval(a, run, pos + 1)?
            }
            Formula::Until(a, b, k) => {
                self.require(f, run, pos)?;
                let Bound::Within(k) = *k else { unreachable!("horizon checked") };
                let mut holds = false;
                for j in pos..=pos + k as usize {
                    if self.eval(b, run, j)? {
                        holds = true;
                        break;
                    }
                    if !self.eval(a, run, j)? {
                        break;
                    }
                }
                holds
            }
            Formula::Eventually(a, k) => {
                self.require(f, run, pos)?;
                let Bound::Within(k) = *k else { unreachable!("horizon checked") };
                let mut holds = false;
                for j in pos..=pos + k as usize {
                    if self.eval(a, run, j)? {
                        holds = true;
                        break;
                    }
                }
                holds
            }
            Formula::Globally(a, k) => {
                self.require(f, run, pos)?;
                let Bound::Within(k) = *k else { unreachable!("horizon checked") };
                let mut holds = true;
                for j in pos..=pos + k as usize {
                    if !self.eval(a, run, j)? {
                        holds = false;
                        break;
                    }
                }
                holds
            }
            Formula::All(a) => !self.some_branch(a, run, pos, false)?,
            Formula::Exists(a) => self.some_branch(a, run, pos, true)?,
            Formula::Knows(agent, a) => {
                let h = self.horizon(a)?;
                let (obs_key, members) = self.cell(agent, run, pos)?;
                let key = (f as *const Formula as usize, pos, obs_key);
                if let Some(v) = self.knows.borrow().get(&key) {
                    return Ok(*v);
                }
                let mut holds = true;
                'outer: for (member, _) in &members {
                    for (ext, _) in self.extensions(member, h)? {
                        if !self.eval(a, &ext, pos)? {
                            holds = false;
                            break 'outer;
                        }
                    }
                }
                self.knows.borrow_mut().insert(key, holds);
                holds
            }
            Formula::Cmp(poly, rel, c) => {
                let v = poly.eval(&mut |t| self.prob(t, run, pos))?;
                rel.holds(&v, c)
            }
        })
    }

    /// Exact value of a probability term at position `pos` of `run`.
    pub fn prob(&self, t: &ProbTerm, run: &[usize], pos: usize) -> Result<Rational, CheckError> {
        let (agent, arg, at) = match t {
            ProbTerm::Pr { agent, arg } => (agent, arg, pos),
            ProbTerm::Prior { agent, arg } => (agent, arg, 0),
            ProbTerm::PropAt { .. } | ProbTerm::PrAt { .. } => {
                return Err(CheckError::TimeTerm(t.to_string()))
            }
        };
        let h = self.horizon(arg)?;
        let (obs_key, members) = self.cell(agent, run, at)?;
        let key = (t as *const ProbTerm as usize, at, obs_key);
        if let Some(v) = self.probs.borrow().get(&key) {
            return Ok(v.clone());
        }
        let mut mass = Rational::zero();
        let mut cell_mass = Rational::zero();
        for (member, mu) in &members {
            cell_mass += mu;
            let mut inner = Rational::zero();
            for (ext, w) in self.extensions(member, h)? {
                if self.eval(arg, &ext, at)? {
                    inner += w;
                }
            }
            mass += mu * inner;
        }
        // the current prefix is a genuine path, so its cell has positive mass
        debug_assert!(!cell_mass.is_zero());
        let v = mass / cell_mass;
        self.probs.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

/// Truth of `f` at `pt`. The point's path must reach `time + h` where `h`
/// is the dependence horizon of `f`.
pub fn eval_point(m: &Podtmc, sem: Semantics, f: &Formula, pt: &Point) -> Result<bool, CheckError> {
    Evaluator::new(m, sem).eval(f, pt.path.states(), pt.time)
}

/// Exact value of a probability term at `pt`.
pub fn eval_prob_term(
    m: &Podtmc,
    sem: Semantics,
    t: &ProbTerm,
    pt: &Point,
) -> Result<Rational, CheckError> {
    Evaluator::new(m, sem).prob(t, pt.path.states(), pt.time)
}
