//! Partially observed discrete-time Markov chains.
//!
//! A [`Podtmc`] is a finite Markov chain `(S, PI, PT)` together with one
//! observation function per agent and a labeling of states by atomic
//! propositions. States carry user-chosen string ids; internally they are
//! dense indices in declaration order, and every enumeration in this crate
//! follows that order.
//!
//! The text format read by [`Podtmc::parse`] is line oriented:
//!
//! ```text
//! # comment
//! states: s1 s2 s3
//! init: s1=1/2 s2=1/2          # omitted states get 0
//! trans: s1 -> s2 : 1/2         # one line per nonzero entry
//! obs i: s1=a s2=a s3=b
//! label p: s2 s3
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Signed, Zero};

use crate::matrix::{RMatrix, RVector};
use crate::rational::{fmt_rational, parse_rational, Rational};

/// Observation symbol used for agents that see nothing.
pub const BLIND_SYMBOL: &str = "⊥";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate state id `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("init not a distribution (sum = {0})")]
    InitNotDistribution(String),
    #[error("row `{state}` not stochastic (sum = {sum})")]
    RowNotStochastic { state: String, sum: String },
    #[error("negative probability {value} at `{at}`")]
    NegativeProbability { at: String, value: String },
    #[error("agent `{agent}` has no observation for state `{state}`")]
    MissingObservation { agent: String, state: String },
    #[error("agent `{0}` already present")]
    DuplicateAgent(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("model has no states")]
    Empty,
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// Sequence of state indices `s_0 … s_m` with `PI(s_0) > 0` and
/// `PT(s_k, s_{k+1}) > 0`. Only [`Podtmc`] hands these out.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePath(Vec<usize>);

impl FinitePath {
    pub fn states(&self) -> &[usize] {
        &self.0
    }

    /// Number of transitions.
    pub fn transitions(&self) -> usize {
        self.0.len() - 1
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("paths are nonempty")
    }

    pub fn prefix(&self, time: usize) -> FinitePath {
        FinitePath(self.0[..=time].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Agent {
    name: String,
    /// Observation symbol per state.
    obs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Podtmc {
    states: Vec<String>,
    index: HashMap<String, usize>,
    init: RVector,
    trans: RMatrix,
    succ: Vec<Vec<(usize, Rational)>>,
    agents: Vec<Agent>,
    labels: BTreeMap<String, Vec<bool>>,
}

impl Podtmc {
    /// Builds and validates a model.
    ///
    /// `observations` lists, per agent, one symbol per state (in state order);
    /// `labels` maps each proposition to the ids of the states it holds at.
    pub fn new(
        states: Vec<String>,
        init: RVector,
        trans: RMatrix,
        observations: Vec<(String, Vec<String>)>,
        labels: Vec<(String, Vec<String>)>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::Empty);
        }
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();
        if init.len() != n || trans.rows() != n || trans.cols() != n {
            return Err(ModelError::InvalidPath(format!(
                "dimension mismatch: {n} states, init {}, trans {}x{}",
                init.len(),
                trans.rows(),
                trans.cols()
            )));
        }
        for (i, p) in init.iter().enumerate() {
            if p.is_negative() {
                return Err(ModelError::NegativeProbability {
                    at: format!("init {}", states[i]),
                    value: fmt_rational(p),
                });
            }
        }
        if !init.sum().is_one() {
            return Err(ModelError::InitNotDistribution(fmt_rational(&init.sum())));
        }
        for i in 0..n {
            for (j, p) in trans.row(i).iter().enumerate() {
                if p.is_negative() {
                    return Err(ModelError::NegativeProbability {
                        at: format!("{} -> {}", states[i], states[j]),
                        value: fmt_rational(p),
                    });
                }
            }
            let sum = trans.row_sum(i);
            if !sum.is_one() {
                return Err(ModelError::RowNotStochastic {
                    state: states[i].clone(),
                    sum: fmt_rational(&sum),
                });
            }
        }
        let mut agents: Vec<Agent> = Vec::new();
        for (name, obs) in observations {
            if agents.iter().any(|a| a.name == name) {
                return Err(ModelError::DuplicateAgent(name));
            }
            if obs.len() != n {
                let state = states.get(obs.len()).cloned().unwrap_or_default();
                return Err(ModelError::MissingObservation { agent: name, state });
            }
            agents.push(Agent { name, obs });
        }
        let mut label_map = BTreeMap::new();
        for (prop, members) in labels {
            let mut mask = vec![false; n];
            for s in &members {
                let i = *index
                    .get(s)
                    .ok_or_else(|| ModelError::UnknownState(s.clone()))?;
                mask[i] = true;
            }
            if label_map.insert(prop.clone(), mask).is_some() {
                return Err(ModelError::DuplicateLabel(prop));
            }
        }
        let succ = (0..n)
            .map(|i| {
                trans
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(j, p)| (j, p.clone()))
                    .collect()
            })
            .collect();
        Ok(Podtmc {
            states,
            index,
            init,
            trans,
            succ,
            agents,
            labels: label_map,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, idx: usize) -> &str {
        &self.states[idx]
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn init(&self) -> &RVector {
        &self.init
    }

    pub fn trans(&self) -> &RMatrix {
        &self.trans
    }

    /// Positive-probability successors of `state`, in index order.
    pub fn successors(&self, state: usize) -> &[(usize, Rational)] {
        &self.succ[state]
    }

    /// States with `PI(s) > 0`, in index order.
    pub fn init_support(&self) -> Vec<usize> {
        (0..self.num_states())
            .filter(|&i| !self.init[i].is_zero())
            .collect()
    }

    pub fn agents(&self) -> impl Iterator<Item = &str> {
        self.agents.iter().map(|a| a.name.as_str())
    }

    pub fn has_agent(&self, agent: &str) -> bool {
        self.agents.iter().any(|a| a.name == agent)
    }

    fn agent(&self, agent: &str) -> Result<&Agent, ModelError> {
        self.agents
            .iter()
            .find(|a| a.name == agent)
            .ok_or_else(|| ModelError::UnknownAgent(agent.to_string()))
    }

    /// Observation symbol of `agent` at every state, in state order.
    pub fn observations(&self, agent: &str) -> Result<&[String], ModelError> {
        Ok(&self.agent(agent)?.obs)
    }

    /// Sorted, deduplicated observation alphabet of `agent`.
    pub fn obs_alphabet(&self, agent: &str) -> Result<Vec<String>, ModelError> {
        let mut syms: Vec<String> = self.agent(agent)?.obs.clone();
        syms.sort();
        syms.dedup();
        Ok(syms)
    }

    /// True when the agent makes the same observation at every state.
    pub fn is_blind(&self, agent: &str) -> Result<bool, ModelError> {
        let obs = &self.agent(agent)?.obs;
        Ok(obs.iter().all(|o| *o == obs[0]))
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, &[bool])> {
        self.labels.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Membership mask of a proposition, or `None` if it is not declared.
    pub fn label(&self, prop: &str) -> Option<&[bool]> {
        self.labels.get(prop).map(Vec::as_slice)
    }

    /// Validates a sequence of state indices as a path of this model.
    pub fn path(&self, states: Vec<usize>) -> Result<FinitePath, ModelError> {
        let first = *states
            .first()
            .ok_or_else(|| ModelError::InvalidPath("empty path".into()))?;
        if first >= self.num_states() || self.init[first].is_zero() {
            return Err(ModelError::InvalidPath(format!(
                "initial state index {first} has zero initial probability"
            )));
        }
        for w in states.windows(2) {
            if w[1] >= self.num_states() || self.trans[(w[0], w[1])].is_zero() {
                return Err(ModelError::InvalidPath(format!(
                    "no transition {} -> {}",
                    self.state_id(w[0]),
                    self.states.get(w[1]).map_or("?", String::as_str)
                )));
            }
        }
        Ok(FinitePath(states))
    }

    pub fn path_by_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<FinitePath, ModelError> {
        let idx = ids
            .iter()
            .map(|s| {
                self.state_index(s.as_ref())
                    .ok_or_else(|| ModelError::UnknownState(s.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.path(idx)
    }

    pub fn format_path(&self, path: &FinitePath) -> String {
        path.0
            .iter()
            .map(|&i| self.states[i].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `PI(s_0)·PT(s_0,s_1)·…·PT(s_{m−1},s_m)`.
    pub fn cylinder_measure(&self, path: &FinitePath) -> Rational {
        let mut acc = self.init[path.0[0]].clone();
        for w in path.0.windows(2) {
            acc *= &self.trans[(w[0], w[1])];
        }
        acc
    }

    /// Visits every extension of `prefix` by exactly `extra` transitions, in
    /// lexicographic order of state indices, passing the full state sequence
    /// and the conditional probability of the extension given the prefix.
    pub fn for_each_extension<F>(&self, prefix: &[usize], extra: usize, f: &mut F)
    where
        F: FnMut(&[usize], &Rational),
    {
        let mut buf = prefix.to_vec();
        self.extend_rec(&mut buf, extra, &Rational::one(), f);
    }

    fn extend_rec<F>(&self, buf: &mut Vec<usize>, extra: usize, weight: &Rational, f: &mut F)
    where
        F: FnMut(&[usize], &Rational),
    {
        if extra == 0 {
            f(buf, weight);
            return;
        }
        let last = *buf.last().expect("nonempty prefix");
        for (next, p) in &self.succ[last] {
            buf.push(*next);
            self.extend_rec(buf, extra - 1, &(weight * p), f);
            buf.pop();
        }
    }

    /// Visits every path with exactly `horizon` transitions together with its
    /// cylinder measure, in lexicographic order of state indices.
    pub fn for_each_path<F>(&self, horizon: usize, f: &mut F)
    where
        F: FnMut(&[usize], &Rational),
    {
        for s in self.init_support() {
            let mut buf = vec![s];
            let w = self.init[s].clone();
            self.extend_rec(&mut buf, horizon, &w, f);
        }
    }

    /// `Paths_horizon(M)` materialized, in lexicographic order.
    pub fn enum_paths(&self, horizon: usize) -> Vec<FinitePath> {
        let mut out = Vec::new();
        self.for_each_path(horizon, &mut |p, _| out.push(FinitePath(p.to_vec())));
        out
    }

    /// Number of paths with `horizon` transitions, without materializing them.
    pub fn count_paths(&self, horizon: usize) -> u128 {
        let mut counts: Vec<u128> = (0..self.num_states())
            .map(|i| u128::from(!self.init[i].is_zero()))
            .collect();
        for _ in 0..horizon {
            let mut next = vec![0u128; counts.len()];
            for (i, c) in counts.iter().enumerate() {
                for (j, _) in &self.succ[i] {
                    next[*j] = next[*j].saturating_add(*c);
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, b| a.saturating_add(*b))
    }

    /// Exact distribution of the state at time `t`, i.e. `PI·PT^t`.
    pub fn time_distribution(&self, t: u64) -> RVector {
        let mut v = self.init.clone();
        for _ in 0..t {
            v = self.step(&v);
        }
        v
    }

    /// One step of the chain applied to an (unnormalized) row vector.
    pub fn step(&self, v: &RVector) -> RVector {
        let mut out = RVector::zeros(self.num_states());
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, p) in &self.succ[i] {
                out[*j] += vi * p;
            }
        }
        out
    }

    /// Copy of the model with an extra agent that observes [`BLIND_SYMBOL`]
    /// everywhere.
    pub fn add_blind_agent(&self, agent: &str) -> Result<Podtmc, ModelError> {
        if self.has_agent(agent) {
            return Err(ModelError::DuplicateAgent(agent.to_string()));
        }
        let mut m = self.clone();
        m.agents.push(Agent {
            name: agent.to_string(),
            obs: vec![BLIND_SYMBOL.to_string(); self.num_states()],
        });
        Ok(m)
    }

    /// Copy of the model with an additional proposition.
    pub fn with_label(&self, prop: &str, mask: Vec<bool>) -> Result<Podtmc, ModelError> {
        if self.labels.contains_key(prop) {
            return Err(ModelError::DuplicateLabel(prop.to_string()));
        }
        assert_eq!(mask.len(), self.num_states());
        let mut m = self.clone();
        m.labels.insert(prop.to_string(), mask);
        Ok(m)
    }

    /// Parses the line-oriented model format.
    pub fn parse(text: &str) -> Result<Podtmc, ModelError> {
        parse_model(text)
    }

    /// Serializes to the model format; [`Podtmc::parse`] reads it back
    /// unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("states: {}\n", self.states.join(" ")));
        let init: Vec<String> = (0..self.num_states())
            .filter(|&i| !self.init[i].is_zero())
            .map(|i| format!("{}={}", self.states[i], fmt_rational(&self.init[i])))
            .collect();
        out.push_str(&format!("init: {}\n", init.join(" ")));
        for i in 0..self.num_states() {
            for (j, p) in &self.succ[i] {
                out.push_str(&format!(
                    "trans: {} -> {} : {}\n",
                    self.states[i],
                    self.states[*j],
                    fmt_rational(p)
                ));
            }
        }
        for a in &self.agents {
            let obs: Vec<String> = a
                .obs
                .iter()
                .enumerate()
                .map(|(i, o)| format!("{}={}", self.states[i], o))
                .collect();
            out.push_str(&format!("obs {}: {}\n", a.name, obs.join(" ")));
        }
        for (prop, mask) in &self.labels {
            let members: Vec<&str> = mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| self.states[i].as_str())
                .collect();
            if members.is_empty() {
                out.push_str(&format!("label {prop}:\n"));
            } else {
                out.push_str(&format!("label {prop}: {}\n", members.join(" ")));
            }
        }
        out
    }
}

impl fmt::Display for Podtmc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns.
pub(crate) fn tokens_with_cols(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(s, t)| (line[..s].chars().count() + 1, t))
        .collect()
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

pub(crate) fn is_id(tok: &str) -> bool {
    !tok.is_empty()
        && !tok
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '=' | ':' | '#' | ','))
}

/// Line-level parsing helper shared with the PFA format.
pub(crate) struct LineCtx<'a> {
    pub line_no: usize,
    pub line: &'a str,
}

impl LineCtx<'_> {
    pub fn err(&self, col: usize, msg: impl Into<String>) -> ModelError {
        ModelError::Syntax {
            line: self.line_no,
            col,
            msg: msg.into(),
        }
    }

    /// Column (1-based) of the first occurrence of `needle` after the header.
    pub fn col_of(&self, needle: &str) -> usize {
        self.line
            .find(needle)
            .map_or(1, |b| self.line[..b].chars().count() + 1)
    }

    /// Parses `id=value` assignment tokens after the header colon.
    pub fn assignments(&self, body: &str, body_col: usize) -> Result<Vec<(usize, String, String)>, ModelError> {
        let mut out = Vec::new();
        for (col, tok) in tokens_with_cols(body) {
            let col = col + body_col - 1;
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| self.err(col, format!("expected `id=value`, found `{tok}`")))?;
            if !is_id(k) || v.is_empty() {
                return Err(self.err(col, format!("malformed assignment `{tok}`")));
            }
            out.push((col, k.to_string(), v.to_string()));
        }
        Ok(out)
    }

    pub fn rational(&self, col: usize, text: &str) -> Result<Rational, ModelError> {
        parse_rational(text).map_err(|e| self.err(col, e.to_string()))
    }
}

/// Splits `head: body` and returns (head, body, 1-based column of body).
pub(crate) fn split_header(line: &str) -> Option<(&str, &str, usize)> {
    let (head, body) = line.split_once(':')?;
    let col = line[..head.len() + 1].chars().count() + 1;
    Some((head.trim(), body, col))
}

/// Parses the model file format (see module docs).
pub fn parse_model(text: &str) -> Result<Podtmc, ModelError> {
    let mut states: Option<Vec<String>> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut init_entries: Vec<(usize, Rational)> = Vec::new();
    let mut trans_entries: Vec<(usize, usize, Rational)> = Vec::new();
    let mut observations: Vec<(String, Vec<Option<String>>)> = Vec::new();
    let mut labels: Vec<(String, Vec<String>)> = Vec::new();
    let mut seen_init: HashMap<usize, ()> = HashMap::new();
    let mut seen_trans: HashMap<(usize, usize), ()> = HashMap::new();

    for (ln, raw) in text.lines().enumerate() {
        let ctx = LineCtx {
            line_no: ln + 1,
            line: raw,
        };
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (head, body, body_col) = split_header(line)
            .ok_or_else(|| ctx.err(1, "expected `<section>: ...`"))?;
        let head_words: Vec<&str> = head.split_whitespace().collect();
        let need_states = |col: usize| -> Result<(), ModelError> {
            if states.is_none() {
                Err(ctx.err(col, "`states:` must come first"))
            } else {
                Ok(())
            }
        };
        let lookup = |col: usize, id: &str| -> Result<usize, ModelError> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ctx.err(col, format!("unknown state `{id}`")))
        };
        match head_words.as_slice() {
            ["states"] => {
                if states.is_some() {
                    return Err(ctx.err(1, "duplicate `states:` line"));
                }
                let mut list = Vec::new();
                for (col, tok) in tokens_with_cols(body) {
                    let col = col + body_col - 1;
                    if !is_id(tok) {
                        return Err(ctx.err(col, format!("invalid state id `{tok}`")));
                    }
                    if index.insert(tok.to_string(), list.len()).is_some() {
                        return Err(ModelError::DuplicateState(tok.to_string()));
                    }
                    list.push(tok.to_string());
                }
                if list.is_empty() {
                    return Err(ctx.err(body_col, "no states declared"));
                }
                states = Some(list);
            }
            ["init"] => {
                need_states(1)?;
                for (col, k, v) in ctx.assignments(body, body_col)? {
                    let i = lookup(col, &k)?;
                    if seen_init.insert(i, ()).is_some() {
                        return Err(ctx.err(col, format!("duplicate init entry for `{k}`")));
                    }
                    init_entries.push((i, ctx.rational(col + k.len() + 1, &v)?));
                }
            }
            ["trans"] => {
                need_states(1)?;
                let (edge, prob) = body
                    .rsplit_once(':')
                    .ok_or_else(|| ctx.err(body_col, "expected `src -> dst : p`"))?;
                let (src, dst) = edge
                    .split_once("->")
                    .ok_or_else(|| ctx.err(body_col, "expected `->`"))?;
                let (src, dst, prob) = (src.trim(), dst.trim(), prob.trim());
                let i = lookup(ctx.col_of(src), src)?;
                let j = lookup(body_col + edge.find(dst).unwrap_or(0), dst)?;
                if seen_trans.insert((i, j), ()).is_some() {
                    return Err(ctx.err(body_col, format!("duplicate transition {src} -> {dst}")));
                }
                let p = ctx.rational(body_col + edge.len() + 1, prob)?;
                trans_entries.push((i, j, p));
            }
            ["obs", agent] => {
                need_states(1)?;
                if observations.iter().any(|(a, _)| a == agent) {
                    return Err(ModelError::DuplicateAgent(agent.to_string()));
                }
                let n = states.as_ref().map_or(0, Vec::len);
                let mut obs: Vec<Option<String>> = vec![None; n];
                for (col, k, v) in ctx.assignments(body, body_col)? {
                    let i = lookup(col, &k)?;
                    if obs[i].replace(v).is_some() {
                        return Err(ctx.err(col, format!("duplicate observation for `{k}`")));
                    }
                }
                observations.push((agent.to_string(), obs));
            }
            ["label", prop] => {
                need_states(1)?;
                let mut members = Vec::new();
                for (col, tok) in tokens_with_cols(body) {
                    lookup(col + body_col - 1, tok)?;
                    members.push(tok.to_string());
                }
                if labels.iter().any(|(p, _)| p == prop) {
                    return Err(ModelError::DuplicateLabel(prop.to_string()));
                }
                labels.push((prop.to_string(), members));
            }
            _ => return Err(ctx.err(1, format!("unknown section `{head}`"))),
        }
    }

    let states = states.ok_or(ModelError::Empty)?;
    let n = states.len();
    let mut init = RVector::zeros(n);
    for (i, p) in init_entries {
        init[i] = p;
    }
    let mut trans = RMatrix::zeros(n, n);
    for (i, j, p) in trans_entries {
        trans[(i, j)] = p;
    }
    let mut obs_full = Vec::new();
    for (agent, obs) in observations {
        let mut syms = Vec::with_capacity(n);
        for (i, o) in obs.into_iter().enumerate() {
            match o {
                Some(o) => syms.push(o),
                None => {
                    return Err(ModelError::MissingObservation {
                        agent,
                        state: states[i].clone(),
                    })
                }
            }
        }
        obs_full.push((agent, syms));
    }
    Podtmc::new(states, init, trans, obs_full, labels)
}
