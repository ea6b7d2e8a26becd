//! Agents' beliefs under the synchronous perfect-recall and clock semantics.
//!
//! A belief is the conditional distribution over the current state given
//! what the agent has observed, paired with the prior measure of the
//! observation event (the agent's knowledge cell). Under perfect recall the
//! agent's information at time `t` is its whole observation sequence
//! `o_0 … o_t`; under the clock semantics it is the pair `(t, o_t)`.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::matrix::RVector;
use crate::model::{ModelError, Podtmc};
use crate::rational::Rational;

pub const DEFAULT_MAX_PATHS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    /// Synchronous perfect recall.
    Spr,
    /// Clock: current time and current observation only.
    Clk,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Spr => "spr",
            Semantics::Clk => "clk",
        })
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "spr" => Ok(Semantics::Spr),
            "clk" => Ok(Semantics::Clk),
            _ => Err(format!("unknown semantics `{s}` (expected spr or clk)")),
        }
    }
}

/// What an agent knows at a time step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObsData {
    /// Full observation history `o_0 … o_t`.
    History(Vec<String>),
    /// Current observation `o_t`.
    Current(String),
}

impl ObsData {
    pub fn semantics(&self) -> Semantics {
        match self {
            ObsData::History(_) => Semantics::Spr,
            ObsData::Current(_) => Semantics::Clk,
        }
    }
}

impl fmt::Display for ObsData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsData::History(h) => f.write_str(&h.join(",")),
            ObsData::Current(o) => f.write_str(o),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObsRecord {
    pub agent: String,
    pub time: usize,
    pub data: ObsData,
}

impl ObsRecord {
    pub fn spr<S: Into<String>>(agent: &str, history: impl IntoIterator<Item = S>) -> Self {
        let history: Vec<String> = history.into_iter().map(Into::into).collect();
        ObsRecord {
            agent: agent.to_string(),
            time: history.len().saturating_sub(1),
            data: ObsData::History(history),
        }
    }

    pub fn clk(agent: &str, time: usize, obs: impl Into<String>) -> Self {
        ObsRecord {
            agent: agent.to_string(),
            time,
            data: ObsData::Current(obs.into()),
        }
    }

    pub fn semantics(&self) -> Semantics {
        self.data.semantics()
    }
}

/// Conditional state distribution plus the measure of the conditioning event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belief {
    pub dist: RVector,
    pub cell_measure: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BeliefError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("impossible observation history `{0}` (probability 0)")]
    ImpossibleHistory(String),
    #[error("malformed observation record: {0}")]
    Malformed(String),
    #[error("observation `{symbol}` not in the alphabet of agent `{agent}`")]
    UnknownSymbol { agent: String, symbol: String },
    #[error("path enumeration bound exceeded ({count} paths > {limit})")]
    EnumerationBound { count: u128, limit: u64 },
}

fn check_record(m: &Podtmc, rec: &ObsRecord) -> Result<(), BeliefError> {
    let alphabet = m.obs_alphabet(&rec.agent)?;
    let symbols: Vec<&String> = match &rec.data {
        ObsData::History(h) => {
            if h.len() != rec.time + 1 {
                return Err(BeliefError::Malformed(format!(
                    "history of length {} at time {}",
                    h.len(),
                    rec.time
                )));
            }
            h.iter().collect()
        }
        ObsData::Current(o) => vec![o],
    };
    for s in symbols {
        if !alphabet.contains(s) {
            return Err(BeliefError::UnknownSymbol {
                agent: rec.agent.clone(),
                symbol: s.clone(),
            });
        }
    }
    Ok(())
}

fn normalize(unnorm: RVector, what: &ObsData) -> Result<Belief, BeliefError> {
    let mass = unnorm.sum();
    if mass.is_zero() {
        return Err(BeliefError::ImpossibleHistory(what.to_string()));
    }
    let inv = Rational::from_integer(1.into()) / &mass;
    Ok(Belief {
        dist: unnorm.scale(&inv),
        cell_measure: mass,
    })
}

fn mask(v: &mut RVector, obs: &[String], symbol: &str) {
    for (i, o) in obs.iter().enumerate() {
        if o != symbol {
            v[i] = Rational::zero();
        }
    }
}

/// Forward filter for a perfect-recall record: mask `PI` by `o_0`, then
/// alternately step by `PT` and mask by the next observation, carrying the
/// unnormalized mass.
pub fn spr_filter(m: &Podtmc, rec: &ObsRecord) -> Result<Belief, BeliefError> {
    let ObsData::History(hist) = &rec.data else {
        return Err(BeliefError::Malformed("spr_filter needs a history".into()));
    };
    check_record(m, rec)?;
    let obs = m.observations(&rec.agent)?;
    let mut alpha = m.init().clone();
    mask(&mut alpha, obs, &hist[0]);
    for o in &hist[1..] {
        alpha = m.step(&alpha);
        mask(&mut alpha, obs, o);
    }
    normalize(alpha, &rec.data)
}

/// Clock belief: the time-`t` distribution restricted to states showing the
/// current observation.
pub fn clk_belief(m: &Podtmc, rec: &ObsRecord) -> Result<Belief, BeliefError> {
    let ObsData::Current(o) = &rec.data else {
        return Err(BeliefError::Malformed("clk_belief needs a current observation".into()));
    };
    check_record(m, rec)?;
    let obs = m.observations(&rec.agent)?;
    let mut v = m.time_distribution(rec.time as u64);
    mask(&mut v, obs, o);
    normalize(v, &rec.data)
}

/// Dispatches on the record's semantics.
pub fn belief(m: &Podtmc, rec: &ObsRecord) -> Result<Belief, BeliefError> {
    match rec.semantics() {
        Semantics::Spr => spr_filter(m, rec),
        Semantics::Clk => clk_belief(m, rec),
    }
}

/// Belief by explicit enumeration of `Paths_t(M)`; independent of the
/// filtering code and used as its oracle.
pub fn brute_force_belief(m: &Podtmc, rec: &ObsRecord, max_paths: u64) -> Result<Belief, BeliefError> {
    check_record(m, rec)?;
    let count = m.count_paths(rec.time);
    if count > u128::from(max_paths) {
        return Err(BeliefError::EnumerationBound {
            count,
            limit: max_paths,
        });
    }
    let obs = m.observations(&rec.agent)?;
    let mut unnorm = RVector::zeros(m.num_states());
    for path in m.enum_paths(rec.time) {
        let states = path.states();
        let matches = match &rec.data {
            ObsData::History(h) => states.iter().zip(h).all(|(&s, o)| obs[s] == *o),
            ObsData::Current(o) => obs[path.last()] == *o,
        };
        if matches {
            unnorm[path.last()] += m.cylinder_measure(&path);
        }
    }
    normalize(unnorm, &rec.data)
}

/// Measure of every nonempty knowledge cell of `agent` at time `t`.
pub fn cell_partition_measures(
    m: &Podtmc,
    agent: &str,
    sem: Semantics,
    t: usize,
) -> Result<BTreeMap<ObsData, Rational>, BeliefError> {
    let obs = m.observations(agent)?;
    let mut out = BTreeMap::new();
    match sem {
        Semantics::Clk => {
            let v = m.time_distribution(t as u64);
            for (i, p) in v.iter().enumerate() {
                if !p.is_zero() {
                    *out.entry(ObsData::Current(obs[i].clone()))
                        .or_insert_with(Rational::zero) += p;
                }
            }
        }
        Semantics::Spr => {
            // history -> unnormalized state vector
            let mut frontier: BTreeMap<Vec<String>, RVector> = BTreeMap::new();
            for s in m.init_support() {
                frontier
                    .entry(vec![obs[s].clone()])
                    .or_insert_with(|| RVector::zeros(m.num_states()))[s] += &m.init()[s];
            }
            for _ in 0..t {
                let mut next: BTreeMap<Vec<String>, RVector> = BTreeMap::new();
                for (hist, alpha) in frontier {
                    let stepped = m.step(&alpha);
                    for (j, p) in stepped.iter().enumerate() {
                        if p.is_zero() {
                            continue;
                        }
                        let mut h = hist.clone();
                        h.push(obs[j].clone());
                        next.entry(h)
                            .or_insert_with(|| RVector::zeros(m.num_states()))[j] += p;
                    }
                }
                frontier = next;
            }
            for (hist, alpha) in frontier {
                out.insert(ObsData::History(hist), alpha.sum());
            }
        }
    }
    Ok(out)
}
