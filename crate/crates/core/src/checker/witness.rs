//! Bounded search for time assignments satisfying a mixed-time atom.
//!
//! Assignments are visited level by level in the maximum of their values and
//! lexicographically within a level. The first witness found within bound
//! `b` is therefore also the first one found within any larger bound, and
//! is independent of how a level is split across worker threads.

use rayon::prelude::*;

use crate::formula::{is_propositional, MixedTimeAtom, ProbTerm};
use crate::model::Podtmc;
use crate::rational::Rational;

use super::qualitative::prop_mask;
use super::{CheckError, Verdict};

/// Value of a term as a function of its time variable.
struct TermTable {
    term: ProbTerm,
    var: usize,
    /// Value at every `t ≤ bound`.
    values: Vec<Rational>,
}

fn tables(m: &Podtmc, atom: &MixedTimeAtom, bound: u64) -> Result<Vec<TermTable>, CheckError> {
    let dists: Vec<_> = {
        let mut v = Vec::with_capacity(bound as usize + 1);
        let mut d = m.init().clone();
        for t in 0..=bound {
            if t > 0 {
                d = m.step(&d);
            }
            v.push(d.clone());
        }
        v
    };
    let mut out = Vec::new();
    for term in atom.poly.terms() {
        let mask = match term {
            ProbTerm::PropAt { prop, .. } => m
                .label(prop)
                .ok_or_else(|| CheckError::UnknownProp(prop.clone()))?
                .to_vec(),
            ProbTerm::PrAt { agent, arg, .. } => {
                if !m.is_blind(agent)? {
                    return Err(CheckError::Unsupported(format!(
                        "`{term}`: only blind agents are supported in mixed-time atoms"
                    )));
                }
                if !is_propositional(arg) {
                    return Err(CheckError::Unsupported(format!(
                        "`{term}`: argument must be propositional"
                    )));
                }
                prop_mask(m, arg)?
            }
            _ => return Err(CheckError::Unsupported(format!("`{term}` in a mixed-time atom"))),
        };
        let var_name = term.time_var().expect("time term");
        let var = atom
            .time_vars
            .iter()
            .position(|v| v == var_name)
            .ok_or_else(|| CheckError::Unsupported(format!("undeclared time variable `{var_name}`")))?;
        let values = dists
            .iter()
            .map(|d| {
                d.iter()
                    .zip(&mask)
                    .filter(|(_, b)| **b)
                    .map(|(x, _)| x.clone())
                    .sum()
            })
            .collect();
        out.push(TermTable {
            term: term.clone(),
            var,
            values,
        });
    }
    Ok(out)
}

/// Exact value of the atom's polynomial at an assignment.
fn value(atom: &MixedTimeAtom, tables: &[TermTable], assign: &[u64]) -> Rational {
    atom.poly
        .eval::<()>(&mut |t| {
            let tab = tables.iter().find(|x| x.term == *t).expect("table per term");
            Ok(tab.values[assign[tab.var] as usize].clone())
        })
        .expect("infallible")
}

/// Evaluates the atom's polynomial at one assignment of its time variables.
pub fn eval_atom_at(m: &Podtmc, atom: &MixedTimeAtom, assign: &[u64]) -> Result<Rational, CheckError> {
    let bound = assign.iter().copied().max().unwrap_or(0);
    let tabs = tables(m, atom, bound)?;
    Ok(value(atom, &tabs, assign))
}

/// All assignments in `[0, level]^k` with maximum exactly `level`, in
/// lexicographic order.
fn level(k: usize, level: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; k];
    loop {
        if cur.contains(&level) {
            out.push(cur.clone());
        }
        // odometer increment, last coordinate fastest
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < level {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Searches all assignments with every `t_j ≤ bound`. `jobs > 1` spreads
/// each level over a thread pool; the answer does not depend on `jobs`.
pub fn witness_search(
    m: &Podtmc,
    atom: &MixedTimeAtom,
    bound: u64,
    jobs: usize,
) -> Result<Verdict, CheckError> {
    let tabs = tables(m, atom, bound)?;
    let holds = |a: &Vec<u64>| atom.rel.holds(&value(atom, &tabs, a), &atom.rhs);
    let k = atom.time_vars.len();
    let pool = if jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| CheckError::Unsupported(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    for l in 0..=bound {
        let cands = level(k, l);
        let found = match &pool {
            Some(p) => p.install(|| cands.par_iter().find_first(|a| holds(a)).cloned()),
            None => cands.into_iter().find(|a| holds(a)),
        };
        if let Some(a) = found {
            return Ok(Verdict::WitnessFound(
                atom.time_vars.iter().cloned().zip(a).collect(),
            ));
        }
    }
    Ok(Verdict::NoWitnessUpTo(bound))
}
