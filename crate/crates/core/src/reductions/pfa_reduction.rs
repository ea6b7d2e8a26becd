//! From a PFA to a PO-DTMC whose perfect-recall agent tracks the automaton.
//!
//! States are pairs `(q, a)`; the chain picks the next letter uniformly and
//! moves the automaton component by `Δ(b)`. The agent observes the letter
//! only, so after observing `a_0 a_1 … a_m` its belief about the automaton
//! state is `μ0·Δ(a_1)…Δ(a_m)` and `Pr[i](p)` is the acceptance weight of
//! `a_1 … a_m`. Every observation history of length `m+1` has measure
//! `1/N^{m+1}`.

use num::Zero;

use crate::formula::{Bound, Formula, Polynomial, ProbTerm, Rel};
use crate::matrix::{RMatrix, RVector};
use crate::model::Podtmc;
use crate::pfa::Pfa;
use crate::rational::Rational;

use super::ReductionError;

pub const PFA_AGENT: &str = "i";
pub const PFA_PROP: &str = "p";

#[derive(Debug, Clone)]
pub struct PfaReduction {
    pub model: Podtmc,
    pub cutpoint: Rational,
}

impl PfaReduction {
    /// `E F<=h (Pr[i](p) > λ)`, or unbounded `E F` when `h` is `None`.
    pub fn formula(&self, horizon: Option<u32>) -> Formula {
        let bound = horizon.map_or(Bound::Unbounded, Bound::Within);
        Formula::exists(Formula::eventually(
            Formula::Cmp(
                Polynomial::term(ProbTerm::pr(PFA_AGENT, Formula::prop(PFA_PROP))),
                Rel::Gt,
                self.cutpoint.clone(),
            ),
            bound,
        ))
    }
}

/// Id of the state `(q, a)`.
pub fn pair_id(q: &str, a: &str) -> String {
    format!("{q}.{a}")
}

pub fn pfa_to_podtmc(a: &Pfa) -> Result<PfaReduction, ReductionError> {
    let q = a.states();
    let sigma = a.alphabet();
    let nq = q.len();
    let ns = sigma.len();
    let n = Rational::from_integer(ns.into());
    let idx = |qi: usize, li: usize| qi * ns + li;
    let mut states = Vec::with_capacity(nq * ns);
    let mut init = RVector::zeros(nq * ns);
    let mut obs = Vec::with_capacity(nq * ns);
    let mut finals = Vec::new();
    for (qi, qs) in q.iter().enumerate() {
        for (li, l) in sigma.iter().enumerate() {
            let id = pair_id(qs, l);
            init[idx(qi, li)] = &a.init()[qi] / &n;
            obs.push(l.clone());
            if a.finals()[qi] {
                finals.push(id.clone());
            }
            states.push(id);
        }
    }
    let mut trans = RMatrix::zeros(nq * ns, nq * ns);
    for (li, l) in sigma.iter().enumerate() {
        let delta = a.letter(l).expect("alphabet letter");
        for qi in 0..nq {
            for qj in 0..nq {
                let p = &delta[(qi, qj)];
                if p.is_zero() {
                    continue;
                }
                for from_l in 0..ns {
                    trans[(idx(qi, from_l), idx(qj, li))] = p / &n;
                }
            }
        }
    }
    let model = Podtmc::new(
        states,
        init,
        trans,
        vec![(PFA_AGENT.into(), obs)],
        vec![(PFA_PROP.into(), finals)],
    )?;
    Ok(PfaReduction {
        model,
        cutpoint: a.cutpoint().clone(),
    })
}
