//! Seeded random generators for models, formulas, automata and integer
//! data. Everything is built from small integer weights so exact
//! arithmetic stays cheap.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num::bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use pometh_core::formula::{Bound, Formula, Polynomial, ProbTerm, Rel};
use pometh_core::matrix::{RMatrix, RVector};
use pometh_core::rational::{int, ratio, Rational};
use pometh_core::reductions::{DiophantinePoly, Lrs};
use pometh_core::{Pfa, Podtmc};

pub const PROPS: [&str; 2] = ["p", "q"];

/// Distribution over `n` entries with random support and weights in 1..=3.
pub fn random_dist<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n)
            .map(|_| if rng.gen_bool(0.6) { rng.gen_range(1..=3) } else { 0 })
            .collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| ratio(x, total)).collect();
        }
    }
}

/// Model with `1..=max_states` states, the given agents (each with a
/// random observation function over `{a, b}`) and labels `p`, `q`.
pub fn random_model<R: Rng>(rng: &mut R, max_states: usize, agents: &[&str]) -> Podtmc {
    let n = rng.gen_range(1..=max_states);
    let states: Vec<String> = (0..n).map(|k| format!("s{k}")).collect();
    let init = RVector(random_dist(rng, n));
    let rows: Vec<Vec<Rational>> = (0..n).map(|_| random_dist(rng, n)).collect();
    let trans = RMatrix::from_rows(rows).expect("square");
    let obs = agents
        .iter()
        .map(|a| {
            let o = (0..n)
                .map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string())
                .collect();
            (a.to_string(), o)
        })
        .collect();
    let labels = PROPS
        .iter()
        .map(|p| {
            let members = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (p.to_string(), members)
        })
        .collect();
    Podtmc::new(states, init, trans, obs, labels).expect("random model is valid")
}

fn random_rel<R: Rng>(rng: &mut R) -> Rel {
    *[Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt].choose(rng).unwrap()
}

fn random_threshold<R: Rng>(rng: &mut R) -> Rational {
    let (n, d) = *[(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (1, 1)].choose(rng).unwrap();
    ratio(n, d)
}

/// Propositional formula over `p`, `q`.
pub fn random_prop_formula<R: Rng>(rng: &mut R, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        return Formula::prop(PROPS.choose(rng).unwrap());
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_prop_formula(rng, depth - 1)),
        1 => Formula::and(random_prop_formula(rng, depth - 1), random_prop_formula(rng, depth - 1)),
        _ => Formula::or(random_prop_formula(rng, depth - 1), random_prop_formula(rng, depth - 1)),
    }
}

/// CTLPK state formula for `agent` with every temporal bound at most 2.
pub fn random_ctlpk<R: Rng>(rng: &mut R, depth: u32, agent: &str) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 => Formula::True,
            _ => Formula::prop(PROPS.choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    let bound = Bound::Within(rng.gen_range(0..=2));
    match rng.gen_range(0..11) {
        0 => Formula::not(random_ctlpk(rng, d, agent)),
        1 => Formula::and(random_ctlpk(rng, d, agent), random_ctlpk(rng, d, agent)),
        2 => Formula::implies(random_ctlpk(rng, d, agent), random_ctlpk(rng, d, agent)),
        3 => Formula::all(Formula::next(random_ctlpk(rng, d, agent))),
        4 => Formula::exists(Formula::eventually(random_ctlpk(rng, d, agent), bound)),
        5 => Formula::all(Formula::globally(random_ctlpk(rng, d, agent), bound)),
        6 => Formula::exists(Formula::until(
            random_ctlpk(rng, d, agent),
            random_ctlpk(rng, d, agent),
            bound,
        )),
        7 | 8 => Formula::knows(agent, random_ctlpk(rng, d, agent)),
        9 => {
            let t = Polynomial::term(ProbTerm::pr(agent, random_ctlpk(rng, d, agent)));
            Formula::Cmp(t, random_rel(rng), random_threshold(rng))
        }
        _ => {
            // degree two with a constant offset
            let a = Polynomial::term(ProbTerm::pr(agent, random_ctlpk(rng, d, agent)));
            let b = Polynomial::term(ProbTerm::pr(agent, random_ctlpk(rng, d, agent)));
            let poly = a.mul(&b).sub(&a.scale(&ratio(1, 2))).add(&Polynomial::constant(ratio(1, 3)));
            Formula::Cmp(poly, random_rel(rng), random_threshold(rng))
        }
    }
}

/// PFA with `1..=max_q` states, `1..=max_sigma` letters and a random
/// cut-point.
pub fn random_pfa<R: Rng>(rng: &mut R, max_q: usize, max_sigma: usize) -> Pfa {
    let nq = rng.gen_range(1..=max_q);
    let ns = rng.gen_range(1..=max_sigma);
    let states: Vec<String> = (0..nq).map(|k| format!("q{k}")).collect();
    let alphabet: Vec<String> = ["a", "b", "c"][..ns].iter().map(|s| s.to_string()).collect();
    let init = RVector(random_dist(rng, nq));
    let mut letters = BTreeMap::new();
    for l in &alphabet {
        let rows = (0..nq).map(|_| random_dist(rng, nq)).collect();
        letters.insert(l.clone(), RMatrix::from_rows(rows).expect("square"));
    }
    let finals = (0..nq).map(|_| rng.gen_bool(0.5)).collect();
    let cutpoint = ratio(rng.gen_range(1..=5), 6);
    Pfa::new(states, alphabet, init, letters, finals, cutpoint).expect("random PFA is valid")
}

/// Integer polynomial in `1..=max_vars` variables `n1…`, each of degree at
/// most `max_deg`, with coefficients in `-3..=3`.
pub fn random_dioph<R: Rng>(rng: &mut R, max_vars: usize, max_deg: u32) -> DiophantinePoly {
    let k = rng.gen_range(1..=max_vars);
    let vars: Vec<String> = (1..=k).map(|j| format!("n{j}")).collect();
    let terms = (0..rng.gen_range(1..=4))
        .map(|_| {
            let c = BigInt::from(rng.gen_range(-3..=3));
            let e = (0..k).map(|_| rng.gen_range(0..=max_deg)).collect();
            (c, e)
        })
        .collect();
    DiophantinePoly::new(vars, terms).expect("exponent vectors match")
}

/// Recurrence of order `1..=max_order` with small integer data.
pub fn random_lrs<R: Rng>(rng: &mut R, max_order: usize) -> Lrs {
    let k = rng.gen_range(1..=max_order);
    let mut coeffs: Vec<Rational> = (0..k).map(|_| int(rng.gen_range(-3..=3))).collect();
    if coeffs[k - 1] == int(0) {
        coeffs[k - 1] = int(if rng.gen_bool(0.5) { 1 } else { -2 });
    }
    let init = (0..k).map(|_| int(rng.gen_range(-4..=4))).collect();
    Lrs::new(coeffs, init).expect("last coefficient nonzero")
}

/// `k×k` integer matrix, `k ≤ max_k`, entries in `-bound..=bound`.
pub fn random_int_matrix<R: Rng>(rng: &mut R, max_k: usize, bound: i64) -> RMatrix {
    let k = rng.gen_range(1..=max_k);
    let rows = (0..k)
        .map(|_| (0..k).map(|_| int(rng.gen_range(-bound..=bound))).collect())
        .collect();
    RMatrix::from_rows(rows).expect("square")
}
