mod common;

use num::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pometh_core::checker::{
    almost_sure_eventually, check, decide_support_query, CheckOptions, SupportKind, SupportPred,
};
use pometh_core::formula::{parse_formula, Bound, Formula, Polynomial, ProbTerm, Rel};
use pometh_core::matrix::{RMatrix, RVector};
use pometh_core::rational::ratio;
use pometh_core::{Podtmc, Rational, Semantics};

/// Model with uniform probabilities on the given supports (bitmasks).
fn from_supports(n: usize, init: u32, rows: &[u32], label: u32) -> Podtmc {
    let uniform = |mask: u32| -> Vec<Rational> {
        let k = mask.count_ones() as i64;
        (0..n).map(|j| if mask >> j & 1 == 1 { ratio(1, k) } else { Rational::zero() }).collect()
    };
    let states: Vec<String> = (0..n).map(|k| format!("s{k}")).collect();
    let members = states.iter().enumerate().filter(|(j, _)| label >> j & 1 == 1).map(|(_, s)| s.clone()).collect();
    Podtmc::new(
        states,
        RVector(uniform(init)),
        RMatrix::from_rows(rows.iter().map(|&r| uniform(r)).collect()).unwrap(),
        vec![],
        vec![("p".into(), members)],
    )
    .unwrap()
}

/// Every support structure on `n` states: (init, rows).
fn structures(n: usize) -> Vec<(u32, Vec<u32>)> {
    let full = (1u32 << n) - 1;
    let mut rows: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        rows = rows
            .into_iter()
            .flat_map(|r| (1..=full).map(move |m| [r.clone(), vec![m]].concat()))
            .collect();
    }
    (1..=full)
        .flat_map(|i| rows.iter().map(move |r| (i, r.clone())))
        .collect()
}

#[test]
fn support_queries_match_exact_distributions() {
    for n in 1..=3usize {
        for (k, (init, rows)) in structures(n).into_iter().enumerate() {
            // cycle through labels so each one meets many structures
            let label = (k as u32) % (1 << n);
            let m = from_supports(n, init, &rows, label);
            // the support sequence repeats within 2^n steps
            let positive: Vec<bool> = (0..1u64 << n)
                .map(|t| {
                    let d = m.time_distribution(t);
                    (0..n).any(|j| label >> j & 1 == 1 && !d[j].is_zero())
                })
                .collect();
            let cases = [
                (SupportKind::Exists, SupportPred::Zero, positive.iter().any(|p| !p)),
                (SupportKind::Exists, SupportPred::Positive, positive.iter().any(|p| *p)),
                (SupportKind::Forall, SupportPred::Zero, positive.iter().all(|p| !p)),
                (SupportKind::Forall, SupportPred::Positive, positive.iter().all(|p| *p)),
            ];
            for (kind, pred, expect) in cases {
                assert_eq!(
                    decide_support_query(&m, kind, pred, "p").unwrap(),
                    expect,
                    "{kind:?} {pred:?} on\n{m}"
                );
            }
        }
    }
}

/// `Pr(F T) = 1` iff every state reachable without passing `T` can still
/// reach `T`.
fn almost_sure_oracle(m: &Podtmc, target: &[bool]) -> bool {
    let n = m.num_states();
    let reach_from = |s: usize, avoid_target: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            if avoid_target && target[u] {
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
    };
    m.init_support().into_iter().all(|s0| {
        let pre = reach_from(s0, true);
        (0..n)
            .filter(|&u| pre[u] && !target[u])
            .all(|u| reach_from(u, false).iter().zip(target).any(|(r, t)| *r && *t))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn almost_sure_eventually_matches_reachability(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 5, &[]);
        let f = common::random_prop_formula(&mut rng, 2);
        let target: Vec<bool> = (0..m.num_states())
            .map(|s| holds_at(&m, &f, s))
            .collect();
        prop_assert_eq!(almost_sure_eventually(&m, &f).unwrap(), almost_sure_oracle(&m, &target));
        let as_formula = Formula::Cmp(
            Polynomial::term(ProbTerm::pr("z", Formula::eventually(f.clone(), Bound::Unbounded))),
            Rel::Eq,
            ratio(1, 1),
        );
        let blind = m.add_blind_agent("z").unwrap();
        let v = check(&blind, Semantics::Spr, &as_formula, CheckOptions::default()).unwrap();
        prop_assert_eq!(v.is_positive(), almost_sure_oracle(&m, &target));
    }
}

fn holds_at(m: &Podtmc, f: &Formula, s: usize) -> bool {
    match f {
        Formula::Prop(p) => m.label(p).unwrap()[s],
        Formula::Not(a) => !holds_at(m, a, s),
        Formula::And(a, b) => holds_at(m, a, s) && holds_at(m, b, s),
        Formula::Or(a, b) => holds_at(m, a, s) || holds_at(m, b, s),
        _ => unreachable!("propositional"),
    }
}

#[test]
fn figure_model_separates_knowledge_from_certainty() {
    let m = pometh_core::reductions::figure_model();
    assert!(almost_sure_eventually(&m, &parse_formula("!q").unwrap()).unwrap());
    let opts = CheckOptions::default();
    let k = check(&m, Semantics::Spr, &parse_formula("K[i] F !q").unwrap(), opts).unwrap();
    assert!(!k.is_positive());
    let pr = check(&m, Semantics::Spr, &parse_formula("Pr[i](F !q) = 1").unwrap(), opts).unwrap();
    assert!(pr.is_positive());
}
