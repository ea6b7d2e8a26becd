mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pometh_core::checker::Evaluator;
use pometh_core::formula::rewrite::{rewrite_clk_elim, rewrite_k_to_prob, RewriteError};
use pometh_core::formula::{dependence_horizon, parse_formula, Formula};
use pometh_core::{Podtmc, Semantics};

const MAX_HORIZON: u64 = 4;

/// Random CTLPK formula whose dependence horizon is at most 4.
fn bounded_formula(rng: &mut ChaCha8Rng) -> Formula {
    loop {
        let f = common::random_ctlpk(rng, 3, "i");
        if dependence_horizon(&f).bounded().is_some_and(|h| h <= MAX_HORIZON) {
            return f;
        }
    }
}

/// Truth of `f` on `m` and `g` on `m2` at every point `(run, t)`, `t ≤ 1`.
/// `m2` must have the same states and transitions as `m`.
fn same_truth(m: &Podtmc, sem: Semantics, f: &Formula, m2: &Podtmc, g: &Formula) -> Result<(), String> {
    let h = dependence_horizon(f).bounded().unwrap().max(dependence_horizon(g).bounded().unwrap()) as usize;
    let (e1, e2) = (Evaluator::new(m, sem), Evaluator::new(m2, sem));
    for t in 0..=1 {
        for p in m.enum_paths(t + h) {
            let a = e1.eval(f, p.states(), t).map_err(|e| e.to_string())?;
            let b = e2.eval(g, p.states(), t).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{f} is {a} but {g} is {b} at {} time {t}", m.format_path(&p)));
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn clock_elimination_preserves_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 3, &["i"]);
        let f = bounded_formula(&mut rng);
        let (g, m2) = rewrite_clk_elim(&f, &m, "i").unwrap();
        prop_assert!(!g.any(&|x| matches!(x, Formula::Knows(a, _) if a == "i")));
        prop_assert_eq!(m2.trans(), m.trans());
        if let Err(e) = same_truth(&m, Semantics::Clk, &f, &m2, &g) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn knowledge_as_probability_one_preserves_truth(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 3, &["i"]);
        let f = bounded_formula(&mut rng);
        let g = rewrite_k_to_prob(&f).unwrap();
        prop_assert!(!g.any(&|x| matches!(x, Formula::Knows(..))));
        for sem in [Semantics::Spr, Semantics::Clk] {
            if let Err(e) = same_truth(&m, sem, &f, &m, &g) {
                return Err(TestCaseError::fail(e));
            }
        }
    }
}

#[test]
fn knowledge_as_probability_one_rejects_path_formulas() {
    for text in ["K[i] X p", "F<=2 p", "p U<=1 q", "Pr[i](X p) = 1", "K[i] (p & G<=1 q)"] {
        let f = parse_formula(text).unwrap();
        assert!(
            matches!(rewrite_k_to_prob(&f), Err(RewriteError::NotCtlpk(_))),
            "{text} accepted"
        );
    }
}

#[test]
fn clock_elimination_is_stable_when_repeated() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = common::random_model(&mut rng, 3, &["i"]);
    let f = parse_formula("K[i] p & Pr[i](q) >= 1/2").unwrap();
    let (g, m2) = rewrite_clk_elim(&f, &m, "i").unwrap();
    let (g2, m3) = rewrite_clk_elim(&f, &m2, "i").unwrap();
    assert_eq!(g, g2);
    assert_eq!(m2, m3);
}
