mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pometh_core::formula::{
    dependence_horizon, is_ctlpk, parse_formula, parse_query, Bound, Formula, Horizon, Query,
};

/// Horizon by unfolding: `a U<=k b = b | (a & X (a U<=k-1 b))` and
/// likewise for `F`/`G`, with `X` costing one step.
fn horizon_oracle(f: &Formula) -> Option<u64> {
    use Formula::*;
    let max2 = |x: Option<u64>, y: Option<u64>| Some(x?.max(y?));
    match f {
        True | Prop(_) => Some(0),
        Next(a) => horizon_oracle(a).map(|h| h + 1),
        Until(_, _, Bound::Unbounded) | Eventually(_, Bound::Unbounded) | Globally(_, Bound::Unbounded) => None,
        Until(_, b, Bound::Within(0)) => horizon_oracle(b),
        Until(a, b, Bound::Within(k)) => {
            let rest = Until(a.clone(), b.clone(), Bound::Within(k - 1));
            max2(max2(horizon_oracle(a), horizon_oracle(b)), horizon_oracle(&rest).map(|h| h + 1))
        }
        Eventually(a, Bound::Within(0)) | Globally(a, Bound::Within(0)) => horizon_oracle(a),
        Eventually(a, Bound::Within(k)) => {
            let rest = Eventually(a.clone(), Bound::Within(k - 1));
            max2(horizon_oracle(a), horizon_oracle(&rest).map(|h| h + 1))
        }
        Globally(a, Bound::Within(k)) => {
            let rest = Globally(a.clone(), Bound::Within(k - 1));
            max2(horizon_oracle(a), horizon_oracle(&rest).map(|h| h + 1))
        }
        _ => f.children().into_iter().map(horizon_oracle).try_fold(0, |acc, h| h.map(|h| acc.max(h))),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn display_parses_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_ctlpk(&mut rng, 4, "i");
        let back = parse_formula(&f.to_string()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert!(is_ctlpk(&back));
    }

    #[test]
    fn horizon_matches_definition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_ctlpk(&mut rng, 4, "i");
        let expect = horizon_oracle(&f);
        prop_assert_eq!(dependence_horizon(&f).bounded(), expect, "{}", f);
    }

    #[test]
    fn propositional_formulas_have_horizon_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_prop_formula(&mut rng, 4);
        prop_assert_eq!(dependence_horizon(&f), Horizon::Bounded(0));
    }

    #[test]
    fn parser_never_panics(s in "[A-Za-z!&|()<>=@\\[\\]0-9/ .*+-]{0,40}") {
        let _ = parse_query(&s);
    }
}

#[test]
fn mixed_atoms_round_trip() {
    for text in [
        "exists t1 . 1/2*Pr(p@t1) - Pr(q@t1)^2 = 0",
        "exists t u . Pr(p@t)*Pr[i,u](q) >= 1/3",
    ] {
        let Query::Mixed(a) = parse_query(text).unwrap() else { panic!("{text}") };
        let Query::Mixed(b) = parse_query(&a.to_string()).unwrap() else { panic!("{a}") };
        assert_eq!(a, b);
    }
}
