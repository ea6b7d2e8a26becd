mod common;

use num::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pometh_core::belief::{
    belief, brute_force_belief, cell_partition_measures, clk_belief, spr_filter, DEFAULT_MAX_PATHS,
};
use pometh_core::{ObsData, ObsRecord, Podtmc, Rational, Semantics};

fn record(agent: &str, t: usize, d: ObsData) -> ObsRecord {
    match d {
        ObsData::History(h) => ObsRecord::spr(agent, h),
        ObsData::Current(o) => ObsRecord::clk(agent, t, o),
    }
}

/// Measure of every cell by summing cylinders of enumerated paths.
fn cells_by_enumeration(m: &Podtmc, agent: &str, sem: Semantics, t: usize) -> Vec<(ObsData, Rational)> {
    let obs = m.observations(agent).unwrap();
    let mut out: std::collections::BTreeMap<ObsData, Rational> = Default::default();
    for p in m.enum_paths(t) {
        let key = match sem {
            Semantics::Spr => ObsData::History(p.states().iter().map(|&s| obs[s].clone()).collect()),
            Semantics::Clk => ObsData::Current(obs[p.last()].clone()),
        };
        *out.entry(key).or_insert_with(Rational::zero) += m.cylinder_measure(&p);
    }
    out.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn filters_agree_with_enumeration(seed in any::<u64>(), t in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 4, &["i"]);
        for sem in [Semantics::Spr, Semantics::Clk] {
            let cells = cell_partition_measures(&m, "i", sem, t).unwrap();
            let expect = cells_by_enumeration(&m, "i", sem, t);
            prop_assert_eq!(cells.clone().into_iter().collect::<Vec<_>>(), expect);
            for (d, measure) in cells {
                let rec = record("i", t, d);
                let fast = match sem {
                    Semantics::Spr => spr_filter(&m, &rec).unwrap(),
                    Semantics::Clk => clk_belief(&m, &rec).unwrap(),
                };
                let slow = brute_force_belief(&m, &rec, DEFAULT_MAX_PATHS).unwrap();
                prop_assert_eq!(&fast, &slow);
                prop_assert_eq!(&fast.cell_measure, &measure);
                prop_assert!(fast.dist.is_distribution());
            }
        }
    }

    #[test]
    fn cell_measures_partition_the_run_space(seed in any::<u64>(), t in 0usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 4, &["i"]);
        for sem in [Semantics::Spr, Semantics::Clk] {
            let total: Rational = cell_partition_measures(&m, "i", sem, t).unwrap().values().sum();
            prop_assert_eq!(total, Rational::from_integer(1.into()));
        }
    }

    /// Under clk the cell is the union of the spr cells ending in the same
    /// observation, so its belief is their measure-weighted average.
    #[test]
    fn clk_belief_mixes_spr_beliefs(seed in any::<u64>(), t in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_model(&mut rng, 4, &["i"]);
        let spr = cell_partition_measures(&m, "i", Semantics::Spr, t).unwrap();
        for (d, measure) in cell_partition_measures(&m, "i", Semantics::Clk, t).unwrap() {
            let ObsData::Current(o) = &d else { unreachable!() };
            let clk = belief(&m, &record("i", t, d.clone())).unwrap();
            let mut mix = vec![Rational::zero(); m.num_states()];
            for (h, w) in &spr {
                let ObsData::History(hist) = h else { unreachable!() };
                if hist.last() == Some(o) {
                    let b = belief(&m, &record("i", t, h.clone())).unwrap();
                    for (acc, p) in mix.iter_mut().zip(b.dist.iter()) {
                        *acc += p * w / &measure;
                    }
                }
            }
            prop_assert_eq!(clk.dist.0, mix);
        }
    }
}

#[test]
fn blind_agent_belief_is_the_time_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let m = common::random_model(&mut rng, 4, &[]).add_blind_agent("z").unwrap();
        for t in 0..5 {
            let b = clk_belief(&m, &ObsRecord::clk("z", t, pometh_core::model::BLIND_SYMBOL)).unwrap();
            assert_eq!(b.dist, m.time_distribution(t as u64));
        }
    }
}
