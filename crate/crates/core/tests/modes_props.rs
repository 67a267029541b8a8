mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relex_core::logic::solve::{covers, SolveBounds};
use relex_core::modes::{bottom_clause, is_well_formed, SaturationParams};
use support::{gen, oracles};

fn params(depth_i: usize, recall_cap: usize) -> SaturationParams {
    SaturationParams {
        depth_i,
        recall_cap,
        bounds: SolveBounds::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn bottom_clause_matches_saturation_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = gen::token_world(&mut rng);
        let e = gen::example(&mut rng, &w);
        let (d, cap) = (rng.gen_range(1..=3), rng.gen_range(1..=5));
        let got = bottom_clause(&e, &w.kb, &w.modes, &params(d, cap)).unwrap();
        let want = oracles::bottom_oracle(&e, &w.facts, &w.modes, d, cap);
        prop_assert_eq!(got.to_string(), want.to_string());
    }

    #[test]
    fn bottom_clause_is_well_formed_and_covers_seed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = gen::token_world(&mut rng);
        let e = gen::example(&mut rng, &w);
        let p = params(rng.gen_range(1..=3), rng.gen_range(1..=5));
        let b = bottom_clause(&e, &w.kb, &w.modes, &p).unwrap();
        prop_assert!(is_well_formed(&b, &w.modes), "{}", b);
        prop_assert!(covers(&b, &e, &w.kb, SolveBounds::default()).unwrap(), "{}", b);
        prop_assert_eq!(b.to_string(), bottom_clause(&e, &w.kb, &w.modes, &p).unwrap().to_string());
    }

    #[test]
    fn deeper_saturation_only_adds_literals(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = gen::token_world(&mut rng);
        let e = gen::example(&mut rng, &w);
        let cap = rng.gen_range(1..=5);
        let mut prev = bottom_clause(&e, &w.kb, &w.modes, &params(1, cap)).unwrap();
        for d in 2..=4 {
            let next = bottom_clause(&e, &w.kb, &w.modes, &params(d, cap)).unwrap();
            for l in &prev.body {
                prop_assert!(next.body.contains(l), "depth {}: lost {}", d, l);
            }
            prev = next;
        }
    }
}
