mod common;

use common::*;
use proptest::prelude::*;
use rankperm_core::censoring::{rank_bounds_interval, rank_bounds_right, realizable};
use rankperm_core::rng;
use rankperm_core::{IntervalObs, RankVector, RightObs};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn right_bounds_are_the_realizable_range(seed in any::<u64>(), n in 2usize..=7) {
        let obs = random_right(n, &mut rng::seeded(seed));
        let sets: Vec<_> = obs.iter().map(right_as_set).collect();
        assert_bounds_match(&rank_bounds_right(&obs).unwrap(), &realizable_ranks(&sets));
    }

    #[test]
    fn interval_bounds_are_the_realizable_range(seed in any::<u64>(), n in 2usize..=7) {
        let obs = random_interval(n, &mut rng::seeded(seed));
        let sets: Vec<_> = obs.iter().map(interval_as_set).collect();
        assert_bounds_match(&rank_bounds_interval(&obs).unwrap(), &realizable_ranks(&sets));
    }

    #[test]
    fn library_realizability_agrees_with_cell_oracle(seed in any::<u64>(), n in 2usize..=6) {
        let obs = random_interval(n, &mut rng::seeded(seed));
        let sets: Vec<_> = obs.iter().map(interval_as_set).collect();
        for p in all_permutations(n) {
            let lib = realizable(&obs, &RankVector::new(p.clone()).unwrap());
            prop_assert_eq!(lib, realizable_oracle(&sets, &p), "ranking {:?}", p);
        }
    }

    #[test]
    fn right_data_as_intervals_gives_the_same_bounds(seed in any::<u64>(), n in 2usize..=12) {
        let obs = random_right(n, &mut rng::seeded(seed));
        let as_interval: Vec<IntervalObs> = obs.iter().map(RightObs::to_interval).collect();
        prop_assert_eq!(rank_bounds_right(&obs).unwrap(), rank_bounds_interval(&as_interval).unwrap());
    }
}

#[test]
fn oracle_sanity() {
    // (1, 3] and exact 2 can be ordered either way, exact 4 must be last
    let sets = [(1.0, 3.0, false), (2.0, 2.0, true), (4.0, 4.0, true)];
    assert!(realizable_oracle(&sets, &[1, 2, 3]));
    assert!(realizable_oracle(&sets, &[2, 1, 3]));
    assert!(!realizable_oracle(&sets, &[3, 1, 2]));
    assert_eq!(all_permutations(4).len(), 24);
}

#[test]
fn fully_observed_data_has_point_bounds() {
    let obs: Vec<RightObs> = [4.0, 1.0, 3.0, 2.0].iter().map(|&t| RightObs::event(t)).collect();
    let b = rank_bounds_right(&obs).unwrap();
    assert_eq!(b.iter().map(|b| (b.lo, b.hi)).collect::<Vec<_>>(), vec![(4, 4), (1, 1), (3, 3), (2, 2)]);
}
