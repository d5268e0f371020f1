//! Property-based invariants tying the exact-arithmetic primitives and the
//! mechanism layers together.

use fencing_core::fence::{check_condition_a, check_condition_b, check_condition_c};
use fencing_core::gen::{random_cross_monotonic, random_scheme};
use fencing_core::mechanism::PreparedFencing;
use fencing_core::scheme::utility;
use fencing_core::{
    build_grid, recover_stable_pair, run_fencing, run_moulin, sentinel_bids, xi_star, BidVector,
    CostSharingScheme, Money, PlayerSet,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_money() -> impl Strategy<Value = Money> {
    (any::<i32>(), 1..10_000i64)
        .prop_map(|(num, den)| &Money::from_int(num as i64) / &Money::from_int(den))
}

/// A scheme over 1..=4 players with small integer payments.
fn arb_scheme() -> impl Strategy<Value = CostSharingScheme> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(0i64..=6, (1 << n) * n))
        })
        .prop_map(|(n, cells)| {
            CostSharingScheme::from_fn(n, |i, s| {
                Money::from_int(cells[s.bits() as usize * n + (i - 1)])
            })
            .unwrap()
        })
}

proptest! {
    #[test]
    fn money_parse_print_round_trip(m in arb_money()) {
        prop_assert_eq!(Money::parse(&m.to_string()).unwrap(), m);
    }

    /// ξ* never exceeds any eligible table cell and equals at least one.
    #[test]
    fn xi_star_is_an_attained_minimum(s in arb_scheme()) {
        let full = s.ground_set();
        for upper in full.subsets().skip(1) {
            for lower in upper.subsets() {
                for i in upper.players() {
                    let star = xi_star(&s, i, lower, upper).unwrap();
                    let mut attained = false;
                    for set in PlayerSet::between(lower, upper).filter(|t| t.contains(i)) {
                        prop_assert!(&star <= s.payment(i, set));
                        attained |= &star == s.payment(i, set);
                    }
                    prop_assert!(attained);
                }
            }
        }
    }

    /// Widening the fence (smaller lower, larger upper) can only lower ξ*.
    #[test]
    fn xi_star_is_antimonotone_in_the_fence(s in arb_scheme()) {
        let full = s.ground_set();
        for upper in full.subsets().skip(1) {
            for lower in upper.subsets() {
                for wider_upper in full.subsets().filter(|u| upper.is_subset_of(*u)) {
                    for narrower_lower in lower.subsets() {
                        for i in upper.players() {
                            let tight = xi_star(&s, i, lower, upper).unwrap();
                            let wide = xi_star(&s, i, narrower_lower, wider_upper).unwrap();
                            prop_assert!(tight >= wide);
                        }
                    }
                }
            }
        }
    }

    /// Degenerate fences with lower == upper satisfy every condition.
    #[test]
    fn degenerate_fences_always_pass(s in arb_scheme()) {
        for set in s.ground_set().subsets() {
            prop_assert!(check_condition_a(&s, set, set).unwrap().is_satisfied());
            prop_assert!(check_condition_b(&s, set, set).unwrap().is_satisfied());
            prop_assert!(check_condition_c(&s, set, set).unwrap().is_satisfied());
        }
    }
}

#[test]
fn fencing_outcomes_satisfy_vp_npt_cs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let s = random_cross_monotonic(3, &mut rng);
        let fast = PreparedFencing::new(&s);
        let sentinels = sentinel_bids(&s);
        let grid = build_grid(&s);
        for bids in grid.vectors() {
            let out = fast.run(&bids).expect("cross-monotonic schemes run");
            for i in 1..=3 {
                if out.served.contains(i) {
                    // Voluntary participation: never charged above the bid.
                    assert!(
                        utility(bids.bid(i), &out, i).is_nonnegative(),
                        "{s:?} at {bids}: player {i} overcharged in {out}"
                    );
                } else {
                    // No positive transfers to the unserved.
                    assert!(out.payment(i).is_zero());
                    // Consumer sovereignty: a sentinel bid guarantees service.
                    assert!(
                        bids.bid(i) < &sentinels.0[i - 1],
                        "{s:?} at {bids}: player {i} bid the sentinel yet was dropped"
                    );
                }
            }
        }
    }
}

#[test]
fn recovery_matches_the_stable_pair_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let s = random_cross_monotonic(3, &mut rng);
        let grid = build_grid(&s);
        for bids in grid.vectors() {
            let out = run_fencing(&s, &bids).unwrap();
            let direct = fencing_core::find_stable_pair(&s, &bids).unwrap();
            let recovered = recover_stable_pair(&s, &bids, &out).unwrap();
            assert_eq!(recovered, direct, "{s:?} at {bids}");
        }
    }
}

#[test]
fn moulin_and_fencing_agree_on_cross_monotonic_schemes() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let s = random_cross_monotonic(2, &mut rng);
        let grid = build_grid(&s);
        for bids in grid.vectors() {
            let m = run_moulin(&s, &bids).unwrap();
            let f = run_fencing(&s, &bids).unwrap();
            assert_eq!(m, f, "{s:?} at {bids}");
        }
    }
}

#[test]
fn unconstrained_schemes_never_panic_the_checker() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let s = random_scheme(3, &mut rng);
        let report = fencing_core::check_fence_monotonicity(&s);
        if report.is_fence_monotone() {
            let bids = BidVector::from_ints(&[5, 5, 5]);
            run_fencing(&s, &bids).unwrap();
        }
    }
}
