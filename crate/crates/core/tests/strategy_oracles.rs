mod common;

use common::{brute_delta, brute_response, pure_count, random_game, random_pure, random_strategy, small_games};
use irabs_core::fpira::compute_delta;
use irabs_core::game::Player;
use irabs_core::strategy::{
    average_combine, best_response, exploitability, realization_plan, BehavioralStrategy, BrOptions,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNPRUNED: BrOptions = BrOptions { pruning: false, tie_tolerance: 1e-10 };

fn small_random_game(seed: u64) -> Option<irabs_core::GameTree> {
    let g = random_game(seed, 3 + (seed % 2) as u32);
    (pure_count(&g, Player::P1) <= 500 && pure_count(&g, Player::P2) <= 500).then_some(g)
}

#[test]
fn response_matches_enumeration_on_named_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, g) in small_games() {
        for _ in 0..20 {
            let b = if rng.gen_bool(0.3) { random_pure(&g, &mut rng) } else { random_strategy(&g, &mut rng) };
            for p in [Player::P1, Player::P2] {
                let fast = best_response(&g, p, &b, BrOptions::default());
                let slow = best_response(&g, p, &b, UNPRUNED);
                let brute = brute_response(&g, p, &b);
                assert!((fast.value - brute).abs() <= 1e-12, "{name}: {} vs {brute}", fast.value);
                assert_eq!(fast.value, slow.value, "{name}");
                assert_eq!(fast.response, slow.response, "{name}");
            }
        }
    }
}

#[test]
fn exploitability_of_uniform_pennies_is_zero() {
    let g = common::domain("matching_pennies");
    let u = BehavioralStrategy::uniform(&g);
    assert_eq!(exploitability(&g, &u, &u, BrOptions::default()).sum, 0.0);
}

#[test]
fn combine_matches_mixture_on_gs3() {
    let g = common::domain("GS3");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let b = random_strategy(&g, &mut rng);
        let b2 = if rng.gen_bool(0.5) { random_pure(&g, &mut rng) } else { random_strategy(&g, &mut rng) };
        let l2: f64 = rng.gen_range(0.0..1.0);
        for p in [Player::P1, Player::P2] {
            let mix = average_combine(&g, p, &b, &b2, 1.0 - l2, l2).unwrap();
            let (x, y, z) = (realization_plan(&g, p, &b), realization_plan(&g, p, &b2), realization_plan(&g, p, &mix));
            for k in 0..z.len() {
                assert!((z[k] - ((1.0 - l2) * x[k] + l2 * y[k])).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn delta_matches_enumeration_on_named_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, g) in small_games() {
        for _ in 0..30 {
            let a = random_strategy(&g, &mut rng);
            let b = random_strategy(&g, &mut rng);
            for p in [Player::P1, Player::P2] {
                let fast = compute_delta(&g, p, &a, &b, BrOptions::default()).value;
                let slow = compute_delta(&g, p, &a, &b, UNPRUNED).value;
                let brute = brute_delta(&g, p, &a, &b);
                assert!((fast - brute).abs() <= 1e-9, "{name}: {fast} vs {brute}");
                assert!((fast - slow).abs() <= 1e-12, "{name}");
            }
        }
    }
}

#[test]
fn delta_of_identical_strategies_is_zero() {
    let g = common::domain("GS3");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_strategy(&g, &mut rng);
    assert_eq!(compute_delta(&g, Player::P1, &a, &a, BrOptions::default()).value, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn response_matches_enumeration(seed in any::<u64>()) {
        if let Some(g) = small_random_game(seed) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(7));
            let b = random_strategy(&g, &mut rng);
            for p in [Player::P1, Player::P2] {
                let fast = best_response(&g, p, &b, BrOptions::default());
                let slow = best_response(&g, p, &b, UNPRUNED);
                prop_assert!((fast.value - brute_response(&g, p, &b)).abs() <= 1e-12);
                prop_assert_eq!(fast.value, slow.value);
                prop_assert_eq!(&fast.response, &slow.response);
            }
        }
    }

    #[test]
    fn response_value_is_at_least_any_pure(seed in any::<u64>()) {
        let g = random_game(seed, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let b = random_strategy(&g, &mut rng);
        let y = random_pure(&g, &mut rng);
        let r = best_response(&g, Player::P2, &b, BrOptions::default()).value;
        prop_assert!(r + 1e-12 >= common::utility(&g, Player::P2, &y, &b));
    }

    #[test]
    fn exploitability_is_nonnegative(seed in any::<u64>()) {
        let g = random_game(seed, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_strategy(&g, &mut rng);
        prop_assert!(exploitability(&g, &b, &b, BrOptions::default()).sum >= -1e-12);
    }

    #[test]
    fn combine_is_realization_equivalent(seed in any::<u64>(), l2 in 0.0f64..1.0) {
        let g = random_game(seed, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
        let b = random_strategy(&g, &mut rng);
        let b2 = random_pure(&g, &mut rng);
        for p in [Player::P1, Player::P2] {
            let mix = average_combine(&g, p, &b, &b2, 1.0 - l2, l2).unwrap();
            let (x, y, z) = (realization_plan(&g, p, &b), realization_plan(&g, p, &b2), realization_plan(&g, p, &mix));
            for k in 0..z.len() {
                prop_assert!((z[k] - ((1.0 - l2) * x[k] + l2 * y[k])).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn delta_matches_enumeration(seed in any::<u64>()) {
        if let Some(g) = small_random_game(seed) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
            let a = random_strategy(&g, &mut rng);
            let b = random_strategy(&g, &mut rng);
            for p in [Player::P1, Player::P2] {
                let d = compute_delta(&g, p, &a, &b, BrOptions::default()).value;
                prop_assert!((d - brute_delta(&g, p, &a, &b)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn oracle_coverage() {
    assert_eq!(small_games().len(), 6);
    let small = (0..200u64).filter_map(small_random_game).filter(|g| g.num_infosets() >= 3).count();
    assert!(small >= 60, "only {small} usable random games");
}
