use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ktlive::corpus::{random_game, CorpusParams};
use ktlive::game::{GameGraph, Player};
use ktlive::liveness::{check_k_live, LiveOptions};
use ktlive::product::ProductGame;
use ktlive::synthesis::{
    simulate, solve_bounded, steps_bound, BeliefTracker, BoundedOptions, Controller, ControllerOptions,
};
use ktlive::transducer::{Enumeration, Transducer};

fn game(seed: u64) -> GameGraph {
    let params = CorpusParams { max_vertices: 8, ..Default::default() };
    random_game(&mut ChaCha8Rng::seed_from_u64(seed), &params, seed as usize)
}

fn machines(k: usize) -> Vec<Transducer> {
    (1..=k).flat_map(|j| Enumeration::new(j, 2, 2).unwrap().iter().map(|(_, t)| t)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beliefs_shrink_and_stay_consistent(raw in proptest::collection::vec(0..2usize, 0..12)) {
        let pool = machines(2);
        let mut tracker = BeliefTracker::new(&pool);
        let mut last = tracker.belief().len();
        for (i, &s) in raw.iter().enumerate() {
            if i % 2 == 0 {
                tracker.observe(s);
            } else {
                tracker.advance(s);
            }
            prop_assert!(tracker.belief().len() <= last);
            last = tracker.belief().len();
            let history = &raw[..=i];
            let fresh = BeliefTracker::from_history(&pool, history);
            prop_assert_eq!(fresh.belief(), tracker.belief());
            // Exactly the machines that agree with the history, in the state
            // reached by its Player-2 symbols.
            let inputs: Vec<usize> = history.iter().skip(1).step_by(2).copied().collect();
            let expected: Vec<(usize, usize)> = pool
                .iter()
                .enumerate()
                .filter(|(_, t)| t.agrees(history).unwrap().holds())
                .map(|(j, t)| (j, t.state_after(&inputs).unwrap()))
                .collect();
            prop_assert_eq!(tracker.belief(), &expected[..]);
        }
    }

    #[test]
    fn bounded_wins_are_monotone_and_sound(seed in any::<u64>()) {
        let g = game(seed);
        let opts = BoundedOptions::default();
        let one = solve_bounded(&g, 1, &opts).unwrap().p2_wins().unwrap();
        let two = solve_bounded(&g, 2, &opts).unwrap().p2_wins().unwrap();
        let deduped = solve_bounded(&g, 2, &BoundedOptions { dedupe: true, ..opts }).unwrap().p2_wins().unwrap();
        prop_assert_eq!(two, deduped);
        if two {
            prop_assert!(one);
            for t in machines(2) {
                let p = ProductGame::build(&g, &t).unwrap();
                prop_assert!(p.p2_wins(p.initial()));
            }
        }
        if check_k_live(&g, 2, &LiveOptions::default()).unwrap().verdict.is_live() == Some(true) {
            prop_assert!(two);
        }
    }

    #[test]
    fn controller_beats_every_small_environment(seed in any::<u64>(), strict_space in any::<bool>()) {
        let g = game(seed);
        prop_assume!(check_k_live(&g, 2, &LiveOptions::default()).unwrap().verdict.is_live() == Some(true));
        let opts = ControllerOptions { strict_space, ..Default::default() };
        let mut c = Controller::new(&g, 2, opts).unwrap();
        let bound = steps_bound(g.len(), 2, 2, 2);
        for hidden in machines(2) {
            c.reset();
            let trace = simulate(&g, &mut c, &hidden, 100_000).unwrap();
            prop_assert_eq!(trace.winner, Some(Player::Two));
            prop_assert!(BigUint::from(trace.steps) <= bound);
            prop_assert!(hidden.agrees(&trace.word()).unwrap().holds());
            if strict_space {
                prop_assert_eq!(c.history_len(), 0);
            }
        }
    }
}

#[test]
fn caps_are_reported() {
    let g = game(5);
    let tight = BoundedOptions { machine_cap: 10, ..Default::default() };
    assert_eq!(solve_bounded(&g, 2, &tight).unwrap().p2_wins(), None);
    let opts = ControllerOptions { cap: 10, ..Default::default() };
    assert!(Controller::new(&g, 2, opts).is_err());
    assert!(solve_bounded(&g, 0, &BoundedOptions::default()).is_err());
}

#[test]
fn mismatched_environments_are_rejected() {
    let g = game(2);
    let mut c = Controller::new(&g, 1, ControllerOptions::default()).unwrap();
    assert!(simulate(&g, &mut c, &Transducer::constant(3, 2, 0), 10).is_err());
}
