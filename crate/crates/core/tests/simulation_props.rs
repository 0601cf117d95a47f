use std::rc::Rc;

use proptest::prelude::*;
use wbl_core::engine::{
    run_match, BreakerStrategy, GameConfig, GameState, Player, StartPolicy, WalkerStrategy,
};
use wbl_core::harness::replay_text;
use wbl_core::solver::{
    solve, value_longest_cycle, CycleTable, Layout, SolveQuery, SolverBreaker, SolverWalker,
    Target, DEFAULT_BUDGET,
};
use wbl_core::strategies::{
    isolation_targets, GreedyPathWalker, IsolateMany, IsolateOne, RandomBreaker, RandomWalker,
};

fn player(w: bool) -> Player {
    if w {
        Player::Walker
    } else {
        Player::Breaker
    }
}

fn breaker(k: u8) -> Box<dyn BreakerStrategy> {
    match k % 3 {
        0 => Box::new(RandomBreaker::new()),
        1 => Box::new(IsolateOne::new()),
        _ => Box::new(IsolateMany::new()),
    }
}

fn walker(k: u8) -> Box<dyn WalkerStrategy> {
    if k % 2 == 0 {
        Box::new(RandomWalker::new())
    } else {
        Box::new(GreedyPathWalker::new())
    }
}

fn longest(state: &GameState) -> usize {
    let layout = Layout::new(state.n());
    CycleTable::new(&layout).longest(layout.masks(state).0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_replay_byte_for_byte(n in 4usize..40, b in 0usize..4, first in any::<bool>(), seed in any::<u64>(),
                                    w in any::<u8>(), br in any::<u8>()) {
        let cfg = GameConfig::new(n, b, player(first)).with_seed(seed).with_profile("scaled");
        let t = run_match(cfg, walker(w).as_mut(), breaker(br).as_mut(), &wbl_core::engine::never).unwrap();
        let text = t.to_text();
        let (report, state) = replay_text(&text).unwrap();
        prop_assert_eq!(report.rounds, t.final_state.as_ref().unwrap().round());
        prop_assert_eq!(state.board().walker_edges(), t.final_state.as_ref().unwrap().board().walker_edges());
    }

    #[test]
    fn isolated_vertices_stay_untouched(n in 6usize..40, b in 1usize..4, seed in any::<u64>(), w in any::<u8>()) {
        let cfg = GameConfig::new(n, b, Player::Breaker).with_seed(seed).with_profile("scaled");
        let t = run_match(cfg, walker(w).as_mut(), &mut IsolateMany::new(), &wbl_core::engine::never).unwrap();
        let state = t.final_state.as_ref().unwrap();
        for v in isolation_targets(state, b).unwrap_or_default() {
            prop_assert_eq!(state.board().walker_degree(v), 0);
        }
        if let Some(c) = &t.certificate {
            prop_assert!(c.len() <= n - b);
        }
    }

    /// Simulated play never beats the solved value from either side.
    #[test]
    fn simulations_respect_solved_values(n in 3usize..6, b in 1usize..3, first in any::<bool>(), seed in any::<u64>(),
                                         w in any::<u8>(), br in any::<u8>()) {
        let first = player(first);
        let value = value_longest_cycle(n, b, first, StartPolicy::Declared(0), DEFAULT_BUDGET).unwrap().value;
        let cfg = GameConfig::new(n, b, first).with_seed(seed).with_profile("scaled");
        let cap = 6 * n * n;
        if value < n {
            let q = SolveQuery::new(n, b, first, Target::CycleAtLeast(value.max(2) + 1));
            let solved = Rc::new(solve(&q).unwrap());
            prop_assert_eq!(solved.winner(), Player::Breaker);
            let s2 = solved.clone();
            let stop = move |s: &GameState| s2.reached(s2.layout().masks(s).0) || s.round() > cap;
            let t = run_match(cfg.clone(), walker(w).as_mut(), &mut SolverBreaker::new(solved), &stop).unwrap();
            prop_assert!(longest(t.final_state.as_ref().unwrap()) <= value);
        }
        if value >= 3 {
            let q = SolveQuery::new(n, b, first, Target::CycleAtLeast(value));
            let solved = Rc::new(solve(&q).unwrap());
            let s2 = solved.clone();
            let stop = move |s: &GameState| s2.reached(s2.layout().masks(s).0) || s.round() > cap;
            let t = run_match(cfg, &mut SolverWalker::new(solved), breaker(br).as_mut(), &stop).unwrap();
            prop_assert!(longest(t.final_state.as_ref().unwrap()) >= value);
        }
    }
}
