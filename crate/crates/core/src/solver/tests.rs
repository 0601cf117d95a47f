use super::*;
use crate::strategies::{IsolateMany, IsolateOne, PreventLongCycle, RandomBreaker};

fn q(n: usize, b: usize, first: Player, target: Target) -> SolveQuery {
    SolveQuery::new(n, b, first, target)
}

#[test]
fn triangle_without_opposition() {
    let s = Rc::new(solve(&q(3, 0, Player::Walker, Target::ContainsCycle(3))).unwrap());
    assert_eq!(s.winner(), Player::Walker);
    let t = solved_match(&s).unwrap();
    assert_eq!(t.walker_moves(), 3);
    assert_eq!(t.certificate.as_ref().map(|c| c.len()), Some(3));
    t.reexecute().unwrap();
}

#[test]
fn triangle_with_one_claim() {
    let s = Rc::new(solve(&q(3, 1, Player::Walker, Target::ContainsCycle(3))).unwrap());
    assert_eq!(s.winner(), Player::Breaker);
    let t = solved_match(&s).unwrap();
    assert!(t.certificate.is_none());
    let fin = t.final_state.as_ref().unwrap();
    assert!(!s.reached(s.layout().masks(fin).0));
}

#[test]
fn small_values() {
    let v = |n, b, first| {
        value_longest_cycle(n, b, first, StartPolicy::Declared(0), DEFAULT_BUDGET)
            .unwrap()
            .value
    };
    assert_eq!(v(3, 1, Player::Walker), 0);
    assert!(v(5, 2, Player::Walker) <= 3);
    assert!(v(5, 2, Player::Breaker) <= 3);
    assert_eq!(v(4, 0, Player::Walker), 4);
}

#[test]
fn values_are_monotone() {
    let v = |n, b, first| {
        value_longest_cycle(n, b, first, StartPolicy::Declared(0), DEFAULT_BUDGET)
            .unwrap()
            .value
    };
    for n in 3..=5 {
        let mut last = (n, n);
        for b in 0..=2 {
            let (w, br) = (v(n, b, Player::Walker), v(n, b, Player::Breaker));
            assert!(
                br <= w,
                "n={n} b={b}: Breaker first {br} > Walker first {w}"
            );
            assert!(w <= last.0 && br <= last.1, "n={n} b={b} not monotone");
            last = (w, br);
        }
    }
}

#[test]
fn declared_and_chosen_starts_agree() {
    // Every start is equivalent under relabelling.
    for b in 1..=2 {
        let a = value_longest_cycle(
            4,
            b,
            Player::Walker,
            StartPolicy::Declared(0),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let c = value_longest_cycle(
            4,
            b,
            Player::Walker,
            StartPolicy::StrategyChosen,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(a.value, c.value);
    }
}

#[test]
fn attractor_audit() {
    for (n, b, first) in [
        (4, 1, Player::Walker),
        (5, 1, Player::Breaker),
        (5, 2, Player::Walker),
    ] {
        let s = solve(&q(n, b, first, Target::CycleAtLeast(3))).unwrap();
        audit(&s, 400, 7).unwrap();
        let s = solve(&q(n, b, first, Target::CycleAtLeast(n))).unwrap();
        audit(&s, 400, 8).unwrap();
    }
    let mut q5 = q(4, 1, Player::Walker, Target::ContainsCycle(4));
    q5.start = StartPolicy::StrategyChosen;
    audit(&solve(&q5).unwrap(), 400, 9).unwrap();
}

#[test]
fn budget_is_enforced() {
    let mut query = q(5, 1, Player::Walker, Target::CycleAtLeast(5));
    query.budget = 100;
    assert_eq!(
        solve(&query).err(),
        Some(SolveError::BudgetExceeded { budget: 100 })
    );
    assert!(matches!(
        solve(&q(7, 1, Player::Walker, Target::CycleAtLeast(3))),
        Err(SolveError::InvalidQuery(_))
    ));
}

#[test]
fn principal_variation_matches_winner() {
    for n in 3..=5 {
        for b in 1..=2 {
            for first in [Player::Walker, Player::Breaker] {
                let lc = value_longest_cycle(n, b, first, StartPolicy::Declared(0), DEFAULT_BUDGET)
                    .unwrap();
                let t = solved_match(&lc.solved).unwrap();
                let fin = t.reexecute().unwrap();
                let reached = lc.solved.reached(lc.solved.layout().masks(&fin).0);
                assert_eq!(
                    reached,
                    lc.solved.winner() == Player::Walker,
                    "n={n} b={b} {first:?}"
                );
                if lc.value > 0 {
                    assert!(t.certificate.as_ref().map_or(0, |c| c.len()) >= lc.value);
                }
            }
        }
    }
}

#[test]
fn fixed_breakers_never_beat_optimal_play() {
    for n in 3..=5 {
        for b in 1..=2 {
            for first in [Player::Walker, Player::Breaker] {
                let opt =
                    value_longest_cycle(n, b, first, StartPolicy::Declared(0), DEFAULT_BUDGET)
                        .unwrap()
                        .value;
                let budget = 5_000_000;
                let vs = [
                    value_against(n, b, first, &IsolateOne::new(), budget).unwrap(),
                    value_against(n, b, first, &IsolateMany::new(), budget).unwrap(),
                    value_against(n, b, first, &RandomBreaker::new(), budget).unwrap(),
                ];
                for v in vs {
                    assert!(v >= opt, "n={n} b={b} {first:?}: {v} < {opt}");
                }
            }
        }
    }
}

#[test]
fn prevent_long_cycle_caps_k5() {
    let v = value_against(5, 1, Player::Breaker, &PreventLongCycle::new(), 5_000_000).unwrap();
    assert!(v <= 3, "walker forced a {v}-cycle");
    let opt = value_longest_cycle(
        5,
        1,
        Player::Breaker,
        StartPolicy::Declared(0),
        DEFAULT_BUDGET,
    )
    .unwrap()
    .value;
    assert!(opt <= v);
}
