//! Breaker-edge bookkeeping around the untouched set.

use serde::{Deserialize, Serialize};

use crate::engine::GameState;

/// The three counters bounded after every cycle-phase move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLedger {
    /// `e_B(U)`.
    pub eb_u: usize,
    /// `d_B(v_t, U) + e_B(U)`.
    pub db_next_plus_eb_u: usize,
    /// `e_B({v_1, v_l}, U)`.
    pub eb_ends_u: usize,
}

impl PLedger {
    /// Reads the counters off the current board for position `pos`.
    pub fn snapshot(state: &GameState, pos: usize, v1: usize, vl: usize) -> Self {
        let eb_u = state.untouched_breaker_edges();
        Self {
            eb_u,
            db_next_plus_eb_u: state.breaker_degree_to_untouched(pos) + eb_u,
            eb_ends_u: state.breaker_degree_to_untouched(v1)
                + state.breaker_degree_to_untouched(vl),
        }
    }

    /// Counters as they will read once Walker steps from the current
    /// position into the untouched vertex `w`.
    pub fn after_step(state: &GameState, w: usize, v1: usize, vl: usize) -> Self {
        let eb_u = state.untouched_breaker_edges();
        let board = state.board();
        let ends = state.breaker_degree_to_untouched(v1) + state.breaker_degree_to_untouched(vl)
            - usize::from(board.is_breaker(v1, w))
            - usize::from(board.is_breaker(vl, w));
        Self {
            eb_u: eb_u - state.breaker_degree_to_untouched(w),
            db_next_plus_eb_u: eb_u,
            eb_ends_u: ends,
        }
    }
}

/// The three inequalities with offset `i` for `x` heavy steps so far.
pub fn check_property_p(ledger: &PLedger, x: usize, i: i64) -> bool {
    let x = x as i64;
    let (a, b, c) = (
        ledger.eb_u as i64,
        ledger.db_next_plus_eb_u as i64,
        ledger.eb_ends_u as i64,
    );
    a <= 3 * x + 4 + i && b <= 3 * x + 5 + i && c <= 2 * (3 * x + 5 + i)
}

/// Untouched vertices whose Breaker degree towards touched vertices is at
/// least `n / divisor`.
pub fn compute_vt(state: &GameState, divisor: f64) -> Vec<usize> {
    let n = state.n();
    let threshold = n as f64 / divisor;
    let board = state.board();
    (0..n)
        .filter(|&v| {
            !state.is_visited(v) && {
                let to_touched = board.breaker_degree(v) - state.breaker_degree_to_untouched(v);
                to_touched as f64 >= threshold
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{EdgeId, GameConfig, Player};
    use proptest::prelude::*;

    #[test]
    fn boundary_cases() {
        let l = |a, b, c| PLedger {
            eb_u: a,
            db_next_plus_eb_u: b,
            eb_ends_u: c,
        };
        assert!(check_property_p(&l(4, 5, 10), 0, 0));
        assert!(!check_property_p(&l(5, 5, 10), 0, 0));
        assert!(check_property_p(&l(6, 7, 14), 1, -1));
        assert!(!check_property_p(&l(6, 7, 15), 1, -1));
    }

    #[test]
    fn heavy_set_boundary() {
        let n = 22;
        let mut g = GameState::new(GameConfig::new(n, 1, Player::Walker)).unwrap();
        assert!(compute_vt(&g, 11.0).is_empty());
        // vertex 21 gets two Breaker edges to touched vertices: 2 >= 22 / 11.
        g.walker_step(1).unwrap();
        g.breaker_claim(&[EdgeId::new(0, 21)]).unwrap();
        assert!(compute_vt(&g, 11.0).is_empty());
        g.walker_step(2).unwrap();
        g.breaker_claim(&[EdgeId::new(1, 21)]).unwrap();
        assert_eq!(compute_vt(&g, 11.0), vec![21]);
    }

    fn brute_vt(state: &GameState, divisor: f64) -> Vec<usize> {
        let n = state.n();
        let edges = state.board().breaker_edges();
        (0..n)
            .filter(|&v| !state.is_visited(v))
            .filter(|&v| {
                let d = edges
                    .iter()
                    .filter(|e| e.contains(v) && state.is_visited(e.other(v)))
                    .count();
                d as f64 >= n as f64 / divisor
            })
            .collect()
    }

    fn brute_ledger(state: &GameState, pos: usize, v1: usize, vl: usize) -> PLedger {
        let edges = state.board().breaker_edges();
        let u = |v: usize| !state.is_visited(v);
        let eb_u = edges.iter().filter(|e| u(e.u()) && u(e.v())).count();
        let to_u = |a: usize| {
            edges
                .iter()
                .filter(|e| e.contains(a) && u(e.other(a)))
                .count()
        };
        PLedger {
            eb_u,
            db_next_plus_eb_u: to_u(pos) + eb_u,
            eb_ends_u: to_u(v1) + to_u(vl),
        }
    }

    proptest! {
        #[test]
        fn ledgers_match_brute_force(
            steps in proptest::collection::vec(0usize..30, 1..20),
            claims in proptest::collection::vec((0usize..30, 0usize..30), 1..120),
        ) {
            let n = 30;
            let mut g = GameState::new(GameConfig::new(n, 1, Player::Walker)).unwrap();
            let mut claims = claims.into_iter();
            for s in steps {
                let _ = g.walker_step(s);
                for (a, b) in claims.by_ref().take(3) {
                    if a != b && g.is_free(a, b) {
                        g.breaker_claim(&[EdgeId::new(a, b)]).unwrap();
                    }
                }
            }
            prop_assert_eq!(compute_vt(&g, 11.0), brute_vt(&g, 11.0));
            let pos = g.position().unwrap();
            prop_assert_eq!(PLedger::snapshot(&g, pos, 0, pos), brute_ledger(&g, pos, 0, pos));
            if let Some(w) = (0..n).find(|&w| !g.is_visited(w) && g.is_free(pos, w)) {
                let predicted = PLedger::after_step(&g, w, 0, pos);
                g.walker_step(w).unwrap();
                prop_assert_eq!(predicted, brute_ledger(&g, w, 0, pos));
            }
        }
    }
}
