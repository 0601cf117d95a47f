use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{RandConfig, RandError, W0Router};
use crate::bitset::BitSet;
use crate::engine::GameState;
use crate::graph;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreconditionReport {
    pub min_free_degree: usize,
    pub max_distance: Option<usize>,
    pub violations: Vec<String>,
}

/// Free degree inside `V*` of at least `(1 - eps)|V*|` everywhere, and
/// `W_0` distance at most `d` between any two vertices of `V*`.
pub fn check_preconditions(
    state: &GameState,
    vstar: &[usize],
    cfg: &RandConfig,
) -> PreconditionReport {
    let n = state.n();
    let big_n = vstar.len();
    let set = BitSet::from_members(n, vstar.iter().copied());
    let need = (1.0 - cfg.epsilon) * big_n as f64;
    let mut report = PreconditionReport {
        min_free_degree: usize::MAX,
        ..Default::default()
    };
    let mut low = 0;
    for &v in vstar {
        let board = state.board();
        let taken = board.walker_degree_into(v, &set) + board.breaker_degree_into(v, &set);
        let free = big_n - 1 - taken;
        report.min_free_degree = report.min_free_degree.min(free);
        if (free as f64) < need {
            if low < 5 {
                report
                    .violations
                    .push(format!("d_F({v}) = {free} < (1 - eps) N = {need:.1}"));
            }
            low += 1;
        }
    }
    if low > 5 {
        report
            .violations
            .push(format!("{} more low free degrees", low - 5));
    }
    let root = state
        .position()
        .or(state.start_vertex())
        .unwrap_or(vstar[0]);
    let router = W0Router::new(graph::walker_adjacency(state), root);
    report.max_distance = router.max_distance(vstar);
    match report.max_distance {
        None => report.violations.push("V* is not connected in W_0".into()),
        Some(dist) if dist > cfg.d => report
            .violations
            .push(format!("W_0 distance {dist} exceeds d = {}", cfg.d)),
        _ => {}
    }
    report
}

/// Greedily drops the vertex of largest `(W ∪ B)`-degree inside the
/// candidate set, highest index first on ties, until `target` remain.
/// Returns the survivors in ascending order.
pub fn select_vstar(
    state: &GameState,
    candidates: &[usize],
    target: usize,
    max_degree: usize,
) -> Result<Vec<usize>, RandError> {
    let n = state.n();
    let fail = |detail: String| RandError::SelectionFailed {
        target,
        max_degree,
        detail,
    };
    let mut alive = BitSet::from_members(n, candidates.iter().copied());
    let mut left = alive.count();
    if left < target {
        return Err(fail(format!("only {left} candidates")));
    }
    let board = state.board();
    let mut deg = vec![0usize; n];
    let mut heap = BinaryHeap::new();
    for v in alive.iter() {
        deg[v] = board.walker_degree_into(v, &alive) + board.breaker_degree_into(v, &alive);
        heap.push((deg[v], v));
    }
    while left > target {
        let (d, v) = heap.pop().expect("alive vertices are queued");
        if !alive.contains(v) || d != deg[v] {
            continue;
        }
        alive.remove(v);
        left -= 1;
        let mut touch = |u: usize| {
            if alive.contains(u) {
                deg[u] -= 1;
                heap.push((deg[u], u));
            }
        };
        board.for_each_walker_neighbor(v, &mut touch);
        board.for_each_breaker_neighbor(v, &mut touch);
    }
    let kept: Vec<usize> = alive.iter().collect();
    if let Some(&v) = kept.iter().find(|&&v| deg[v] >= max_degree) {
        return Err(fail(format!("vertex {v} keeps degree {}", deg[v])));
    }
    Ok(kept)
}
