//! Breaker strategies. Every "arbitrary" claim takes the lowest free edge.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{BreakerStrategy, EdgeId, GameState, StrategyError};

/// Monotone cursor over the lexicographically lowest free edge.
#[derive(Clone, Debug)]
struct LowestFree {
    cursor: EdgeId,
}

impl Default for LowestFree {
    fn default() -> Self {
        Self {
            cursor: EdgeId::new(0, 1),
        }
    }
}

impl LowestFree {
    /// Appends lowest free edges to `claim` until it holds `want` edges.
    fn pad(&mut self, state: &GameState, claim: &mut Vec<EdgeId>, want: usize) {
        let board = state.board();
        if let Some(e) = board.next_free_edge(self.cursor) {
            self.cursor = e;
        }
        let missing = want.saturating_sub(claim.len());
        let extra = board.lowest_free_edges(self.cursor, missing, claim);
        claim.extend(extra);
    }
}

/// Vertices Breaker keeps away from Walker: the `k` lowest vertices other
/// than the first two Walker positions. Known once Walker has moved.
pub fn isolation_targets(state: &GameState, k: usize) -> Option<Vec<usize>> {
    let order = state.visit_order();
    if order.len() < 2 {
        return None;
    }
    let (a, b) = (order[0], order[1]);
    Some(
        (0..state.n())
            .filter(|&v| v != a && v != b)
            .take(k)
            .collect(),
    )
}

/// Claims the edges between Walker's position and `targets` first.
fn claim_towards(state: &GameState, targets: &[usize], pad: &mut LowestFree) -> Vec<EdgeId> {
    let want = state.required_claim_count();
    let mut claim = Vec::with_capacity(want);
    if let Some(pos) = state.position() {
        for &u in targets {
            if claim.len() == want {
                break;
            }
            if state.is_free(u, pos) {
                claim.push(EdgeId::new(u, pos));
            }
        }
    }
    pad.pad(state, &mut claim, want);
    claim
}

/// Keeps one vertex out of Walker's graph.
#[derive(Clone, Debug, Default)]
pub struct IsolateOne {
    pad: LowestFree,
}

impl IsolateOne {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn target(state: &GameState) -> Option<usize> {
        isolation_targets(state, 1).and_then(|t| t.first().copied())
    }
}

impl BreakerStrategy for IsolateOne {
    fn name(&self) -> &str {
        "isolate1"
    }

    fn claim(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        let targets = isolation_targets(state, 1).unwrap_or_default();
        Ok(claim_towards(state, &targets, &mut self.pad))
    }
}

/// Keeps `b` vertices out of Walker's graph.
#[derive(Clone, Debug, Default)]
pub struct IsolateMany {
    pad: LowestFree,
}

impl IsolateMany {
    pub fn new() -> Self {
        Self::default()
    }
}

impl BreakerStrategy for IsolateMany {
    fn name(&self) -> &str {
        "isolateB"
    }

    fn claim(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        let targets = isolation_targets(state, state.bias()).unwrap_or_default();
        Ok(claim_towards(state, &targets, &mut self.pad))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreventionPhase {
    One,
    Two,
}

/// State of the two-vertex blocking strategy. Everything is a function of
/// the game state, so it is recomputed on every call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreventionMemory {
    pub phase: PreventionPhase,
    pub w1: usize,
    pub w2: Option<usize>,
    pub component_size: usize,
    pub v_prime: Option<usize>,
}

impl PreventionMemory {
    /// `None` while the start vertex is still unknown.
    pub fn from_state(state: &GameState) -> Option<Self> {
        let n = state.n();
        let v0 = state.start_vertex()?;
        let w1 = if v0 == 0 { 1 } else { 0 };
        let order = state.visit_order();
        let component_size = order.len();
        if component_size < n - 2 {
            return Some(Self {
                phase: PreventionPhase::One,
                w1,
                w2: None,
                component_size,
                v_prime: None,
            });
        }
        let at_switch = &order[..n - 2];
        let v_prime = at_switch[n - 3];
        let w2 = (0..n).find(|&v| v != w1 && !at_switch.contains(&v));
        Some(Self {
            phase: PreventionPhase::Two,
            w1,
            w2,
            component_size,
            v_prime: Some(v_prime),
        })
    }

    pub fn blocked(&self) -> Option<usize> {
        match self.phase {
            PreventionPhase::One => Some(self.w1),
            PreventionPhase::Two => self.w2,
        }
    }
}

/// Unbiased Breaker holding every Walker cycle to length `n - 2`.
#[derive(Clone, Debug, Default)]
pub struct PreventLongCycle {
    pad: LowestFree,
}

impl PreventLongCycle {
    pub fn new() -> Self {
        Self::default()
    }
}

impl BreakerStrategy for PreventLongCycle {
    fn name(&self) -> &str {
        "prevent-n2"
    }

    fn claim(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        let targets: Vec<usize> = PreventionMemory::from_state(state)
            .and_then(|m| m.blocked())
            .into_iter()
            .collect();
        Ok(claim_towards(state, &targets, &mut self.pad))
    }
}

/// Uniformly random free edges.
#[derive(Clone, Debug, Default)]
pub struct RandomBreaker;

impl RandomBreaker {
    pub fn new() -> Self {
        Self
    }
}

impl BreakerStrategy for RandomBreaker {
    fn name(&self) -> &str {
        "random"
    }

    fn claim(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        let board = state.board();
        let n = state.n();
        let want = state.required_claim_count();
        let total = board.total_edges();
        let free = board.free_edge_count();
        if free * 4 >= total {
            let mut out: Vec<EdgeId> = Vec::with_capacity(want);
            while out.len() < want {
                let e = EdgeId::from_index(rng.gen_range(0..total), n);
                if board.is_free(e.u(), e.v()) && !out.contains(&e) {
                    out.push(e);
                }
            }
            return Ok(out);
        }
        let all = board.lowest_free_edges(EdgeId::new(0, 1), free, &[]);
        Ok(index::sample(rng, all.len(), want)
            .into_iter()
            .map(|i| all[i])
            .collect())
    }
}
