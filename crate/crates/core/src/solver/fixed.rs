//! Best response of Walker to a fixed Breaker strategy.

use rand_chacha::ChaCha8Rng;

use super::{CycleTable, Layout, SolveError};
use crate::engine::{player_rng, BreakerStrategy, GameConfig, GameState, Player, StartPolicy};

struct Search<'a> {
    layout: &'a Layout,
    cycles: &'a CycleTable,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn walker<B: BreakerStrategy + Clone>(
        &mut self,
        state: &GameState,
        breaker: &B,
        rng: &ChaCha8Rng,
    ) -> Result<usize, SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::BudgetExceeded {
                budget: self.budget,
            });
        }
        let (w, _) = self.layout.masks(state);
        let mut best = self.cycles.longest(w);
        if state.board().free_edge_count() == 0 || best == state.n() {
            return Ok(best);
        }
        for t in state.legal_walker_targets().expect("positioned") {
            let mut s = state.clone();
            s.walker_step(t).expect("legal");
            best = best.max(self.breaker(s, breaker.clone(), rng.clone())?);
        }
        Ok(best)
    }

    fn breaker<B: BreakerStrategy + Clone>(
        &mut self,
        mut state: GameState,
        mut breaker: B,
        mut rng: ChaCha8Rng,
    ) -> Result<usize, SolveError> {
        if state.required_claim_count() > 0 {
            let edges = breaker
                .claim(&state, &mut rng)
                .map_err(|e| SolveError::Play(e.to_string()))?;
            state
                .breaker_claim(&edges)
                .map_err(|e| SolveError::Play(e.to_string()))?;
        }
        self.walker(&state, &breaker, &rng)
    }
}

/// Longest cycle Walker can build against `breaker`, which is replayed
/// from a clone at every branch with its seed-0 stream. Walker starts at
/// vertex 0; `b` must be positive.
pub fn value_against<B: BreakerStrategy + Clone>(
    n: usize,
    b: usize,
    first: Player,
    breaker: &B,
    budget: usize,
) -> Result<usize, SolveError> {
    if !(3..=super::MAX_N).contains(&n) || b == 0 {
        return Err(SolveError::InvalidQuery(format!(
            "need 3 <= n <= {} and b > 0",
            super::MAX_N
        )));
    }
    let config = GameConfig::new(n, b, first)
        .with_start(StartPolicy::Declared(0))
        .with_profile("scaled");
    let state = GameState::new(config).map_err(|e| SolveError::InvalidQuery(e.to_string()))?;
    let layout = Layout::new(n);
    let cycles = CycleTable::new(&layout);
    let mut search = Search {
        layout: &layout,
        cycles: &cycles,
        nodes: 0,
        budget,
    };
    let rng = player_rng(0, Player::Breaker);
    match first {
        Player::Walker => search.walker(&state, breaker, &rng),
        Player::Breaker => search.breaker(state, breaker.clone(), rng),
    }
}
