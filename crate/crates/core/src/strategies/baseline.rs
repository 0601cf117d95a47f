//! Reference walkers without any guarantee.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Certificate, GameState, StrategyError, WalkerAction, WalkerStrategy};
use crate::graph::walker_dfs_cycle;

/// Uniformly random legal steps for a fixed number of rounds.
#[derive(Clone, Debug, Default)]
pub struct RandomWalker {
    /// Defaults to `2n`.
    pub max_rounds: Option<usize>,
}

impl RandomWalker {
    pub fn new() -> Self {
        Self::default()
    }
}

impl WalkerStrategy for RandomWalker {
    fn name(&self) -> &str {
        "random"
    }

    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        if state.round() >= self.max_rounds.unwrap_or(2 * state.n()) {
            return Ok(WalkerAction::Done);
        }
        let targets = state
            .legal_walker_targets()
            .map_err(|e| StrategyError::Other(e.to_string()))?;
        Ok(targets
            .choose(rng)
            .map_or(WalkerAction::Done, |&w| WalkerAction::Step(w)))
    }

    fn certificate(&self, state: &GameState) -> Option<Certificate> {
        walker_dfs_cycle(state)
    }
}

/// Extends a path into untouched vertices of least Breaker degree, then
/// closes the longest cycle still available.
#[derive(Clone, Debug, Default)]
pub struct GreedyPathWalker {
    path: Vec<usize>,
    closed: Option<Vec<usize>>,
    done: bool,
}

impl GreedyPathWalker {
    pub fn new() -> Self {
        Self::default()
    }
}

impl WalkerStrategy for GreedyPathWalker {
    fn name(&self) -> &str {
        "greedy-path"
    }

    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        if self.done {
            return Ok(WalkerAction::Done);
        }
        let pos = state
            .position()
            .ok_or_else(|| StrategyError::Other("no position".into()))?;
        if self.path.is_empty() {
            self.path.push(pos);
        }
        let board = state.board();
        let mut best = usize::MAX;
        let mut ties = Vec::new();
        for w in (0..state.n()).filter(|&w| !state.is_visited(w) && state.is_free(pos, w)) {
            let d = board.breaker_degree(w);
            if d < best {
                best = d;
                ties.clear();
            }
            if d == best {
                ties.push(w);
            }
        }
        if !ties.is_empty() {
            let w = ties[rng.gen_range(0..ties.len())];
            self.path.push(w);
            return Ok(WalkerAction::Step(w));
        }
        self.done = true;
        let len = self.path.len();
        if len >= 3 {
            if let Some(i) = (0..len - 2).find(|&i| state.is_free(pos, self.path[i])) {
                self.closed = Some(self.path[i..].to_vec());
                return Ok(WalkerAction::Step(self.path[i]));
            }
        }
        Ok(WalkerAction::Done)
    }

    fn certificate(&self, state: &GameState) -> Option<Certificate> {
        match &self.closed {
            Some(c) => Some(Certificate::cycle(c.clone())),
            None => walker_dfs_cycle(state),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{never, run_match, validate_certificate, GameConfig, Player};
    use crate::strategies::RandomBreaker;

    #[test]
    fn greedy_path_closes_a_long_cycle_without_opposition() {
        let cfg = GameConfig::new(12, 0, Player::Walker);
        let t = run_match(
            cfg,
            &mut GreedyPathWalker::new(),
            &mut RandomBreaker,
            &never,
        )
        .unwrap();
        let c = t.certificate.unwrap();
        assert_eq!(c.len(), 12);
    }

    #[test]
    fn random_walker_stops_and_certifies() {
        let cfg = GameConfig::new(15, 1, Player::Breaker).with_seed(4);
        let mut w = RandomWalker {
            max_rounds: Some(40),
        };
        let t = run_match(cfg, &mut w, &mut RandomBreaker, &never).unwrap();
        let s = t.final_state.as_ref().unwrap();
        assert_eq!(s.round(), 40);
        if let Some(c) = &t.certificate {
            assert!(validate_certificate(s, c));
        }
    }
}
