use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::board::Board;
use super::edge::{EdgeId, EdgeState, Player};
use crate::bitset::BitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartPolicy {
    /// Start vertex fixed before play, visible to both sides.
    Declared(usize),
    /// Walker picks the start vertex on her first turn.
    StrategyChosen,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n: usize,
    pub b: usize,
    pub first_mover: Player,
    pub start: StartPolicy,
    pub profile: String,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(n: usize, b: usize, first_mover: Player) -> Self {
        Self {
            n,
            b,
            first_mover,
            start: StartPolicy::Declared(0),
            profile: "paper".into(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_profile(mut self, profile: &str) -> Self {
        self.profile = profile.to_string();
        self
    }

    pub fn with_start(mut self, start: StartPolicy) -> Self {
        self.start = start;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n < 3 {
            return Err(EngineError::InvalidConfig(format!(
                "n = {} is below 3",
                self.n
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(EngineError::InvalidConfig(format!(
                "n = {} does not fit vertex ids",
                self.n
            )));
        }
        if let StartPolicy::Declared(v) = self.start {
            if v >= self.n {
                return Err(EngineError::InvalidConfig(format!(
                    "start vertex {v} outside 0..{}",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    WalkerStep {
        from: usize,
        to: usize,
        reused: bool,
    },
    BreakerClaim(Vec<EdgeId>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("walker has no position")]
    NoPosition,
    #[error("walker is already positioned")]
    AlreadyPositioned,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("illegal walker step {from}->{to}: {reason}")]
    IllegalMove {
        from: usize,
        to: usize,
        reason: &'static str,
    },
    #[error("illegal breaker claim: {0}")]
    IllegalClaim(String),
}

/// Full position of a match: board, walker position and the untouched-set
/// ledgers that several strategies read every round.
#[derive(Clone, Debug)]
pub struct GameState {
    config: GameConfig,
    board: Board,
    position: Option<usize>,
    round: usize,
    visited: BitSet,
    visit_order: Vec<usize>,
    moves: Vec<Move>,
    /// `d_B(v, U)` for every vertex.
    breaker_to_untouched: Vec<u32>,
    /// `e_B(U)`.
    untouched_breaker_edges: usize,
}

impl GameState {
    pub fn new(config: GameConfig) -> Result<Self, EngineError> {
        config.validate()?;
        let n = config.n;
        let mut state = Self {
            board: Board::new(n),
            position: None,
            round: 0,
            visited: BitSet::new(n),
            visit_order: Vec::new(),
            moves: Vec::new(),
            breaker_to_untouched: vec![0; n],
            untouched_breaker_edges: 0,
            config,
        };
        if let StartPolicy::Declared(v) = state.config.start {
            state.mark_visited(v);
            state.position = Some(v);
        }
        Ok(state)
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.config.n
    }

    #[inline]
    pub fn bias(&self) -> usize {
        self.config.b
    }

    #[inline]
    pub fn board(&self) -> &Board {
        &self.board
    }

    #[inline]
    pub fn position(&self) -> Option<usize> {
        self.position
    }

    /// Number of completed walker moves.
    #[inline]
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// The start vertex once known: declared, or the first position taken.
    pub fn start_vertex(&self) -> Option<usize> {
        self.visit_order.first().copied()
    }

    #[inline]
    pub fn visited(&self) -> &BitSet {
        &self.visited
    }

    #[inline]
    pub fn is_visited(&self, v: usize) -> bool {
        self.visited.contains(v)
    }

    /// Vertices in order of first visit.
    pub fn visit_order(&self) -> &[usize] {
        &self.visit_order
    }

    #[inline]
    pub fn visited_count(&self) -> usize {
        self.visit_order.len()
    }

    #[inline]
    pub fn untouched_count(&self) -> usize {
        self.n() - self.visit_order.len()
    }

    #[inline]
    pub fn breaker_degree_to_untouched(&self, v: usize) -> usize {
        self.breaker_to_untouched[v] as usize
    }

    #[inline]
    pub fn untouched_breaker_edges(&self) -> usize {
        self.untouched_breaker_edges
    }

    #[inline]
    pub fn is_free(&self, a: usize, b: usize) -> bool {
        self.board.is_free(a, b)
    }

    #[inline]
    pub fn edge_state(&self, e: EdgeId) -> EdgeState {
        self.board.state(e)
    }

    /// Size of the claim Breaker owes on his next turn.
    pub fn required_claim_count(&self) -> usize {
        self.config.b.min(self.board.free_edge_count())
    }

    pub fn place_walker(&mut self, v: usize) -> Result<(), EngineError> {
        if self.position.is_some() {
            return Err(EngineError::AlreadyPositioned);
        }
        if v >= self.n() {
            return Err(EngineError::VertexOutOfRange(v));
        }
        self.mark_visited(v);
        self.position = Some(v);
        Ok(())
    }

    pub fn can_step(&self, to: usize) -> Result<(), EngineError> {
        let from = self.position.ok_or(EngineError::NoPosition)?;
        if to >= self.n() {
            return Err(EngineError::VertexOutOfRange(to));
        }
        if to == from {
            return Err(EngineError::IllegalMove {
                from,
                to,
                reason: "target equals position",
            });
        }
        if self.board.is_breaker(from, to) {
            return Err(EngineError::IllegalMove {
                from,
                to,
                reason: "edge owned by breaker",
            });
        }
        Ok(())
    }

    /// Moves Walker along `position-to`, claiming the edge if it was free.
    /// Returns whether the edge was already hers.
    pub fn walker_step(&mut self, to: usize) -> Result<bool, EngineError> {
        self.can_step(to)?;
        let from = self.position.expect("checked");
        let reused = self.board.is_walker(from, to);
        if !reused {
            self.board.set_walker(EdgeId::new(from, to));
        }
        if !self.visited.contains(to) {
            self.mark_visited(to);
        }
        self.position = Some(to);
        self.round += 1;
        self.moves.push(Move::WalkerStep { from, to, reused });
        Ok(reused)
    }

    pub fn check_claim(&self, edges: &[EdgeId]) -> Result<(), EngineError> {
        let n = self.n();
        let want = self.required_claim_count();
        if edges.len() != want {
            return Err(EngineError::IllegalClaim(format!(
                "claimed {} edges, expected {want}",
                edges.len()
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.v() >= n {
                return Err(EngineError::IllegalClaim(format!(
                    "edge {e} outside the board"
                )));
            }
            if self.board.state(*e) != EdgeState::Free {
                return Err(EngineError::IllegalClaim(format!("edge {e} is not free")));
            }
            if edges[..i].contains(e) {
                return Err(EngineError::IllegalClaim(format!("edge {e} claimed twice")));
            }
        }
        Ok(())
    }

    pub fn breaker_claim(&mut self, edges: &[EdgeId]) -> Result<(), EngineError> {
        self.check_claim(edges)?;
        for &e in edges {
            self.board.set_breaker(e);
            let (a, b) = e.endpoints();
            let (ua, ub) = (!self.visited.contains(a), !self.visited.contains(b));
            if ub {
                self.breaker_to_untouched[a] += 1;
            }
            if ua {
                self.breaker_to_untouched[b] += 1;
            }
            if ua && ub {
                self.untouched_breaker_edges += 1;
            }
        }
        self.moves.push(Move::BreakerClaim(edges.to_vec()));
        Ok(())
    }

    /// Vertices reachable in one walker step, ascending.
    pub fn legal_walker_targets(&self) -> Result<Vec<usize>, EngineError> {
        let from = self.position.ok_or(EngineError::NoPosition)?;
        Ok((0..self.n())
            .filter(|&w| w != from && !self.board.is_breaker(from, w))
            .collect())
    }

    /// Position with the given edge sets, Walker at `position` and every
    /// endpoint of a Walker edge visited. The move list is left empty.
    pub(crate) fn from_parts(
        config: GameConfig,
        walker: &[EdgeId],
        breaker: &[EdgeId],
        position: Option<usize>,
    ) -> Result<Self, EngineError> {
        let config = GameConfig {
            start: StartPolicy::StrategyChosen,
            ..config
        };
        let mut state = Self::new(config)?;
        for &e in breaker {
            state.board.set_breaker(e);
            let (a, b) = e.endpoints();
            state.breaker_to_untouched[a] += 1;
            state.breaker_to_untouched[b] += 1;
            state.untouched_breaker_edges += 1;
        }
        for &e in walker {
            state.board.set_walker(e);
        }
        let touched = walker.iter().flat_map(|e| [e.u(), e.v()]).chain(position);
        for v in touched {
            if !state.visited.contains(v) {
                state.mark_visited(v);
            }
        }
        state.position = position;
        Ok(state)
    }

    fn mark_visited(&mut self, v: usize) {
        self.visited.insert(v);
        self.visit_order.push(v);
        self.untouched_breaker_edges -= self.breaker_to_untouched[v] as usize;
        let ledger = &mut self.breaker_to_untouched;
        self.board.for_each_breaker_neighbor(v, |y| ledger[y] -= 1);
    }
}
