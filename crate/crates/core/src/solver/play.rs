//! Optimal strategies read off a solved game graph.

use std::rc::Rc;

use rand_chacha::ChaCha8Rng;

use super::{subsets, SolveError, Solved, Target};
use crate::engine::{
    run_match, BreakerStrategy, Certificate, EdgeId, GameState, Player, StrategyError, Transcript,
    WalkerAction, WalkerStrategy,
};

fn certificate_for(solved: &Solved, w: u16) -> Option<Certificate> {
    let cycles = solved.cycles();
    let len = match solved.query.target {
        Target::CycleAtLeast(_) => cycles.longest(w),
        Target::ContainsCycle(k) => k,
    };
    cycles.find(w, len).map(|c| Certificate::cycle(c.to_vec()))
}

/// Walker moving to a winning successor of least rank, or to the lowest
/// legal vertex when the position is lost.
#[derive(Clone)]
pub struct SolverWalker {
    solved: Rc<Solved>,
}

impl SolverWalker {
    pub fn new(solved: Rc<Solved>) -> Self {
        Self { solved }
    }
}

impl WalkerStrategy for SolverWalker {
    fn name(&self) -> &str {
        "solver"
    }

    fn choose_start(&mut self, state: &GameState, _rng: &mut ChaCha8Rng) -> usize {
        let (w, b) = self.solved.layout().masks(state);
        (0..state.n())
            .filter_map(|v| {
                self.solved
                    .value_of(w, b, Some(v), Player::Walker)
                    .map(|r| (r, v))
            })
            .min()
            .map_or(0, |(_, v)| v)
    }

    fn next_step(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        let targets = state
            .legal_walker_targets()
            .map_err(|e| StrategyError::Other(e.to_string()))?;
        let Some(&lowest) = targets.first() else {
            return Ok(WalkerAction::Done);
        };
        let p = state.position().expect("legal targets exist");
        let layout = self.solved.layout();
        let (w, b) = layout.masks(state);
        let best = targets
            .iter()
            .filter_map(|&t| {
                let w2 = w | 1 << layout.edge(p, t);
                self.solved
                    .value_of(w2, b, Some(t), Player::Breaker)
                    .map(|r| (r, t))
            })
            .min();
        Ok(WalkerAction::Step(best.map_or(lowest, |(_, t)| t)))
    }

    fn certificate(&self, state: &GameState) -> Option<Certificate> {
        let (w, _) = self.solved.layout().masks(state);
        if self.solved.reached(w) {
            certificate_for(&self.solved, w)
        } else {
            None
        }
    }
}

/// Breaker claiming into a Walker-losing position when one exists, and
/// otherwise maximizing Walker's distance to the target.
#[derive(Clone)]
pub struct SolverBreaker {
    solved: Rc<Solved>,
}

impl SolverBreaker {
    pub fn new(solved: Rc<Solved>) -> Self {
        Self { solved }
    }
}

impl BreakerStrategy for SolverBreaker {
    fn name(&self) -> &str {
        "solver"
    }

    fn claim(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        let layout = self.solved.layout();
        let (w, b) = layout.masks(state);
        let free = layout.full & !(w | b);
        let mut options = Vec::new();
        subsets(free, state.required_claim_count(), &mut options);
        let mut best: Option<(u32, u16)> = None;
        for s in options {
            match self
                .solved
                .value_of(w, b | s, state.position(), Player::Walker)
            {
                None => return Ok(layout.edge_ids(s)),
                Some(r) if best.map_or(true, |(br, _)| r > br) => best = Some((r, s)),
                Some(_) => {}
            }
        }
        let (_, s) = best.ok_or_else(|| StrategyError::stuck("solver", "no claim available"))?;
        Ok(layout.edge_ids(s))
    }
}

/// Plays both solver strategies against each other from the query's start
/// and stops when the target is reached or no free edge is left.
pub fn solved_match(solved: &Rc<Solved>) -> Result<Transcript, SolveError> {
    let mut walker = SolverWalker::new(solved.clone());
    let mut breaker = SolverBreaker::new(solved.clone());
    let cap = 4 * solved.layout().edges + 8;
    let s2 = solved.clone();
    let stop = move |state: &GameState| {
        let (w, _) = s2.layout().masks(state);
        s2.reached(w) || state.board().free_edge_count() == 0 || state.round() > cap
    };
    run_match(solved.query.config(), &mut walker, &mut breaker, &stop)
        .map_err(|e| SolveError::Play(e.to_string()))
}

pub(crate) fn state_from_masks(solved: &Solved, w: u16, b: u16, pos: Option<usize>) -> GameState {
    let layout = solved.layout();
    GameState::from_parts(
        solved.query.config(),
        &layout.edge_ids(w),
        &layout.edge_ids(b),
        pos,
    )
    .expect("validated query")
}

/// Successor positions generated by the engine's own move rules.
pub(crate) fn engine_successors(
    solved: &Solved,
    state: &GameState,
    turn: Player,
) -> Vec<(GameState, Player)> {
    let mut out = Vec::new();
    match (turn, state.position()) {
        (Player::Walker, None) => {
            for v in 0..state.n() {
                let mut s = state.clone();
                s.place_walker(v).expect("unpositioned");
                out.push((s, Player::Walker));
            }
        }
        (Player::Walker, Some(_)) => {
            for t in state.legal_walker_targets().expect("positioned") {
                let mut s = state.clone();
                s.walker_step(t).expect("legal target");
                out.push((s, Player::Breaker));
            }
        }
        (Player::Breaker, _) => {
            let k = state.required_claim_count();
            if k == 0 {
                out.push((state.clone(), Player::Walker));
            } else {
                let layout = solved.layout();
                let (w, b) = layout.masks(state);
                let mut options = Vec::new();
                subsets(layout.full & !(w | b), k, &mut options);
                for m in options {
                    let mut s = state.clone();
                    s.breaker_claim(&layout.edge_ids(m)).expect("free edges");
                    out.push((s, Player::Walker));
                }
            }
        }
    }
    out
}
