//! Strategies selectable by name.

use rand_chacha::ChaCha8Rng;

use super::ConfigError;
use crate::diameter::DiameterWalker;
use crate::engine::{
    BreakerStrategy, Certificate, EdgeId, GameState, StrategyError, WalkerAction, WalkerStrategy,
};
use crate::profile::ConstantsProfile;
use crate::strategies::{
    GreedyPathWalker, IsolateMany, IsolateOne, PreventLongCycle, RandomBreaker, RandomWalker,
};
use crate::unbiased::Thm1Walker;

pub const WALKERS: [&str; 4] = ["thm1-cycle", "prop-diameter-tree", "random", "greedy-path"];
pub const BREAKERS: [&str; 4] = ["isolate1", "isolateB", "prevent-n2", "random"];

pub enum RegisteredWalker {
    Cycle(Box<Thm1Walker>),
    Tree(Box<DiameterWalker>),
    Random(RandomWalker),
    Greedy(GreedyPathWalker),
}

impl RegisteredWalker {
    pub fn build(name: &str, profile: &ConstantsProfile) -> Result<Self, ConfigError> {
        Ok(match name {
            "thm1-cycle" => Self::Cycle(Box::new(Thm1Walker::new(profile.clone()))),
            "prop-diameter-tree" => Self::Tree(Box::new(DiameterWalker::new(profile.clone()))),
            "random" => Self::Random(RandomWalker::new()),
            "greedy-path" => Self::Greedy(GreedyPathWalker::new()),
            _ => {
                return Err(ConfigError::UnknownStrategy {
                    role: "walker",
                    name: name.into(),
                })
            }
        })
    }

    fn inner(&mut self) -> &mut dyn WalkerStrategy {
        match self {
            Self::Cycle(w) => w.as_mut(),
            Self::Tree(w) => w.as_mut(),
            Self::Random(w) => w,
            Self::Greedy(w) => w,
        }
    }

    fn inner_ref(&self) -> &dyn WalkerStrategy {
        match self {
            Self::Cycle(w) => w.as_ref(),
            Self::Tree(w) => w.as_ref(),
            Self::Random(w) => w,
            Self::Greedy(w) => w,
        }
    }

    /// Bookkeeping claims that failed during the match.
    pub fn claim_violations(&self) -> usize {
        match self {
            Self::Cycle(w) => w.claim_log().count(),
            Self::Tree(w) => w.claim_log().count(),
            _ => 0,
        }
    }

    /// Ledger entries recorded and how many of them failed.
    pub fn ledger(&self) -> (usize, usize) {
        match self {
            Self::Cycle(w) => (
                w.ledger().len(),
                w.ledger().iter().filter(|e| !e.holds).count(),
            ),
            _ => (0, 0),
        }
    }
}

impl WalkerStrategy for RegisteredWalker {
    fn name(&self) -> &str {
        self.inner_ref().name()
    }

    fn choose_start(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> usize {
        self.inner().choose_start(state, rng)
    }

    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        self.inner().next_step(state, rng)
    }

    fn certificate(&self, state: &GameState) -> Option<Certificate> {
        self.inner_ref().certificate(state)
    }

    fn drain_events(&mut self) -> Vec<String> {
        self.inner().drain_events()
    }
}

#[derive(Clone)]
pub enum RegisteredBreaker {
    IsolateOne(IsolateOne),
    IsolateMany(IsolateMany),
    Prevent(PreventLongCycle),
    Random(RandomBreaker),
}

impl RegisteredBreaker {
    pub fn build(name: &str) -> Result<Self, ConfigError> {
        Ok(match name {
            "isolate1" => Self::IsolateOne(IsolateOne::new()),
            "isolateB" => Self::IsolateMany(IsolateMany::new()),
            "prevent-n2" => Self::Prevent(PreventLongCycle::new()),
            "random" => Self::Random(RandomBreaker::new()),
            _ => {
                return Err(ConfigError::UnknownStrategy {
                    role: "breaker",
                    name: name.into(),
                })
            }
        })
    }

    fn inner(&mut self) -> &mut dyn BreakerStrategy {
        match self {
            Self::IsolateOne(b) => b,
            Self::IsolateMany(b) => b,
            Self::Prevent(b) => b,
            Self::Random(b) => b,
        }
    }

    pub fn prevention(&self) -> Option<&PreventLongCycle> {
        match self {
            Self::Prevent(b) => Some(b),
            _ => None,
        }
    }
}

impl BreakerStrategy for RegisteredBreaker {
    fn name(&self) -> &str {
        match self {
            Self::IsolateOne(b) => b.name(),
            Self::IsolateMany(b) => b.name(),
            Self::Prevent(b) => b.name(),
            Self::Random(b) => b.name(),
        }
    }

    fn claim(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        self.inner().claim(state, rng)
    }
}
