//! Breaker strategies and baseline walkers.

pub mod baseline;
pub mod breaker;

pub use baseline::{GreedyPathWalker, RandomWalker};
pub use breaker::{
    isolation_targets, IsolateMany, IsolateOne, PreventLongCycle, PreventionMemory,
    PreventionPhase, RandomBreaker,
};
