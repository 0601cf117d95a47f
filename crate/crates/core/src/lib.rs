//! Walker-Breaker games on complete graphs: engine, strategies, simulators
//! and an exact solver for tiny boards.

pub mod bitset;
pub mod diameter;
pub mod engine;
pub mod graph;
pub mod harness;
pub mod minbox;
pub mod profile;
pub mod randomized;
pub mod solver;
pub mod strategies;
pub mod unbiased;

pub use bitset::BitSet;
pub use engine::*;
