//! Board, rules, certificates and transcripts.

mod board;
mod certificate;
mod edge;
mod game;
mod play;
mod transcript;

pub use board::{Board, DENSE_LIMIT};
pub use certificate::{validate_certificate, Certificate, CertificateKind, ParseCertificateError};
pub use edge::{EdgeId, EdgeState, ParseEdgeError, Player};
pub use game::{EngineError, GameConfig, GameState, Move, StartPolicy};
pub use play::{
    never, player_rng, run_match, BreakerStrategy, Match, MatchError, PlayOutcome, StrategyError,
    WalkerAction, WalkerStrategy,
};
pub use transcript::{MatchMeta, Record, ReplayError, Transcript, TranscriptHeader};
