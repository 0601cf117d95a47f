//! Strategy contracts and the alternation loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::certificate::{validate_certificate, Certificate};
use super::edge::{EdgeId, Player};
use super::game::{EngineError, GameConfig, GameState, Move};
use super::transcript::{MatchMeta, Record, Transcript, TranscriptHeader};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkerAction {
    Step(usize),
    /// Walker resigns the rest of the match.
    Done,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("strategy stuck in {case}: {detail}")]
    Stuck { case: String, detail: String },
    #[error("claim violated: {claim}: {detail}")]
    ClaimViolated { claim: String, detail: String },
    #[error("precondition failed: {}", .0.join("; "))]
    PreconditionFailed(Vec<String>),
    #[error("{0}")]
    Other(String),
}

impl StrategyError {
    pub fn stuck(case: impl Into<String>, detail: impl Into<String>) -> Self {
        StrategyError::Stuck {
            case: case.into(),
            detail: detail.into(),
        }
    }

    pub fn claim(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        StrategyError::ClaimViolated {
            claim: claim.into(),
            detail: detail.into(),
        }
    }
}

pub trait WalkerStrategy {
    fn name(&self) -> &str;

    /// Called once when the start vertex is left to Walker.
    fn choose_start(&mut self, _state: &GameState, _rng: &mut ChaCha8Rng) -> usize {
        0
    }

    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError>;

    /// Cycle or path the strategy claims to have built on `state`.
    fn certificate(&self, _state: &GameState) -> Option<Certificate> {
        None
    }

    /// Comment lines to append to the transcript after the current move.
    fn drain_events(&mut self) -> Vec<String> {
        Vec::new()
    }
}

pub trait BreakerStrategy {
    fn name(&self) -> &str;

    /// Must return exactly `state.required_claim_count()` free edges.
    fn claim(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError>;
}

impl<W: WalkerStrategy + ?Sized> WalkerStrategy for Box<W> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn choose_start(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> usize {
        (**self).choose_start(state, rng)
    }
    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        (**self).next_step(state, rng)
    }
    fn certificate(&self, state: &GameState) -> Option<Certificate> {
        (**self).certificate(state)
    }
    fn drain_events(&mut self) -> Vec<String> {
        (**self).drain_events()
    }
}

impl<B: BreakerStrategy + ?Sized> BreakerStrategy for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn claim(
        &mut self,
        state: &GameState,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<EdgeId>, StrategyError> {
        (**self).claim(state, rng)
    }
}

#[derive(Debug, Error)]
pub enum MatchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{player:?} strategy played an illegal move {offending}: {reason}")]
    StrategyFault {
        player: Player,
        offending: String,
        reason: EngineError,
        transcript: Box<Transcript>,
    },
    #[error("{player:?} strategy failed: {error}")]
    Strategy {
        player: Player,
        error: StrategyError,
        transcript: Box<Transcript>,
    },
    #[error("walker certificate {certificate} does not hold")]
    InvalidCertificate {
        certificate: Certificate,
        transcript: Box<Transcript>,
    },
}

impl MatchError {
    pub fn transcript(&self) -> Option<&Transcript> {
        match self {
            MatchError::Engine(_) => None,
            MatchError::StrategyFault { transcript, .. }
            | MatchError::Strategy { transcript, .. }
            | MatchError::InvalidCertificate { transcript, .. } => Some(transcript),
        }
    }
}

/// Independent stream per player, derived from the match seed.
pub fn player_rng(seed: u64, player: Player) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(match player {
        Player::Walker => 1,
        Player::Breaker => 2,
    });
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlayOutcome {
    /// The stop predicate fired.
    Stopped,
    /// Walker returned [`WalkerAction::Done`].
    WalkerDone,
}

/// A match in progress. Several walker strategies may be played in
/// sequence on one match; the turn order and random streams carry over.
pub struct Match {
    state: GameState,
    transcript: Transcript,
    rng_walker: ChaCha8Rng,
    rng_breaker: ChaCha8Rng,
    turn: Player,
}

impl Match {
    pub fn new(
        config: GameConfig,
        walker_name: &str,
        breaker_name: &str,
    ) -> Result<Self, EngineError> {
        let state = GameState::new(config)?;
        let cfg = state.config().clone();
        let mut transcript = Transcript::new(TranscriptHeader::from_config(&cfg));
        let meta = MatchMeta {
            walker: walker_name.into(),
            breaker: breaker_name.into(),
            start: cfg.start,
        };
        transcript.records.push(Record::Comment(meta.render()));
        Ok(Self {
            state,
            transcript,
            rng_walker: player_rng(cfg.seed, Player::Walker),
            rng_breaker: player_rng(cfg.seed, Player::Breaker),
            turn: cfg.first_mover,
        })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn turn(&self) -> Player {
        self.turn
    }

    pub fn comment(&mut self, text: &str) {
        self.transcript
            .records
            .push(Record::Comment(format!(" {text}")));
    }

    fn snapshot(&self) -> Box<Transcript> {
        let mut t = self.transcript.clone();
        t.final_state = Some(self.state.clone());
        Box::new(t)
    }

    fn push_events(&mut self, walker: &mut dyn WalkerStrategy) {
        for e in walker.drain_events() {
            self.comment(&e);
        }
    }

    /// Alternates moves until `stop` holds or Walker is done.
    pub fn play(
        &mut self,
        walker: &mut dyn WalkerStrategy,
        breaker: &mut dyn BreakerStrategy,
        stop: &dyn Fn(&GameState) -> bool,
    ) -> Result<PlayOutcome, MatchError> {
        loop {
            if stop(&self.state) {
                return Ok(PlayOutcome::Stopped);
            }
            match self.turn {
                Player::Walker => {
                    if self.state.position().is_none() {
                        let v = walker.choose_start(&self.state, &mut self.rng_walker);
                        if let Err(reason) = self.state.place_walker(v) {
                            return Err(MatchError::StrategyFault {
                                player: Player::Walker,
                                offending: format!("start {v}"),
                                reason,
                                transcript: self.snapshot(),
                            });
                        }
                    }
                    let action = walker.next_step(&self.state, &mut self.rng_walker);
                    match action {
                        Ok(WalkerAction::Step(to)) => {
                            let from = self.state.position().expect("positioned");
                            match self.state.walker_step(to) {
                                Ok(reused) => self
                                    .transcript
                                    .records
                                    .push(Record::Move(Move::WalkerStep { from, to, reused })),
                                Err(reason) => {
                                    self.push_events(walker);
                                    return Err(MatchError::StrategyFault {
                                        player: Player::Walker,
                                        offending: format!("W {from} {to}"),
                                        reason,
                                        transcript: self.snapshot(),
                                    });
                                }
                            }
                            self.push_events(walker);
                        }
                        Ok(WalkerAction::Done) => {
                            self.push_events(walker);
                            return Ok(PlayOutcome::WalkerDone);
                        }
                        Err(error) => {
                            self.push_events(walker);
                            return Err(MatchError::Strategy {
                                player: Player::Walker,
                                error,
                                transcript: self.snapshot(),
                            });
                        }
                    }
                }
                Player::Breaker => {
                    if self.state.required_claim_count() > 0 {
                        let edges = match breaker.claim(&self.state, &mut self.rng_breaker) {
                            Ok(e) => e,
                            Err(error) => {
                                return Err(MatchError::Strategy {
                                    player: Player::Breaker,
                                    error,
                                    transcript: self.snapshot(),
                                })
                            }
                        };
                        if let Err(reason) = self.state.breaker_claim(&edges) {
                            let offending = Record::Move(Move::BreakerClaim(edges)).render();
                            return Err(MatchError::StrategyFault {
                                player: Player::Breaker,
                                offending,
                                reason,
                                transcript: self.snapshot(),
                            });
                        }
                        self.transcript
                            .records
                            .push(Record::Move(Move::BreakerClaim(edges)));
                    }
                }
            }
            self.turn = self.turn.other();
        }
    }

    /// Closes the match, validating the certificate against the final board.
    pub fn finish(mut self, certificate: Option<Certificate>) -> Result<Transcript, MatchError> {
        if let Some(c) = &certificate {
            if !validate_certificate(&self.state, c) {
                return Err(MatchError::InvalidCertificate {
                    certificate: c.clone(),
                    transcript: self.snapshot(),
                });
            }
        }
        self.transcript.certificate = certificate;
        self.transcript.final_state = Some(self.state);
        Ok(self.transcript)
    }
}

/// Plays a full match from a fresh board.
pub fn run_match(
    config: GameConfig,
    walker: &mut dyn WalkerStrategy,
    breaker: &mut dyn BreakerStrategy,
    stop: &dyn Fn(&GameState) -> bool,
) -> Result<Transcript, MatchError> {
    let mut m = Match::new(config, walker.name(), breaker.name())?;
    m.play(walker, breaker, stop)?;
    let cert = walker.certificate(m.state());
    m.finish(cert)
}

/// Stop predicate that never fires.
pub fn never(_: &GameState) -> bool {
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StartPolicy;

    struct Scripted(Vec<usize>);

    impl WalkerStrategy for Scripted {
        fn name(&self) -> &str {
            "scripted"
        }
        fn next_step(
            &mut self,
            _: &GameState,
            _: &mut ChaCha8Rng,
        ) -> Result<WalkerAction, StrategyError> {
            Ok(if self.0.is_empty() {
                WalkerAction::Done
            } else {
                WalkerAction::Step(self.0.remove(0))
            })
        }
    }

    struct LowestFree;

    impl BreakerStrategy for LowestFree {
        fn name(&self) -> &str {
            "lowest"
        }
        fn claim(
            &mut self,
            state: &GameState,
            _: &mut ChaCha8Rng,
        ) -> Result<Vec<EdgeId>, StrategyError> {
            let out = state.board().lowest_free_edges(
                EdgeId::new(0, 1),
                state.required_claim_count(),
                &[],
            );
            Ok(out)
        }
    }

    #[test]
    fn illegal_walker_move_is_a_fault() {
        let cfg = GameConfig::new(5, 1, Player::Breaker);
        let err = run_match(cfg, &mut Scripted(vec![1]), &mut LowestFree, &never).unwrap_err();
        match err {
            MatchError::StrategyFault {
                player: Player::Walker,
                offending,
                ..
            } => assert_eq!(offending, "W 0 1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chosen_start_is_recorded_and_replays() {
        let cfg = GameConfig::new(5, 1, Player::Walker).with_start(StartPolicy::StrategyChosen);
        struct Start4(Scripted);
        impl WalkerStrategy for Start4 {
            fn name(&self) -> &str {
                "start4"
            }
            fn choose_start(&mut self, _: &GameState, _: &mut ChaCha8Rng) -> usize {
                4
            }
            fn next_step(
                &mut self,
                s: &GameState,
                r: &mut ChaCha8Rng,
            ) -> Result<WalkerAction, StrategyError> {
                self.0.next_step(s, r)
            }
        }
        let t = run_match(
            cfg,
            &mut Start4(Scripted(vec![3, 2])),
            &mut LowestFree,
            &never,
        )
        .unwrap();
        let text = t.to_text();
        assert!(text.contains("start=chosen"));
        assert!(text.contains("W 4 3 0"));
        let back = Transcript::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.reexecute().unwrap().round(), 2);
    }
}
