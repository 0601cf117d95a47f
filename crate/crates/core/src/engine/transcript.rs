//! Line-oriented match records.
//!
//! ```text
//! WBGAME n=6 b=1 first=B seed=7 profile=scaled
//! # match walker=random breaker=isolate1 start=0
//! B 0-3
//! W 0 1 0
//! CYCLE 0 1 2
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use super::certificate::{validate_certificate, Certificate};
use super::edge::{EdgeId, Player};
use super::game::{EngineError, GameConfig, GameState, Move, StartPolicy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptHeader {
    pub n: usize,
    pub b: usize,
    pub first: Player,
    pub seed: u64,
    pub profile: String,
}

impl TranscriptHeader {
    pub fn from_config(config: &GameConfig) -> Self {
        Self {
            n: config.n,
            b: config.b,
            first: config.first_mover,
            seed: config.seed,
            profile: config.profile.clone(),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "WBGAME n={} b={} first={} seed={} profile={}",
            self.n,
            self.b,
            self.first.letter(),
            self.seed,
            self.profile
        )
    }

    pub fn parse(line: &str) -> Option<Self> {
        let mut parts = line.split(' ');
        if parts.next()? != "WBGAME" {
            return None;
        }
        let mut field = |key: &str| -> Option<String> {
            let p = parts.next()?;
            p.strip_prefix(key)?.strip_prefix('=').map(str::to_owned)
        };
        let n = field("n")?.parse().ok()?;
        let b = field("b")?.parse().ok()?;
        let first = Player::from_letter(&field("first")?)?;
        let seed = field("seed")?.parse().ok()?;
        let profile = field("profile")?;
        if profile.is_empty() || parts.next().is_some() {
            return None;
        }
        Some(Self {
            n,
            b,
            first,
            seed,
            profile,
        })
    }
}

/// Strategy names and start vertex, written as the first comment line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchMeta {
    pub walker: String,
    pub breaker: String,
    pub start: StartPolicy,
}

impl MatchMeta {
    pub fn render(&self) -> String {
        let start = match self.start {
            StartPolicy::Declared(v) => v.to_string(),
            StartPolicy::StrategyChosen => "chosen".to_string(),
        };
        format!(
            " match walker={} breaker={} start={}",
            self.walker, self.breaker, start
        )
    }

    pub fn parse(comment: &str) -> Option<Self> {
        let rest = comment.strip_prefix(" match ")?;
        let mut parts = rest.split(' ');
        let walker = parts.next()?.strip_prefix("walker=")?.to_owned();
        let breaker = parts.next()?.strip_prefix("breaker=")?.to_owned();
        let start = match parts.next()?.strip_prefix("start=")? {
            "chosen" => StartPolicy::StrategyChosen,
            v => StartPolicy::Declared(v.parse().ok()?),
        };
        Some(Self {
            walker,
            breaker,
            start,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    Move(Move),
    /// Text after the leading `#`.
    Comment(String),
}

impl Record {
    pub fn render(&self) -> String {
        match self {
            Record::Move(Move::WalkerStep { from, to, reused }) => {
                format!("W {from} {to} {}", u8::from(*reused))
            }
            Record::Move(Move::BreakerClaim(edges)) => {
                let mut s = String::from("B");
                for e in edges {
                    let _ = write!(s, " {e}");
                }
                s
            }
            Record::Comment(c) => format!("#{c}"),
        }
    }

    pub fn parse(line: &str) -> Option<Self> {
        if let Some(c) = line.strip_prefix('#') {
            return Some(Record::Comment(c.to_owned()));
        }
        let mut parts = line.split(' ');
        match parts.next()? {
            "W" => {
                let from = parts.next()?.parse().ok()?;
                let to = parts.next()?.parse().ok()?;
                let reused = match parts.next()? {
                    "0" => false,
                    "1" => true,
                    _ => return None,
                };
                if parts.next().is_some() {
                    return None;
                }
                Some(Record::Move(Move::WalkerStep { from, to, reused }))
            }
            "B" => {
                let edges = parts
                    .map(|p| p.parse::<EdgeId>().ok())
                    .collect::<Option<Vec<_>>>()?;
                Some(Record::Move(Move::BreakerClaim(edges)))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: cannot parse {text:?}")]
    Parse { line: usize, text: String },
    #[error("line {line}: expected {expected:?}, found {actual:?}")]
    Divergence {
        line: usize,
        expected: String,
        actual: String,
    },
    #[error("line {line}: {error}")]
    Illegal { line: usize, error: EngineError },
    #[error("line {line}: certificate does not hold on the final board")]
    InvalidCertificate { line: usize },
}

impl ReplayError {
    pub fn line(&self) -> usize {
        match self {
            ReplayError::Parse { line, .. }
            | ReplayError::Divergence { line, .. }
            | ReplayError::Illegal { line, .. }
            | ReplayError::InvalidCertificate { line } => *line,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub records: Vec<Record>,
    pub certificate: Option<Certificate>,
    /// Set by matches and by [`Transcript::reexecute`]; never serialized.
    pub final_state: Option<GameState>,
}

impl Transcript {
    pub fn new(header: TranscriptHeader) -> Self {
        Self {
            header,
            records: Vec::new(),
            certificate: None,
            final_state: None,
        }
    }

    pub fn meta(&self) -> Option<MatchMeta> {
        self.records.iter().find_map(|r| match r {
            Record::Comment(c) => MatchMeta::parse(c),
            _ => None,
        })
    }

    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.records.iter().filter_map(|r| match r {
            Record::Move(m) => Some(m),
            _ => None,
        })
    }

    pub fn walker_moves(&self) -> usize {
        self.moves()
            .filter(|m| matches!(m, Move::WalkerStep { .. }))
            .count()
    }

    pub fn comments(&self) -> impl Iterator<Item = &str> {
        self.records.iter().filter_map(|r| match r {
            Record::Comment(c) => Some(c.as_str()),
            _ => None,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header.render();
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.render());
            out.push('\n');
        }
        if let Some(c) = &self.certificate {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Each line must already be in canonical form,
    /// so that `parse(s)?.to_text() == s` for every accepted input.
    pub fn parse(text: &str) -> Result<Self, ReplayError> {
        let body = text.strip_suffix('\n').ok_or(ReplayError::Parse {
            line: 0,
            text: "missing final newline".into(),
        })?;
        let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));
        let (_, head) = lines.next().ok_or(ReplayError::Parse {
            line: 1,
            text: String::new(),
        })?;
        let header = TranscriptHeader::parse(head).ok_or_else(|| ReplayError::Parse {
            line: 1,
            text: head.into(),
        })?;
        expect_canonical(1, head, &header.render())?;
        let mut t = Transcript::new(header);
        for (no, line) in lines {
            if t.certificate.is_some() {
                return Err(ReplayError::Parse {
                    line: no,
                    text: line.into(),
                });
            }
            if line.starts_with("CYCLE") || line.starts_with("PATH") {
                let c: Certificate = line.parse().map_err(|_| ReplayError::Parse {
                    line: no,
                    text: line.into(),
                })?;
                expect_canonical(no, line, &c.to_string())?;
                t.certificate = Some(c);
                continue;
            }
            let r = Record::parse(line).ok_or_else(|| ReplayError::Parse {
                line: no,
                text: line.into(),
            })?;
            expect_canonical(no, line, &r.render())?;
            t.records.push(r);
        }
        Ok(t)
    }

    /// Re-executes every move through the engine, checking turn order,
    /// legality, the `reused` flags and the certificate.
    pub fn reexecute(&self) -> Result<GameState, ReplayError> {
        let meta = self.meta();
        let start = meta
            .as_ref()
            .map_or(StartPolicy::StrategyChosen, |m| m.start);
        let config = GameConfig {
            n: self.header.n,
            b: self.header.b,
            first_mover: self.header.first,
            start,
            profile: self.header.profile.clone(),
            seed: self.header.seed,
        };
        let mut state =
            GameState::new(config).map_err(|error| ReplayError::Illegal { line: 1, error })?;
        let mut turn = self.header.first;
        for (idx, r) in self.records.iter().enumerate() {
            let line = idx + 2;
            let Record::Move(m) = r else { continue };
            if turn == Player::Breaker && state.required_claim_count() == 0 {
                turn = Player::Walker;
            }
            match m {
                Move::WalkerStep { from, to, reused } => {
                    if turn != Player::Walker {
                        return Err(divergence(line, "a B line", r));
                    }
                    if state.position().is_none() {
                        state
                            .place_walker(*from)
                            .map_err(|error| ReplayError::Illegal { line, error })?;
                    }
                    if state.position() != Some(*from) {
                        let expected = format!("W {} ...", state.position().unwrap_or(usize::MAX));
                        return Err(divergence(line, &expected, r));
                    }
                    let was = state
                        .walker_step(*to)
                        .map_err(|error| ReplayError::Illegal { line, error })?;
                    if was != *reused {
                        return Err(divergence(
                            line,
                            &format!("W {from} {to} {}", u8::from(was)),
                            r,
                        ));
                    }
                }
                Move::BreakerClaim(edges) => {
                    if turn != Player::Breaker {
                        return Err(divergence(line, "a W line", r));
                    }
                    state
                        .breaker_claim(edges)
                        .map_err(|error| ReplayError::Illegal { line, error })?;
                }
            }
            turn = turn.other();
        }
        if let Some(c) = &self.certificate {
            if !validate_certificate(&state, c) {
                return Err(ReplayError::InvalidCertificate {
                    line: self.records.len() + 2,
                });
            }
        }
        Ok(state)
    }
}

fn expect_canonical(line: usize, actual: &str, expected: &str) -> Result<(), ReplayError> {
    if actual == expected {
        Ok(())
    } else {
        Err(ReplayError::Divergence {
            line,
            expected: expected.into(),
            actual: actual.into(),
        })
    }
}

fn divergence(line: usize, expected: &str, actual: &Record) -> ReplayError {
    ReplayError::Divergence {
        line,
        expected: expected.into(),
        actual: actual.render(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "WBGAME n=4 b=1 first=B seed=7 profile=scaled\n\
# match walker=x breaker=y start=0\n\
B 2-3\n\
W 0 1 0\n\
B 0-3\n\
W 1 2 0\n\
# note\n\
B 1-3\n\
W 2 0 0\n\
CYCLE 0 1 2\n";

    #[test]
    fn parse_render_is_identity() {
        let t = Transcript::parse(SAMPLE).unwrap();
        assert_eq!(t.to_text(), SAMPLE);
        assert_eq!(t.walker_moves(), 3);
        let state = t.reexecute().unwrap();
        assert_eq!(state.round(), 3);
    }

    #[test]
    fn edited_breaker_edge_is_caught() {
        let bad = SAMPLE.replace("B 0-3", "B 0-1");
        let err = Transcript::parse(&bad).unwrap().reexecute().unwrap_err();
        assert_eq!(err.line(), 5);
    }

    #[test]
    fn non_canonical_lines_diverge() {
        let bad = SAMPLE.replace("B 2-3", "B 3-2");
        assert!(matches!(
            Transcript::parse(&bad),
            Err(ReplayError::Divergence { line: 3, .. })
        ));
        let bad = SAMPLE.replace("W 0 1 0", "W 0 1 1");
        assert!(matches!(
            Transcript::parse(&bad).unwrap().reexecute(),
            Err(ReplayError::Divergence { line: 4, .. })
        ));
    }

    #[test]
    fn out_of_turn_moves_diverge() {
        let bad = SAMPLE.replace("B 2-3\n", "");
        assert!(matches!(
            Transcript::parse(&bad).unwrap().reexecute(),
            Err(ReplayError::Divergence { .. })
        ));
    }

    #[test]
    fn header_round_trip() {
        let h = TranscriptHeader {
            n: 10,
            b: 3,
            first: Player::Walker,
            seed: u64::MAX,
            profile: "paper".into(),
        };
        assert_eq!(TranscriptHeader::parse(&h.render()), Some(h));
        assert_eq!(TranscriptHeader::parse("WBGAME n=10"), None);
    }
}
