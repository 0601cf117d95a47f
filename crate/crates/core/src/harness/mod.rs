//! Experiment campaigns: JSON specs, trial fan-out, CSV and JSON output,
//! transcript replay.
//!
//! Trial `i` of a spec runs with seed `seed_base + i`. CSV files open with
//! a `# wbl-csv kind=<kind> version=<v>` line followed by the column row.
//!
//! | kind | columns |
//! |------|---------|
//! | `match` | trial, seed, walker, breaker, n, b, rounds, walker_moves, cycle_len, claim_violations, ledger_entries, ledger_failures, status |
//! | `tree` | trial, seed, breaker, n, b, vertices, vertex_floor, diameter, diameter_bound, rounds, round_bound, claim_violations, status |
//! | `compose2`, `compose3` | trial, seed, breaker, n, b, vstar, p, max_f_ii, f_ii_bound, min_d_h, d_h_bound, coin_tail, claim_violations, identity, cycle_len, status |
//!
//! `cycle_len`, `vertices` and `diameter` are recomputed from the replayed
//! transcript. `status` is `ok`, `fail` (an assertion failed) or `error`.

mod experiment;
pub mod registry;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{GameState, ReplayError, Transcript};

pub use experiment::{
    run_experiment, write_outputs, Aggregate, ExperimentOutcome, ExperimentSummary, TrialFailure,
};
pub use registry::{RegisteredBreaker, RegisteredWalker, BREAKERS, WALKERS};

pub const CSV_VERSION: u32 = 1;
/// Overrides the output directory of every experiment.
pub const OUT_DIR_ENV: &str = "WBL_OUT_DIR";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("malformed spec: {0}")]
    Malformed(String),
    #[error("unknown {role} strategy `{name}`")]
    UnknownStrategy { role: &'static str, name: String },
    #[error("unknown constants profile `{0}`")]
    UnknownProfile(String),
    #[error("assertion `{assertion}` does not apply to {kind} experiments")]
    Inapplicable { assertion: String, kind: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Any registered walker against any registered breaker.
    Match,
    /// `prop-diameter-tree` against a breaker.
    Tree,
    /// Tree builder followed by exposure play, Hamilton target.
    Compose2,
    /// Tree builder followed by exposure play, `C_k` target.
    Compose3,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Match => "match",
            Self::Tree => "tree",
            Self::Compose2 => "compose2",
            Self::Compose3 => "compose3",
        }
    }
}

/// Per-trial checks; a trial fails when any of them does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    /// The walker produced a certificate that holds on the replayed board.
    ValidCertificate,
    CycleAtLeast(usize),
    CycleAtMost(usize),
    /// `cycle_len >= n - k`.
    CycleDeficitAtMost(usize),
    /// `rounds <= factor * n`.
    RoundsPerNAtMost(f64),
    NoClaimViolations,
    /// Every recorded Property P entry holds.
    LedgerHolds,
    /// Vertex floor, diameter bound and round bound of the tree.
    TreeBounds,
    F2Bound,
    DhBound,
    /// Coin fairness at significance 0.01.
    CoinFairness,
    /// `d_{W \ W_0}(v) >= d_H(v) - f_II(v)` with equality on every vertex.
    DegreeIdentity,
    /// A Hamilton cycle or `C_k` was found.
    CycleFound,
    /// The transcript re-executes and re-renders byte for byte.
    Replay,
}

impl Assertion {
    fn applies_to(&self, kind: ExperimentKind) -> bool {
        use Assertion::*;
        use ExperimentKind::*;
        match self {
            Replay | NoClaimViolations => true,
            ValidCertificate
            | CycleAtLeast(_)
            | CycleAtMost(_)
            | CycleDeficitAtMost(_)
            | LedgerHolds => kind == Match,
            RoundsPerNAtMost(_) => matches!(kind, Match | Tree),
            TreeBounds => kind == Tree,
            F2Bound | DhBound | CoinFairness | DegreeIdentity | CycleFound => {
                matches!(kind, Compose2 | Compose3)
            }
        }
    }
}

fn default_first() -> String {
    "B".into()
}

fn default_profile() -> String {
    "paper".into()
}

fn default_epsilon() -> f64 {
    0.25
}

fn default_gamma() -> f64 {
    1.0
}

fn default_c() -> f64 {
    1.5
}

fn default_k() -> usize {
    3
}

/// Parameters of the composed strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeParams {
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Edge probability; the default depends on the kind.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_c")]
    pub c: f64,
}

impl Default for ComposeParams {
    fn default() -> Self {
        Self {
            epsilon: default_epsilon(),
            p: None,
            k: default_k(),
            gamma: default_gamma(),
            c: default_c(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub n: usize,
    #[serde(default)]
    pub b: usize,
    /// `W` or `B`.
    #[serde(default = "default_first")]
    pub first: String,
    #[serde(default = "default_profile")]
    pub profile: String,
    /// Required for `match`; ignored otherwise.
    #[serde(default)]
    pub walker: Option<String>,
    pub breaker: String,
    pub trials: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
    #[serde(default)]
    pub params: ComposeParams,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Also write every transcript under `<out>/<name>.transcripts/`.
    #[serde(default)]
    pub keep_transcripts: bool,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!(
                "experiment name `{}` is not a plain file stem",
                self.name
            ));
        }
        if self.n < 3 {
            return bad(format!("n = {} below 3", self.n));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if crate::engine::Player::from_letter(&self.first).is_none() {
            return bad(format!("first mover `{}` is neither W nor B", self.first));
        }
        let profile = crate::profile::ConstantsProfile::named(&self.profile)
            .ok_or_else(|| ConfigError::UnknownProfile(self.profile.clone()))?;
        RegisteredBreaker::build(&self.breaker)?;
        match (self.kind, &self.walker) {
            (ExperimentKind::Match, None) => return bad("match experiments need a walker".into()),
            (ExperimentKind::Match, Some(w)) => {
                RegisteredWalker::build(w, &profile)?;
            }
            _ => {}
        }
        for a in &self.assertions {
            if !a.applies_to(self.kind) {
                return Err(ConfigError::Inapplicable {
                    assertion: serde_json::to_string(a).unwrap_or_default(),
                    kind: self.kind.label().into(),
                });
            }
        }
        let p = &self.params;
        if !(p.epsilon > 0.0 && p.epsilon < 1.0) || p.p.is_some_and(|p| !(p > 0.0 && p <= 1.0)) {
            return bad("epsilon and p must lie in (0, 1)".into());
        }
        if self.kind == ExperimentKind::Compose3 && (p.k < 3 || p.gamma <= 0.0 || p.c <= 0.0) {
            return bad("compose3 needs k >= 3 and positive gamma, C".into());
        }
        Ok(())
    }

    /// SHA-256 of the spec re-serialized as compact JSON.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("spec serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Output directory: the environment override, then the spec, then `.`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| self.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub n: usize,
    pub b: usize,
    pub moves: usize,
    pub walker_moves: usize,
    pub rounds: usize,
    pub certificate_len: Option<usize>,
}

/// Re-executes a transcript and checks that it re-renders to the same text.
pub fn replay_text(text: &str) -> Result<(ReplayReport, GameState), ReplayError> {
    let t = Transcript::parse(text)?;
    let rendered = t.to_text();
    if rendered != text {
        let line = rendered
            .lines()
            .zip(text.lines())
            .position(|(a, b)| a != b)
            .unwrap_or(0)
            + 1;
        return Err(ReplayError::Divergence {
            line,
            expected: rendered.lines().nth(line - 1).unwrap_or_default().into(),
            actual: text.lines().nth(line - 1).unwrap_or_default().into(),
        });
    }
    let state = t.reexecute()?;
    let report = ReplayReport {
        n: t.header.n,
        b: t.header.b,
        moves: t.moves().count(),
        walker_moves: t.walker_moves(),
        rounds: state.round(),
        certificate_len: t.certificate.as_ref().map(|c| c.len()),
    };
    Ok((report, state))
}

pub fn replay(path: &std::path::Path) -> Result<ReplayReport, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.into(),
        source,
    })?;
    Ok(replay_text(&text)?.0)
}

#[cfg(test)]
mod tests;
