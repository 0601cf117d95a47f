use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    replay_text, Assertion, ExperimentKind, ExperimentSpec, HarnessError, RegisteredBreaker,
    RegisteredWalker,
};
use crate::diameter::build_low_diameter_tree;
use crate::engine::{
    never, run_match, validate_certificate, Certificate, GameConfig, GameState, Player,
};
use crate::graph;
use crate::profile::ConstantsProfile;
use crate::randomized::{compose_theorem2, compose_theorem3, Theorem2Config, Theorem3Config};

const MATCH_COLUMNS: &[&str] = &[
    "trial",
    "seed",
    "walker",
    "breaker",
    "n",
    "b",
    "rounds",
    "walker_moves",
    "cycle_len",
    "claim_violations",
    "ledger_entries",
    "ledger_failures",
    "status",
];
const TREE_COLUMNS: &[&str] = &[
    "trial",
    "seed",
    "breaker",
    "n",
    "b",
    "vertices",
    "vertex_floor",
    "diameter",
    "diameter_bound",
    "rounds",
    "round_bound",
    "claim_violations",
    "status",
];
const COMPOSE_COLUMNS: &[&str] = &[
    "trial",
    "seed",
    "breaker",
    "n",
    "b",
    "vstar",
    "p",
    "max_f_ii",
    "f_ii_bound",
    "min_d_h",
    "d_h_bound",
    "coin_tail",
    "claim_violations",
    "identity",
    "cycle_len",
    "status",
];

fn columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::Match => MATCH_COLUMNS,
        ExperimentKind::Tree => TREE_COLUMNS,
        ExperimentKind::Compose2 | ExperimentKind::Compose3 => COMPOSE_COLUMNS,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub spec_hash: String,
    pub trials: usize,
    pub failures: Vec<TrialFailure>,
    /// Over the numeric columns of trials that did not error.
    pub aggregates: BTreeMap<String, Aggregate>,
}

pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub summary: ExperimentSummary,
    pub csv: String,
    /// Transcript text per trial; `None` when the trial errored before one existed.
    pub transcripts: Vec<Option<String>>,
}

struct Trial {
    values: BTreeMap<&'static str, String>,
    failures: Vec<String>,
    errored: bool,
    transcript: Option<String>,
}

impl Trial {
    fn new(trial: usize, seed: u64) -> Self {
        let mut values = BTreeMap::new();
        values.insert("trial", trial.to_string());
        values.insert("seed", seed.to_string());
        Self {
            values,
            failures: Vec::new(),
            errored: false,
            transcript: None,
        }
    }

    fn set(&mut self, col: &'static str, v: impl ToString) {
        self.values.insert(col, v.to_string());
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, msg: String) {
        self.errored = true;
        self.failures.push(msg);
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// Replays `text`, recording a failure when it does not reproduce.
fn replayed(trial: &mut Trial, text: String, wanted: bool) -> Option<GameState> {
    let res = replay_text(&text);
    trial.transcript = Some(text);
    match res {
        Ok((_, state)) => Some(state),
        Err(e) => {
            if wanted {
                trial.failures.push(format!("replay: {e}"));
            } else {
                trial.error(format!("replay: {e}"));
            }
            None
        }
    }
}

fn cycle_len_on(state: &GameState, cert: Option<&Certificate>) -> usize {
    cert.filter(|c| validate_certificate(state, c))
        .map_or(0, |c| c.len())
}

fn run_match_trial(
    spec: &ExperimentSpec,
    profile: &ConstantsProfile,
    trial: &mut Trial,
    seed: u64,
) {
    let first = Player::from_letter(&spec.first).expect("validated");
    let name = spec.walker.as_deref().expect("validated");
    let mut walker = RegisteredWalker::build(name, profile).expect("validated");
    let mut breaker = RegisteredBreaker::build(&spec.breaker).expect("validated");
    trial.set("walker", name);
    let cfg = GameConfig::new(spec.n, spec.b, first)
        .with_seed(seed)
        .with_profile(&spec.profile);
    let t = match run_match(cfg, &mut walker, &mut breaker, &never) {
        Ok(t) => t,
        Err(e) => return trial.error(format!("seed {seed}: {e}")),
    };
    let cert = t.certificate.clone();
    let Some(state) = replayed(
        trial,
        t.to_text(),
        spec.assertions.contains(&Assertion::Replay),
    ) else {
        return;
    };
    let cycle = cycle_len_on(&state, cert.as_ref());
    let (entries, bad) = walker.ledger();
    trial.set("rounds", state.round());
    trial.set("walker_moves", t.walker_moves());
    trial.set("cycle_len", cycle);
    trial.set("claim_violations", walker.claim_violations());
    trial.set("ledger_entries", entries);
    trial.set("ledger_failures", bad);
    let n = spec.n;
    for a in &spec.assertions {
        match a {
            Assertion::ValidCertificate => trial.check(cycle > 0, || "no valid certificate".into()),
            Assertion::CycleAtLeast(l) => {
                trial.check(cycle >= *l, || format!("cycle {cycle} < {l}"))
            }
            Assertion::CycleAtMost(l) => {
                trial.check(cycle <= *l, || format!("cycle {cycle} > {l}"))
            }
            Assertion::CycleDeficitAtMost(k) => {
                trial.check(cycle + k >= n, || format!("cycle {cycle} < n - {k}"))
            }
            Assertion::RoundsPerNAtMost(f) => {
                let r = state.round();
                trial.check(r as f64 <= f * n as f64, || format!("{r} rounds > {f} n"))
            }
            Assertion::NoClaimViolations => {
                let c = walker.claim_violations();
                trial.check(c == 0, || format!("{c} claim violations"))
            }
            Assertion::LedgerHolds => trial.check(bad == 0, || {
                format!("{bad} of {entries} ledger entries fail")
            }),
            _ => {}
        }
    }
}

fn run_tree_trial(spec: &ExperimentSpec, profile: &ConstantsProfile, trial: &mut Trial, seed: u64) {
    let first = Player::from_letter(&spec.first).expect("validated");
    let mut breaker = RegisteredBreaker::build(&spec.breaker).expect("validated");
    let cfg = GameConfig::new(spec.n, spec.b, first)
        .with_seed(seed)
        .with_profile(&spec.profile);
    let (t, report) = match build_low_diameter_tree(cfg, profile.clone(), &mut breaker) {
        Ok(x) => x,
        Err(e) => return trial.error(format!("seed {seed}: {e}")),
    };
    let Some(state) = replayed(
        trial,
        t.to_text(),
        spec.assertions.contains(&Assertion::Replay),
    ) else {
        return;
    };
    let adj = graph::walker_adjacency(&state);
    let root = state.start_vertex().unwrap_or(0);
    let dist = graph::bfs_distances(&adj, root);
    let vertices = dist.iter().filter(|&&d| d != graph::UNREACHED).count();
    let edges: usize = (0..adj.len())
        .filter(|&v| dist[v] != graph::UNREACHED)
        .map(|v| adj[v].len())
        .sum::<usize>()
        / 2;
    let is_tree = edges + 1 == vertices;
    let diameter = graph::double_sweep_diameter(&adj, root) as usize;
    trial.set("vertices", vertices);
    trial.set("vertex_floor", report.vertex_floor);
    trial.set("diameter", diameter);
    trial.set("diameter_bound", report.diameter_bound);
    trial.set("rounds", state.round());
    trial.set("round_bound", report.round_bound);
    trial.set("claim_violations", report.claim_violations);
    for a in &spec.assertions {
        match a {
            Assertion::TreeBounds => {
                trial.check(is_tree, || {
                    format!("walker graph has {edges} edges on {vertices} vertices")
                });
                trial.check(vertices >= report.vertex_floor, || {
                    format!("{vertices} vertices < {}", report.vertex_floor)
                });
                trial.check(diameter <= report.diameter_bound, || {
                    format!("diameter {diameter} > {}", report.diameter_bound)
                });
                trial.check(state.round() <= report.round_bound, || {
                    format!("{} rounds > {}", state.round(), report.round_bound)
                });
            }
            Assertion::RoundsPerNAtMost(f) => {
                let r = state.round();
                trial.check(r as f64 <= f * spec.n as f64, || {
                    format!("{r} rounds > {f} n")
                })
            }
            Assertion::NoClaimViolations => {
                let c = report.claim_violations;
                trial.check(c == 0, || format!("{c} claim violations"))
            }
            _ => {}
        }
    }
}

fn run_compose_trial(
    spec: &ExperimentSpec,
    profile: &ConstantsProfile,
    trial: &mut Trial,
    seed: u64,
) {
    let first = Player::from_letter(&spec.first).expect("validated");
    let mut breaker = RegisteredBreaker::build(&spec.breaker).expect("validated");
    let p = &spec.params;
    let res = match spec.kind {
        ExperimentKind::Compose2 => {
            let cfg = Theorem2Config {
                n: spec.n,
                b: spec.b,
                seed,
                epsilon: p.epsilon,
                p: p.p,
                first_mover: first,
            };
            compose_theorem2(&cfg, profile, &mut breaker)
        }
        _ => {
            let b = (spec.b > 0).then_some(spec.b);
            let cfg = Theorem3Config {
                n: spec.n,
                k: p.k,
                seed,
                gamma: p.gamma,
                c: p.c,
                b,
                first_mover: first,
            };
            compose_theorem3(&cfg, profile, &mut breaker)
        }
    };
    let out = match res {
        Ok(o) => o,
        Err(e) => return trial.error(format!("seed {seed}: {e}")),
    };
    let r = &out.report;
    let Some(state) = replayed(
        trial,
        out.transcript.to_text(),
        spec.assertions.contains(&Assertion::Replay),
    ) else {
        return;
    };
    let cycle = out.cycle.clone().map(Certificate::cycle);
    let cycle_len = cycle_len_on(&state, cycle.as_ref());
    trial.set("b", r.b);
    trial.set("vstar", out.vstar.len());
    trial.set("p", fmt_f(r.p));
    trial.set("max_f_ii", r.max_f_ii);
    trial.set("f_ii_bound", fmt_f(r.f_ii_bound));
    trial.set("min_d_h", r.min_d_h);
    trial.set("d_h_bound", fmt_f(r.d_h_bound));
    trial.set("coin_tail", fmt_f(r.coin_tail));
    trial.set("claim_violations", r.claim_violations.len());
    trial.set("identity", r.identity_holds);
    trial.set("cycle_len", cycle_len);
    for a in &spec.assertions {
        match a {
            Assertion::F2Bound => trial.check(r.f_ii_ok, || {
                format!("max f_II {} > {:.2}", r.max_f_ii, r.f_ii_bound)
            }),
            Assertion::DhBound => trial.check(r.d_h_ok, || {
                format!("min d_H {} < {:.2}", r.min_d_h, r.d_h_bound)
            }),
            Assertion::CoinFairness => trial.check(r.coin_ok(), || {
                format!("coin chi-square tail {:.4}", r.coin_tail)
            }),
            Assertion::DegreeIdentity => {
                trial.check(r.identity_holds, || "degree identity fails".into())
            }
            Assertion::CycleFound => {
                trial.check(cycle_len > 0, || "no target cycle in W \\ W_0".into())
            }
            Assertion::NoClaimViolations => {
                let c = r.claim_violations.len();
                trial.check(c == 0, || format!("{c} claim violations"))
            }
            _ => {}
        }
    }
}

/// Runs every trial of `spec` (in parallel) and assembles the CSV and
/// the summary. Nothing is written to disk.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome, HarnessError> {
    spec.validate()?;
    let profile = ConstantsProfile::named(&spec.profile).expect("validated");
    let trials: Vec<Trial> = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let seed = spec.seed_base.wrapping_add(i as u64);
            let mut trial = Trial::new(i, seed);
            trial.set("breaker", &spec.breaker);
            trial.set("n", spec.n);
            trial.set("b", spec.b);
            match spec.kind {
                ExperimentKind::Match => run_match_trial(spec, &profile, &mut trial, seed),
                ExperimentKind::Tree => run_tree_trial(spec, &profile, &mut trial, seed),
                ExperimentKind::Compose2 | ExperimentKind::Compose3 => {
                    run_compose_trial(spec, &profile, &mut trial, seed)
                }
            }
            let status = if trial.errored {
                "error"
            } else if trial.failures.is_empty() {
                "ok"
            } else {
                "fail"
            };
            trial.set("status", status);
            trial
        })
        .collect();

    let cols = columns(spec.kind);
    let mut csv = format!(
        "# wbl-csv kind={} version={}\n{}\n",
        spec.kind.label(),
        super::CSV_VERSION,
        cols.join(",")
    );
    for t in &trials {
        let row: Vec<&str> = cols
            .iter()
            .map(|c| t.values.get(c).map_or("", String::as_str))
            .collect();
        let _ = writeln!(csv, "{}", row.join(","));
    }

    let mut aggregates = BTreeMap::new();
    for &c in cols.iter().filter(|&&c| c != "trial" && c != "seed") {
        let xs: Vec<f64> = trials
            .iter()
            .filter(|t| !t.errored)
            .filter_map(|t| t.values.get(c).and_then(|v| v.parse::<f64>().ok()))
            .collect();
        if xs.is_empty() {
            continue;
        }
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        aggregates.insert(c.to_string(), Aggregate { min, max, mean });
    }
    let failures = trials
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.failures.is_empty())
        .map(|(i, t)| TrialFailure {
            trial: i,
            seed: spec.seed_base.wrapping_add(i as u64),
            reasons: t.failures.clone(),
        })
        .collect();
    let summary = ExperimentSummary {
        spec_hash: spec.hash(),
        trials: trials.len(),
        failures,
        aggregates,
    };
    let transcripts = trials.into_iter().map(|t| t.transcript).collect();
    Ok(ExperimentOutcome {
        spec: spec.clone(),
        summary,
        csv,
        transcripts,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.into(),
        source,
    })
}

/// Writes `<name>.csv`, `<name>.json` and, if requested, the transcripts
/// into `dir`. Returns the paths written.
pub fn write_outputs(
    outcome: &ExperimentOutcome,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| HarnessError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let name = &outcome.spec.name;
    let csv = dir.join(format!("{name}.csv"));
    let json = dir.join(format!("{name}.json"));
    write(&csv, &outcome.csv)?;
    let mut summary = serde_json::to_string_pretty(&outcome.summary).expect("summary serializes");
    summary.push('\n');
    write(&json, &summary)?;
    let mut out = vec![csv, json];
    if outcome.spec.keep_transcripts {
        let sub = dir.join(format!("{name}.transcripts"));
        std::fs::create_dir_all(&sub).map_err(io(&sub))?;
        for (i, t) in outcome.transcripts.iter().enumerate() {
            if let Some(text) = t {
                let p = sub.join(format!("trial_{i:04}.txt"));
                write(&p, text)?;
                out.push(p);
            }
        }
    }
    Ok(out)
}
