//! Randomized exposure play: Walker generates `H ~ G(n, p)` coin by coin on
//! a vertex set `V*`, claiming every success she can reach, with a MinBox
//! game choosing where to expose next.

mod compose;
mod exposure;
mod router;
mod vstar;

use std::collections::VecDeque;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::diameter::BuildFailure;
use crate::engine::{
    BreakerStrategy, EdgeId, GameState, Match, MatchError, Move, PlayOutcome, StrategyError,
    WalkerAction, WalkerStrategy,
};
use crate::graph;
use crate::minbox::MinBoxState;
use crate::profile::{ClaimLog, ConstantsProfile};

pub use compose::{
    compose_theorem2, compose_theorem3, ComposeOutcome, Theorem2Config, Theorem3Config,
};
pub use exposure::{
    coin_chi_square, geometric, CoinBin, ExposureOutcome, ExposureState, COIN_BINS,
};
pub use router::W0Router;
pub use vstar::{check_preconditions, select_vstar, PreconditionReport};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum RandError {
    #[error("invalid randomized config: {0}")]
    InvalidConfig(String),
    #[error("bias {b} exceeds eps/(30(d+1)p) = {bound:.4}")]
    BiasTooLarge { b: usize, bound: f64 },
    #[error("preconditions failed: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("could not select {target} vertices of degree below {max_degree}: {detail}")]
    SelectionFailed {
        target: usize,
        max_degree: usize,
        detail: String,
    },
    #[error("no vertex is red")]
    NotRed,
    #[error("walker is at {position}, red vertex is {red}")]
    NotAtRedVertex { position: usize, red: usize },
    #[error(transparent)]
    Build(#[from] BuildFailure),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandConfig {
    pub epsilon: f64,
    pub p: f64,
    /// Every two vertices of `V*` are joined in `W_0` by a path of at most `d` edges.
    pub d: usize,
}

impl RandConfig {
    /// `eps / (30 (d + 1) p)`.
    pub fn bias_bound(&self) -> f64 {
        self.epsilon / (30.0 * (self.d as f64 + 1.0) * self.p)
    }

    /// MinBox bias `2b(d + 1)`.
    pub fn box_bias(&self, b: usize) -> usize {
        2 * b * (self.d + 1)
    }

    /// Checks the parameters for `n` exposure vertices against Breaker bias `b`.
    /// Hard errors come back as `Err`; soft findings as the list.
    pub fn validate(
        &self,
        n: usize,
        b: usize,
        profile: &ConstantsProfile,
    ) -> Result<Vec<String>, RandError> {
        let k = &profile.random;
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(RandError::InvalidConfig(format!(
                "p = {} outside (0, 1]",
                self.p
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= k.epsilon_max) {
            return Err(RandError::InvalidConfig(format!(
                "epsilon = {} outside (0, {}]",
                self.epsilon, k.epsilon_max
            )));
        }
        if n < 2 {
            return Err(RandError::InvalidConfig(format!("{n} exposure vertices")));
        }
        if k.enforce_bias_bound && b as f64 > self.bias_bound() {
            return Err(RandError::BiasTooLarge {
                b,
                bound: self.bias_bound(),
            });
        }
        let mut soft = Vec::new();
        let floor = (n as f64).ln() / (self.epsilon * n as f64);
        if self.p < floor {
            let msg = format!("p = {:.3e} below ln n/(eps n) = {floor:.3e}", self.p);
            if profile.strict {
                return Err(RandError::InvalidConfig(msg));
            }
            soft.push(msg);
        }
        if b as f64 > self.bias_bound() {
            soft.push(format!(
                "b = {b} above eps/(30(d+1)p) = {:.3}",
                self.bias_bound()
            ));
        }
        Ok(soft)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandStage {
    Exposure,
    Done,
}

/// Per-vertex outcome of a run, indexed by position in `V*`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VertexStats {
    pub d_h: Vec<u32>,
    pub d_new: Vec<u32>,
    pub f_i: Vec<u32>,
    pub f_ii: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub n: usize,
    pub b: usize,
    pub p: f64,
    pub epsilon: f64,
    pub d: usize,
    pub max_f_ii: u32,
    pub min_d_h: u32,
    /// Smallest `d_{W\W_0}(v) / d_H(v)` over vertices with `d_H(v) > 0`.
    pub min_ratio: f64,
    pub max_active_danger: i64,
    pub hamiltonian: Option<bool>,
    pub has_ck: Option<bool>,
    /// Vertices of the whole board.
    pub board_n: usize,
    /// `f2_mult · eps · n · p`.
    pub f_ii_bound: f64,
    /// `dh_frac · n · p`.
    pub d_h_bound: f64,
    pub f_ii_ok: bool,
    pub d_h_ok: bool,
    pub rounds: usize,
    pub exposures: u64,
    pub type_one: u64,
    pub type_two: u64,
    pub claimed: u64,
    pub flush_coins: u64,
    pub flush_hits: u64,
    pub h_edges: usize,
    pub identity_holds: bool,
    pub coin_bins: Vec<CoinBin>,
    pub coin_chi2: f64,
    pub coin_dof: usize,
    pub coin_tail: f64,
    pub max_w_b: usize,
    pub max_w_m: usize,
    pub max_clearance: usize,
    pub max_breaker_gap: usize,
    pub claim_violations: Vec<String>,
    pub precondition_notes: Vec<String>,
    #[serde(skip)]
    pub vertices: VertexStats,
}

impl RunReport {
    pub fn coin_ok(&self) -> bool {
        self.coin_tail >= 0.01
    }
}

/// Walker's side of the exposure game on `V*`.
pub struct RandomizedWalker {
    cfg: RandConfig,
    strict: bool,
    f2_mult: f64,
    dh_frac: f64,
    vstar: Vec<usize>,
    local: Vec<u32>,
    exposure: ExposureState,
    boxes: MinBoxState,
    router: W0Router,
    w0_keys: FxHashSet<u64>,
    seen_moves: usize,
    start_round: usize,
    red: Option<(usize, usize)>,
    route: VecDeque<usize>,
    stage: RandStage,
    claims: ClaimLog,
    grant: usize,
    breaker_gap: usize,
    max_breaker_gap: usize,
    max_clearance: usize,
    max_active_danger: i64,
    exposures: u64,
    type_one: u64,
    type_two: u64,
    claimed: u64,
    flush: (u64, u64),
    events: Vec<String>,
}

impl RandomizedWalker {
    /// Snapshots `W_0` from `state` and sets up one box of size `4N` per
    /// vertex of `vstar`.
    pub fn new(
        state: &GameState,
        vstar: &[usize],
        cfg: RandConfig,
        profile: &ConstantsProfile,
    ) -> Result<Self, RandError> {
        let n = state.n();
        let mut vstar = vstar.to_vec();
        vstar.sort_unstable();
        vstar.dedup();
        if vstar.len() < 2 || vstar.last().is_some_and(|&v| v >= n) {
            return Err(RandError::InvalidConfig(format!(
                "bad exposure set of {} vertices",
                vstar.len()
            )));
        }
        let big_n = vstar.len();
        let mut local = vec![NONE; n];
        for (i, &v) in vstar.iter().enumerate() {
            local[v] = i as u32;
        }
        let adj = graph::walker_adjacency(state);
        let mut w0_keys = FxHashSet::default();
        for (u, row) in adj.iter().enumerate() {
            for &w in row.iter().filter(|&&w| w > u) {
                w0_keys.insert(EdgeId::new(u, w).key());
            }
        }
        let root = state
            .position()
            .or(state.start_vertex())
            .unwrap_or(vstar[0]);
        let grant = ((2.0 * cfg.p * big_n as f64).floor() as usize).saturating_sub(1);
        Ok(Self {
            cfg,
            strict: profile.strict,
            f2_mult: profile.random.f2_mult,
            dh_frac: profile.random.dh_frac,
            local,
            exposure: ExposureState::new(big_n),
            boxes: MinBoxState::uniform(big_n, 4 * big_n, cfg.p / 2.0, cfg.box_bias(state.bias())),
            router: W0Router::new(adj, root),
            w0_keys,
            seen_moves: state.moves().len(),
            start_round: state.round(),
            red: None,
            route: VecDeque::new(),
            stage: RandStage::Exposure,
            claims: ClaimLog::default(),
            grant,
            breaker_gap: 0,
            max_breaker_gap: 0,
            max_clearance: 0,
            max_active_danger: 0,
            exposures: 0,
            type_one: 0,
            type_two: 0,
            claimed: 0,
            flush: (0, 0),
            events: Vec::new(),
            vstar,
        })
    }

    pub fn config(&self) -> &RandConfig {
        &self.cfg
    }

    pub fn vstar(&self) -> &[usize] {
        &self.vstar
    }

    pub fn stage(&self) -> RandStage {
        self.stage
    }

    pub fn exposure(&self) -> &ExposureState {
        &self.exposure
    }

    pub fn boxes(&self) -> &MinBoxState {
        &self.boxes
    }

    pub fn router(&self) -> &W0Router {
        &self.router
    }

    /// Red vertex as a board index.
    pub fn red(&self) -> Option<usize> {
        self.red.map(|(v, _)| self.vstar[v])
    }

    pub fn claim_log(&self) -> &ClaimLog {
        &self.claims
    }

    pub fn is_w0_edge(&self, a: usize, b: usize) -> bool {
        EdgeId::try_new(a, b).is_some_and(|e| self.w0_keys.contains(&e.key()))
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> Result<(), StrategyError> {
        self.claims
            .check(self.strict, ok, what)
            .map_err(|m| StrategyError::claim("randomized", m))
    }

    fn local_of(&self, v: usize) -> Option<usize> {
        let l = self.local[v];
        (l != NONE).then_some(l as usize)
    }

    /// Feeds Breaker's edges inside `V*` into the boxes, one element per endpoint.
    fn absorb_breaker(&mut self, state: &GameState) -> Result<(), StrategyError> {
        let moves = &state.moves()[self.seen_moves..];
        self.seen_moves = state.moves().len();
        let mut touched = Vec::new();
        for m in moves {
            if let Move::BreakerClaim(edges) = m {
                for e in edges {
                    let (Some(a), Some(b)) = (self.local_of(e.u()), self.local_of(e.v())) else {
                        continue;
                    };
                    for x in [a, b] {
                        self.breaker_gap += self.boxes.breaker_take(x, 1);
                        touched.push(x);
                    }
                }
            }
        }
        let big_n = self.vstar.len();
        let limit = self.cfg.epsilon * big_n as f64 / 5.0;
        for x in touched {
            let r = self.boxes.record(x);
            self.check(r.w_b < big_n, || {
                format!("w_B(S_{x}) = {} reached N = {big_n}", r.w_b)
            })?;
            let watched = self.boxes.is_active(x) && !self.exposure.unexposed(x).is_empty();
            self.check(!watched || (r.w_b as f64) < limit, || {
                format!(
                    "active S_{x} with U_v nonempty has w_B = {} >= eps N/5 = {limit:.1}",
                    r.w_b
                )
            })?;
        }
        Ok(())
    }

    fn maker_took(&mut self, x: usize) -> Result<(), StrategyError> {
        let w_m = self.boxes.record(x).w_m;
        let cap = (1.0 + 2.0 * self.cfg.p) * self.vstar.len() as f64;
        self.check((w_m as f64) < cap, || {
            format!("w_M(S_{x}) = {w_m} reached (1+2p)N = {cap:.1}")
        })?;
        if let Some(d) = self.boxes.max_active_danger() {
            self.max_active_danger = self.max_active_danger.max(d);
        }
        Ok(())
    }

    /// Picks the red vertex, Maker's move on its box. `None` means Stage II.
    pub fn select_exposure_vertex(&mut self, round: usize) -> Result<Option<usize>, StrategyError> {
        debug_assert!(self.red.is_none());
        let Some(v) = self.boxes.maker_move_max_danger() else {
            return Ok(None);
        };
        let gap = self.breaker_gap;
        let bias = self.boxes.bias();
        self.max_breaker_gap = self.max_breaker_gap.max(gap);
        self.check(gap <= bias, || {
            format!("{gap} Breaker elements between Maker moves, budget {bias}")
        })?;
        self.breaker_gap = 0;
        self.maker_took(v)?;
        self.red = Some((v, round));
        Ok(Some(v))
    }

    fn reuse_w0(&self, pos: usize) -> Result<WalkerAction, StrategyError> {
        self.router
            .first_neighbor(pos)
            .map(WalkerAction::Step)
            .ok_or_else(|| {
                StrategyError::stuck("randomized", format!("vertex {pos} has no W_0 edge"))
            })
    }

    fn clear_red(&mut self, round: usize) -> Result<(), StrategyError> {
        let (_, since) = self.red.take().expect("red");
        let took = round - since + 1;
        self.max_clearance = self.max_clearance.max(took);
        let d = self.cfg.d;
        self.check(took <= d + 1, || {
            format!(
                "red vertex cleared after {took} rounds, bound d + 1 = {}",
                d + 1
            )
        })
    }

    /// Exposure at the red vertex, which must be Walker's position.
    pub fn expose_red(
        &mut self,
        state: &GameState,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        let (v, _) = self
            .red
            .ok_or_else(|| StrategyError::Other(RandError::NotRed.to_string()))?;
        let pos = state
            .position()
            .ok_or_else(|| StrategyError::stuck("randomized", "no position"))?;
        if pos != self.vstar[v] {
            let err = RandError::NotAtRedVertex {
                position: pos,
                red: self.vstar[v],
            };
            return Err(StrategyError::Other(err.to_string()));
        }
        let round = state.round();
        self.exposures += 1;
        let out = self.exposure.expose(v, self.cfg.p, rng);
        self.clear_red(round)?;
        match out {
            ExposureOutcome::TypeOne { .. } => {
                self.type_one += 1;
                self.boxes.maker_take(v, self.grant);
                self.maker_took(v)?;
                self.reuse_w0(pos)
            }
            ExposureOutcome::Success { to, .. } => {
                let target = self.vstar[to];
                if state.is_free(pos, target) {
                    self.claimed += 1;
                    self.boxes.maker_take(to, 1);
                    self.maker_took(to)?;
                    Ok(WalkerAction::Step(target))
                } else {
                    self.type_two += 1;
                    self.exposure.type_two(v, to);
                    self.reuse_w0(pos)
                }
            }
        }
    }

    fn finish_stage(&mut self, rng: &mut rand_chacha::ChaCha8Rng) -> WalkerAction {
        self.flush = self.exposure.flush(self.cfg.p, rng);
        self.stage = RandStage::Done;
        self.events.push(format!(
            "randomized stage II: {} coins, {} successes, {} exposures",
            self.flush.0, self.flush.1, self.exposures
        ));
        WalkerAction::Done
    }

    /// `d_{W\W_0}(v)` inside `V*`, recounted from the board.
    pub fn new_degrees(&self, state: &GameState) -> Vec<u32> {
        self.vstar
            .iter()
            .map(|&v| {
                let mut k = 0;
                state.board().for_each_walker_neighbor(v, |u| {
                    if self.local[u] != NONE && !self.is_w0_edge(u, v) {
                        k += 1;
                    }
                });
                k
            })
            .collect()
    }

    /// `W \ W_0` restricted to `V*`, as rows over local indices.
    pub fn new_graph_rows(&self, state: &GameState) -> Vec<BitSet> {
        let big_n = self.vstar.len();
        self.vstar
            .iter()
            .map(|&v| {
                let mut row = BitSet::new(big_n);
                state.board().for_each_walker_neighbor(v, |u| {
                    if self.local[u] != NONE && !self.is_w0_edge(u, v) {
                        row.insert(self.local[u] as usize);
                    }
                });
                row
            })
            .collect()
    }

    pub fn report(&self, state: &GameState) -> RunReport {
        let big_n = self.vstar.len();
        let nf = big_n as f64;
        let e = &self.exposure;
        let d_new = self.new_degrees(state);
        let d_h = e.d_h().to_vec();
        let f_ii = e.f_two().to_vec();
        let identity_holds = (0..big_n).all(|v| d_new[v] as i64 >= d_h[v] as i64 - f_ii[v] as i64);
        let min_ratio = (0..big_n)
            .filter(|&v| d_h[v] > 0)
            .map(|v| d_new[v] as f64 / d_h[v] as f64)
            .fold(1.0, f64::min);
        let (coin_chi2, coin_dof, coin_tail) = coin_chi_square(e.bins(), self.cfg.p);
        let f_ii_bound = self.f2_mult * self.cfg.epsilon * nf * self.cfg.p;
        let d_h_bound = self.dh_frac * nf * self.cfg.p;
        let max_f_ii = f_ii.iter().copied().max().unwrap_or(0);
        let min_d_h = d_h.iter().copied().min().unwrap_or(0);
        RunReport {
            seed: state.config().seed,
            n: big_n,
            b: state.bias(),
            p: self.cfg.p,
            epsilon: self.cfg.epsilon,
            d: self.cfg.d,
            max_f_ii,
            min_d_h,
            min_ratio,
            max_active_danger: self.max_active_danger,
            hamiltonian: None,
            has_ck: None,
            board_n: state.n(),
            f_ii_bound,
            d_h_bound,
            f_ii_ok: (max_f_ii as f64) <= f_ii_bound,
            d_h_ok: (min_d_h as f64) >= d_h_bound,
            rounds: state.round() - self.start_round,
            exposures: self.exposures,
            type_one: self.type_one,
            type_two: self.type_two,
            claimed: self.claimed,
            flush_coins: self.flush.0,
            flush_hits: self.flush.1,
            h_edges: e.h_edges().len(),
            identity_holds,
            coin_bins: e.bins().to_vec(),
            coin_chi2,
            coin_dof,
            coin_tail,
            max_w_b: (0..big_n)
                .map(|v| self.boxes.record(v).w_b)
                .max()
                .unwrap_or(0),
            max_w_m: (0..big_n)
                .map(|v| self.boxes.record(v).w_m)
                .max()
                .unwrap_or(0),
            max_clearance: self.max_clearance,
            max_breaker_gap: self.max_breaker_gap,
            claim_violations: self.claims.violations.clone(),
            precondition_notes: Vec::new(),
            vertices: VertexStats {
                d_h,
                d_new,
                f_i: e.f_one().to_vec(),
                f_ii,
            },
        }
    }
}

impl WalkerStrategy for RandomizedWalker {
    fn name(&self) -> &str {
        "randomized"
    }

    fn choose_start(&mut self, _state: &GameState, _rng: &mut rand_chacha::ChaCha8Rng) -> usize {
        self.router.root()
    }

    fn next_step(
        &mut self,
        state: &GameState,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        if self.stage == RandStage::Done {
            return Ok(WalkerAction::Done);
        }
        self.absorb_breaker(state)?;
        let pos = state
            .position()
            .ok_or_else(|| StrategyError::stuck("randomized", "no position"))?;
        if self.red.is_none() {
            match self.select_exposure_vertex(state.round())? {
                None => return Ok(self.finish_stage(rng)),
                Some(v) => {
                    let target = self.vstar[v];
                    self.route = self.router.route(pos, target).ok_or_else(|| {
                        StrategyError::stuck(
                            "randomized",
                            format!("no W_0 path from {pos} to {target}"),
                        )
                    })?;
                }
            }
        }
        match self.route.pop_front() {
            Some(next) => Ok(WalkerAction::Step(next)),
            None => self.expose_red(state, rng),
        }
    }

    fn drain_events(&mut self) -> Vec<String> {
        std::mem::take(&mut self.events)
    }
}

/// Plays the exposure game on `vstar` inside an ongoing match, with
/// Walker's current graph as `W_0`.
pub fn run_randomized_strategy(
    m: &mut Match,
    vstar: &[usize],
    cfg: RandConfig,
    profile: &ConstantsProfile,
    breaker: &mut dyn BreakerStrategy,
) -> Result<(RunReport, RandomizedWalker), RandError> {
    let mut notes = cfg.validate(vstar.len(), m.state().bias(), profile)?;
    let pre = check_preconditions(m.state(), vstar, &cfg);
    if !pre.violations.is_empty() {
        if profile.strict {
            return Err(RandError::Precondition(pre.violations));
        }
        notes.extend(pre.violations);
    }
    for note in &notes {
        log::warn!("randomized precondition: {note}");
    }
    let mut walker = RandomizedWalker::new(m.state(), vstar, cfg, profile)?;
    let outcome = m.play(&mut walker, breaker, &crate::engine::never)?;
    debug_assert_eq!(outcome, PlayOutcome::WalkerDone);
    let mut report = walker.report(m.state());
    report.precondition_notes = notes;
    Ok((report, walker))
}

#[cfg(test)]
mod tests;
