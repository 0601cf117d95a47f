//! Biased-game tree builder: Walker grows a shallow spanning-ish tree out of
//! star attachments, against a Breaker claiming `b` edges per round.

mod star;
mod tree;

pub use star::{eligible_leaves, StarAttachment};
pub use tree::RootedTree;

use std::collections::VecDeque;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::engine::{
    BreakerStrategy, GameConfig, GameState, Match, MatchError, StrategyError, Transcript,
    WalkerAction, WalkerStrategy,
};
use crate::graph;
use crate::profile::{ClaimLog, ConstantsProfile, TreeConstants};

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuilderError {
    #[error("invalid builder parameters: {0}")]
    InvalidParams(String),
    #[error("degree bound failed: {0}")]
    DegreeAssertFailed(String),
    #[error("claim failed: {0}")]
    ClaimFailed(String),
    #[error("star at {center} needs {needed} eligible leaves, has {available}")]
    InsufficientFreeNeighbors {
        center: usize,
        needed: usize,
        available: usize,
    },
    #[error("no eligible center in stage {0}")]
    NoEligibleCenter(String),
    #[error("round {rounds} exceeds bound {bound}")]
    RoundBoundExceeded { rounds: usize, bound: usize },
}

impl From<BuilderError> for StrategyError {
    fn from(e: BuilderError) -> Self {
        match e {
            BuilderError::InvalidParams(m) => StrategyError::PreconditionFailed(vec![m]),
            BuilderError::InsufficientFreeNeighbors { .. } => {
                StrategyError::stuck("star", e.to_string())
            }
            BuilderError::NoEligibleCenter(ref stage) => {
                StrategyError::stuck(stage.clone(), e.to_string())
            }
            BuilderError::DegreeAssertFailed(_)
            | BuilderError::ClaimFailed(_)
            | BuilderError::RoundBoundExceeded { .. } => {
                StrategyError::claim("tree", e.to_string())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuilderParams {
    pub n: usize,
    pub b: usize,
    pub r: f64,
    pub r_floor: usize,
    pub c1: f64,
    pub c2: usize,
    /// `n / (root_star_div·b)`, unrounded.
    pub x: f64,
    pub s1: usize,
    pub s2: usize,
    /// `floor(c1·n)`, the Stage I tree size.
    pub stage1_size: usize,
    pub stage2_exit: usize,
    pub final_loss: usize,
    pub diameter_bound: usize,
    pub round_bound: usize,
}

impl BuilderParams {
    pub fn new(n: usize, b: usize, k: &TreeConstants, strict: bool) -> Result<Self, BuilderError> {
        if b == 0 {
            return Err(BuilderError::InvalidParams(
                "bias must be at least 1".into(),
            ));
        }
        let nf = n as f64;
        let bf = b as f64;
        let ln2 = nf.ln().powi(2);
        if strict && bf > nf / ln2 {
            return Err(BuilderError::InvalidParams(format!(
                "b = {b} exceeds n/ln^2 n = {:.1}",
                nf / ln2
            )));
        }
        let x = nf / (k.root_star_div * bf);
        if x <= 1.0 {
            return Err(BuilderError::InvalidParams(format!(
                "n/({}b) = {x:.3} is at most 1, so r = ln n / ln(n/({}b)) is undefined",
                k.root_star_div, k.root_star_div
            )));
        }
        let r = nf.ln() / x.ln();
        let r_floor = r.floor() as usize;
        let c2 = 2 * r_floor + 2;
        let c1 = 1.0 / c2 as f64;
        Ok(Self {
            n,
            b,
            r,
            r_floor,
            c1,
            c2,
            x,
            s1: x.ceil() as usize,
            s2: (nf / (k.leaf_star_div * bf)).ceil() as usize,
            stage1_size: (c1 * nf).floor() as usize,
            stage2_exit: (k.stage2_exit * c2 as f64 * bf).ceil() as usize,
            final_loss: (k.final_loss * bf).ceil() as usize,
            diameter_bound: 2 * r_floor + 6,
            round_bound: (k.round_factor * nf).floor() as usize,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuildStage {
    I,
    II,
    III,
    Done,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StarKind {
    Phase,
    Greedy,
    Sized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    pub vertices: usize,
    pub edges: usize,
    pub diameter: usize,
    pub rounds: usize,
    pub depth: usize,
    pub b: usize,
    pub r: f64,
    pub diameter_bound: usize,
    pub round_bound: usize,
    pub vertex_floor: usize,
    pub leaf_counts: Vec<usize>,
    pub stage2_iterations: usize,
    pub stage3_iterations: usize,
    pub claim_violations: usize,
}

impl TreeReport {
    pub fn meets_bounds(&self) -> bool {
        self.vertices >= self.vertex_floor
            && self.diameter <= self.diameter_bound
            && self.rounds <= self.round_bound
    }
}

/// Walker strategy registered as `prop-diameter-tree`.
pub struct DiameterWalker {
    profile: ConstantsProfile,
    params: Option<BuilderParams>,
    tree: Option<RootedTree>,
    outside: BitSet,
    stage: BuildStage,
    route: VecDeque<usize>,
    pending: Option<(usize, StarKind)>,
    star: Option<(StarAttachment, StarKind)>,
    attachments: usize,
    phase: usize,
    prev_leaves: Vec<usize>,
    cur_leaves: Vec<usize>,
    used: BitSet,
    phase_target: usize,
    phase_done: usize,
    leaf_counts: Vec<usize>,
    phase_rounds: Vec<usize>,
    t1: Vec<usize>,
    t2: Vec<usize>,
    iterations: [usize; 2],
    before: Option<usize>,
    z_history: Vec<usize>,
    claims: ClaimLog,
    events: Vec<String>,
    error: Option<BuilderError>,
}

impl DiameterWalker {
    pub fn new(profile: ConstantsProfile) -> Self {
        Self {
            profile,
            params: None,
            tree: None,
            outside: BitSet::new(0),
            stage: BuildStage::I,
            route: VecDeque::new(),
            pending: None,
            star: None,
            attachments: 0,
            phase: 0,
            prev_leaves: Vec::new(),
            cur_leaves: Vec::new(),
            used: BitSet::new(0),
            phase_target: 0,
            phase_done: 0,
            leaf_counts: Vec::new(),
            phase_rounds: Vec::new(),
            t1: Vec::new(),
            t2: Vec::new(),
            iterations: [0; 2],
            before: None,
            z_history: Vec::new(),
            claims: ClaimLog::default(),
            events: Vec::new(),
            error: None,
        }
    }

    pub fn stage(&self) -> BuildStage {
        self.stage
    }

    pub fn params(&self) -> Option<&BuilderParams> {
        self.params.as_ref()
    }

    pub fn tree(&self) -> Option<&RootedTree> {
        self.tree.as_ref()
    }

    pub fn claim_log(&self) -> &ClaimLog {
        &self.claims
    }

    /// `|L_j|` for each completed Stage I phase.
    pub fn leaf_counts(&self) -> &[usize] {
        &self.leaf_counts
    }

    /// Round number at the end of each completed Stage I phase.
    pub fn phase_rounds(&self) -> &[usize] {
        &self.phase_rounds
    }

    pub fn stage_one_tree(&self) -> &[usize] {
        &self.t1
    }

    pub fn stage_two_tree(&self) -> &[usize] {
        &self.t2
    }

    /// Stage III centers `z_0, z_1, ...`.
    pub fn z_history(&self) -> &[usize] {
        &self.z_history
    }

    pub fn stage2_iterations(&self) -> usize {
        self.iterations[0]
    }

    pub fn stage3_iterations(&self) -> usize {
        self.iterations[1]
    }

    /// The typed failure behind the last strategy error, if any.
    pub fn last_error(&self) -> Option<&BuilderError> {
        self.error.as_ref()
    }

    pub fn report(&self, state: &GameState) -> Option<TreeReport> {
        let p = self.params.as_ref()?;
        let t = self.tree.as_ref()?;
        let adj = t.adjacency();
        let depth = graph::eccentricity(&adj, t.root()) as usize;
        let diameter = graph::double_sweep_diameter(&adj, t.root()) as usize;
        Some(TreeReport {
            vertices: t.size(),
            edges: t.edges(),
            diameter,
            rounds: state.round(),
            depth,
            b: p.b,
            r: p.r,
            diameter_bound: p.diameter_bound,
            round_bound: p.round_bound,
            vertex_floor: p.n.saturating_sub(p.final_loss),
            leaf_counts: self.leaf_counts.clone(),
            stage2_iterations: self.iterations[0],
            stage3_iterations: self.iterations[1],
            claim_violations: self.claims.count(),
        })
    }

    fn p(&self) -> &BuilderParams {
        self.params.as_ref().expect("initialised")
    }

    fn t(&self) -> &RootedTree {
        self.tree.as_ref().expect("initialised")
    }

    fn check(&mut self, ok: bool, err: impl FnOnce() -> BuilderError) -> Result<(), BuilderError> {
        if ok {
            return Ok(());
        }
        let e = err();
        let msg = e.to_string();
        self.claims
            .check(self.profile.strict, false, || msg)
            .map_err(|_| e)
    }

    fn enter(&mut self, stage: BuildStage, state: &GameState) {
        self.stage = stage;
        self.before = None;
        self.events.push(format!(
            "STAGE {stage:?} t={} tree={}",
            state.round(),
            self.t().size()
        ));
    }

    fn init(&mut self, state: &GameState) -> Result<(), BuilderError> {
        let n = state.n();
        let params = BuilderParams::new(n, state.bias(), &self.profile.tree, self.profile.strict)?;
        let root = state.position().expect("positioned");
        self.tree = Some(RootedTree::new(n, root));
        self.outside = BitSet::full(n);
        for &v in state.visit_order() {
            self.outside.remove(v);
        }
        self.used = BitSet::new(n);
        self.params = Some(params);
        self.phase = 1;
        self.phase_target = 1;
        self.prev_leaves = vec![root];
        self.events
            .push(format!("STAGE I t={} tree=1", state.round()));
        Ok(())
    }

    fn depth_cap(&self) -> usize {
        let half = self.p().c2 / 2;
        match self.stage {
            BuildStage::I => half,
            BuildStage::II => half + 1,
            _ => half + 2,
        }
    }

    fn add_leaf(&mut self, center: usize, leaf: usize) -> Result<(), BuilderError> {
        let tree = self.tree.as_mut().expect("initialised");
        tree.add_leaf(center, leaf);
        let depth = tree.depth(leaf).unwrap_or(0);
        let cap = self.depth_cap();
        let stage = self.stage;
        self.check(depth <= cap, || {
            BuilderError::ClaimFailed(format!(
                "stage {stage:?} leaf {leaf} at depth {depth} > {cap}"
            ))
        })
    }

    fn after_move(&mut self, state: &GameState) -> Result<(), BuilderError> {
        let rounds = state.round() + 1;
        let (e, depth, count) = {
            let t = self.t();
            (t.edges(), t.max_depth(), self.attachments)
        };
        let bound = 2 * e + 2 * depth * count;
        self.check(rounds <= bound.max(1), || {
            BuilderError::ClaimFailed(format!(
                "round {rounds} exceeds 2e(T) + 2 depth d2(T) = {bound}"
            ))
        })?;
        let cap = self.p().round_bound;
        self.check(rounds <= cap, || BuilderError::RoundBoundExceeded {
            rounds,
            bound: cap,
        })
    }

    fn step(&mut self, state: &GameState, v: usize) -> Result<WalkerAction, BuilderError> {
        self.after_move(state)?;
        Ok(WalkerAction::Step(v))
    }

    fn drive(&mut self, state: &GameState) -> Result<WalkerAction, BuilderError> {
        let pos = state.position().expect("positioned");
        self.outside.remove(pos);
        loop {
            if let Some(v) = self.route.pop_front() {
                return self.step(state, v);
            }
            if let Some((center, kind)) = self.pending.take() {
                if let Some(action) = self.begin_star(state, center, kind)? {
                    return Ok(action);
                }
                continue;
            }
            if let Some((mut star, kind)) = self.star.take() {
                if let Some(v) = star.next(state, &self.outside) {
                    if v != star.center() {
                        self.add_leaf(star.center(), v)?;
                    }
                    self.star = Some((star, kind));
                    return self.step(state, v);
                }
                if kind != StarKind::Greedy && !star.complete() {
                    let center = star.center();
                    return Err(BuilderError::InsufficientFreeNeighbors {
                        center,
                        needed: star.leaves().len() + 1,
                        available: star.leaves().len(),
                    });
                }
                self.end_star(state, star, kind)?;
                continue;
            }
            match self.stage {
                BuildStage::I => self.plan_phase(state)?,
                BuildStage::II => self.plan_stage_two(state)?,
                BuildStage::III => self.plan_stage_three(state)?,
                BuildStage::Done => return Ok(WalkerAction::Done),
            }
        }
    }

    fn walk_to(
        &mut self,
        state: &GameState,
        target: usize,
        kind: StarKind,
        limit: usize,
    ) -> Result<(), BuilderError> {
        let pos = state.position().expect("positioned");
        self.route = self.t().route(pos, target);
        let len = self.route.len();
        self.check(len <= limit, || {
            BuilderError::ClaimFailed(format!(
                "walk to {target} takes {len} rounds, bound {limit}"
            ))
        })?;
        self.pending = Some((target, kind));
        self.attachments += 1;
        Ok(())
    }

    fn begin_star(
        &mut self,
        state: &GameState,
        center: usize,
        kind: StarKind,
    ) -> Result<Option<WalkerAction>, BuilderError> {
        let n = state.n();
        let b = state.bias();
        let k = self.profile.tree.clone();
        let star = match kind {
            StarKind::Phase => {
                let db = state.board().breaker_degree(center);
                let cap = k.center_degree_frac * n as f64;
                self.check(db as f64 <= cap, || {
                    BuilderError::DegreeAssertFailed(format!(
                        "d_B({center}) = {db} > {cap:.1} at star start"
                    ))
                })?;
                let size = if self.phase == 1 {
                    self.p().s1
                } else {
                    self.p().s2
                };
                let room = self.p().stage1_size - self.t().size();
                StarAttachment::fixed(state, center, size.min(room))?
            }
            StarKind::Greedy => {
                let db = state.breaker_degree_to_untouched(center);
                let cap = k.stage2_degree * (self.p().c2 * b) as f64;
                let within = self.iterations[0] as f64 <= self.p().c1 * n as f64 / 2.0;
                self.check(!within || db as f64 <= cap, || {
                    BuilderError::DegreeAssertFailed(format!("d_B({center}, V_i) = {db} > {cap}"))
                })?;
                StarAttachment::greedy(center)
            }
            StarKind::Sized => {
                let w = state.untouched_count();
                let db = state.breaker_degree_to_untouched(center);
                let size = ((w - db) / (2 * b + 1)).saturating_sub(1);
                if size == 0 {
                    self.check(false, || {
                        BuilderError::NoEligibleCenter(format!(
                            "III (star at {center} would be empty, |W| = {w})"
                        ))
                    })?;
                    self.enter(BuildStage::Done, state);
                    return Ok(Some(WalkerAction::Done));
                }
                StarAttachment::fixed(state, center, size)?
            }
        };
        self.star = Some((star, kind));
        Ok(None)
    }

    fn end_star(
        &mut self,
        state: &GameState,
        star: StarAttachment,
        kind: StarKind,
    ) -> Result<(), BuilderError> {
        if kind != StarKind::Phase {
            return Ok(());
        }
        self.cur_leaves.extend_from_slice(star.leaves());
        self.phase_done += 1;
        let full = self.t().size() >= self.p().stage1_size;
        if full || self.phase_done >= self.phase_target {
            self.close_phase(state, full)?;
        }
        if full {
            self.finish_stage_one(state)?;
        }
        Ok(())
    }

    fn close_phase(&mut self, state: &GameState, truncated: bool) -> Result<(), BuilderError> {
        let j = self.phase;
        let leaves = self.cur_leaves.len();
        let rounds = state.round() + 1;
        let (x, s1) = (self.p().x, self.p().s1);
        let prev = if j == 1 { 1 } else { self.prev_leaves.len() };
        self.leaf_counts.push(leaves);
        self.phase_rounds.push(rounds);
        self.events
            .push(format!("PHASE {j} t={rounds} leaves={leaves}"));
        self.check(leaves <= s1 * prev, || {
            BuilderError::ClaimFailed(format!("phase {j}: |L_j| = {leaves} > {s1}·{prev}"))
        })?;
        if !truncated {
            let cap = 5.0 * x.powi(j as i32);
            self.check(rounds as f64 <= cap, || {
                BuilderError::ClaimFailed(format!(
                    "phase {j}: R_j = {rounds} > 5(n/200b)^j = {cap:.1}"
                ))
            })?;
        }
        self.prev_leaves = std::mem::take(&mut self.cur_leaves);
        self.phase += 1;
        self.phase_done = 0;
        self.phase_target = self.prev_leaves.len() / 2;
        Ok(())
    }

    fn finish_stage_one(&mut self, state: &GameState) -> Result<(), BuilderError> {
        let t = self.t();
        let (size, depth, consistent) = (t.size(), t.max_depth(), t.depths_consistent());
        let (want, cap) = (self.p().stage1_size, self.p().r_floor + 1);
        self.check(size == want && depth <= cap && consistent, || {
            BuilderError::ClaimFailed(format!(
                "stage I tree has {size} vertices (want {want}) and depth {depth} (cap {cap})"
            ))
        })?;
        self.t1 = self.t().members();
        self.enter(BuildStage::II, state);
        Ok(())
    }

    fn plan_phase(&mut self, state: &GameState) -> Result<(), BuilderError> {
        if self.t().size() >= self.p().stage1_size {
            return self.finish_stage_one(state);
        }
        if self.phase_target == 0 {
            return Err(BuilderError::NoEligibleCenter(format!(
                "I (phase {} has no leaves)",
                self.phase
            )));
        }
        let board = state.board();
        let center = self
            .prev_leaves
            .iter()
            .copied()
            .filter(|&v| !self.used.contains(v))
            .min_by_key(|&v| (board.breaker_degree(v), v))
            .ok_or_else(|| BuilderError::NoEligibleCenter(format!("I (phase {})", self.phase)))?;
        self.used.insert(center);
        let limit = 2 * self.phase;
        self.walk_to(state, center, StarKind::Phase, limit)
    }

    fn plan_stage_two(&mut self, state: &GameState) -> Result<(), BuilderError> {
        let v = state.untouched_count();
        if let Some(before) = self.before {
            let b = state.bias() as f64;
            let cap = (1.0 - 1.0 / (4.0 * b + 2.0)) * before as f64;
            self.check(v as f64 <= cap, || {
                BuilderError::ClaimFailed(format!("stage II contraction: |V| = {v} > {cap:.1}"))
            })?;
        }
        if v <= self.p().stage2_exit {
            self.t2 = self.t().members();
            self.enter(BuildStage::III, state);
            return Ok(());
        }
        let center = self
            .t1
            .iter()
            .copied()
            .filter(|&z| state.breaker_degree_to_untouched(z) < v)
            .min_by_key(|&z| (state.breaker_degree_to_untouched(z), z))
            .ok_or_else(|| BuilderError::NoEligibleCenter("II".into()))?;
        self.iterations[0] += 1;
        let iters = self.iterations[0];
        let cap = self.p().c1 * state.n() as f64 / 2.0;
        self.check(iters as f64 <= cap, || {
            BuilderError::ClaimFailed(format!("stage II iteration {iters} > c1 n / 2 = {cap:.1}"))
        })?;
        self.before = Some(v);
        let limit = self.p().c2 + 2;
        self.walk_to(state, center, StarKind::Greedy, limit)
    }

    fn plan_stage_three(&mut self, state: &GameState) -> Result<(), BuilderError> {
        let n = state.n();
        let b = state.bias();
        let k = self.profile.tree.clone();
        let board = state.board();
        if self.z_history.is_empty() {
            let need = (k.z0_free_frac * n as f64).ceil() as usize;
            let Some(z0) = self
                .t2
                .iter()
                .copied()
                .find(|&z| board.free_degree(z) >= need)
            else {
                return self.stop_stage_three(state, "III (no z_0)");
            };
            self.z_history.push(z0);
            let pos = state.position().expect("positioned");
            self.route = self.t().route(pos, z0);
            let len = self.route.len();
            let limit = self.p().c2 + 2;
            return self.check(len <= limit, || {
                BuilderError::ClaimFailed(format!(
                    "walk to z_0 = {z0} takes {len} rounds, bound {limit}"
                ))
            });
        }
        let w = state.untouched_count();
        if let Some(before) = self.before {
            let cap = (1.0 - 1.0 / (4.0 * b as f64 + 2.0)) * before as f64;
            self.check(w as f64 <= cap, || {
                BuilderError::ClaimFailed(format!("stage III contraction: |W| = {w} > {cap:.1}"))
            })?;
        }
        if w <= self.p().final_loss {
            self.enter(BuildStage::Done, state);
            return Ok(());
        }
        let pos = state.position().expect("positioned");
        let free_need = (k.zi_free_frac * n as f64).ceil() as usize;
        let b_cap = (k.zi_breaker_mult * b as f64).floor() as usize;
        let pick = self.t2.iter().copied().find(|&z| {
            z != pos
                && !self.z_history.contains(&z)
                && state.is_free(pos, z)
                && board.free_degree(z) >= free_need
                && board.breaker_degree(z) <= b_cap
        });
        let Some(z) = pick else {
            return self.stop_stage_three(state, "III (no z_i)");
        };
        self.iterations[1] += 1;
        let i = self.iterations[1];
        self.check(i as f64 <= n as f64 / 4.0, || {
            BuilderError::ClaimFailed(format!("stage III iteration {i} > n/4"))
        })?;
        self.z_history.push(z);
        self.before = Some(w);
        self.route.push_back(z);
        self.pending = Some((z, StarKind::Sized));
        self.attachments += 1;
        Ok(())
    }

    fn stop_stage_three(&mut self, state: &GameState, what: &str) -> Result<(), BuilderError> {
        let what = what.to_string();
        self.check(false, || BuilderError::NoEligibleCenter(what))?;
        self.enter(BuildStage::Done, state);
        Ok(())
    }
}

impl WalkerStrategy for DiameterWalker {
    fn name(&self) -> &str {
        "prop-diameter-tree"
    }

    fn next_step(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        let result = if self.params.is_none() {
            self.init(state)
        } else {
            Ok(())
        }
        .and_then(|_| self.drive(state));
        result.map_err(|e| {
            self.error = Some(e.clone());
            e.into()
        })
    }

    fn drain_events(&mut self) -> Vec<String> {
        std::mem::take(&mut self.events)
    }
}

#[derive(Debug, Error)]
pub enum BuildFailure {
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Plays the tree builder against `breaker` and reports the final tree.
pub fn build_low_diameter_tree(
    config: GameConfig,
    profile: ConstantsProfile,
    breaker: &mut dyn BreakerStrategy,
) -> Result<(Transcript, TreeReport), BuildFailure> {
    BuilderParams::new(config.n, config.b, &profile.tree, profile.strict)?;
    let mut walker = DiameterWalker::new(profile);
    let mut m = Match::new(config, walker.name(), breaker.name()).map_err(MatchError::from)?;
    if let Err(e) = m.play(&mut walker, breaker, &crate::engine::never) {
        return Err(match walker.last_error() {
            Some(b) => BuildFailure::Builder(b.clone()),
            None => BuildFailure::Match(e),
        });
    }
    let report = walker.report(m.state()).expect("initialised");
    Ok((m.finish(None)?, report))
}
