//! Unbiased cycle strategy: a path that closes into a cycle, grows a tail
//! through the untouched set while keeping Breaker's edges there in check,
//! then folds everything into one cycle and extends it to length `n - 2`.

mod extend;
mod ledger;

pub use extend::{
    extension_preconditions, CycleExtender, ExtensionError, ExtensionStats, ExtensionStep,
};
pub use ledger::{check_property_p, compute_vt, PLedger};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::engine::{Certificate, GameState, Move, StrategyError, WalkerAction, WalkerStrategy};
use crate::profile::{ClaimLog, ConstantsProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    I,
    II,
    III,
    IV,
    V,
    Done,
}

/// Which rule produced a cycle-phase move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailCase {
    /// Default light step, or the repair after Breaker grew `e_B(U)`.
    Light,
    RepairInside,
    RepairNext,
    RepairEnds,
    Heavy,
    Shielded,
}

impl TailCase {
    /// Offset `i` of the property checked after the move.
    pub fn offset(self) -> i64 {
        match self {
            TailCase::Heavy => -1,
            TailCase::Shielded => 1,
            _ => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TailCase::Light => "IIb",
            TailCase::RepairInside => "IIb/1",
            TailCase::RepairNext => "IIb/2",
            TailCase::RepairEnds => "IIb/3",
            TailCase::Heavy => "IIc.1",
            TailCase::Shielded => "IIc.2",
        }
    }
}

/// One cycle-phase move with the counters predicted for the board right
/// after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Walker's round number of the move (1-based).
    pub round: usize,
    pub case: TailCase,
    pub x: usize,
    pub heavy_count: usize,
    pub from: usize,
    pub to: usize,
    pub v1: usize,
    pub vl: usize,
    pub ledger: PLedger,
    pub holds: bool,
}

/// Memory of the cycle strategy.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnbiasedState {
    pub stage: Stage,
    /// `v_0..v_t`; once the first cycle is closed, `path[l + 1] == v_0`.
    pub path: Vec<usize>,
    pub ell: Option<usize>,
    pub x: usize,
    pub i_flag: i64,
    /// Stage IV pivot vertex.
    pub pivot: Option<usize>,
    pub cycle: Option<Vec<usize>>,
}

pub struct Thm1Walker {
    profile: ConstantsProfile,
    mem: UnbiasedState,
    extender: Option<CycleExtender>,
    stage5_start: usize,
    ext_start: usize,
    ledger: Vec<LedgerEntry>,
    claims: ClaimLog,
    events: Vec<String>,
    extensions: Vec<ExtensionStats>,
    checked_entry: bool,
}

impl Thm1Walker {
    pub fn new(profile: ConstantsProfile) -> Self {
        Self {
            profile,
            mem: UnbiasedState {
                stage: Stage::I,
                path: Vec::new(),
                ell: None,
                x: 0,
                i_flag: 0,
                pivot: None,
                cycle: None,
            },
            extender: None,
            stage5_start: 0,
            ext_start: 0,
            ledger: Vec::new(),
            claims: ClaimLog::default(),
            events: Vec::new(),
            extensions: Vec::new(),
            checked_entry: false,
        }
    }

    pub fn memory(&self) -> &UnbiasedState {
        &self.mem
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn claim_log(&self) -> &ClaimLog {
        &self.claims
    }

    pub fn extensions(&self) -> &[ExtensionStats] {
        &self.extensions
    }

    fn enter(&mut self, stage: Stage, state: &GameState) {
        self.mem.stage = stage;
        self.events
            .push(format!("STAGE {stage:?} t={}", state.round()));
    }

    fn claim(&mut self, ok: bool, what: impl FnOnce() -> String) -> Result<(), StrategyError> {
        let strict = self.profile.strict;
        self.claims
            .check(strict, ok, what)
            .map_err(|d| StrategyError::claim("unbiased", d))
    }

    fn lowest_untouched_free(
        state: &GameState,
        from: usize,
        pred: impl Fn(usize) -> bool,
    ) -> Option<usize> {
        (0..state.n()).find(|&w| !state.is_visited(w) && state.is_free(from, w) && pred(w))
    }

    fn t(&self) -> usize {
        self.mem.path.len() - 1
    }

    fn stage_one(&mut self, state: &GameState) -> Result<WalkerAction, StrategyError> {
        let threshold = self.profile.cycle.untouched_threshold;
        let pos = state.position().expect("positioned");
        let v0 = self.mem.path[0];
        // All but at most two Breaker edges join v0 to the path; the claim
        // made since Walker's last move is not counted.
        let on_path = BitSet::from_members(state.n(), self.mem.path.iter().copied());
        let latest: Vec<_> = match state.moves().last() {
            Some(Move::BreakerClaim(e)) => e.clone(),
            _ => Vec::new(),
        };
        let latest_off = latest
            .iter()
            .filter(|e| !(e.contains(v0) && on_path.contains(e.other(v0))))
            .count();
        let at_v0 = state.board().breaker_degree_into(v0, &on_path);
        let off = state.board().breaker_edge_count() - at_v0 - latest_off;
        self.claim(off <= 2, || {
            format!("stage I: {off} breaker edges away from v0")
        })?;

        if state.untouched_count() <= threshold {
            self.enter(Stage::III, state);
            return self.stage_three(state);
        }
        let t = self.t();
        if t >= 2 && state.is_free(pos, v0) {
            self.mem.ell = Some(t);
            self.mem.path.push(v0);
            self.enter(Stage::II, state);
            return Ok(WalkerAction::Step(v0));
        }
        let w = Self::lowest_untouched_free(state, pos, |_| true)
            .ok_or_else(|| StrategyError::stuck("Ic", "no free edge into the untouched set"))?;
        self.mem.path.push(w);
        Ok(WalkerAction::Step(w))
    }

    fn stage_two(&mut self, state: &GameState) -> Result<WalkerAction, StrategyError> {
        let k = self.profile.cycle.clone();
        if state.untouched_count() <= k.untouched_threshold {
            self.enter(Stage::IV, state);
            return self.stage_four(state);
        }
        let pos = state.position().expect("positioned");
        let ell = self.mem.ell.expect("cycle closed");
        let (v1, vl) = (self.mem.path[1], self.mem.path[ell]);
        let x = self.mem.x;
        let heavy = compute_vt(state, k.heavy_divisor);
        let hc = heavy.len();
        self.claim(x <= k.heavy_cap && hc <= k.heavy_cap, || {
            format!("stage II: x = {x}, |V_t| = {hc}")
        })?;

        let board = state.board();
        let (case, w) = if heavy.is_empty() {
            let before = PLedger::snapshot(state, pos, v1, vl);
            let lx = 3 * x;
            let case = if before.eb_u > lx + 4 {
                TailCase::RepairInside
            } else if before.db_next_plus_eb_u > lx + 5 {
                TailCase::RepairNext
            } else if before.eb_ends_u > 2 * (lx + 5) {
                TailCase::RepairEnds
            } else {
                TailCase::Light
            };
            let w = match case {
                TailCase::RepairInside => Self::lowest_untouched_free(state, pos, |w| {
                    state.breaker_degree_to_untouched(w) >= 1
                }),
                TailCase::RepairEnds => Self::lowest_untouched_free(state, pos, |w| {
                    board.is_breaker(w, v1) || board.is_breaker(w, vl)
                }),
                _ => Self::lowest_untouched_free(state, pos, |_| true),
            };
            (case, w)
        } else if let Some(&w) = heavy.iter().find(|&&w| state.is_free(pos, w)) {
            (TailCase::Heavy, Some(w))
        } else {
            let w = Self::lowest_untouched_free(state, pos, |w| {
                heavy.iter().all(|&z| state.is_free(w, z))
            });
            (TailCase::Shielded, w)
        };
        let w =
            w.ok_or_else(|| StrategyError::stuck(case.label(), "no admissible untouched vertex"))?;
        if case == TailCase::Heavy {
            self.mem.x += 1;
        }
        self.mem.i_flag = case.offset();
        let predicted = PLedger::after_step(state, w, v1, vl);
        let holds = check_property_p(&predicted, self.mem.x, case.offset());
        self.ledger.push(LedgerEntry {
            round: state.round() + 1,
            case,
            x: self.mem.x,
            heavy_count: hc,
            from: pos,
            to: w,
            v1,
            vl,
            ledger: predicted,
            holds,
        });
        let xnow = self.mem.x;
        self.claim(holds, || {
            format!(
                "property fails after {} with x = {xnow}: {predicted:?}",
                case.label()
            )
        })?;
        self.mem.path.push(w);
        Ok(WalkerAction::Step(w))
    }

    fn stage_three(&mut self, state: &GameState) -> Result<WalkerAction, StrategyError> {
        let pos = state.position().expect("positioned");
        let t = self.t();
        let window = self.profile.cycle.close_window;
        let i = (0..=window.min(t.saturating_sub(2)))
            .find(|&i| state.is_free(pos, self.mem.path[i]))
            .ok_or_else(|| {
                StrategyError::stuck("III", format!("no free edge back to v_0..v_{window}"))
            })?;
        let cycle = self.mem.path[i..=t].to_vec();
        let target = self.mem.path[i];
        self.start_stage_five(state, cycle);
        Ok(WalkerAction::Step(target))
    }

    fn stage_four(&mut self, state: &GameState) -> Result<WalkerAction, StrategyError> {
        let pos = state.position().expect("positioned");
        let ell = self.mem.ell.expect("cycle closed");
        let (v1, vl) = (self.mem.path[1], self.mem.path[ell]);
        let board = state.board();
        match self.mem.pivot {
            None => {
                let w = Self::lowest_untouched_free(state, pos, |w| {
                    state.is_free(w, v1) && state.is_free(w, vl)
                })
                .ok_or_else(|| {
                    StrategyError::stuck("IV", "no untouched vertex free towards v_1, v_l, v_t")
                })?;
                self.mem.pivot = Some(w);
                self.mem.path.push(w);
                Ok(WalkerAction::Step(w))
            }
            Some(w) => {
                let tail = &self.mem.path[ell + 2..];
                let mut cycle: Vec<usize>;
                let target;
                if !board.is_breaker(w, v1) {
                    cycle = self.mem.path[1..=ell].to_vec();
                    target = v1;
                } else if !board.is_breaker(w, vl) {
                    cycle = self.mem.path[1..=ell].iter().rev().copied().collect();
                    target = vl;
                } else {
                    return Err(StrategyError::stuck("IV", "both closing edges claimed"));
                }
                cycle.push(self.mem.path[0]);
                cycle.extend_from_slice(tail);
                self.start_stage_five(state, cycle);
                Ok(WalkerAction::Step(target))
            }
        }
    }

    fn start_stage_five(&mut self, state: &GameState, cycle: Vec<usize>) {
        self.mem.cycle = Some(cycle);
        self.stage5_start = state.round() + 1;
        self.enter(Stage::V, state);
    }

    fn stage_five(&mut self, state: &GameState) -> Result<WalkerAction, StrategyError> {
        let n = state.n();
        let k = self.profile.cycle.clone();
        let cycle = self.mem.cycle.clone().expect("cycle set");
        if !self.checked_entry {
            self.checked_entry = true;
            let on = BitSet::from_members(n, cycle.iter().copied());
            let limit = n as f64 / k.heavy_divisor + k.outside_slack as f64;
            let heavy = (0..n)
                .filter(|&y| {
                    !on.contains(y) && state.board().breaker_degree_into(y, &on) as f64 >= limit
                })
                .count();
            self.claim(heavy <= 1, || {
                format!("stage V entry: {heavy} heavy outside vertices")
            })?;
        }
        if cycle.len() + 2 >= n {
            self.mem.stage = Stage::Done;
            return Ok(WalkerAction::Done);
        }
        let cap = k.stage5_cap.unwrap_or(2 * n);
        if state.round() >= self.stage5_start + cap {
            return Err(StrategyError::stuck(
                "V",
                format!("no cycle of length n-2 after {cap} rounds"),
            ));
        }
        if self.extender.is_none() {
            let failures = extension_preconditions(state, &cycle, &k);
            if !failures.is_empty() {
                if self.profile.strict {
                    return Err(ExtensionError::PreconditionFailed(failures).into());
                }
                for f in failures {
                    self.claims.check(false, false, || f).ok();
                }
            }
            self.extender = Some(CycleExtender::new(state, cycle, &k));
            self.ext_start = state.round();
        }
        let ext = self.extender.as_mut().expect("set");
        match ext.step(state)? {
            ExtensionStep::Move(v) => Ok(WalkerAction::Step(v)),
            ExtensionStep::Finished(c) => {
                let stats = ext.stats();
                self.extender = None;
                self.extensions.push(stats);
                let used = state.round() - self.ext_start;
                let (budget, trav) = (k.ext_round_budget, k.ext_outsider_slack);
                self.claim(used < budget, || format!("extension took {used} rounds"))?;
                self.claim(stats.traversal_rounds <= trav, || {
                    format!("extension traversed {} rounds", stats.traversal_rounds)
                })?;
                self.mem.cycle = Some(c);
                self.stage_five(state)
            }
        }
    }
}

impl WalkerStrategy for Thm1Walker {
    fn name(&self) -> &str {
        "thm1-cycle"
    }

    fn next_step(
        &mut self,
        state: &GameState,
        _rng: &mut ChaCha8Rng,
    ) -> Result<WalkerAction, StrategyError> {
        if self.mem.path.is_empty() {
            let mut problems = Vec::new();
            if state.n() < self.profile.cycle.min_n {
                problems.push(format!(
                    "n = {} below the profile floor {}",
                    state.n(),
                    self.profile.cycle.min_n
                ));
            }
            if state.bias() != 1 {
                problems.push(format!("bias {} is not 1", state.bias()));
            }
            if !problems.is_empty() {
                return Err(StrategyError::PreconditionFailed(problems));
            }
            self.mem.path.push(state.position().expect("positioned"));
            self.events.push("STAGE I t=0".into());
        }
        match self.mem.stage {
            Stage::I => self.stage_one(state),
            Stage::II => self.stage_two(state),
            Stage::III => self.stage_three(state),
            Stage::IV => self.stage_four(state),
            Stage::V => self.stage_five(state),
            Stage::Done => Ok(WalkerAction::Done),
        }
    }

    fn certificate(&self, _state: &GameState) -> Option<Certificate> {
        self.mem.cycle.clone().map(Certificate::cycle)
    }

    fn drain_events(&mut self) -> Vec<String> {
        std::mem::take(&mut self.events)
    }
}
