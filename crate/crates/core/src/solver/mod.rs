//! Exact values of walk-constrained games on `K_n` for `n <= 6`.
//!
//! States are (Walker edges, Breaker edges, position, turn), reduced to a
//! canonical relabelling with the position mapped to vertex 0. Walker's
//! attractor of the target set is computed backwards from the target
//! states; everything outside it, including infinite play, is a Breaker win.

mod canon;
mod fixed;
mod play;

use std::collections::VecDeque;
use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{GameConfig, GameState, Player, StartPolicy, Transcript};

pub use canon::{CycleTable, Layout};
pub use fixed::value_against;
pub use play::{solved_match, SolverBreaker, SolverWalker};

use canon::Canon;

pub const MAX_N: usize = 6;
pub const DEFAULT_BUDGET: usize = 20_000_000;

const NO_POS: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    /// Some Walker cycle has at least this many vertices.
    CycleAtLeast(usize),
    /// Some Walker cycle has exactly this many vertices.
    ContainsCycle(usize),
}

impl Target {
    pub fn holds(self, lengths: u8) -> bool {
        match self {
            Target::CycleAtLeast(l) => l < 8 && lengths >> l != 0,
            Target::ContainsCycle(k) => k < 8 && lengths >> k & 1 == 1,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::CycleAtLeast(l) => write!(f, "cycle>={l}"),
            Target::ContainsCycle(k) => write!(f, "C{k}"),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.parse::<usize>().map_err(|_| format!("bad target `{s}`"));
        if let Some(l) = s.strip_prefix("cycle>=") {
            Ok(Target::CycleAtLeast(num(l)?))
        } else if let Some(k) = s.strip_prefix('C').or_else(|| s.strip_prefix('c')) {
            Ok(Target::ContainsCycle(num(k)?))
        } else {
            Err(format!("bad target `{s}`, expected cycle>=L or Ck"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveQuery {
    pub n: usize,
    pub b: usize,
    pub first: Player,
    pub start: StartPolicy,
    pub target: Target,
    /// Largest number of canonical states explored.
    pub budget: usize,
}

impl SolveQuery {
    pub fn new(n: usize, b: usize, first: Player, target: Target) -> Self {
        Self {
            n,
            b,
            first,
            start: StartPolicy::Declared(0),
            target,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn config(&self) -> GameConfig {
        GameConfig::new(self.n, self.b, self.first)
            .with_start(self.start)
            .with_profile("scaled")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("state budget {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("principal variation failed: {0}")]
    Play(String),
}

/// A solved game graph.
pub struct Solved {
    pub query: SolveQuery,
    layout: Layout,
    canon: Canon,
    cycles: CycleTable,
    index: FxHashMap<u64, u32>,
    win: Vec<bool>,
    /// Plies to the target under optimal play, for winning states.
    rank: Vec<u32>,
    init: u32,
}

fn key(w: u16, b: u16, pos: u64, turn: Player) -> u64 {
    w as u64 | (b as u64) << 16 | pos << 32 | u64::from(turn == Player::Breaker) << 36
}

fn unkey(k: u64) -> (u16, u16, Option<usize>, Player) {
    let pos = k >> 32 & 7;
    let turn = if k >> 36 & 1 == 1 {
        Player::Breaker
    } else {
        Player::Walker
    };
    (
        k as u16,
        (k >> 16) as u16,
        (pos != NO_POS).then_some(pos as usize),
        turn,
    )
}

/// All `k`-subsets of the set bits of `mask`.
pub(crate) fn subsets(mask: u16, k: usize, out: &mut Vec<u16>) {
    fn rec(bits: &[u16], k: usize, acc: u16, out: &mut Vec<u16>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in 0..bits.len() {
            if bits.len() - i < k {
                break;
            }
            rec(&bits[i + 1..], k - 1, acc | bits[i], out);
        }
    }
    let bits: Vec<u16> = (0..16)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| 1u16 << i)
        .collect();
    rec(&bits, k, 0, out);
}

impl fmt::Debug for Solved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solved")
            .field("query", &self.query)
            .field("states", &self.win.len())
            .field("winner", &self.winner())
            .finish()
    }
}

impl Solved {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn cycles(&self) -> &CycleTable {
        &self.cycles
    }

    pub fn states(&self) -> usize {
        self.win.len()
    }

    pub fn winner(&self) -> Player {
        if self.win[self.init as usize] {
            Player::Walker
        } else {
            Player::Breaker
        }
    }

    pub fn reached(&self, w: u16) -> bool {
        self.query.target.holds(self.cycles.lengths(w))
    }

    fn lookup(&self, w: u16, b: u16, pos: Option<usize>, turn: Player) -> Option<u32> {
        self.index.get(&self.canon.key(w, b, pos, turn)).copied()
    }

    /// `Some(rank)` for a Walker-winning position, `None` for a Breaker win.
    /// Panics on positions outside the explored graph.
    pub fn value_of(&self, w: u16, b: u16, pos: Option<usize>, turn: Player) -> Option<u32> {
        let i = self
            .lookup(w, b, pos, turn)
            .expect("position reachable from the query") as usize;
        self.win[i].then_some(self.rank[i])
    }

    pub fn value_of_state(&self, state: &GameState, turn: Player) -> Option<u32> {
        let (w, b) = self.layout.masks(state);
        self.value_of(w, b, state.position(), turn)
    }

    /// Successor keys of a position, as raw (uncanonicalized) keys.
    fn successors(&self, k: u64, scratch: &mut Vec<u16>, out: &mut Vec<u64>) {
        out.clear();
        let (w, b, pos, turn) = unkey(k);
        if self.reached(w) {
            return;
        }
        let n = self.layout.n;
        match (turn, pos) {
            (Player::Walker, None) => {
                for v in 0..n {
                    out.push(key(w, b, v as u64, Player::Walker));
                }
            }
            (Player::Walker, Some(p)) => {
                for v in (0..n).filter(|&v| v != p) {
                    let bit = 1u16 << self.layout.edge(p, v);
                    if b & bit == 0 {
                        out.push(key(w | bit, b, v as u64, Player::Breaker));
                    }
                }
            }
            (Player::Breaker, _) => {
                let free = self.layout.full & !(w | b);
                let want = self.query.b.min(free.count_ones() as usize);
                let p = pos.map_or(NO_POS, |p| p as u64);
                if want == 0 {
                    out.push(key(w, b, p, Player::Walker));
                } else {
                    scratch.clear();
                    subsets(free, want, scratch);
                    for &s in scratch.iter() {
                        out.push(key(w, b | s, p, Player::Walker));
                    }
                }
            }
        }
    }
}

/// Solves `query` by explicit enumeration of the canonical game graph.
pub fn solve(query: &SolveQuery) -> Result<Solved, SolveError> {
    let n = query.n;
    if !(3..=MAX_N).contains(&n) {
        return Err(SolveError::InvalidQuery(format!(
            "n = {n} outside 3..={MAX_N}"
        )));
    }
    query
        .config()
        .validate()
        .map_err(|e| SolveError::InvalidQuery(e.to_string()))?;
    let layout = Layout::new(n);
    let mut solved = Solved {
        query: query.clone(),
        canon: Canon::new(&layout),
        cycles: CycleTable::new(&layout),
        layout,
        index: FxHashMap::default(),
        win: Vec::new(),
        rank: Vec::new(),
        init: 0,
    };
    let start = match query.start {
        StartPolicy::Declared(v) => Some(v),
        StartPolicy::StrategyChosen => None,
    };
    let init = solved.canon.key(0, 0, start, query.first);
    let mut keys = vec![init];
    solved.index.insert(init, 0);
    let mut succ_start = vec![0u32];
    let mut succ: Vec<u32> = Vec::new();
    let (mut scratch, mut out) = (Vec::new(), Vec::new());
    let mut head = 0;
    while head < keys.len() {
        let k = keys[head];
        head += 1;
        solved.successors(k, &mut scratch, &mut out);
        for &raw in &out {
            let (w, b, pos, turn) = unkey(raw);
            let c = solved.canon.key(w, b, pos, turn);
            let id = match solved.index.get(&c) {
                Some(&id) => id,
                None => {
                    if keys.len() >= query.budget {
                        return Err(SolveError::BudgetExceeded {
                            budget: query.budget,
                        });
                    }
                    let id = keys.len() as u32;
                    solved.index.insert(c, id);
                    keys.push(c);
                    id
                }
            };
            succ.push(id);
        }
        succ_start.push(succ.len() as u32);
    }
    let m = keys.len();
    // Reverse edges in CSR form.
    let mut pred_start = vec![0u32; m + 1];
    for &t in &succ {
        pred_start[t as usize + 1] += 1;
    }
    for i in 0..m {
        pred_start[i + 1] += pred_start[i];
    }
    let mut fill = pred_start.clone();
    let mut pred = vec![0u32; succ.len()];
    for s in 0..m {
        for &t in &succ[succ_start[s] as usize..succ_start[s + 1] as usize] {
            pred[fill[t as usize] as usize] = s as u32;
            fill[t as usize] += 1;
        }
    }
    let mut win = vec![false; m];
    let mut rank = vec![u32::MAX; m];
    let mut pending: Vec<u32> = (0..m).map(|s| succ_start[s + 1] - succ_start[s]).collect();
    let mut queue = VecDeque::new();
    for (s, &k) in keys.iter().enumerate() {
        if solved.reached(k as u16) {
            win[s] = true;
            rank[s] = 0;
            queue.push_back(s as u32);
        }
    }
    while let Some(t) = queue.pop_front() {
        let t = t as usize;
        for &p in &pred[pred_start[t] as usize..pred_start[t + 1] as usize] {
            let p = p as usize;
            if win[p] {
                continue;
            }
            let walker_turn = unkey(keys[p]).3 == Player::Walker;
            pending[p] -= 1;
            if walker_turn || pending[p] == 0 {
                win[p] = true;
                rank[p] = rank[t] + 1;
                queue.push_back(p as u32);
            }
        }
    }
    solved.win = win;
    solved.rank = rank;
    solved.init = 0;
    Ok(solved)
}

#[derive(Debug)]
pub struct LongestCycle {
    /// Longest cycle Walker can force; 0 when she cannot force any.
    pub value: usize,
    /// Game solved for `cycle >= max(value, 3)`.
    pub solved: Rc<Solved>,
}

/// Longest cycle Walker can force, by descending search over the threshold.
pub fn value_longest_cycle(
    n: usize,
    b: usize,
    first: Player,
    start: StartPolicy,
    budget: usize,
) -> Result<LongestCycle, SolveError> {
    let mut last = None;
    for l in (3..=n).rev() {
        let q = SolveQuery {
            n,
            b,
            first,
            start,
            target: Target::CycleAtLeast(l),
            budget,
        };
        let s = solve(&q)?;
        if s.winner() == Player::Walker {
            return Ok(LongestCycle {
                value: l,
                solved: Rc::new(s),
            });
        }
        last = Some(s);
    }
    Ok(LongestCycle {
        value: 0,
        solved: Rc::new(last.expect("n >= 3")),
    })
}

/// Principal variation of a longest-cycle solve in the transcript format,
/// with the query and value in comment lines.
pub fn fixture_transcript(
    n: usize,
    b: usize,
    first: Player,
    budget: usize,
) -> Result<(usize, Transcript), SolveError> {
    let lc = value_longest_cycle(n, b, first, StartPolicy::Declared(0), budget)?;
    let mut t = solved_match(&lc.solved)?;
    let note = format!(
        " solve n={n} b={b} first={} value={}",
        first.letter(),
        lc.value
    );
    t.records.insert(1, crate::engine::Record::Comment(note));
    Ok((lc.value, t))
}

/// Checks the attractor equations on `samples` states drawn with `seed`,
/// recomputing successors through the engine. Returns the first mismatch.
pub fn audit(solved: &Solved, samples: usize, seed: u64) -> Result<(), String> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut keys: Vec<u64> = solved.index.keys().copied().collect();
    keys.sort_unstable();
    for _ in 0..samples.min(keys.len()) {
        let k = keys[rng.gen_range(0..keys.len())];
        let (w, b, pos, turn) = unkey(k);
        let here = solved.value_of(w, b, pos, turn).is_some();
        if solved.reached(w) {
            if !here {
                return Err(format!("target state {k:#x} not winning"));
            }
            continue;
        }
        let state = play::state_from_masks(solved, w, b, pos);
        let next = play::engine_successors(solved, &state, turn);
        let wins: Vec<bool> = next
            .iter()
            .map(|(s, t)| solved.value_of_state(s, *t).is_some())
            .collect();
        let ok = match turn {
            Player::Walker => here == wins.iter().any(|&x| x),
            Player::Breaker => here == wins.iter().all(|&x| x),
        };
        if !ok {
            return Err(format!(
                "state {k:#x} ({turn:?} to move) marked {here}, successors {wins:?}"
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
