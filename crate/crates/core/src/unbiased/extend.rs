//! Growing a near-spanning Walker cycle by one vertex.
//!
//! Walker walks along the cycle to a vertex `v` of small Breaker degree,
//! picks two outside vertices, finds three consecutive cycle vertices
//! `w1 w2 w3` (with `w2 != v`) that have no Breaker edge to `v` or the
//! outsiders, and then plays `v -> w2 -> outsider -> w1 | w3`.

use thiserror::Error;

use crate::bitset::BitSet;
use crate::engine::{GameState, StrategyError};
use crate::profile::CycleConstants;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("extension preconditions failed: {}", .0.join("; "))]
    PreconditionFailed(Vec<String>),
    #[error("extension failed: {0}")]
    ExtensionFailed(String),
}

impl From<ExtensionError> for StrategyError {
    fn from(e: ExtensionError) -> Self {
        match e {
            ExtensionError::PreconditionFailed(v) => StrategyError::PreconditionFailed(v),
            ExtensionError::ExtensionFailed(d) => StrategyError::stuck("extension", d),
        }
    }
}

/// Checks the four entry conditions, one message per failure.
pub fn extension_preconditions(
    state: &GameState,
    cycle: &[usize],
    k: &CycleConstants,
) -> Vec<String> {
    let n = state.n();
    let mut failures = Vec::new();
    let len = cycle.len();
    if len + k.min_cycle_deficit < n || len + 3 > n {
        failures.push(format!(
            "cycle length {len} outside [n-{}, n-3]",
            k.min_cycle_deficit
        ));
    }
    match state.position() {
        Some(p) if cycle.contains(&p) => {}
        p => failures.push(format!("position {p:?} not on the cycle")),
    }
    let eb = state.board().breaker_edge_count();
    if eb > 2 * n {
        failures.push(format!("breaker owns {eb} > 2n edges"));
    }
    let on_cycle = BitSet::from_members(n, cycle.iter().copied());
    let heavy: Vec<usize> = (0..n)
        .filter(|&y| !on_cycle.contains(y))
        .filter(|&y| {
            state.board().breaker_degree_into(y, &on_cycle) as f64
                >= n as f64 / k.ext_degree_divisor
        })
        .collect();
    if heavy.len() > 1 {
        failures.push(format!(
            "outside vertices {heavy:?} have breaker degree >= n/{} to the cycle",
            k.ext_degree_divisor
        ));
    }
    failures
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Phase {
    Traverse,
    /// Walker is at `w2`; next step goes to an outsider.
    AtW2 {
        idx: usize,
        outsiders: [usize; 2],
    },
    /// Walker is at the outsider `o`; next step closes through `w1` or `w3`.
    AtOutsider {
        idx: usize,
        o: usize,
    },
}

/// One step of the extender.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionStep {
    Move(usize),
    /// The enlarged cycle; Walker already stands on it.
    Finished(Vec<usize>),
}

/// Statistics of a finished or running extension.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtensionStats {
    pub traversal_rounds: usize,
    pub rounds: usize,
}

#[derive(Clone, Debug)]
pub struct CycleExtender {
    cycle: Vec<usize>,
    on_cycle: BitSet,
    phase: Phase,
    stats: ExtensionStats,
    ext_degree_divisor: f64,
    outsider_slack: usize,
}

impl CycleExtender {
    pub fn new(state: &GameState, cycle: Vec<usize>, k: &CycleConstants) -> Self {
        let on_cycle = BitSet::from_members(state.n(), cycle.iter().copied());
        Self {
            cycle,
            on_cycle,
            phase: Phase::Traverse,
            stats: ExtensionStats::default(),
            ext_degree_divisor: k.ext_degree_divisor,
            outsider_slack: k.ext_outsider_slack,
        }
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn stats(&self) -> ExtensionStats {
        self.stats
    }

    fn index_of(&self, v: usize) -> Option<usize> {
        self.cycle.iter().position(|&c| c == v)
    }

    fn at(&self, i: isize) -> usize {
        let len = self.cycle.len() as isize;
        self.cycle[i.rem_euclid(len) as usize]
    }

    /// Next move, or the enlarged cycle once Walker has closed it.
    pub fn step(&mut self, state: &GameState) -> Result<ExtensionStep, ExtensionError> {
        let n = state.n();
        let board = state.board();
        let pos = state
            .position()
            .ok_or_else(|| ExtensionError::ExtensionFailed("no position".into()))?;
        match self.phase.clone() {
            Phase::Traverse => {
                let idx = self.index_of(pos).ok_or_else(|| {
                    ExtensionError::ExtensionFailed(format!("position {pos} left the cycle"))
                })?;
                if board.breaker_degree(pos) as f64 > n as f64 / self.ext_degree_divisor {
                    self.stats.traversal_rounds += 1;
                    self.stats.rounds += 1;
                    return Ok(ExtensionStep::Move(self.at(idx as isize + 1)));
                }
                let limit = n as f64 / self.ext_degree_divisor + self.outsider_slack as f64;
                let outsiders: Vec<usize> = (0..n)
                    .filter(|&y| !self.on_cycle.contains(y))
                    .filter(|&y| board.breaker_degree_into(y, &self.on_cycle) as f64 <= limit)
                    .take(2)
                    .collect();
                if outsiders.len() < 2 {
                    return Err(ExtensionError::ExtensionFailed(format!(
                        "fewer than two outside vertices with breaker degree <= {limit}"
                    )));
                }
                let (o1, o2) = (outsiders[0], outsiders[1]);
                let clear = |w: usize| {
                    [pos, o1, o2]
                        .iter()
                        .all(|&z| z == w || !board.is_breaker(z, w))
                };
                let len = self.cycle.len() as isize;
                let j = (0..len)
                    .find(|&j| {
                        let w2 = self.at(j);
                        w2 != pos && clear(self.at(j - 1)) && clear(w2) && clear(self.at(j + 1))
                    })
                    .ok_or_else(|| {
                        ExtensionError::ExtensionFailed("no clear consecutive triple".into())
                    })?;
                self.phase = Phase::AtW2 {
                    idx: j as usize,
                    outsiders: [o1, o2],
                };
                self.stats.rounds += 1;
                Ok(ExtensionStep::Move(self.at(j)))
            }
            Phase::AtW2 { idx, outsiders } => {
                let i = idx as isize;
                let triple = [self.at(i - 1), self.at(i), self.at(i + 1)];
                let o = outsiders
                    .into_iter()
                    .find(|&o| triple.iter().all(|&w| !board.is_breaker(o, w)))
                    .ok_or_else(|| {
                        ExtensionError::ExtensionFailed("both outsiders cut from the triple".into())
                    })?;
                self.phase = Phase::AtOutsider { idx, o };
                self.stats.rounds += 1;
                Ok(ExtensionStep::Move(o))
            }
            Phase::AtOutsider { idx, o } => {
                if pos == o {
                    let i = idx as isize;
                    let (w1, w3) = (self.at(i - 1), self.at(i + 1));
                    let target = if !board.is_breaker(o, w1) {
                        w1
                    } else if !board.is_breaker(o, w3) {
                        w3
                    } else {
                        return Err(ExtensionError::ExtensionFailed(
                            "outsider cut from both w1 and w3".into(),
                        ));
                    };
                    self.stats.rounds += 1;
                    return Ok(ExtensionStep::Move(target));
                }
                // Walker has closed the cycle; splice `o` next to w2.
                let len = self.cycle.len();
                let insert_at = if pos == self.at(idx as isize - 1) {
                    idx
                } else {
                    (idx + 1) % len
                };
                let insert_at = if insert_at == 0 { len } else { insert_at };
                let mut cycle = self.cycle.clone();
                cycle.insert(insert_at, o);
                self.on_cycle.insert(o);
                self.cycle = cycle.clone();
                self.phase = Phase::Traverse;
                Ok(ExtensionStep::Finished(cycle))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{validate_certificate, Certificate, EdgeId, GameConfig, Player};
    use crate::profile::ConstantsProfile;

    fn walk_cycle(n: usize, m: usize) -> GameState {
        let mut g = GameState::new(GameConfig::new(n, 0, Player::Walker)).unwrap();
        for v in 1..m {
            g.walker_step(v).unwrap();
        }
        g.walker_step(0).unwrap();
        g
    }

    fn drive(g: &mut GameState, ext: &mut CycleExtender) -> Vec<usize> {
        loop {
            match ext.step(g).unwrap() {
                ExtensionStep::Move(v) => {
                    g.walker_step(v).unwrap();
                }
                ExtensionStep::Finished(c) => return c,
            }
        }
    }

    #[test]
    fn empty_breaker_extends_in_three_moves() {
        let k = ConstantsProfile::scaled().cycle;
        let n = 40;
        let mut g = walk_cycle(n, n - 3);
        let cycle: Vec<usize> = (0..n - 3).collect();
        assert!(extension_preconditions(&g, &cycle, &k).is_empty());
        let mut ext = CycleExtender::new(&g, cycle, &k);
        let before = g.round();
        let c = drive(&mut g, &mut ext);
        assert_eq!(c.len(), n - 2);
        assert!(g.round() - before <= 4);
        assert!(validate_certificate(&g, &Certificate::cycle(c)));
    }

    #[test]
    fn two_heavy_outsiders_are_reported() {
        let k = ConstantsProfile::scaled().cycle;
        let n = 40;
        let mut g = GameState::new(GameConfig::new(n, 1, Player::Walker)).unwrap();
        for v in 1..n - 3 {
            g.walker_step(v).unwrap();
            let e = match v {
                1..=4 => EdgeId::new(v, 37),
                5..=8 => EdgeId::new(v, 38),
                _ => EdgeId::new(v - 7, v),
            };
            g.breaker_claim(&[e]).unwrap();
        }
        g.walker_step(0).unwrap();
        let cycle: Vec<usize> = (0..n - 3).collect();
        let failures = extension_preconditions(&g, &cycle, &k);
        assert_eq!(failures.len(), 1, "{failures:?}");
        assert!(failures[0].contains("outside vertices"));
    }
}
