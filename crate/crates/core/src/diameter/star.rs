//! Star attachment: alternate center, new leaf, center, ... into a target set.

use crate::bitset::BitSet;
use crate::engine::GameState;

use super::BuilderError;

#[derive(Clone, Debug)]
pub struct StarAttachment {
    center: usize,
    /// `None` for a greedy star that runs while free edges remain.
    remaining: Option<usize>,
    leaves: Vec<usize>,
    at_center: bool,
    cursor: usize,
}

/// Untouched vertices joined to `center` by a free edge.
pub fn eligible_leaves(state: &GameState, center: usize) -> usize {
    let own = usize::from(!state.is_visited(center));
    state.untouched_count() - own - state.breaker_degree_to_untouched(center)
}

impl StarAttachment {
    /// Star of exactly `size` leaves. Walker must stand on `center` and
    /// `(2b+1)·size` eligible leaves must exist.
    pub fn fixed(state: &GameState, center: usize, size: usize) -> Result<Self, BuilderError> {
        if state.position() != Some(center) {
            return Err(BuilderError::InvalidParams(format!(
                "walker is not on star center {center}"
            )));
        }
        let needed = (2 * state.bias() + 1) * size;
        let available = eligible_leaves(state, center);
        if available < needed {
            return Err(BuilderError::InsufficientFreeNeighbors {
                center,
                needed,
                available,
            });
        }
        Ok(Self::with_limit(center, Some(size)))
    }

    pub fn greedy(center: usize) -> Self {
        Self::with_limit(center, None)
    }

    fn with_limit(center: usize, remaining: Option<usize>) -> Self {
        Self {
            center,
            remaining,
            leaves: Vec::new(),
            at_center: true,
            cursor: 0,
        }
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// True once a fixed star has all its leaves.
    pub fn complete(&self) -> bool {
        self.remaining == Some(0)
    }

    /// Next Walker target, or `None` when the star is over. `outside` is the
    /// set leaves are drawn from; it must not contain the current position.
    pub fn next(&mut self, state: &GameState, outside: &BitSet) -> Option<usize> {
        if self.remaining == Some(0) {
            return None;
        }
        let board = state.board();
        if self.at_center {
            let w = board.next_free_neighbor_in(self.center, outside, self.cursor)?;
            self.cursor = w + 1;
            self.leaves.push(w);
            if let Some(r) = self.remaining.as_mut() {
                *r -= 1;
            }
            self.at_center = false;
            Some(w)
        } else {
            board.next_free_neighbor_in(self.center, outside, self.cursor)?;
            self.at_center = true;
            Some(self.center)
        }
    }
}
