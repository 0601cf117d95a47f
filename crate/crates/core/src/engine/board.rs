//! Edge ownership storage for `K_n`.
//!
//! Small boards keep one adjacency bit row per vertex and player, which makes
//! "free neighbours of `v` inside `S`" a handful of word operations. Boards
//! above [`DENSE_LIMIT`] vertices switch to hashed neighbour sets, because the
//! quadratic bit matrix no longer fits in memory while the number of claimed
//! edges stays near-linear.

use rustc_hash::FxHashSet;

use super::edge::{EdgeId, EdgeState};
use crate::bitset::BitSet;

pub const DENSE_LIMIT: usize = 1 << 14;

#[derive(Clone, Debug)]
enum Adjacency {
    Dense(Vec<BitSet>),
    Sparse(Vec<FxHashSet<u32>>),
}

impl Adjacency {
    fn new(n: usize) -> Self {
        if n <= DENSE_LIMIT {
            Adjacency::Dense((0..n).map(|_| BitSet::new(n)).collect())
        } else {
            Adjacency::Sparse(vec![FxHashSet::default(); n])
        }
    }

    #[inline]
    fn contains(&self, a: usize, b: usize) -> bool {
        match self {
            Adjacency::Dense(rows) => rows[a].contains(b),
            Adjacency::Sparse(rows) => rows[a].contains(&(b as u32)),
        }
    }

    #[inline]
    fn insert(&mut self, a: usize, b: usize) {
        match self {
            Adjacency::Dense(rows) => {
                rows[a].insert(b);
                rows[b].insert(a);
            }
            Adjacency::Sparse(rows) => {
                rows[a].insert(b as u32);
                rows[b].insert(a as u32);
            }
        }
    }

    /// Neighbours of `a`, in ascending order.
    fn neighbors(&self, a: usize) -> Vec<usize> {
        match self {
            Adjacency::Dense(rows) => rows[a].iter().collect(),
            Adjacency::Sparse(rows) => {
                let mut out: Vec<usize> = rows[a].iter().map(|&x| x as usize).collect();
                out.sort_unstable();
                out
            }
        }
    }

    fn for_each_neighbor(&self, a: usize, mut f: impl FnMut(usize)) {
        match self {
            Adjacency::Dense(rows) => rows[a].iter().for_each(f),
            Adjacency::Sparse(rows) => rows[a].iter().for_each(|&x| f(x as usize)),
        }
    }

    fn count_into(&self, a: usize, set: &BitSet) -> usize {
        match self {
            Adjacency::Dense(rows) => rows[a].intersection_count(set),
            Adjacency::Sparse(rows) => rows[a]
                .iter()
                .filter(|&&x| set.contains(x as usize))
                .count(),
        }
    }

    fn row(&self, a: usize) -> Option<&BitSet> {
        match self {
            Adjacency::Dense(rows) => Some(&rows[a]),
            Adjacency::Sparse(_) => None,
        }
    }
}

/// Ownership of every edge of `K_n` plus per-vertex degree ledgers.
#[derive(Clone, Debug)]
pub struct Board {
    n: usize,
    walker: Adjacency,
    breaker: Adjacency,
    deg_w: Vec<u32>,
    deg_b: Vec<u32>,
    walker_edges: usize,
    breaker_edges: usize,
}

impl Board {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            walker: Adjacency::new(n),
            breaker: Adjacency::new(n),
            deg_w: vec![0; n],
            deg_b: vec![0; n],
            walker_edges: 0,
            breaker_edges: 0,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.walker, Adjacency::Dense(_))
    }

    pub fn total_edges(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    #[inline]
    pub fn state(&self, e: EdgeId) -> EdgeState {
        let (a, b) = e.endpoints();
        if self.walker.contains(a, b) {
            EdgeState::WalkerOwned
        } else if self.breaker.contains(a, b) {
            EdgeState::BreakerOwned
        } else {
            EdgeState::Free
        }
    }

    #[inline]
    pub fn is_walker(&self, a: usize, b: usize) -> bool {
        a != b && self.walker.contains(a, b)
    }

    #[inline]
    pub fn is_breaker(&self, a: usize, b: usize) -> bool {
        a != b && self.breaker.contains(a, b)
    }

    /// True when `ab` is unclaimed by both players.
    #[inline]
    pub fn is_free(&self, a: usize, b: usize) -> bool {
        a != b && !self.walker.contains(a, b) && !self.breaker.contains(a, b)
    }

    /// Caller guarantees the edge is free.
    pub(crate) fn set_walker(&mut self, e: EdgeId) {
        let (a, b) = e.endpoints();
        debug_assert!(self.is_free(a, b));
        self.walker.insert(a, b);
        self.deg_w[a] += 1;
        self.deg_w[b] += 1;
        self.walker_edges += 1;
    }

    /// Caller guarantees the edge is free.
    pub(crate) fn set_breaker(&mut self, e: EdgeId) {
        let (a, b) = e.endpoints();
        debug_assert!(self.is_free(a, b));
        self.breaker.insert(a, b);
        self.deg_b[a] += 1;
        self.deg_b[b] += 1;
        self.breaker_edges += 1;
    }

    #[inline]
    pub fn walker_degree(&self, v: usize) -> usize {
        self.deg_w[v] as usize
    }

    #[inline]
    pub fn breaker_degree(&self, v: usize) -> usize {
        self.deg_b[v] as usize
    }

    #[inline]
    pub fn free_degree(&self, v: usize) -> usize {
        self.n - 1 - self.walker_degree(v) - self.breaker_degree(v)
    }

    pub fn walker_edge_count(&self) -> usize {
        self.walker_edges
    }

    pub fn breaker_edge_count(&self) -> usize {
        self.breaker_edges
    }

    pub fn free_edge_count(&self) -> usize {
        self.total_edges() - self.walker_edges - self.breaker_edges
    }

    pub fn walker_neighbors(&self, v: usize) -> Vec<usize> {
        self.walker.neighbors(v)
    }

    pub fn breaker_neighbors(&self, v: usize) -> Vec<usize> {
        self.breaker.neighbors(v)
    }

    pub fn for_each_breaker_neighbor(&self, v: usize, f: impl FnMut(usize)) {
        self.breaker.for_each_neighbor(v, f)
    }

    pub fn for_each_walker_neighbor(&self, v: usize, f: impl FnMut(usize)) {
        self.walker.for_each_neighbor(v, f)
    }

    /// `d_B(v, S)`.
    pub fn breaker_degree_into(&self, v: usize, set: &BitSet) -> usize {
        self.breaker.count_into(v, set)
    }

    /// `d_W(v, S)`.
    pub fn walker_degree_into(&self, v: usize, set: &BitSet) -> usize {
        self.walker.count_into(v, set)
    }

    /// Breaker's adjacency row when the dense representation is active.
    pub fn breaker_row(&self, v: usize) -> Option<&BitSet> {
        self.breaker.row(v)
    }

    pub fn walker_row(&self, v: usize) -> Option<&BitSet> {
        self.walker.row(v)
    }

    /// Smallest member `w >= from` of `set` with `vw` free.
    pub fn next_free_neighbor_in(&self, v: usize, set: &BitSet, from: usize) -> Option<usize> {
        match (&self.walker, &self.breaker) {
            (Adjacency::Dense(wr), Adjacency::Dense(br)) => {
                let (s, w, b) = (set.words(), wr[v].words(), br[v].words());
                let mut wi = from >> 6;
                if wi >= s.len() {
                    return None;
                }
                let mut word = s[wi] & !w[wi] & !b[wi] & (!0u64 << (from & 63));
                loop {
                    while word != 0 {
                        let x = (wi << 6) + word.trailing_zeros() as usize;
                        if x != v {
                            return Some(x);
                        }
                        word &= word - 1;
                    }
                    wi += 1;
                    if wi == s.len() {
                        return None;
                    }
                    word = s[wi] & !w[wi] & !b[wi];
                }
            }
            _ => {
                let mut cur = set.next_from(from);
                while let Some(x) = cur {
                    if self.is_free(v, x) {
                        return Some(x);
                    }
                    cur = set.next_from(x + 1);
                }
                None
            }
        }
    }

    /// Lexicographically smallest free edge at or after `from`.
    pub fn next_free_edge(&self, from: EdgeId) -> Option<EdgeId> {
        let n = self.n;
        let (mut u, mut v) = from.endpoints();
        while u + 1 < n {
            while v < n {
                if self.is_free(u, v) {
                    return Some(EdgeId::new(u, v));
                }
                v += 1;
            }
            u += 1;
            v = u + 1;
        }
        None
    }

    /// Up to `k` lowest free edges at or after `from`, skipping `exclude`.
    pub fn lowest_free_edges(&self, from: EdgeId, k: usize, exclude: &[EdgeId]) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(k);
        let mut cur = Some(from);
        while out.len() < k {
            let Some(c) = cur else { break };
            let Some(e) = self.next_free_edge(c) else {
                break;
            };
            if !exclude.contains(&e) {
                out.push(e);
            }
            cur = e.successor(self.n);
        }
        out
    }

    /// All walker-owned edges in ascending order.
    pub fn walker_edges(&self) -> Vec<EdgeId> {
        self.collect_edges(&self.walker)
    }

    /// All breaker-owned edges in ascending order.
    pub fn breaker_edges(&self) -> Vec<EdgeId> {
        self.collect_edges(&self.breaker)
    }

    fn collect_edges(&self, adj: &Adjacency) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in adj.neighbors(u) {
                if u < v {
                    out.push(EdgeId::new(u, v));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_agree_on_free_neighbor_search() {
        let mut dense = Board::new(100);
        let mut sparse = Board {
            n: 100,
            walker: Adjacency::Sparse(vec![FxHashSet::default(); 100]),
            breaker: Adjacency::Sparse(vec![FxHashSet::default(); 100]),
            deg_w: vec![0; 100],
            deg_b: vec![0; 100],
            walker_edges: 0,
            breaker_edges: 0,
        };
        for (a, b) in [(5, 6), (5, 7), (5, 70)] {
            dense.set_breaker(EdgeId::new(a, b));
            sparse.set_breaker(EdgeId::new(a, b));
        }
        dense.set_walker(EdgeId::new(5, 8));
        sparse.set_walker(EdgeId::new(5, 8));
        let set = BitSet::from_members(100, [5, 6, 7, 8, 9, 70, 71]);
        for from in [0, 6, 9, 10, 71, 72] {
            assert_eq!(
                dense.next_free_neighbor_in(5, &set, from),
                sparse.next_free_neighbor_in(5, &set, from)
            );
        }
        assert_eq!(dense.next_free_neighbor_in(5, &set, 0), Some(9));
        assert_eq!(dense.breaker_degree_into(5, &set), 3);
        assert_eq!(sparse.breaker_degree_into(5, &set), 3);
        assert_eq!(dense.free_degree(5), 95);
    }

    #[test]
    fn next_free_edge_skips_claims() {
        let mut board = Board::new(4);
        board.set_breaker(EdgeId::new(0, 1));
        board.set_walker(EdgeId::new(0, 2));
        assert_eq!(
            board.next_free_edge(EdgeId::new(0, 1)),
            Some(EdgeId::new(0, 3))
        );
        board.set_breaker(EdgeId::new(0, 3));
        assert_eq!(
            board.next_free_edge(EdgeId::new(0, 1)),
            Some(EdgeId::new(1, 2))
        );
    }
}
