//! The MinBox box game and Maker's max-danger strategy.

mod fuzz;

pub use fuzz::{fuzz_schedule, run_fuzz, Adversary, FuzzConfig, FuzzOutcome, FuzzSummary};

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub size: usize,
    pub w_m: usize,
    pub w_b: usize,
}

impl BoxRecord {
    pub fn free_elements(&self) -> usize {
        self.size - self.w_m - self.w_b
    }

    pub fn is_free(&self) -> bool {
        self.w_m + self.w_b < self.size
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MinBoxError {
    #[error("allocation of {total} elements exceeds budget {budget}")]
    OverBudget { total: usize, budget: usize },
    #[error("box {index} has {free} free elements, {requested} requested")]
    BoxFull {
        index: usize,
        requested: usize,
        free: usize,
    },
    #[error("box {0} out of range")]
    OutOfRange(usize),
}

/// Max-heap entry; stale entries are dropped lazily.
type Key = (i64, Reverse<usize>);

#[derive(Clone, Debug)]
pub struct MinBoxState {
    boxes: Vec<BoxRecord>,
    alpha: f64,
    bias: usize,
    /// Free and active boxes.
    ready: BinaryHeap<Key>,
    /// Active boxes, free or not.
    active: BinaryHeap<Key>,
    maker_total: usize,
    breaker_total: usize,
}

impl MinBoxState {
    /// `n` boxes of size `size` each.
    pub fn uniform(n: usize, size: usize, alpha: f64, bias: usize) -> Self {
        Self::with_sizes(vec![size; n], alpha, bias)
    }

    pub fn with_sizes(sizes: Vec<usize>, alpha: f64, bias: usize) -> Self {
        let boxes: Vec<BoxRecord> = sizes
            .into_iter()
            .map(|size| BoxRecord {
                size,
                w_m: 0,
                w_b: 0,
            })
            .collect();
        let mut s = Self {
            boxes,
            alpha,
            bias,
            ready: BinaryHeap::new(),
            active: BinaryHeap::new(),
            maker_total: 0,
            breaker_total: 0,
        };
        for i in 0..s.boxes.len() {
            s.index(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn bias(&self) -> usize {
        self.bias
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn record(&self, i: usize) -> BoxRecord {
        self.boxes[i]
    }

    pub fn maker_total(&self) -> usize {
        self.maker_total
    }

    pub fn breaker_total(&self) -> usize {
        self.breaker_total
    }

    pub fn dang(&self, i: usize) -> i64 {
        let r = &self.boxes[i];
        r.w_b as i64 - self.bias as i64 * r.w_m as i64
    }

    pub fn is_active(&self, i: usize) -> bool {
        let r = &self.boxes[i];
        (r.w_m as f64) < self.alpha * r.size as f64
    }

    /// `b'(ln n + 1)`.
    pub fn danger_bound(&self) -> f64 {
        self.bias as f64 * ((self.boxes.len() as f64).ln() + 1.0)
    }

    fn current(&self, k: &Key, need_free: bool) -> bool {
        let i = k.1 .0;
        self.dang(i) == k.0 && self.is_active(i) && (!need_free || self.boxes[i].is_free())
    }

    fn top(&mut self, ready: bool) -> Option<Key> {
        loop {
            let heap = if ready { &self.ready } else { &self.active };
            let k = *heap.peek()?;
            if self.current(&k, ready) {
                return Some(k);
            }
            if ready {
                self.ready.pop()
            } else {
                self.active.pop()
            };
        }
    }

    /// Largest danger over active boxes.
    pub fn max_active_danger(&mut self) -> Option<i64> {
        self.top(false).map(|k| k.0)
    }

    /// Free active box of maximum danger, lowest index on ties.
    pub fn max_danger_box(&mut self) -> Option<usize> {
        self.top(true).map(|k| k.1 .0)
    }

    fn index(&mut self, i: usize) {
        if self.is_active(i) {
            let k = (self.dang(i), Reverse(i));
            self.active.push(k);
            if self.boxes[i].is_free() {
                self.ready.push(k);
            }
        }
    }

    fn check(&self, i: usize, requested: usize) -> Result<(), MinBoxError> {
        let r = self.boxes.get(i).ok_or(MinBoxError::OutOfRange(i))?;
        if r.free_elements() < requested {
            return Err(MinBoxError::BoxFull {
                index: i,
                requested,
                free: r.free_elements(),
            });
        }
        Ok(())
    }

    /// Maker claims one element of the free active box with maximum danger.
    pub fn maker_move_max_danger(&mut self) -> Option<usize> {
        let i = self.max_danger_box()?;
        self.maker_claim(i, 1).expect("ready boxes are free");
        Some(i)
    }

    /// Maker takes up to `count` free elements of box `i`; returns how many.
    pub fn maker_take(&mut self, i: usize, count: usize) -> usize {
        let take = count.min(self.boxes[i].free_elements());
        self.maker_claim(i, take).expect("clamped");
        take
    }

    pub fn maker_claim(&mut self, i: usize, count: usize) -> Result<(), MinBoxError> {
        self.check(i, count)?;
        self.boxes[i].w_m += count;
        self.maker_total += count;
        self.index(i);
        Ok(())
    }

    /// Breaker's turn: at most `bias` elements spread over boxes.
    pub fn breaker_claim_elements(
        &mut self,
        allocation: &BTreeMap<usize, usize>,
    ) -> Result<(), MinBoxError> {
        let total: usize = allocation.values().sum();
        if total > self.bias {
            return Err(MinBoxError::OverBudget {
                total,
                budget: self.bias,
            });
        }
        for (&i, &c) in allocation {
            self.check(i, c)?;
        }
        for (&i, &c) in allocation {
            if c > 0 {
                self.boxes[i].w_b += c;
                self.index(i);
            }
        }
        self.breaker_total += total;
        Ok(())
    }

    /// Breaker elements outside any turn budget, clamped to what is free.
    pub fn breaker_take(&mut self, i: usize, count: usize) -> usize {
        let take = count.min(self.boxes[i].free_elements());
        if take > 0 {
            self.boxes[i].w_b += take;
            self.breaker_total += take;
            self.index(i);
        }
        take
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alloc(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn danger_formula() {
        let mut s = MinBoxState::uniform(3, 20, 0.5, 2);
        assert_eq!(s.dang(0), 0);
        s.breaker_take(0, 5);
        s.maker_claim(0, 1).unwrap();
        assert_eq!(s.dang(0), 3);
        s.maker_claim(1, 3).unwrap();
        assert_eq!(s.dang(1), -6);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let mut s = MinBoxState::uniform(3, 50, 0.5, 1);
        s.breaker_take(0, 3);
        s.breaker_take(1, 1);
        s.breaker_take(2, 3);
        assert_eq!(s.maker_move_max_danger(), Some(0));
        assert_eq!(s.record(0).w_m, 1);
        assert_eq!(s.maker_move_max_danger(), Some(2));
    }

    #[test]
    fn inactive_boxes_are_skipped() {
        let mut s = MinBoxState::uniform(2, 4, 0.5, 1);
        s.maker_claim(0, 2).unwrap();
        s.maker_claim(1, 2).unwrap();
        assert_eq!(s.max_danger_box(), None);
        assert_eq!(s.maker_move_max_danger(), None);
        assert_eq!(s.max_active_danger(), None);
    }

    #[test]
    fn full_active_box_still_counts_for_the_bound() {
        let mut s = MinBoxState::uniform(2, 3, 0.9, 5);
        s.breaker_claim_elements(&alloc(&[(0, 3)])).unwrap();
        assert_eq!(s.max_danger_box(), Some(1));
        assert_eq!(s.max_active_danger(), Some(3));
    }

    #[test]
    fn breaker_allocations() {
        let mut s = MinBoxState::uniform(5, 10, 0.5, 3);
        s.breaker_claim_elements(&alloc(&[(3, 3)])).unwrap();
        assert_eq!(s.record(3).w_b, 3);
        assert_eq!(
            s.breaker_claim_elements(&alloc(&[(1, 2), (2, 2)])),
            Err(MinBoxError::OverBudget {
                total: 4,
                budget: 3
            })
        );
        s.breaker_claim_elements(&BTreeMap::new()).unwrap();
        assert_eq!(s.breaker_total(), 3);
        let mut t = MinBoxState::uniform(2, 2, 0.5, 3);
        assert!(matches!(
            t.breaker_claim_elements(&alloc(&[(0, 3)])),
            Err(MinBoxError::BoxFull { .. })
        ));
    }

    proptest! {
        #[test]
        fn priority_agrees_with_a_scan(ops in proptest::collection::vec((0usize..6, 0usize..4, any::<bool>()), 1..80)) {
            let mut s = MinBoxState::uniform(6, 12, 0.4, 2);
            for (i, c, maker) in ops {
                if maker { s.maker_take(i, c); } else { s.breaker_take(i, c); }
                let want = (0..6)
                    .filter(|&j| s.is_active(j) && s.record(j).is_free())
                    .max_by_key(|&j| (s.dang(j), Reverse(j)));
                prop_assert_eq!(s.max_danger_box(), want);
                let max = (0..6).filter(|&j| s.is_active(j)).map(|j| s.dang(j)).max();
                prop_assert_eq!(s.max_active_danger(), max);
            }
        }
    }
}
