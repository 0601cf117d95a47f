//! Coin exposure over a local vertex set: unexposed neighbourhoods, the
//! generated graph `H` and the failure counters.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;

pub const COIN_BINS: usize = 16;

/// Coins tossed and successes at exposure positions `[2^k - 1, 2^(k+1) - 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinBin {
    pub tossed: u64,
    pub successes: u64,
}

fn bin_of(j: u64) -> usize {
    ((64 - (j + 1).leading_zeros() - 1) as usize).min(COIN_BINS - 1)
}

fn bin_range(k: usize) -> (u64, u64) {
    let lo = (1u64 << k) - 1;
    let hi = if k == COIN_BINS - 1 {
        u64::MAX
    } else {
        (1u64 << (k + 1)) - 1
    };
    (lo, hi)
}

/// Failures before the first success of a `p`-coin.
pub fn geometric(p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u: f64 = rng.gen();
    let k = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
    if k.is_finite() && k < u64::MAX as f64 {
        k as u64
    } else {
        u64::MAX
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExposureOutcome {
    /// Every coin failed.
    TypeOne { tossed: usize },
    /// First success at `to`, `k`-th coin (zero based); the edge may be free.
    Success { to: usize, k: usize },
}

#[derive(Clone, Debug)]
pub struct ExposureState {
    unexposed: Vec<BitSet>,
    h: Vec<(u32, u32)>,
    d_h: Vec<u32>,
    f_one: Vec<u32>,
    f_two: Vec<u32>,
    exposed: u64,
    bins: [CoinBin; COIN_BINS],
}

impl ExposureState {
    /// Every pair of the `n` local vertices starts unexposed.
    pub fn new(n: usize) -> Self {
        let unexposed = (0..n)
            .map(|v| {
                let mut s = BitSet::full(n);
                s.remove(v);
                s
            })
            .collect();
        Self {
            unexposed,
            h: Vec::new(),
            d_h: vec![0; n],
            f_one: vec![0; n],
            f_two: vec![0; n],
            exposed: 0,
            bins: [CoinBin::default(); COIN_BINS],
        }
    }

    pub fn len(&self) -> usize {
        self.d_h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_h.is_empty()
    }

    pub fn unexposed(&self, v: usize) -> &BitSet {
        &self.unexposed[v]
    }

    pub fn is_exposed(&self, u: usize, v: usize) -> bool {
        !self.unexposed[u].contains(v)
    }

    pub fn h_edges(&self) -> &[(u32, u32)] {
        &self.h
    }

    pub fn d_h(&self) -> &[u32] {
        &self.d_h
    }

    pub fn f_one(&self) -> &[u32] {
        &self.f_one
    }

    pub fn f_two(&self) -> &[u32] {
        &self.f_two
    }

    pub fn exposed_edges(&self) -> u64 {
        self.exposed
    }

    pub fn bins(&self) -> &[CoinBin; COIN_BINS] {
        &self.bins
    }

    fn expose_pair(&mut self, u: usize, v: usize) {
        self.unexposed[u].remove(v);
        self.unexposed[v].remove(u);
        self.exposed += 1;
    }

    fn add_h(&mut self, u: usize, v: usize) {
        self.h.push((u.min(v) as u32, u.max(v) as u32));
        self.d_h[u] += 1;
        self.d_h[v] += 1;
    }

    /// Records `len` coins at positions `0..len` of one run.
    fn bin_run(&mut self, len: u64, success: bool) {
        if len == 0 {
            return;
        }
        for k in 0..COIN_BINS {
            let (lo, hi) = bin_range(k);
            if lo >= len {
                break;
            }
            self.bins[k].tossed += hi.min(len) - lo;
        }
        if success {
            self.bins[bin_of(len - 1)].successes += 1;
        }
    }

    /// Tosses coins on `U_v` in ascending order until the first success.
    pub fn expose(&mut self, v: usize, p: f64, rng: &mut ChaCha8Rng) -> ExposureOutcome {
        let m = self.unexposed[v].count();
        let k = geometric(p, rng);
        if k >= m as u64 {
            let members: Vec<usize> = self.unexposed[v].iter().collect();
            for u in members {
                self.expose_pair(v, u);
            }
            self.bin_run(m as u64, false);
            self.f_one[v] += 1;
            return ExposureOutcome::TypeOne { tossed: m };
        }
        let k = k as usize;
        let to = self.unexposed[v].nth(k).expect("k < |U_v|");
        let prefix: Vec<usize> = self.unexposed[v].iter().take(k + 1).collect();
        for u in prefix {
            self.expose_pair(v, u);
        }
        self.bin_run(k as u64 + 1, true);
        self.add_h(v, to);
        ExposureOutcome::Success { to, k }
    }

    /// A success on an edge Walker cannot claim.
    pub fn type_two(&mut self, u: usize, v: usize) {
        self.f_two[u] += 1;
        self.f_two[v] += 1;
    }

    /// Tosses every remaining unexposed pair; each success is a type II
    /// failure at both ends. Returns `(coins, successes)`.
    pub fn flush(&mut self, p: f64, rng: &mut ChaCha8Rng) -> (u64, u64) {
        let n = self.len();
        let mut skip = geometric(p, rng);
        let mut run = 0u64;
        let (mut coins, mut hits) = (0u64, 0u64);
        for u in 0..n {
            let later: Vec<usize> = self.unexposed[u].iter().filter(|&v| v > u).collect();
            for v in later {
                self.expose_pair(u, v);
                coins += 1;
                self.bins[bin_of(run)].tossed += 1;
                if skip == 0 {
                    self.bins[bin_of(run)].successes += 1;
                    self.add_h(u, v);
                    self.type_two(u, v);
                    hits += 1;
                    run = 0;
                    skip = geometric(p, rng);
                } else {
                    skip -= 1;
                    run += 1;
                }
            }
        }
        (coins, hits)
    }
}

/// Pearson statistic of per-bin success counts against rate `p`, with the
/// number of bins used and the upper-tail probability.
pub fn coin_chi_square(bins: &[CoinBin], p: f64) -> (f64, usize, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let mut stat = 0.0;
    let mut dof = 0;
    for b in bins {
        let e = b.tossed as f64 * p;
        if e < 5.0 || b.tossed as f64 * (1.0 - p) < 5.0 {
            continue;
        }
        stat += (b.successes as f64 - e).powi(2) / (e * (1.0 - p));
        dof += 1;
    }
    if dof == 0 {
        return (0.0, 0, 1.0);
    }
    let tail = 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat);
    (stat, dof, tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn bins_cover_positions() {
        assert_eq!(bin_of(0), 0);
        assert_eq!(bin_of(1), 1);
        assert_eq!(bin_of(2), 1);
        assert_eq!(bin_of(3), 2);
        assert_eq!(bin_of(1 << 40), COIN_BINS - 1);
        let mut e = ExposureState::new(2);
        e.bin_run(7, true);
        let tossed: Vec<u64> = e.bins.iter().take(4).map(|b| b.tossed).collect();
        assert_eq!(tossed, vec![1, 2, 4, 0]);
        assert_eq!(e.bins[2].successes, 1);
    }

    #[test]
    fn certain_failure_exposes_everything() {
        let mut e = ExposureState::new(6);
        let out = e.expose(2, 0.0, &mut rng(1));
        assert_eq!(out, ExposureOutcome::TypeOne { tossed: 5 });
        assert_eq!(e.f_one()[2], 1);
        assert!(e.unexposed(2).is_empty());
        assert!((0..6)
            .filter(|&u| u != 2)
            .all(|u| !e.unexposed(u).contains(2)));
        assert_eq!(e.exposed_edges(), 5);
    }

    #[test]
    fn certain_success_takes_the_lowest() {
        let mut e = ExposureState::new(5);
        assert_eq!(
            e.expose(3, 1.0, &mut rng(1)),
            ExposureOutcome::Success { to: 0, k: 0 }
        );
        assert_eq!(
            e.expose(3, 1.0, &mut rng(1)),
            ExposureOutcome::Success { to: 1, k: 0 }
        );
        assert_eq!(e.h_edges(), &[(0, 3), (1, 3)]);
        assert_eq!(e.d_h()[3], 2);
    }

    #[test]
    fn third_coin_success_exposes_three() {
        // Find a seed whose first success lands on the third coin.
        let p = 0.3;
        let seed = (0..1000).find(|&s| geometric(p, &mut rng(s)) == 2).unwrap();
        let mut e = ExposureState::new(10);
        assert_eq!(
            e.expose(0, p, &mut rng(seed)),
            ExposureOutcome::Success { to: 3, k: 2 }
        );
        assert_eq!(e.unexposed(0).count(), 9 - 3);
        assert!(e.is_exposed(2, 0) && !e.is_exposed(4, 0));
    }

    #[test]
    fn flush_of_nothing_is_a_no_op() {
        let mut e = ExposureState::new(4);
        for v in 0..4 {
            e.expose(v, 0.0, &mut rng(0));
        }
        assert_eq!(e.flush(0.5, &mut rng(3)), (0, 0));
    }

    #[test]
    fn forced_flush_success_counts_both_ends() {
        let mut e = ExposureState::new(2);
        assert_eq!(e.flush(1.0, &mut rng(3)), (1, 1));
        assert_eq!(e.f_two(), &[1, 1]);
        assert_eq!(e.d_h(), &[1, 1]);
    }

    #[test]
    fn coins_pass_chi_square() {
        let p = 0.05;
        let mut e = ExposureState::new(400);
        let mut r = rng(42);
        for round in 0..4000 {
            e.expose(round % 400, p, &mut r);
        }
        e.flush(p, &mut r);
        let (_, dof, tail) = coin_chi_square(e.bins(), p);
        assert!(dof >= 4);
        assert!(tail > 0.01, "tail {tail}");
        assert_eq!(e.exposed_edges(), 400 * 399 / 2);
    }

    #[test]
    fn shifted_success_fails_chi_square() {
        let p = 0.05;
        let mut bins = [CoinBin::default(); COIN_BINS];
        let mut r = rng(5);
        for _ in 0..20_000 {
            // Success recorded one coin late.
            let k = geometric(p, &mut r) + 1;
            let mut e = ExposureState::new(1);
            e.bin_run(k + 1, true);
            for (a, b) in bins.iter_mut().zip(e.bins.iter()) {
                a.tossed += b.tossed;
                a.successes += b.successes;
            }
        }
        assert!(coin_chi_square(&bins, p).2 < 0.01);
    }
}
