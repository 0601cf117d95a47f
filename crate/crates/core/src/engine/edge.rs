use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// An edge of `K_n` in canonical form (`u < v`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    u: u32,
    v: u32,
}

impl EdgeId {
    /// Canonicalizes the pair. Panics on a loop.
    #[inline]
    pub fn new(a: usize, b: usize) -> Self {
        Self::try_new(a, b).expect("edge endpoints must differ")
    }

    #[inline]
    pub fn try_new(a: usize, b: usize) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self {
                u: a as u32,
                v: b as u32,
            }),
            std::cmp::Ordering::Greater => Some(Self {
                u: b as u32,
                v: a as u32,
            }),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn u(self) -> usize {
        self.u as usize
    }

    #[inline]
    pub fn v(self) -> usize {
        self.v as usize
    }

    #[inline]
    pub fn endpoints(self) -> (usize, usize) {
        (self.u as usize, self.v as usize)
    }

    #[inline]
    pub fn contains(self, x: usize) -> bool {
        self.u as usize == x || self.v as usize == x
    }

    /// The endpoint that is not `x`.
    #[inline]
    pub fn other(self, x: usize) -> usize {
        if self.u as usize == x {
            self.v as usize
        } else {
            debug_assert_eq!(self.v as usize, x);
            self.u as usize
        }
    }

    /// Next edge in lexicographic order on `K_n`.
    pub fn successor(self, n: usize) -> Option<Self> {
        let (u, v) = self.endpoints();
        if v + 1 < n {
            Some(Self::new(u, v + 1))
        } else if u + 2 < n {
            Some(Self::new(u + 1, u + 2))
        } else {
            None
        }
    }

    /// Rank of the edge in lexicographic order of pairs on `n` vertices.
    #[inline]
    pub fn index(self, n: usize) -> usize {
        let (u, v) = self.endpoints();
        u * n - u * (u + 1) / 2 + (v - u - 1)
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        // Row u starts at u·n - u(u+1)/2; invert the quadratic, then correct.
        let start = |u: usize| u * n - u * (u + 1) / 2;
        let m = 2.0 * n as f64 - 1.0;
        let est = ((m - (m * m - 8.0 * idx as f64).max(0.0).sqrt()) / 2.0).floor();
        let mut u = (est.max(0.0) as usize).min(n - 2);
        while u > 0 && start(u) > idx {
            u -= 1;
        }
        while u + 2 < n && start(u + 1) <= idx {
            u += 1;
        }
        Self::new(u, u + 1 + idx - start(u))
    }

    /// Packs the edge into a single `u64` key.
    #[inline]
    pub fn key(self) -> u64 {
        (self.u as u64) << 32 | self.v as u64
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("malformed edge `{0}`")]
pub struct ParseEdgeError(pub String);

impl FromStr for EdgeId {
    type Err = ParseEdgeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseEdgeError(s.to_owned());
        let (a, b) = s.split_once('-').ok_or_else(err)?;
        let a: usize = a.parse().map_err(|_| err())?;
        let b: usize = b.parse().map_err(|_| err())?;
        Self::try_new(a, b).ok_or_else(err)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeState {
    Free,
    WalkerOwned,
    BreakerOwned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    Walker,
    Breaker,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::Walker => Player::Breaker,
            Player::Breaker => Player::Walker,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Player::Walker => 'W',
            Player::Breaker => 'B',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "W" | "w" | "walker" => Some(Player::Walker),
            "B" | "b" | "breaker" => Some(Player::Breaker),
            _ => None,
        }
    }
}
