//! Edge layout, cycle tables and canonical relabelling.

use rustc_hash::FxHashSet;

use super::{key, Player, NO_POS};
use crate::engine::{EdgeId, GameState};

/// Edge bit positions on `K_n`, in [`EdgeId::index`] order.
#[derive(Clone, Debug)]
pub struct Layout {
    pub n: usize,
    pub edges: usize,
    pub full: u16,
    bit: [[u8; 8]; 8],
    ends: Vec<(usize, usize)>,
}

impl Layout {
    pub fn new(n: usize) -> Self {
        assert!(n <= super::MAX_N);
        let edges = n * (n - 1) / 2;
        let mut bit = [[u8::MAX; 8]; 8];
        let mut ends = vec![(0, 0); edges];
        for u in 0..n {
            for v in u + 1..n {
                let i = EdgeId::new(u, v).index(n);
                bit[u][v] = i as u8;
                bit[v][u] = i as u8;
                ends[i] = (u, v);
            }
        }
        Self {
            n,
            edges,
            full: ((1u32 << edges) - 1) as u16,
            bit,
            ends,
        }
    }

    #[inline]
    pub fn edge(&self, a: usize, b: usize) -> usize {
        self.bit[a][b] as usize
    }

    pub fn ends(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    /// Walker and Breaker edge masks of a board.
    pub fn masks(&self, state: &GameState) -> (u16, u16) {
        let (mut w, mut b) = (0u16, 0u16);
        for (i, &(u, v)) in self.ends.iter().enumerate() {
            if state.board().is_walker(u, v) {
                w |= 1 << i;
            } else if state.board().is_breaker(u, v) {
                b |= 1 << i;
            }
        }
        (w, b)
    }

    pub fn edge_ids(&self, mask: u16) -> Vec<EdgeId> {
        (0..self.edges)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| EdgeId::new(self.ends[i].0, self.ends[i].1))
            .collect()
    }
}

/// Every simple cycle of `K_n` and, per edge mask, the set of cycle
/// lengths it contains.
#[derive(Clone, Debug)]
pub struct CycleTable {
    cycles: Vec<(u16, Vec<usize>)>,
    lengths: Vec<u8>,
}

impl CycleTable {
    pub fn new(layout: &Layout) -> Self {
        let n = layout.n;
        let mut seen = FxHashSet::default();
        let mut cycles = Vec::new();
        fn extend(
            layout: &Layout,
            path: &mut Vec<usize>,
            mask: u16,
            seen: &mut FxHashSet<u16>,
            out: &mut Vec<(u16, Vec<usize>)>,
        ) {
            let (s, end) = (path[0], *path.last().expect("non-empty"));
            if path.len() >= 3 {
                let closed = mask | 1 << layout.edge(end, s);
                if seen.insert(closed) {
                    out.push((closed, path.clone()));
                }
            }
            for v in s + 1..layout.n {
                if !path.contains(&v) {
                    path.push(v);
                    extend(layout, path, mask | 1 << layout.edge(end, v), seen, out);
                    path.pop();
                }
            }
        }
        for s in 0..n {
            extend(layout, &mut vec![s], 0, &mut seen, &mut cycles);
        }
        let mut lengths = vec![0u8; 1 << layout.edges];
        for (m, l) in lengths.iter_mut().enumerate() {
            for (c, vs) in &cycles {
                if m as u16 & c == *c {
                    *l |= 1 << vs.len();
                }
            }
        }
        Self { cycles, lengths }
    }

    pub fn count(&self) -> usize {
        self.cycles.len()
    }

    /// Bit `k` is set when `mask` contains a `k`-cycle.
    #[inline]
    pub fn lengths(&self, mask: u16) -> u8 {
        self.lengths[mask as usize]
    }

    pub fn longest(&self, mask: u16) -> usize {
        let l = self.lengths(mask);
        if l == 0 {
            0
        } else {
            7 - l.leading_zeros() as usize
        }
    }

    /// Some cycle inside `mask` with `len` vertices.
    pub fn find(&self, mask: u16, len: usize) -> Option<&[usize]> {
        self.cycles
            .iter()
            .find(|(c, vs)| vs.len() == len && mask & c == *c)
            .map(|(_, vs)| vs.as_slice())
    }
}

/// A vertex relabelling acting on edge masks through byte tables.
#[derive(Clone)]
struct Perm {
    lut: [[u16; 256]; 2],
}

impl Perm {
    fn new(layout: &Layout, sigma: &[usize]) -> Self {
        let mut lut = [[0u16; 256]; 2];
        for (chunk, table) in lut.iter_mut().enumerate() {
            for (byte, slot) in table.iter_mut().enumerate() {
                let mut m = 0u16;
                for j in 0..8 {
                    let i = chunk * 8 + j;
                    if byte >> j & 1 == 1 && i < layout.edges {
                        let (u, v) = layout.ends(i);
                        m |= 1 << layout.edge(sigma[u], sigma[v]);
                    }
                }
                *slot = m;
            }
        }
        Self { lut }
    }

    #[inline]
    fn apply(&self, mask: u16) -> u16 {
        self.lut[0][(mask & 0xff) as usize] | self.lut[1][(mask >> 8) as usize]
    }
}

/// Canonical keys: the lexicographically smallest `(W, B)` image over all
/// relabellings sending the position to vertex 0.
pub(crate) struct Canon {
    by_pos: Vec<Vec<Perm>>,
    all: Vec<Perm>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k % 2 == 0 { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

impl Canon {
    pub fn new(layout: &Layout) -> Self {
        let n = layout.n;
        let sigmas = permutations(n);
        let mut by_pos = vec![Vec::new(); n];
        let mut all = Vec::new();
        for s in &sigmas {
            let p = Perm::new(layout, s);
            let from = s.iter().position(|&x| x == 0).expect("permutation");
            by_pos[from].push(p.clone());
            all.push(p);
        }
        Self { by_pos, all }
    }

    pub fn key(&self, w: u16, b: u16, pos: Option<usize>, turn: Player) -> u64 {
        let perms = match pos {
            Some(p) => &self.by_pos[p],
            None => &self.all,
        };
        let best = perms
            .iter()
            .map(|p| (p.apply(w), p.apply(b)))
            .min()
            .expect("non-empty");
        key(best.0, best.1, pos.map_or(NO_POS, |_| 0), turn)
    }
}
