//! Plain graph routines used by reports and oracles.

use std::collections::VecDeque;

use crate::bitset::BitSet;
use crate::engine::{Certificate, GameState};

pub const UNREACHED: u32 = u32::MAX;

/// Adjacency lists of Walker's graph.
pub fn walker_adjacency(state: &GameState) -> Vec<Vec<usize>> {
    (0..state.n())
        .map(|v| state.board().walker_neighbors(v))
        .collect()
}

/// Hop distances from `src`; [`UNREACHED`] marks other components.
pub fn bfs_distances(adj: &[Vec<usize>], src: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHED; adj.len()];
    let mut queue = VecDeque::new();
    dist[src] = 0;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == UNREACHED {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS parents from `src` (`parent[src] == src`, `usize::MAX` if unreached).
pub fn bfs_parents(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    parent[src] = src;
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    parent
}

fn farthest(dist: &[u32]) -> (usize, u32) {
    let mut best = (0, 0);
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > best.1 {
            best = (v, d);
        }
    }
    best
}

/// Eccentricity of `src` inside its component.
pub fn eccentricity(adj: &[Vec<usize>], src: usize) -> u32 {
    farthest(&bfs_distances(adj, src)).1
}

/// Diameter of the component of `src` by two sweeps. Exact on trees; on
/// general graphs a lower bound.
pub fn double_sweep_diameter(adj: &[Vec<usize>], src: usize) -> u32 {
    let (far, _) = farthest(&bfs_distances(adj, src));
    farthest(&bfs_distances(adj, far)).1
}

/// Exact diameter of the component of `src` by BFS from every member.
pub fn exact_diameter(adj: &[Vec<usize>], src: usize) -> u32 {
    let comp = bfs_distances(adj, src);
    (0..adj.len())
        .filter(|&v| comp[v] != UNREACHED)
        .map(|v| eccentricity(adj, v))
        .max()
        .unwrap_or(0)
}

/// Some long cycle of Walker's graph, found as the longest DFS back edge.
pub fn dfs_cycle(adj: &[Vec<usize>], root: usize) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut depth = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut best: Option<(usize, usize, usize)> = None;
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    depth[root] = 0;
    let mut on_stack = vec![false; n];
    on_stack[root] = true;
    while let Some(&mut (u, ref mut i)) = stack.last_mut() {
        if *i < adj[u].len() {
            let w = adj[u][*i];
            *i += 1;
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                on_stack[w] = true;
                stack.push((w, 0));
            } else if on_stack[w] && w != parent[u] {
                let len = depth[u] - depth[w] + 1;
                if best.is_none_or(|(l, _, _)| len > l) {
                    best = Some((len, u, w));
                }
            }
        } else {
            on_stack[u] = false;
            stack.pop();
        }
    }
    let (_, mut u, top) = best?;
    let mut cycle = vec![u];
    while u != top {
        u = parent[u];
        cycle.push(u);
    }
    cycle.reverse();
    Some(cycle)
}

/// Certificate for the longest DFS cycle of Walker's graph, if any.
pub fn walker_dfs_cycle(state: &GameState) -> Option<Certificate> {
    let root = state.start_vertex()?;
    dfs_cycle(&walker_adjacency(state), root).map(Certificate::cycle)
}

/// Induced subgraph on `vertices` as bit rows over local indices.
pub fn induced_rows(adj: &[Vec<usize>], vertices: &[usize]) -> Vec<BitSet> {
    let mut local = vec![usize::MAX; adj.len()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let k = vertices.len();
    vertices
        .iter()
        .map(|&v| {
            let mut row = BitSet::new(k);
            for &w in &adj[v] {
                if local[w] != usize::MAX {
                    row.insert(local[w]);
                }
            }
            row
        })
        .collect()
}

/// Searches for a Hamilton cycle by backtracking. `None` when the node
/// budget runs out before a decision.
pub fn hamilton_cycle(rows: &[BitSet], budget: u64) -> Option<Option<Vec<usize>>> {
    let n = rows.len();
    if n < 3 {
        return Some(None);
    }
    if rows.iter().any(|r| r.count() < 2) || !biconnected(rows) {
        return Some(None);
    }
    let mut path = vec![0usize];
    let mut used = BitSet::new(n);
    used.insert(0);
    let mut nodes = 0u64;
    match ham_extend(rows, &mut path, &mut used, &mut nodes, budget) {
        Some(true) => Some(Some(path)),
        Some(false) => Some(None),
        None => None,
    }
}

fn reaches_all_unused(rows: &[BitSet], used: &BitSet, end: usize, start: usize) -> bool {
    let n = rows.len();
    let mut seen = BitSet::new(n);
    let mut stack = vec![end];
    let mut reached = 0;
    let mut touches_start = false;
    while let Some(u) = stack.pop() {
        for w in rows[u].iter() {
            if w == start && u != end {
                touches_start = true;
            }
            if !used.contains(w) && seen.insert(w) {
                reached += 1;
                stack.push(w);
            }
        }
    }
    let unused = n - used.count();
    reached == unused && (touches_start || unused == 0)
}

/// No vertex whose removal disconnects the graph, and the graph is connected.
fn biconnected(rows: &[BitSet]) -> bool {
    let n = rows.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    // Iterative DFS: (vertex, parent, next neighbour to scan from).
    let mut stack = vec![(0usize, usize::MAX, 0usize)];
    disc[0] = 0;
    low[0] = 0;
    let mut root_children = 0;
    while let Some(&mut (u, parent, ref mut from)) = stack.last_mut() {
        match rows[u].next_from(*from) {
            Some(w) => {
                *from = w + 1;
                if disc[w] == usize::MAX {
                    time += 1;
                    disc[w] = time;
                    low[w] = time;
                    if u == 0 {
                        root_children += 1;
                    }
                    stack.push((w, u, 0));
                } else if w != parent {
                    low[u] = low[u].min(disc[w]);
                }
            }
            None => {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if parent != 0 && low[u] >= disc[parent] {
                        return false;
                    }
                }
            }
        }
    }
    disc.iter().all(|&d| d != usize::MAX) && root_children <= 1
}

fn ham_extend(
    rows: &[BitSet],
    path: &mut Vec<usize>,
    used: &mut BitSet,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let n = rows.len();
    let end = *path.last().expect("non-empty");
    if path.len() == n {
        return Some(rows[end].contains(path[0]));
    }
    // Every unused vertex needs two usable neighbours among unused, end,
    // start. An unused neighbour of `end` with exactly two must come next.
    let start = path[0];
    let mut forced = None;
    for v in 0..n {
        if used.contains(v) {
            continue;
        }
        let mut k = 0;
        for w in rows[v].iter() {
            if !used.contains(w) || w == end || w == start {
                k += 1;
                if k == 3 {
                    break;
                }
            }
        }
        if k < 2 {
            return Some(false);
        }
        if k == 2 && end != start && rows[end].contains(v) && path.len() + 1 < n {
            if rows[v].contains(start) || forced.is_some() {
                return Some(false);
            }
            forced = Some(v);
        }
    }
    // The rest of the cycle is a path from `end` to `start` through every
    // unused vertex.
    if !reaches_all_unused(rows, used, end, start) {
        return Some(false);
    }
    let mut next: Vec<(usize, usize)> = rows[end]
        .iter()
        .filter(|&w| !used.contains(w) && forced.map_or(true, |f| f == w))
        .map(|w| (rows[w].iter().filter(|&z| !used.contains(z)).count(), w))
        .collect();
    next.sort_unstable();
    for (_, w) in next {
        path.push(w);
        used.insert(w);
        match ham_extend(rows, path, used, nodes, budget) {
            Some(true) => return Some(true),
            None => return None,
            Some(false) => {}
        }
        used.remove(w);
        path.pop();
    }
    Some(false)
}

/// Some cycle with exactly `k` vertices, by exhaustive search.
pub fn find_k_cycle(rows: &[BitSet], k: usize) -> Option<Vec<usize>> {
    let n = rows.len();
    if k < 3 || k > n {
        return None;
    }
    if k == 3 {
        for u in 0..n {
            for v in rows[u].iter().filter(|&v| v > u) {
                let mut w = rows[u].next_from(v + 1);
                while let Some(x) = w {
                    if rows[v].contains(x) {
                        return Some(vec![u, v, x]);
                    }
                    w = rows[u].next_from(x + 1);
                }
            }
        }
        return None;
    }
    let mut path = Vec::with_capacity(k);
    for s in 0..n {
        path.clear();
        path.push(s);
        if k_extend(rows, k, &mut path) {
            return Some(path);
        }
    }
    None
}

fn k_extend(rows: &[BitSet], k: usize, path: &mut Vec<usize>) -> bool {
    let s = path[0];
    let end = *path.last().expect("non-empty");
    if path.len() == k {
        return rows[end].contains(s);
    }
    let mut cur = rows[end].next_from(s + 1);
    while let Some(w) = cur {
        if !path.contains(&w) {
            path.push(w);
            if k_extend(rows, k, path) {
                return true;
            }
            path.pop();
        }
        cur = rows[end].next_from(w + 1);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path_graph(n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|v| {
                let mut a = Vec::new();
                if v > 0 {
                    a.push(v - 1);
                }
                if v + 1 < n {
                    a.push(v + 1);
                }
                a
            })
            .collect()
    }

    fn rows_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<BitSet> {
        let mut rows = vec![BitSet::new(n); n];
        for &(a, b) in edges {
            rows[a].insert(b);
            rows[b].insert(a);
        }
        rows
    }

    #[test]
    fn diameters_on_a_path() {
        let g = path_graph(7);
        assert_eq!(double_sweep_diameter(&g, 3), 6);
        assert_eq!(exact_diameter(&g, 3), 6);
    }

    #[test]
    fn dfs_cycle_finds_the_ring() {
        let mut g = path_graph(5);
        g[0].push(4);
        g[4].push(0);
        let c = dfs_cycle(&g, 2).unwrap();
        assert_eq!(c.len(), 5);
        assert!(dfs_cycle(&path_graph(5), 0).is_none());
    }

    #[test]
    fn hamiltonicity_small_cases() {
        let c5 = rows_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(hamilton_cycle(&c5, 1000).unwrap().is_some());
        // K_{2,3} has no Hamilton cycle.
        let k23 = rows_from_edges(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
        assert_eq!(hamilton_cycle(&k23, 10_000), Some(None));
    }

    fn brute_hamiltonian(rows: &[BitSet]) -> bool {
        fn go(rows: &[BitSet], path: &mut Vec<usize>) -> bool {
            let n = rows.len();
            let end = *path.last().unwrap();
            if path.len() == n {
                return rows[end].contains(path[0]);
            }
            for w in 1..n {
                if rows[end].contains(w) && !path.contains(&w) {
                    path.push(w);
                    if go(rows, path) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        go(rows, &mut vec![0])
    }

    #[test]
    fn bowtie_is_not_hamiltonian() {
        let g = rows_from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert!(!biconnected(&g));
        assert_eq!(hamilton_cycle(&g, 1000), Some(None));
    }

    proptest! {
        #[test]
        fn hamilton_search_matches_brute_force(n in 3usize..9, bits in proptest::collection::vec(any::<bool>(), 28)) {
            let mut edges = Vec::new();
            let mut i = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[i] {
                        edges.push((a, b));
                    }
                    i += 1;
                }
            }
            let rows = rows_from_edges(n, &edges);
            let got = hamilton_cycle(&rows, 1_000_000).unwrap();
            prop_assert_eq!(got.is_some(), brute_hamiltonian(&rows));
            if let Some(c) = got {
                prop_assert_eq!(c.len(), n);
                for k in 0..n {
                    prop_assert!(rows[c[k]].contains(c[(k + 1) % n]));
                }
            }
        }
    }

    #[test]
    fn k_cycles() {
        let c5 = rows_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert!(find_k_cycle(&c5, 3).is_none());
        assert!(find_k_cycle(&c5, 4).is_none());
        assert_eq!(find_k_cycle(&c5, 5).map(|c| c.len()), Some(5));
        let tri = rows_from_edges(4, &[(0, 1), (1, 3), (3, 0)]);
        assert_eq!(find_k_cycle(&tri, 3), Some(vec![0, 1, 3]));
    }

    proptest! {
        #[test]
        fn double_sweep_is_exact_on_random_trees(parents in proptest::collection::vec(0usize..1000, 1..60)) {
            let n = parents.len() + 1;
            let mut g = vec![Vec::new(); n];
            for (i, p) in parents.iter().enumerate() {
                let child = i + 1;
                let par = p % child;
                g[child].push(par);
                g[par].push(child);
            }
            prop_assert_eq!(double_sweep_diameter(&g, 0), exact_diameter(&g, 0));
        }

        #[test]
        fn dfs_cycles_are_real(edges in proptest::collection::vec((0usize..12, 0usize..12), 0..30)) {
            let mut g = vec![Vec::new(); 12];
            for (a, b) in edges {
                if a != b && !g[a].contains(&b) {
                    g[a].push(b);
                    g[b].push(a);
                }
            }
            if let Some(c) = dfs_cycle(&g, 0) {
                prop_assert!(c.len() >= 3);
                for i in 0..c.len() {
                    let (a, b) = (c[i], c[(i + 1) % c.len()]);
                    prop_assert!(g[a].contains(&b));
                }
                let mut s = c.clone();
                s.sort();
                s.dedup();
                prop_assert_eq!(s.len(), c.len());
            }
        }
    }
}
