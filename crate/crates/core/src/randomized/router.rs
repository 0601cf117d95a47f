//! Walks over Walker's initial graph `W_0`.

use std::collections::VecDeque;

use crate::diameter::RootedTree;
use crate::graph;

/// Shortest-path routing in `W_0`. A tree component routes through the
/// lowest common ancestor; anything else runs a BFS per target.
#[derive(Clone, Debug)]
pub struct W0Router {
    adj: Vec<Vec<usize>>,
    tree: Option<RootedTree>,
    root: usize,
}

impl W0Router {
    pub fn new(adj: Vec<Vec<usize>>, root: usize) -> Self {
        let n = adj.len();
        let mut tree = RootedTree::new(n, root);
        let mut queue = VecDeque::from([root]);
        let mut edges2 = 0usize;
        while let Some(u) = queue.pop_front() {
            edges2 += adj[u].len();
            for &w in &adj[u] {
                if !tree.contains(w) {
                    tree.add_leaf(u, w);
                    queue.push_back(w);
                }
            }
        }
        let is_tree = edges2 / 2 == tree.size() - 1;
        Self {
            adj,
            tree: is_tree.then_some(tree),
            root,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn is_tree(&self) -> bool {
        self.tree.is_some()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Lowest-index `W_0` neighbour.
    pub fn first_neighbor(&self, v: usize) -> Option<usize> {
        self.adj[v].iter().copied().min()
    }

    /// Shortest `W_0` path from `from` to `to`, excluding `from`; `None`
    /// when they lie in different components.
    pub fn route(&self, from: usize, to: usize) -> Option<VecDeque<usize>> {
        if let Some(t) = &self.tree {
            if t.contains(from) && t.contains(to) {
                return Some(t.route(from, to));
            }
        }
        let parent = graph::bfs_parents(&self.adj, to);
        if parent[from] == usize::MAX {
            return None;
        }
        let mut path = VecDeque::new();
        let mut v = from;
        while v != to {
            v = parent[v];
            path.push_back(v);
        }
        Some(path)
    }

    /// Largest `W_0` distance between two of `targets`, `None` if some pair
    /// is disconnected.
    pub fn max_distance(&self, targets: &[usize]) -> Option<usize> {
        let Some(&first) = targets.first() else {
            return Some(0);
        };
        let far = |src: usize| -> Option<(usize, usize)> {
            let dist = graph::bfs_distances(&self.adj, src);
            let mut best = (src, 0usize);
            for &t in targets {
                if dist[t] == graph::UNREACHED {
                    return None;
                }
                if dist[t] as usize > best.1 {
                    best = (t, dist[t] as usize);
                }
            }
            Some(best)
        };
        if self.tree.is_some() {
            // Two sweeps are exact on a tree metric.
            let (a, _) = far(first)?;
            return far(a).map(|(_, d)| d);
        }
        let mut best = 0;
        for &t in targets {
            best = best.max(far(t)?.1);
        }
        Some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    #[test]
    fn tree_routes_are_shortest() {
        let adj = undirected(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]);
        let r = W0Router::new(adj, 0);
        assert!(r.is_tree());
        assert_eq!(Vec::from(r.route(3, 5).unwrap()), vec![1, 0, 2, 5]);
        assert_eq!(r.route(6, 0), None);
        assert_eq!(r.max_distance(&[0, 1, 2, 3, 4, 5]), Some(4));
        assert_eq!(r.max_distance(&[3, 4]), Some(2));
        assert_eq!(r.max_distance(&[3, 6]), None);
        assert_eq!(r.first_neighbor(1), Some(0));
    }

    #[test]
    fn cyclic_graphs_fall_back_to_bfs() {
        let adj = undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let r = W0Router::new(adj, 0);
        assert!(!r.is_tree());
        assert_eq!(r.route(1, 4).unwrap().len(), 3);
        assert_eq!(r.max_distance(&[0, 1, 2, 3, 4, 5]), Some(3));
    }

    #[test]
    fn star_has_distance_two() {
        let edges: Vec<_> = (1..10).map(|v| (0, v)).collect();
        let r = W0Router::new(undirected(10, &edges), 0);
        assert_eq!(r.max_distance(&(0..10).collect::<Vec<_>>()), Some(2));
    }
}
