//! Rooted tree bookkeeping for the builder.

use std::collections::VecDeque;

use crate::graph;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct RootedTree {
    root: usize,
    parent: Vec<u32>,
    depth: Vec<u32>,
    degree: Vec<u32>,
    size: usize,
    max_depth: u32,
    branching: usize,
}

impl RootedTree {
    pub fn new(n: usize, root: usize) -> Self {
        let mut depth = vec![NONE; n];
        depth[root] = 0;
        Self {
            root,
            parent: vec![NONE; n],
            depth,
            degree: vec![0; n],
            size: 1,
            max_depth: 0,
            branching: 0,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.depth[v] != NONE
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> usize {
        self.size - 1
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth as usize
    }

    pub fn depth(&self, v: usize) -> Option<usize> {
        self.contains(v).then(|| self.depth[v] as usize)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then(|| self.parent[v] as usize)
    }

    /// Vertices of tree degree at least two.
    pub fn branching(&self) -> usize {
        self.branching
    }

    fn bump(&mut self, v: usize) {
        self.degree[v] += 1;
        if self.degree[v] == 2 {
            self.branching += 1;
        }
    }

    pub fn add_leaf(&mut self, parent: usize, leaf: usize) {
        debug_assert!(self.contains(parent) && !self.contains(leaf));
        self.parent[leaf] = parent as u32;
        self.depth[leaf] = self.depth[parent] + 1;
        self.max_depth = self.max_depth.max(self.depth[leaf]);
        self.size += 1;
        self.bump(parent);
        self.bump(leaf);
    }

    /// Tree path from `from` to `to`, excluding `from`.
    pub fn route(&self, from: usize, to: usize) -> VecDeque<usize> {
        let (mut a, mut b) = (from, to);
        let mut up = Vec::new();
        let mut down = Vec::new();
        while self.depth[a] > self.depth[b] {
            a = self.parent[a] as usize;
            up.push(a);
        }
        while self.depth[b] > self.depth[a] {
            down.push(b);
            b = self.parent[b] as usize;
        }
        while a != b {
            a = self.parent[a] as usize;
            up.push(a);
            down.push(b);
            b = self.parent[b] as usize;
        }
        up.extend(down.into_iter().rev());
        up.into()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            if let Some(p) = self.parent(v) {
                adj[v].push(p);
                adj[p].push(v);
            }
        }
        adj
    }

    /// Depth of every member recomputed by BFS from the root.
    pub fn bfs_depths(&self) -> Vec<u32> {
        graph::bfs_distances(&self.adjacency(), self.root)
    }

    /// True when the stored depth of every member matches BFS.
    pub fn depths_consistent(&self) -> bool {
        let bfs = self.bfs_depths();
        (0..self.parent.len()).all(|v| {
            if self.contains(v) {
                bfs[v] == self.depth[v]
            } else {
                bfs[v] == graph::UNREACHED
            }
        })
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&v| self.contains(v))
            .collect()
    }
}
