//! Graph representation, truncated BFS, generators, and edge-list I/O.

mod bfs;
mod gen;
mod io;

pub use bfs::{
    all_pairs_distances, bfs_truncated, distances_from, BfsMember, TruncatedBfsTree, INFINITY,
};
pub use gen::{barbell, complete, cycle, gnp, grid, path, star};
pub use io::{read_edge_list, write_edge_list};

use std::collections::BTreeSet;

use crate::{Error, Result};

/// Default cap on the size of graphs the exact distance oracles accept.
pub const DEFAULT_ORACLE_LIMIT: usize = 5000;

/// Undirected, unweighted simple graph over vertex IDs `0..n`.
///
/// Immutable after construction; spanners under construction live in
/// [`EdgeSet`] values instead of mutating the input graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, out-of-range
    /// IDs, and duplicate pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            m += 1;
        }
        for list in &mut adj {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput("duplicate edge".into()));
            }
        }
        Ok(Graph { adj, m })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Neighbors of `v` in ascending ID order.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.n() as u32
    }

    /// All edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph keeping only edges whose endpoints both satisfy `keep`.
    /// The vertex set (and all IDs) stay unchanged; dropped vertices become
    /// isolated.
    pub fn filter_vertices(&self, keep: &[bool]) -> Graph {
        assert_eq!(keep.len(), self.n());
        let mut adj = vec![Vec::new(); self.n()];
        let mut m = 0;
        for (u, list) in self.adj.iter().enumerate() {
            if !keep[u] {
                continue;
            }
            for &v in list {
                if keep[v as usize] {
                    adj[u].push(v);
                    if (u as u32) < v {
                        m += 1;
                    }
                }
            }
        }
        Graph { adj, m }
    }
}

/// Set of undirected edges, stored smaller-ID-first; the working
/// representation for spanners under construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    n: usize,
    edges: BTreeSet<(u32, u32)>,
}

impl EdgeSet {
    pub fn new(n: usize) -> Self {
        EdgeSet {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        EdgeSet {
            n: g.n(),
            edges: g.edges().collect(),
        }
    }

    /// Inserts the pair, normalizing orientation. Returns `true` if new.
    pub fn insert(&mut self, u: u32, v: u32) -> bool {
        assert_ne!(u, v, "self-loop ({u}, {u})");
        assert!(
            (u as usize) < self.n && (v as usize) < self.n,
            "edge ({u}, {v}) out of range for n = {}",
            self.n
        );
        self.edges.insert((u.min(v), u.max(v)))
    }

    pub fn contains(&self, u: u32, v: u32) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Removes the pair in either orientation. Returns `true` if present.
    pub fn remove(&mut self, u: u32, v: u32) -> bool {
        self.edges.remove(&(u.min(v), u.max(v)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pairs in lexicographic order, smaller ID first.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        assert_eq!(self.n, other.n, "vertex-count mismatch in edge-set union");
        self.edges.extend(other.edges.iter().copied());
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.n, self.iter())
            .expect("edge set invariants guarantee a valid graph")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, vec![(0, 0)]).is_err());
        assert!(Graph::from_edges(3, vec![(0, 3)]).is_err());
        assert!(Graph::from_edges(3, vec![(0, 1), (1, 0)]).is_err());
        let g = Graph::from_edges(3, vec![(2, 0), (0, 1)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert!(g.has_edge(2, 0));
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn edges_iterate_lexicographically() {
        let g = Graph::from_edges(4, vec![(2, 3), (0, 2), (0, 1)]).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (2, 3)]);
    }

    #[test]
    fn filter_vertices_isolates_dropped() {
        let g = Graph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let keep = vec![true, false, true, true];
        let f = g.filter_vertices(&keep);
        assert_eq!(f.n(), 4);
        assert_eq!(f.m(), 1);
        assert!(f.has_edge(2, 3));
        assert_eq!(f.degree(1), 0);
    }

    #[test]
    fn edge_set_round_trip() {
        let g = Graph::from_edges(5, vec![(0, 4), (1, 2), (0, 1)]).unwrap();
        let mut s = EdgeSet::from_graph(&g);
        assert_eq!(s.len(), 3);
        assert!(!s.insert(4, 0)); // already present, reversed orientation
        assert!(s.insert(3, 4));
        let g2 = s.to_graph();
        assert_eq!(g2.m(), 4);
        assert!(g2.has_edge(3, 4));
    }
}
