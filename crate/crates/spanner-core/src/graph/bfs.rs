//! Truncated and exact breadth-first search with deterministic ID
//! tie-breaking.

use super::Graph;
use crate::{Error, Result};

/// Sentinel distance for unreachable vertices.
pub const INFINITY: u32 = u32::MAX;

/// One vertex of a truncated BFS tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BfsMember {
    pub vertex: u32,
    pub dist: u32,
    /// `None` exactly for the root; otherwise the smallest-ID neighbor at
    /// distance `dist - 1`.
    pub parent: Option<u32>,
}

/// The closest vertices around a root, capped by radius and capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedBfsTree {
    pub root: u32,
    /// Maximum hop distance collected.
    pub radius: u32,
    /// Maximum member count collected.
    pub capacity: usize,
    /// Sorted ascending by `(dist, vertex)`.
    pub members: Vec<BfsMember>,
}

impl TruncatedBfsTree {
    pub fn contains(&self, v: u32) -> bool {
        self.get(v).is_some()
    }

    pub fn get(&self, v: u32) -> Option<&BfsMember> {
        self.members.iter().find(|m| m.vertex == v)
    }

    /// Member vertex IDs in `(dist, vertex)` order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().map(|m| m.vertex)
    }
}

/// Collects the `max_count` closest vertices within `max_dist` hops of
/// `root`, ranked by ascending `(distance, vertex ID)`. When `allowed` is
/// given the search runs in the subgraph induced by satisfying vertices.
///
/// Parent links are shortest-path edges in that subgraph, tie-broken toward
/// the smallest-ID parent.
pub fn bfs_truncated(
    g: &Graph,
    root: u32,
    max_dist: u32,
    max_count: usize,
    allowed: Option<&dyn Fn(u32) -> bool>,
) -> Result<TruncatedBfsTree> {
    if root as usize >= g.n() {
        return Err(Error::InvalidInput(format!(
            "BFS root {root} out of range for n = {}",
            g.n()
        )));
    }
    if max_count == 0 {
        return Err(Error::InvalidInput("BFS capacity must be at least 1".into()));
    }
    if let Some(pred) = allowed {
        if !pred(root) {
            return Err(Error::InvalidInput(format!(
                "BFS root {root} excluded by the vertex predicate"
            )));
        }
    }

    let mut tree = TruncatedBfsTree {
        root,
        radius: max_dist,
        capacity: max_count,
        members: Vec::new(),
    };
    let mut seen = vec![false; g.n()];
    seen[root as usize] = true;
    tree.members.push(BfsMember {
        vertex: root,
        dist: 0,
        parent: None,
    });
    if tree.members.len() >= max_count {
        return Ok(tree);
    }

    // Expand level by level. Scanning each frontier in ascending ID order
    // makes the first discoverer of a vertex its smallest-ID neighbor in
    // the previous level, and sorting each new level keeps the emitted
    // member order exactly (dist, vertex)-ascending, so the capacity cut
    // can happen mid-level.
    let mut frontier = vec![root];
    for dist in 1..=max_dist {
        let mut next: Vec<BfsMember> = Vec::new();
        for &v in &frontier {
            for &w in g.neighbors(v) {
                if seen[w as usize] || allowed.is_some_and(|pred| !pred(w)) {
                    continue;
                }
                seen[w as usize] = true;
                next.push(BfsMember {
                    vertex: w,
                    dist,
                    parent: Some(v),
                });
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable_by_key(|m| m.vertex);
        for member in &next {
            tree.members.push(*member);
            if tree.members.len() >= max_count {
                return Ok(tree);
            }
        }
        frontier = next.iter().map(|m| m.vertex).collect();
    }
    Ok(tree)
}

/// Hop distances from `root` to every vertex ([`INFINITY`] if unreachable).
pub fn distances_from(g: &Graph, root: u32) -> Vec<u32> {
    let mut dist = vec![INFINITY; g.n()];
    dist[root as usize] = 0;
    let mut frontier = vec![root];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in g.neighbors(v) {
                if dist[w as usize] == INFINITY {
                    dist[w as usize] = d;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Exact all-pairs hop distances via one BFS per vertex.
///
/// Refuses graphs larger than `limit` vertices: the result is quadratic and
/// this oracle exists for verification, not production paths.
pub fn all_pairs_distances(g: &Graph, limit: usize) -> Result<Vec<Vec<u32>>> {
    if g.n() > limit {
        return Err(Error::ResourceLimit(format!(
            "distance oracle limited to {limit} vertices, graph has {}",
            g.n()
        )));
    }
    Ok(g.vertices().map(|v| distances_from(g, v)).collect())
}
