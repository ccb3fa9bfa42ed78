//! Spanner construction for the dense region.
//!
//! Dense vertices have big balls, so a small set of cluster centers can
//! dominate all of them. The construction clusters the dense vertices in
//! two levels around hitting-set centers, Baswana-Sen style:
//!
//! * [`build_first_clustering`] — centers Z₁ hit the collected
//!   neighborhood of every dense vertex; every vertex that sees a center
//!   in its neighborhood tree joins the closest one (ties by ID) and adds
//!   its next-hop edge, giving vertex-disjoint trees of depth at most
//!   floor(k/2)-1. Heavy vertices and their leftover neighbors join by
//!   direct edges.
//! * [`build_second_level`] — vertices adjacent to few clusters keep one
//!   witness edge per adjacent cluster; the rest are covered by a second,
//!   smaller hitting set Z₂ ⊆ Z₁ over their adjacent-center sets, which
//!   extends those cluster trees one hop deeper. For odd k the second
//!   level is the first one unchanged.
//! * [`connect_clusters`] — one representative edge per adjacent pair of
//!   (first-level, second-level) clusters.
//!
//! The center rule is local: a vertex picks the first member of its own
//! neighborhood tree that is a center. Because the trees hold the closest
//! `capacity` vertices under the global `(distance, ID)` order, the pick
//! of a vertex and the pick of its next hop agree, so the per-vertex
//! parent edges really assemble into rooted trees — [`audit_clustering`]
//! re-verifies that structurally on every run.

use std::collections::{BTreeMap, BTreeSet};

use crate::clique::CliqueSim;
use crate::graph::{EdgeSet, Graph, TruncatedBfsTree};
use crate::hitting::{compute_hitting_set, HittingSetBackend, HittingSetInstance};
use crate::nn::NnResult;
use crate::params::adjacency_cutoff;
use crate::partition::Partition;
use crate::{Error, Result};

/// A depth-bounded clustering: disjoint vertex groups, each spanned by a
/// tree of parent edges rooted at its center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// Cluster centers, ascending. Every center is in its own cluster.
    pub centers: Vec<u32>,
    /// Per vertex: the center of its cluster, if clustered.
    pub center: Vec<Option<u32>>,
    /// Per vertex: the next hop toward its center; `None` at centers.
    pub parent: Vec<Option<u32>>,
    /// Maximum realized hop count from a member to its center.
    pub depth: u32,
}

impl Clustering {
    fn empty(n: usize) -> Self {
        Clustering {
            centers: Vec::new(),
            center: vec![None; n],
            parent: vec![None; n],
            depth: 0,
        }
    }

    pub fn is_clustered(&self, v: u32) -> bool {
        self.center[v as usize].is_some()
    }
}

/// Walks every parent chain and verifies the clustering against the
/// spanner: parents stay in the same cluster, every hop is a real graph
/// edge present in `spanner`, chains end at the center within `max_depth`
/// hops, and centers are their own cluster members. Returns the realized
/// maximum depth.
pub fn audit_clustering(
    g: &Graph,
    clustering: &Clustering,
    spanner: &EdgeSet,
    max_depth: u32,
) -> Result<u32> {
    let n = g.n();
    let err = |msg: String| Err(Error::Internal(format!("clustering audit: {msg}")));
    for &s in &clustering.centers {
        if clustering.center[s as usize] != Some(s) {
            return err(format!("center {s} is not in its own cluster"));
        }
        if clustering.parent[s as usize].is_some() {
            return err(format!("center {s} has a parent edge"));
        }
    }
    let mut deepest = 0;
    for v in 0..n as u32 {
        let Some(s) = clustering.center[v as usize] else {
            if clustering.parent[v as usize].is_some() {
                return err(format!("vertex {v} has a parent but no cluster"));
            }
            continue;
        };
        if clustering.centers.binary_search(&s).is_err() {
            return err(format!("vertex {v} names unknown center {s}"));
        }
        let mut hops = 0u32;
        let mut cur = v;
        while let Some(p) = clustering.parent[cur as usize] {
            if !g.has_edge(cur, p) {
                return err(format!("tree edge ({cur},{p}) is not a graph edge"));
            }
            if !spanner.contains(cur, p) {
                return err(format!("tree edge ({cur},{p}) is missing from the spanner"));
            }
            if clustering.center[p as usize] != Some(s) {
                return err(format!("parent {p} of {v} sits in a different cluster"));
            }
            hops += 1;
            if hops > max_depth {
                return err(format!("vertex {v} is more than {max_depth} hops from {s}"));
            }
            cur = p;
        }
        if cur != s {
            return err(format!("chain from {v} ends at {cur}, not its center {s}"));
        }
        deepest = deepest.max(hops);
    }
    Ok(deepest)
}

/// The first tree member that is a center, in `(dist, vertex)` order.
fn closest_center(tree: &TruncatedBfsTree, centers: &BTreeSet<u32>) -> Option<(u32, u32)> {
    tree.members
        .iter()
        .find(|m| centers.contains(&m.vertex))
        .map(|m| (m.vertex, m.dist))
}

/// The depth-1 ancestor of `target` in the tree: the root's neighbor on
/// the tree path to `target`.
fn next_hop(tree: &TruncatedBfsTree, target: u32) -> u32 {
    let mut cur = tree.get(target).expect("target is a tree member");
    while cur.dist > 1 {
        let p = cur.parent.expect("non-root members have parents");
        cur = tree.get(p).expect("parents are tree members");
    }
    cur.vertex
}

/// Clusters the dense vertices around a hitting set over their collected
/// neighborhoods. Non-heavy vertices (sparse ones included — their
/// membership keeps the trees connected) join the closest center in their
/// neighborhood tree and add the next-hop edge; heavy vertices join a
/// center among their direct neighbors; an unclustered neighbor of a
/// heavy vertex rides along its heavy neighbor's edge. Every dense vertex
/// must end up clustered — if the hitting set missed one (possible only
/// for randomized backends), the run fails with a verification error.
pub fn build_first_clustering(
    g: &Graph,
    partition: &Partition,
    k: u32,
    nn: &NnResult,
    backend: HittingSetBackend,
    sim: &mut CliqueSim,
) -> Result<(Clustering, EdgeSet)> {
    let n = g.n();
    if k < 6 {
        return Err(Error::InvalidInput(format!(
            "dense clustering requires k >= 6, got {k}"
        )));
    }
    if nn.n() != n || partition.heavy.len() != n || sim.n() != n {
        return Err(Error::InvalidInput(
            "graph, partition, neighbor data, and simulator disagree on n".into(),
        ));
    }
    if nn.k != k {
        return Err(Error::InvalidInput(format!(
            "neighbor data was computed for k={}, not k={k}",
            nn.k
        )));
    }
    let radius = k / 2 - 1;
    let has_heavy_neighbor: Vec<bool> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().any(|&u| partition.heavy[u as usize]))
        .collect();

    // Hitting-set instance: heavy vertices contribute their direct
    // neighborhoods, and dense vertices away from heavy ones contribute
    // their (guaranteed full) neighborhood trees.
    let mut sets: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for v in 0..n as u32 {
        if partition.heavy[v as usize] {
            sets.insert(v, g.neighbors(v).to_vec());
        } else if partition.dense[v as usize] && !has_heavy_neighbor[v as usize] {
            let tree = nn.trees[v as usize]
                .as_ref()
                .ok_or_else(|| Error::Internal(format!("vertex {v} has no neighborhood tree")))?;
            let mut members: Vec<u32> = tree.vertex_ids().collect();
            members.sort_unstable();
            sets.insert(v, members);
        }
    }
    let mut edges = EdgeSet::new(n);
    if sets.is_empty() {
        // No dense vertices at all; nothing to cluster.
        return Ok((Clustering::empty(n), edges));
    }
    let universe: Vec<u32> = sets
        .values()
        .flatten()
        .copied()
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .collect();
    let delta = sets.values().map(|s| s.len()).min().unwrap();
    let instance = HittingSetInstance::new(universe, sets, delta)?;
    let outcome = compute_hitting_set(&instance, backend)?;
    sim.charge_plain_rounds(outcome.plain_rounds, n as u64, n as u64);
    if outcome.routing_rounds > 0 {
        sim.charge_routing(outcome.routing_rounds, n as u64, n as u64);
    }
    let mut z = outcome.z;
    z.sort_unstable();
    let zset: BTreeSet<u32> = z.iter().copied().collect();

    // One broadcast announces Z to everyone; center picks are then local.
    sim.charge_plain_rounds(1, n as u64, n as u64);
    let mut center: Vec<Option<u32>> = vec![None; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut hops: Vec<u32> = vec![0; n];
    for v in 0..n as u32 {
        if partition.heavy[v as usize] {
            continue;
        }
        let Some(tree) = nn.trees[v as usize].as_ref() else {
            continue;
        };
        if let Some((s, dist)) = closest_center(tree, &zset) {
            center[v as usize] = Some(s);
            if dist > 0 {
                let p = next_hop(tree, s);
                parent[v as usize] = Some(p);
                edges.insert(v, p);
                hops[v as usize] = dist;
            }
        }
    }

    // Heavy vertices pick a direct-neighbor center (themselves if chosen)
    // and broadcast the pick to their neighbors.
    sim.charge_plain_rounds(1, n as u64, n as u64);
    for v in 0..n as u32 {
        if !partition.heavy[v as usize] {
            continue;
        }
        if zset.contains(&v) {
            center[v as usize] = Some(v);
        } else if let Some(&s) = g.neighbors(v).iter().find(|&&u| zset.contains(&u)) {
            center[v as usize] = Some(s);
            parent[v as usize] = Some(s);
            edges.insert(v, s);
            hops[v as usize] = 1;
        } else {
            return Err(Error::Verification(format!(
                "hitting set left heavy vertex {v} unclustered; its whole \
                 neighborhood was a target set"
            )));
        }
    }
    // Leftover neighbors of heavy vertices ride along a heavy neighbor.
    for u in 0..n as u32 {
        if center[u as usize].is_some() || !has_heavy_neighbor[u as usize] {
            continue;
        }
        let v = g.neighbors(u)
            .iter()
            .copied()
            .find(|&w| partition.heavy[w as usize])
            .expect("has_heavy_neighbor gave a witness");
        center[u as usize] = center[v as usize];
        parent[u as usize] = Some(v);
        edges.insert(u, v);
        hops[u as usize] = hops[v as usize] + 1;
    }
    // Parent-edge notifications (one word per chosen edge).
    sim.charge_plain_rounds(1, n as u64, n as u64);

    for v in 0..n as u32 {
        if partition.dense[v as usize] && center[v as usize].is_none() {
            return Err(Error::Verification(format!(
                "hitting set left dense vertex {v} unclustered"
            )));
        }
    }
    let clustering = Clustering {
        centers: z,
        center,
        parent,
        depth: hops.into_iter().max().unwrap_or(0),
    };
    audit_clustering(g, &clustering, &edges, radius)?;
    Ok((clustering, edges))
}

/// Per vertex: the ascending centers of all clusters it has an edge into
/// (its own included, through any clustered neighbor).
pub fn cluster_adjacency(g: &Graph, clustering: &Clustering) -> Vec<Vec<u32>> {
    (0..g.n() as u32)
        .map(|v| {
            let centers: BTreeSet<u32> = g
                .neighbors(v)
                .iter()
                .filter_map(|&u| clustering.center[u as usize])
                .collect();
            centers.into_iter().collect()
        })
        .collect()
}

/// Builds the second clustering level. Dense vertices adjacent to at most
/// `adjacency_cutoff` clusters add one witness edge per adjacent cluster;
/// the rest get covered by a second hitting set over their adjacent
/// centers, extending those clusters' trees one hop. For odd k the first
/// clustering is reused unchanged.
pub fn build_second_level(
    g: &Graph,
    partition: &Partition,
    k: u32,
    first: &Clustering,
    backend: HittingSetBackend,
    sim: &mut CliqueSim,
) -> Result<(Clustering, EdgeSet)> {
    let n = g.n();
    let mut edges = EdgeSet::new(n);
    if k % 2 == 1 {
        return Ok((first.clone(), edges));
    }
    // Everyone announces its first-level center; adjacency is then local.
    sim.charge_plain_rounds(1, n as u64, n as u64);
    let adjacency = cluster_adjacency(g, first);
    let cutoff = adjacency_cutoff(n, k);

    let mut high_adjacency: Vec<u32> = Vec::new();
    for v in 0..n as u32 {
        if !partition.dense[v as usize] {
            continue;
        }
        let adjacent = &adjacency[v as usize];
        if adjacent.len() > cutoff {
            high_adjacency.push(v);
            continue;
        }
        for &s in adjacent {
            let witness = g
                .neighbors(v)
                .iter()
                .copied()
                .find(|&u| first.center[u as usize] == Some(s))
                .expect("adjacency listed this center");
            edges.insert(v, witness);
        }
    }
    // Witness notifications.
    sim.charge_plain_rounds(1, n as u64, n as u64);

    let mut z2: Vec<u32> = Vec::new();
    if !high_adjacency.is_empty() {
        let sets: BTreeMap<u32, Vec<u32>> = high_adjacency
            .iter()
            .map(|&v| (v, adjacency[v as usize].clone()))
            .collect();
        let delta = sets.values().map(|s| s.len()).min().unwrap();
        let instance = HittingSetInstance::new(first.centers.clone(), sets, delta)?;
        let outcome = compute_hitting_set(&instance, backend)?;
        sim.charge_plain_rounds(outcome.plain_rounds, n as u64, n as u64);
        if outcome.routing_rounds > 0 {
            sim.charge_routing(outcome.routing_rounds, n as u64, n as u64);
        }
        z2 = outcome.z;
        z2.sort_unstable();
    }
    let z2set: BTreeSet<u32> = z2.iter().copied().collect();

    // Clusters whose center survived into Z2 carry over whole.
    let mut center: Vec<Option<u32>> = vec![None; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    for v in 0..n {
        if let Some(s) = first.center[v] {
            if z2set.contains(&s) {
                center[v] = first.center[v];
                parent[v] = first.parent[v];
            }
        }
    }
    // High-adjacency vertices not already covered join through a witness
    // edge into an adjacent Z2 cluster.
    for &v in &high_adjacency {
        if center[v as usize].is_some() {
            continue;
        }
        let Some(&s) = adjacency[v as usize].iter().find(|s| z2set.contains(s)) else {
            return Err(Error::Verification(format!(
                "second hitting set left vertex {v} uncovered"
            )));
        };
        let witness = g
            .neighbors(v)
            .iter()
            .copied()
            .find(|&u| first.center[u as usize] == Some(s))
            .expect("adjacency listed this center");
        center[v as usize] = Some(s);
        parent[v as usize] = Some(witness);
        edges.insert(v, witness);
    }
    // Join notifications.
    sim.charge_plain_rounds(1, n as u64, n as u64);

    let second = Clustering {
        centers: z2,
        center,
        parent,
        depth: 0,
    };
    let depth = realized_depth(&second)?;
    Ok((
        Clustering {
            depth,
            ..second
        },
        edges,
    ))
}

/// Maximum parent-chain length, with a cycle guard.
fn realized_depth(clustering: &Clustering) -> Result<u32> {
    let n = clustering.center.len();
    let mut deepest = 0;
    for v in 0..n {
        let mut hops = 0u32;
        let mut cur = v;
        while let Some(p) = clustering.parent[cur] {
            hops += 1;
            if hops as usize > n {
                return Err(Error::Internal(format!(
                    "parent chain from vertex {v} does not terminate"
                )));
            }
            cur = p as usize;
        }
        deepest = deepest.max(hops);
    }
    Ok(deepest)
}

/// Adds one representative edge for every ordered pair of adjacent
/// clusters (first-level cluster, second-level cluster) with distinct
/// centers: the lexicographically smallest (first-side endpoint,
/// second-side endpoint) choice. Runs in three broadcast rounds: cluster
/// IDs, per-center edge offers, and representative notifications.
pub fn connect_clusters(
    g: &Graph,
    first: &Clustering,
    second: &Clustering,
    sim: &mut CliqueSim,
) -> Result<EdgeSet> {
    let n = g.n();
    let mut best: BTreeMap<(u32, u32), (u32, u32)> = BTreeMap::new();
    for (x, y) in g.edges() {
        for (a, b) in [(x, y), (y, x)] {
            if let (Some(s1), Some(s2)) =
                (first.center[a as usize], second.center[b as usize])
            {
                if s1 != s2 {
                    let entry = best.entry((s1, s2)).or_insert((a, b));
                    if (a, b) < *entry {
                        *entry = (a, b);
                    }
                }
            }
        }
    }
    let mut edges = EdgeSet::new(n);
    for &(a, b) in best.values() {
        edges.insert(a, b);
    }
    sim.charge_plain_rounds(3, n as u64, n as u64);
    Ok(edges)
}

/// The whole dense-region pipeline: first-level clustering, second level,
/// cluster connection; the union is the dense spanner. Every dense edge
/// ends up with a detour of at most 2k-1, and the cluster-tree invariants
/// are re-audited against the final edge set.
pub fn cons_spanner_dense(
    g: &Graph,
    partition: &Partition,
    k: u32,
    nn: &NnResult,
    backend: HittingSetBackend,
    sim: &mut CliqueSim,
) -> Result<EdgeSet> {
    let (first, mut spanner) = build_first_clustering(g, partition, k, nn, backend, sim)?;
    if first.centers.is_empty() {
        return Ok(spanner);
    }
    let (second, level2_edges) = build_second_level(g, partition, k, &first, backend, sim)?;
    let connect_edges = connect_clusters(g, &first, &second, sim)?;
    spanner.union_with(&level2_edges);
    spanner.union_with(&connect_edges);
    audit_clustering(g, &first, &spanner, k / 2 - 1)?;
    audit_clustering(g, &second, &spanner, k / 2)?;
    Ok(spanner)
}
