//! Spanner construction for the sparse region.
//!
//! Sparse vertices have small balls, so each one can afford to learn its
//! whole neighborhood-of-neighborhoods and run a spanner algorithm *in its
//! head* instead of over many communication rounds. The pieces:
//!
//! * [`run_local_spanner`] / [`local_spanner_global`] — a deterministic
//!   greedy region-growing spanner (message-passing formulation): each
//!   vertex repeatedly selects neighbors whose grown regions are disjoint
//!   from the ones it already covers, keeping one edge per selected
//!   neighbor. An edge pruned in round i has a detour of length at most
//!   2i-1 through the kept edges.
//! * [`build_local_views`] — the clique protocol that hands every sparse
//!   vertex the subgraph of sparse-incident edges around it.
//! * [`cons_spanner_sparse`] — every sparse vertex simulates the greedy
//!   algorithm on its view for floor(k/2)-1 rounds (by then its working
//!   set must be exhausted — its ball is too small to stay active), then
//!   ships the kept edges to their sparse endpoints.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::clique::{CliqueSim, Message, Word};
use crate::graph::{EdgeSet, Graph};
use crate::nn::NnResult;
use crate::params::selection_budget;
use crate::partition::Partition;
use crate::{Error, Result};

/// Vertex ids are packed two to a word.
const ID_BITS: u32 = 24;

fn pack_edge(x: u32, y: u32) -> Word {
    debug_assert!(x < (1 << ID_BITS) && y < (1 << ID_BITS));
    ((x as u64) << ID_BITS) | y as u64
}

fn unpack_edge(w: Word) -> (u32, u32) {
    ((w >> ID_BITS) as u32, (w & ((1 << ID_BITS) - 1)) as u32)
}

/// Do two ascending slices share an element?
fn intersects(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Merge the ascending `src` into the ascending `dst`.
fn union_into(dst: &mut Vec<u32>, src: &[u32]) {
    let mut merged = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let next = match (dst.get(i), src.get(j)) {
            (Some(&a), Some(&b)) if a == b => {
                i += 1;
                j += 1;
                a
            }
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                a
            }
            (Some(_), Some(&b)) => {
                j += 1;
                b
            }
            (Some(&a), None) => {
                i += 1;
                a
            }
            (None, Some(&b)) => {
                j += 1;
                b
            }
            (None, None) => unreachable!(),
        };
        merged.push(next);
    }
    *dst = merged;
}

/// Full trace of one greedy-region run.
#[derive(Debug, Clone)]
pub struct LocalSpannerRun {
    pub sigma: usize,
    pub rounds: usize,
    /// Kept edges (one per selection, deduplicated).
    pub edges: EdgeSet,
    /// (round, selector, selected) in execution order; rounds are 1-based.
    pub selections: Vec<(usize, u32, u32)>,
    /// Round at whose end each vertex went inactive (None = still active).
    pub inactive_at: Vec<Option<usize>>,
}

/// Runs the greedy region-growing spanner for `rounds` synchronous rounds.
///
/// Per round i, an active vertex works from the regions its neighbors had
/// at the end of the previous round: it drops inactive neighbors and any
/// neighbor whose region already meets its own, then repeatedly selects
/// the smallest remaining neighbor while its selected list (which counts
/// the vertex itself) has at most i*sigma entries — pruning every working
/// neighbor whose region meets the selection's, keeping the edge, and
/// absorbing the region. A vertex whose working set empties goes inactive
/// at the end of the round and never acts again; this covers both the
/// selection-exhaustion case and the prune-everything case, which is what
/// the region-size argument behind early termination needs.
///
/// Candidates are always scanned in ascending id, so runs are transcripts
/// are reproducible and local re-simulations can be compared move by move.
pub fn run_local_spanner(g: &Graph, sigma: usize, rounds: usize) -> LocalSpannerRun {
    let n = g.n();
    let mut working: Vec<Vec<u32>> = (0..n).map(|u| g.neighbors(u as u32).to_vec()).collect();
    let mut regions: Vec<Vec<u32>> = (0..n).map(|u| vec![u as u32]).collect();
    let mut covered = regions.clone();
    let mut selected_len = vec![1usize; n]; // the list starts with the vertex itself
    let mut active = vec![true; n];
    let mut inactive_at = vec![None; n];
    let mut selections = Vec::new();
    let mut edges = EdgeSet::new(n);

    for i in 1..=rounds {
        // Everything a vertex reads this round is end-of-last-round state.
        let prev_active = active.clone();
        let prev_regions = regions.clone();
        for u in 0..n {
            if !active[u] {
                continue;
            }
            let own_region = &prev_regions[u];
            working[u].retain(|&w| prev_active[w as usize]);
            working[u].retain(|&w| !intersects(own_region, &prev_regions[w as usize]));
            while let Some(&pick) = working[u].first() {
                if selected_len[u] > i * sigma {
                    break;
                }
                let pick_region = &prev_regions[pick as usize];
                // The pick prunes itself along with everyone overlapping it.
                working[u].retain(|&v| !intersects(&prev_regions[v as usize], pick_region));
                selected_len[u] += 1;
                selections.push((i, u as u32, pick));
                edges.insert(u as u32, pick);
                union_into(&mut covered[u], pick_region);
            }
            regions[u] = covered[u].clone();
            if working[u].is_empty() {
                active[u] = false;
                inactive_at[u] = Some(i);
            }
        }
    }

    LocalSpannerRun {
        sigma,
        rounds,
        edges,
        selections,
        inactive_at,
    }
}

/// Reference run over the whole graph: k rounds with the selection budget
/// ceil(n^(1/k)). Every pruned edge ends up with a detour of at most 2k-1.
pub fn local_spanner_global(g: &Graph, k: u32) -> EdgeSet {
    assert!(k >= 2, "stretch parameter k must be at least 2");
    run_local_spanner(g, selection_budget(g.n(), k), k as usize).edges
}

/// The subgraph a sparse vertex collects: every sparse-incident edge
/// around it, out to the simulation radius.
#[derive(Debug, Clone)]
pub struct LocalView {
    pub owner: u32,
    /// Original vertex ids, ascending; positions index `graph`.
    pub vertices: Vec<u32>,
    /// The collected subgraph on re-indexed vertices.
    pub graph: Graph,
    /// Sparse flag per view position.
    pub sparse: Vec<bool>,
}

impl LocalView {
    /// The owner's position in the re-indexed view.
    pub fn owner_index(&self) -> u32 {
        self.vertices
            .binary_search(&self.owner)
            .expect("owner is always a view vertex") as u32
    }
}

/// Hands every sparse vertex its local view over the clique: one plain
/// round announcing sparseness, then one routed round in which every
/// sparse vertex ships its incident edges to the sparse vertices in its
/// ball. A sparse vertex sends and receives well under n words (degree
/// times ball size, both below sqrt(n)), so the exchange is admissible.
pub fn build_local_views(
    g: &Graph,
    partition: &Partition,
    k: u32,
    nn: &NnResult,
    sim: &mut CliqueSim,
) -> Result<BTreeMap<u32, LocalView>> {
    let n = g.n();
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
    let radius = (k / 2 - 1) as usize;

    // Round 1 (plain): sparse vertices announce themselves.
    let mut outboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
    for u in partition.sparse_vertices() {
        for v in 0..n as u32 {
            if v != u {
                outboxes[u as usize].push(Message::one(u, v, 1));
            }
        }
    }
    sim.plain_round(outboxes)?;

    // Round 2 (routed): each sparse vertex ships its edge list to every
    // sparse vertex in its ball. All its edges are sparse-incident by
    // definition, and ball membership is mutual, so receivers end up with
    // every edge incident to the sparse vertices around them.
    let mut outboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
    for u in partition.sparse_vertices() {
        let tree = nn.trees[u as usize].as_ref().ok_or_else(|| {
            Error::Internal(format!("sparse vertex {u} has no neighborhood tree"))
        })?;
        let payload: Vec<Word> = g
            .neighbors(u)
            .iter()
            .map(|&w| pack_edge(u, w))
            .collect();
        if payload.is_empty() {
            continue;
        }
        for v in tree.vertex_ids() {
            if v != u && partition.is_sparse(v) {
                outboxes[u as usize].push(Message::new(u, v, payload.clone()));
            }
        }
    }
    let inboxes = sim.route(outboxes)?;

    let mut views = BTreeMap::new();
    for u in partition.sparse_vertices() {
        // Candidate edges: everything received plus the owner's own.
        let mut adjacency: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        let mut add = |x: u32, y: u32| {
            adjacency.entry(x).or_default().insert(y);
            adjacency.entry(y).or_default().insert(x);
        };
        for msg in &inboxes[u as usize] {
            for &word in &msg.payload {
                let (x, y) = unpack_edge(word);
                add(x, y);
            }
        }
        for &w in g.neighbors(u) {
            add(u, w);
        }

        // Keep the ball of the simulation radius around the owner.
        let mut dist: BTreeMap<u32, usize> = BTreeMap::new();
        dist.insert(u, 0);
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            if d == radius {
                continue;
            }
            if let Some(nbrs) = adjacency.get(&x) {
                for &y in nbrs {
                    dist.entry(y).or_insert_with(|| {
                        queue.push_back(y);
                        d + 1
                    });
                }
            }
        }
        let vertices: Vec<u32> = dist.keys().copied().collect();
        let index: BTreeMap<u32, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as u32))
            .collect();
        let mut edges = Vec::new();
        for (&x, nbrs) in &adjacency {
            let Some(&xi) = index.get(&x) else { continue };
            for &y in nbrs {
                if x < y {
                    if let Some(&yi) = index.get(&y) {
                        edges.push((xi, yi));
                    }
                }
            }
        }
        let graph = Graph::from_edges(vertices.len(), edges)?;
        let sparse = vertices.iter().map(|&x| partition.is_sparse(x)).collect();
        views.insert(
            u,
            LocalView {
                owner: u,
                vertices,
                graph,
                sparse,
            },
        );
    }
    Ok(views)
}

/// Simulates the greedy spanner on one view and returns the kept edges in
/// original ids. Errors if any sparse view vertex is still active after
/// the allowed rounds: a sparse ball is too small to sustain the region
/// growth that staying active requires, so this indicates an inconsistent
/// partition.
fn simulate_view(view: &LocalView, sigma: usize, rounds: usize) -> Result<Vec<(u32, u32)>> {
    let run = run_local_spanner(&view.graph, sigma, rounds);
    for (pos, flag) in view.sparse.iter().enumerate() {
        if *flag && run.inactive_at[pos].is_none() {
            return Err(Error::Internal(format!(
                "sparse vertex {} is still active after {rounds} simulated rounds \
                 in the view of {}; the partition is inconsistent",
                view.vertices[pos], view.owner
            )));
        }
    }
    Ok(run
        .edges
        .iter()
        .map(|(x, y)| (view.vertices[x as usize], view.vertices[y as usize]))
        .collect())
}

/// Runs the local simulation on every sparse vertex's view and unions the
/// kept edges; each vertex also ships its kept edges to their sparse
/// endpoints (one routed round), which is how the union becomes common
/// knowledge. Every pruned sparse edge has a detour of at most k-3 inside
/// the union.
pub fn cons_spanner_sparse(
    g: &Graph,
    partition: &Partition,
    k: u32,
    views: &BTreeMap<u32, LocalView>,
    sim: &mut CliqueSim,
) -> Result<EdgeSet> {
    let n = g.n();
    let sigma = selection_budget(n, k);
    let rounds = (k / 2 - 1) as usize;
    let mut spanner = EdgeSet::new(n);
    let mut outboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
    for u in partition.sparse_vertices() {
        let view = views.get(&u).ok_or_else(|| {
            Error::InvalidInput(format!("no view was built for sparse vertex {u}"))
        })?;
        let kept = simulate_view(view, sigma, rounds)?;
        let mut per_target: BTreeMap<u32, Vec<Word>> = BTreeMap::new();
        for &(x, y) in &kept {
            spanner.insert(x, y);
            for endpoint in [x, y] {
                if endpoint != u && partition.is_sparse(endpoint) {
                    per_target.entry(endpoint).or_default().push(pack_edge(x, y));
                }
            }
        }
        for (dst, payload) in per_target {
            outboxes[u as usize].push(Message::new(u, dst, payload));
        }
    }
    sim.route(outboxes)?;
    Ok(spanner)
}

/// The whole sparse-region pipeline: collect views, simulate, union.
pub fn sparse_region_spanner(
    g: &Graph,
    partition: &Partition,
    k: u32,
    nn: &NnResult,
    sim: &mut CliqueSim,
) -> Result<EdgeSet> {
    let views = build_local_views(g, partition, k, nn, sim)?;
    cons_spanner_sparse(g, partition, k, &views, sim)
}
