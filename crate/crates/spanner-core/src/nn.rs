//! Truncated-BFS-tree computation for every light vertex, by graph
//! exponentiation on the congested clique.
//!
//! Heavy vertices (deg(v)^2 >= n) are excluded; the remaining graph is
//! G_light. Every light vertex ends up knowing the `capacity(n, k)` closest
//! light vertices within `floor(k/2) - 1` hops, with exact distances and a
//! spanning parent link per member.
//!
//! The protocol, round by round:
//!
//! * round 0 (plain): every vertex broadcasts its degree, so everyone can
//!   tell heavy from light locally;
//! * round 1 (routed): every light vertex ships its light-neighbor list to
//!   each light neighbor, which yields the exact 2-neighborhood pool
//!   (a light vertex has degree < sqrt(n), so this is < n words each way);
//! * then one doubling step per schedule entry gamma(2), gamma(3), ...:
//!   a *request* round (plain, one word to each current member) followed by
//!   a *serve* round (routed) in which v ships its current tree to exactly
//!   the requesters u with u in N(v) — the symmetric rule that caps both
//!   directions at capacity^2 < n words.
//!
//! A vertex whose pool outgrows the `n^(1/2 - 1/k)` threshold at some
//! radius freezes: its member set is final (the capacity closest vertices
//! overall), it stops requesting, but it keeps serving.

use std::collections::BTreeMap;

use crate::clique::{run_programs, Message, NodeProgram, RoundLedger, SimConfig, StepOutput, Word};
use crate::graph::{BfsMember, Graph, TruncatedBfsTree};
use crate::params::{capacity, gamma_schedule, neighborhood_threshold, EPS};
use crate::{Error, Result};

/// Largest vertex count the packed message encoding supports (24-bit IDs).
pub const MAX_VERTICES: usize = 1 << 24;

/// Output of the nearest-neighbors protocol.
#[derive(Debug, Clone)]
pub struct NnResult {
    pub k: u32,
    /// Member cap per tree: `capacity(n, k)`.
    pub capacity: usize,
    /// Tree radius: `floor(k/2) - 1`.
    pub radius: u32,
    /// Radius schedule the protocol followed.
    pub schedule: Vec<u32>,
    /// Doubling phases executed (= schedule length).
    pub phases: usize,
    /// Per vertex: `deg(v)^2 >= n`.
    pub heavy: Vec<bool>,
    /// Per vertex: the computed tree (`None` for heavy vertices).
    pub trees: Vec<Option<TruncatedBfsTree>>,
    /// Per vertex: whether its light-graph neighborhood at the tree radius
    /// exceeds the `n^(1/2 - 1/k)` threshold (`false` for heavy vertices).
    pub radius_dense: Vec<bool>,
    pub ledger: RoundLedger,
}

impl NnResult {
    pub fn n(&self) -> usize {
        self.heavy.len()
    }
}

/// Runs the protocol on the clique simulator. Requires `k >= 6`; smaller
/// stretch targets use the dedicated small-k construction instead.
pub fn nearest_neighbors(g: &Graph, k: u32) -> Result<NnResult> {
    run_protocol(g, k, false)
}

pub(crate) fn run_protocol(g: &Graph, k: u32, record_transcript: bool) -> Result<NnResult> {
    if k < 6 {
        return Err(Error::InvalidInput(format!(
            "neighborhood collection requires k >= 6, got {k}"
        )));
    }
    let n = g.n();
    if n >= MAX_VERTICES {
        return Err(Error::InvalidInput(format!(
            "message encoding supports at most {MAX_VERTICES} vertices, got {n}"
        )));
    }
    let schedule = gamma_schedule(k);
    let radius = k / 2 - 1;
    let cap = capacity(n.max(1), k);

    if n == 0 {
        return Ok(NnResult {
            k,
            capacity: cap,
            radius,
            phases: schedule.len(),
            schedule,
            heavy: vec![],
            trees: vec![],
            radius_dense: vec![],
            ledger: RoundLedger::default(),
        });
    }

    let programs: Vec<NnProgram> = g
        .vertices()
        .map(|v| NnProgram::new(v, g.neighbors(v).to_vec(), n, k, &schedule, cap))
        .collect();
    let mut cfg = SimConfig::new(n);
    cfg.record_transcript = record_transcript;
    let max_rounds = 2 * schedule.len() + 2;
    let (programs, ledger) = run_programs(cfg, programs, max_rounds)?;

    let mut heavy = Vec::with_capacity(n);
    let mut trees = Vec::with_capacity(n);
    let mut radius_dense = Vec::with_capacity(n);
    for mut p in programs {
        heavy.push(p.self_heavy);
        radius_dense.push(p.dense_at_radius);
        if !p.self_heavy && p.tree.is_none() {
            return Err(Error::Internal(format!(
                "light vertex {} produced no tree",
                p.id
            )));
        }
        trees.push(p.tree.take());
    }
    Ok(NnResult {
        k,
        capacity: cap,
        radius,
        phases: schedule.len(),
        schedule,
        heavy,
        trees,
        radius_dense,
        ledger,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PoolEntry {
    dist: u32,
    /// `None` only for the root itself.
    parent: Option<u32>,
}

/// Per-phase view of a vertex's member set, kept for invariant checks.
#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct PhaseSnapshot {
    pub frozen: bool,
    /// (vertex, dist), sorted by (dist, vertex).
    pub members: Vec<(u32, u32)>,
}

#[derive(Debug)]
pub(crate) struct NnProgram {
    id: u32,
    n: usize,
    adj: Vec<u32>,
    schedule: Vec<u32>,
    cap: usize,
    thr: f64,
    radius_out: u32,

    self_heavy: bool,
    light: Vec<bool>,
    light_adj: Vec<u32>,
    /// Best-known (dist, parent) per discovered vertex. Distances within
    /// the current radius are exact for unfrozen vertices; entries beyond
    /// it may be overestimates until a later phase improves them.
    pool: BTreeMap<u32, PoolEntry>,
    /// Set once the pool outgrows the threshold: the final member list.
    frozen: Option<Vec<BfsMember>>,
    frozen_at_phase: Option<usize>,
    phase: usize,
    pub(crate) snapshots: Vec<PhaseSnapshot>,

    tree: Option<TruncatedBfsTree>,
    dense_at_radius: bool,
}

const DIST_BITS: u32 = 16;
const PARENT_SHIFT: u32 = DIST_BITS;
const VERTEX_SHIFT: u32 = DIST_BITS + 24;

fn pack(member: &BfsMember) -> Word {
    let parent = member.parent.expect("root entries are never shipped");
    ((member.vertex as u64) << VERTEX_SHIFT)
        | ((parent as u64) << PARENT_SHIFT)
        | member.dist as u64
}

fn unpack(word: Word) -> BfsMember {
    BfsMember {
        vertex: (word >> VERTEX_SHIFT) as u32,
        parent: Some(((word >> PARENT_SHIFT) & 0xff_ffff) as u32),
        dist: (word & 0xffff) as u32,
    }
}

impl NnProgram {
    fn new(id: u32, adj: Vec<u32>, n: usize, k: u32, schedule: &[u32], cap: usize) -> Self {
        NnProgram {
            id,
            n,
            adj,
            schedule: schedule.to_vec(),
            cap,
            thr: neighborhood_threshold(n, k),
            radius_out: k / 2 - 1,
            self_heavy: false,
            light: vec![],
            light_adj: vec![],
            pool: BTreeMap::new(),
            frozen: None,
            frozen_at_phase: None,
            phase: 0,
            snapshots: vec![],
            tree: None,
            dense_at_radius: false,
        }
    }

    /// Current member list N(self): the frozen set, or everything within
    /// the current phase radius sorted by (dist, vertex).
    fn members(&self) -> Vec<BfsMember> {
        if let Some(frozen) = &self.frozen {
            return frozen.clone();
        }
        let radius = self.schedule[self.phase - 1];
        let mut members: Vec<BfsMember> = self
            .pool
            .iter()
            .filter(|(_, e)| e.dist <= radius)
            .map(|(&v, e)| BfsMember {
                vertex: v,
                dist: e.dist,
                parent: e.parent,
            })
            .collect();
        members.sort_unstable_by_key(|m| (m.dist, m.vertex));
        members
    }

    /// Inserts or improves a pool entry, preferring smaller distance, then
    /// smaller parent ID. The root entry is never replaced.
    fn offer(&mut self, vertex: u32, dist: u32, parent: u32) {
        if vertex == self.id {
            return;
        }
        let entry = self.pool.entry(vertex).or_insert(PoolEntry {
            dist,
            parent: Some(parent),
        });
        if dist < entry.dist || (dist == entry.dist && Some(parent) < entry.parent) {
            *entry = PoolEntry {
                dist,
                parent: Some(parent),
            };
        }
    }

    /// End-of-phase bookkeeping: freeze when the pool exceeds the density
    /// threshold at the phase radius, then snapshot.
    fn close_phase(&mut self) {
        if self.frozen.is_none() {
            let radius = self.schedule[self.phase - 1];
            let count = self.pool.values().filter(|e| e.dist <= radius).count();
            if count as f64 > self.thr + EPS {
                let mut members = self.members();
                members.truncate(self.cap);
                self.frozen = Some(members);
                self.frozen_at_phase = Some(self.phase);
            }
        }
        let members = self.members();
        self.snapshots.push(PhaseSnapshot {
            frozen: self.frozen.is_some(),
            members: members.iter().map(|m| (m.vertex, m.dist)).collect(),
        });
    }

    /// One-word request to every current member: "you are in N(me)".
    fn request_round(&self) -> Vec<Message> {
        if self.frozen.is_some() {
            return vec![];
        }
        self.members()
            .iter()
            .filter(|m| m.vertex != self.id)
            .map(|m| Message::one(self.id, m.vertex, 1))
            .collect()
    }

    /// Ships the current tree to each requester that is itself a member —
    /// the symmetric exchange rule.
    fn serve_round(&self, inbox: &[Message]) -> Vec<Message> {
        let members = self.members();
        let mut out = Vec::new();
        for req in inbox {
            if !members.iter().any(|m| m.vertex == req.src) {
                continue;
            }
            let payload: Vec<Word> = members
                .iter()
                .filter(|m| m.vertex != self.id)
                .map(pack)
                .collect();
            if !payload.is_empty() {
                out.push(Message::new(self.id, req.src, payload));
            }
        }
        out
    }

    /// Folds served trees into the pool: a member w of v's tree becomes a
    /// candidate at dist(self, v) + dist(v, w), keeping v's parent link
    /// for w.
    fn merge_round(&mut self, inbox: &[Message]) {
        for msg in inbox {
            let via = self.pool[&msg.src].dist;
            for &word in &msg.payload {
                let m = unpack(word);
                self.offer(m.vertex, via + m.dist, m.parent.unwrap());
            }
        }
    }

    fn finalize(&mut self) {
        let mut members: Vec<BfsMember> = self
            .pool
            .iter()
            .filter(|(_, e)| e.dist <= self.radius_out)
            .map(|(&v, e)| BfsMember {
                vertex: v,
                dist: e.dist,
                parent: e.parent,
            })
            .collect();
        members.sort_unstable_by_key(|m| (m.dist, m.vertex));
        // A freeze before the final phase happened at a radius of at most
        // floor(k/2) - 1 and so certifies density at the output radius; a
        // final-phase freeze is one hop too wide and proves nothing here.
        self.dense_at_radius = self.frozen_at_phase.is_some_and(|t| t < self.schedule.len())
            || members.len() as f64 > self.thr + EPS;
        members.truncate(self.cap);
        self.tree = Some(TruncatedBfsTree {
            root: self.id,
            radius: self.radius_out,
            capacity: self.cap,
            members,
        });
    }
}

impl NodeProgram for NnProgram {
    fn step(&mut self, round: usize, inbox: &[Message]) -> StepOutput {
        match round {
            // Broadcast own degree.
            0 => StepOutput {
                plain: (0..self.n as u32)
                    .filter(|&d| d != self.id)
                    .map(|d| Message::one(self.id, d, self.adj.len() as Word))
                    .collect(),
                ..StepOutput::default()
            },
            // Learn all degrees; heavy vertices bow out, light ones ship
            // their light-neighbor lists to light neighbors.
            1 => {
                let mut deg = vec![0u64; self.n];
                deg[self.id as usize] = self.adj.len() as u64;
                for msg in inbox {
                    deg[msg.src as usize] = msg.payload[0];
                }
                self.light = deg.iter().map(|&d| d * d < self.n as u64).collect();
                self.self_heavy = !self.light[self.id as usize];
                if self.self_heavy {
                    return StepOutput {
                        halt: true,
                        ..StepOutput::default()
                    };
                }
                self.light_adj = self
                    .adj
                    .iter()
                    .copied()
                    .filter(|&w| self.light[w as usize])
                    .collect();
                let payload: Vec<Word> = self.light_adj.iter().map(|&w| w as Word).collect();
                StepOutput {
                    routed: self
                        .light_adj
                        .iter()
                        .map(|&v| Message::new(self.id, v, payload.clone()))
                        .collect(),
                    ..StepOutput::default()
                }
            }
            // Assemble the exact 2-neighborhood; open the doubling phases.
            2 => {
                self.pool.insert(
                    self.id,
                    PoolEntry {
                        dist: 0,
                        parent: None,
                    },
                );
                let light_adj = self.light_adj.clone();
                for &v in &light_adj {
                    self.offer(v, 1, self.id);
                }
                for msg in inbox {
                    for &word in &msg.payload {
                        self.offer(word as u32, 2, msg.src);
                    }
                }
                self.phase = 1;
                self.close_phase();
                StepOutput {
                    plain: self.request_round(),
                    ..StepOutput::default()
                }
            }
            // Odd rounds: answer requests with tree payloads.
            r if r % 2 == 1 => StepOutput {
                routed: self.serve_round(inbox),
                ..StepOutput::default()
            },
            // Even rounds: fold in served trees, advance the radius.
            r => {
                self.merge_round(inbox);
                self.phase = r / 2;
                self.close_phase();
                if self.phase == self.schedule.len() {
                    self.finalize();
                    StepOutput {
                        halt: true,
                        ..StepOutput::default()
                    }
                } else {
                    StepOutput {
                        plain: self.request_round(),
                        ..StepOutput::default()
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_truncated, cycle, gnp, path, star};
    use proptest::prelude::*;

    fn light_mask(g: &Graph) -> Vec<bool> {
        g.vertices()
            .map(|v| {
                let d = g.degree(v) as u64;
                d * d < g.n() as u64
            })
            .collect()
    }

    fn light_graph(g: &Graph) -> Graph {
        g.filter_vertices(&light_mask(g))
    }

    /// Members and distances must equal the centralized truncated BFS;
    /// parents must be members one hop closer, across a real light edge.
    fn assert_matches_oracle(g: &Graph, k: u32, result: &NnResult) {
        let gl = light_graph(g);
        for v in g.vertices() {
            if result.heavy[v as usize] {
                assert!(result.trees[v as usize].is_none());
                continue;
            }
            let tree = result.trees[v as usize].as_ref().unwrap();
            let oracle =
                bfs_truncated(&gl, v, result.radius, result.capacity, None).unwrap();
            let got: Vec<_> = tree.members.iter().map(|m| (m.vertex, m.dist)).collect();
            let want: Vec<_> = oracle.members.iter().map(|m| (m.vertex, m.dist)).collect();
            assert_eq!(got, want, "tree of vertex {v} (k={k})");
            for m in &tree.members {
                match m.parent {
                    None => assert_eq!(m.vertex, v),
                    Some(p) => {
                        assert!(gl.has_edge(p, m.vertex), "parent edge {p}-{}", m.vertex);
                        let pm = tree.get(p).unwrap_or_else(|| {
                            panic!("parent {p} of {} missing from tree of {v}", m.vertex)
                        });
                        assert_eq!(pm.dist, m.dist - 1);
                    }
                }
            }
        }
    }

    #[test]
    fn path_nine_vertices() {
        let g = path(9).unwrap();
        let result = nearest_neighbors(&g, 6).unwrap();
        assert!(result.heavy.iter().all(|&h| !h)); // max deg 2, 4 < 9
        assert_eq!(result.capacity, 3); // ceil(9^(1/3))
        let t4 = result.trees[4].as_ref().unwrap();
        let got: Vec<_> = t4.members.iter().map(|m| (m.vertex, m.dist)).collect();
        assert_eq!(got, vec![(4, 0), (3, 1), (5, 1)]);
        assert_matches_oracle(&g, 6, &result);
    }

    #[test]
    fn five_cycle() {
        let g = cycle(5).unwrap();
        let result = nearest_neighbors(&g, 6).unwrap();
        assert_eq!(result.capacity, 2); // ceil(5^(1/3)) = 2
        let t0 = result.trees[0].as_ref().unwrap();
        let got: Vec<_> = t0.members.iter().map(|m| (m.vertex, m.dist)).collect();
        assert_eq!(got, vec![(0, 0), (1, 1)]);
        assert_matches_oracle(&g, 6, &result);
    }

    #[test]
    fn heavy_vertices_get_no_tree() {
        // Star K_{1,4}: center degree 4, 16 >= 5, heavy.
        let g = star(5).unwrap();
        let result = nearest_neighbors(&g, 6).unwrap();
        assert_eq!(result.heavy, vec![true, false, false, false, false]);
        assert!(result.trees[0].is_none());
        // Leaves are isolated in G_light.
        for v in 1..5 {
            let t = result.trees[v].as_ref().unwrap();
            assert_eq!(t.members.len(), 1);
            assert_eq!(t.members[0].vertex, v as u32);
        }
        assert_matches_oracle(&g, 6, &result);
    }

    /// A frozen vertex stops requesting, so once every vertex saturates at
    /// the first radius, later serve rounds carry zero traffic.
    #[test]
    fn saturated_vertices_go_quiet() {
        // Star K_{1,9} on vertices 0..10 inside n = 100 (center degree 9,
        // 81 < 100, still light); threshold 100^(1/3) ~ 4.64, and every
        // star vertex has |Gamma_2| = 10 > threshold: all freeze in
        // phase 1.
        let mut edges = Vec::new();
        for leaf in 1..10 {
            edges.push((0u32, leaf as u32));
        }
        let g = Graph::from_edges(100, edges).unwrap();
        let result = run_protocol(&g, 6, true).unwrap();
        assert_matches_oracle(&g, 6, &result);
        // Schedule for k=6 is [2, 3]: request round 2, serve round 3,
        // final merge round 4. Frozen vertices send no requests, so the
        // serve round moves nothing.
        let transcript = result.ledger.transcript.as_ref().unwrap();
        let serve = &transcript[3];
        assert_eq!(serve.sent.iter().sum::<u64>(), 0, "{serve:?}");
        let final_merge = &transcript[4];
        assert_eq!(final_merge.received.iter().sum::<u64>(), 0);
    }

    #[test]
    fn phase_count_matches_closed_form() {
        for k in [6u32, 8, 10, 12, 16, 20] {
            let g = path(12).unwrap();
            let result = nearest_neighbors(&g, k).unwrap();
            let cap = k / 2;
            let expected = (1usize..)
                .find(|i| (1u64 << (i - 1)) + 1 >= cap as u64)
                .unwrap();
            assert_eq!(result.phases, expected, "k={k}");
            // Timeline: degree round, adjacency round, then 2 rounds per
            // doubling step after the first.
            assert_eq!(result.ledger.rounds, 2 * expected + 1);
        }
    }

    #[test]
    fn traffic_stays_admissible() {
        let g = gnp(80, 0.3, 11).unwrap();
        let result = nearest_neighbors(&g, 8).unwrap();
        let cap = g.n() as u64;
        assert!(result.ledger.per_round_max_sent.iter().all(|&s| s <= cap));
        assert!(result
            .ledger
            .per_round_max_received
            .iter()
            .all(|&r| r <= cap));
        assert!(result.ledger.violations.is_empty());
        assert_matches_oracle(&g, 8, &result);
    }

    #[test]
    fn rejects_small_k() {
        let g = path(5).unwrap();
        assert!(nearest_neighbors(&g, 5).is_err());
    }

    #[test]
    fn empty_and_single_vertex() {
        let g = Graph::empty(0);
        let result = nearest_neighbors(&g, 6).unwrap();
        assert!(result.trees.is_empty());

        let g = Graph::empty(1);
        let result = nearest_neighbors(&g, 6).unwrap();
        let t = result.trees[0].as_ref().unwrap();
        assert_eq!(t.members.len(), 1);
    }

    /// Phase invariants: an unfrozen vertex holds exactly its
    /// gamma(i)-neighborhood; a frozen one holds the capacity closest
    /// vertices overall.
    #[test]
    fn phase_invariants_hold() {
        for (seed, k) in [(1u64, 6u32), (2, 8), (3, 10), (4, 12)] {
            let g = gnp(40, 0.15, seed).unwrap();
            let gl = light_graph(&g);
            let result = run_protocol(&g, k, false).unwrap();
            let schedule = gamma_schedule(k);
            // Re-run to inspect program snapshots directly.
            let programs: Vec<NnProgram> = g
                .vertices()
                .map(|v| {
                    NnProgram::new(
                        v,
                        g.neighbors(v).to_vec(),
                        g.n(),
                        k,
                        &schedule,
                        result.capacity,
                    )
                })
                .collect();
            let (programs, _) =
                run_programs(SimConfig::new(g.n()), programs, 2 * schedule.len() + 2).unwrap();
            for p in &programs {
                if p.self_heavy {
                    continue;
                }
                assert_eq!(p.snapshots.len(), schedule.len());
                for (i, snap) in p.snapshots.iter().enumerate() {
                    let got: Vec<_> = snap.members.clone();
                    let want: Vec<_> = if snap.frozen {
                        bfs_truncated(&gl, p.id, u32::MAX, result.capacity, None)
                            .unwrap()
                            .members
                            .iter()
                            .map(|m| (m.vertex, m.dist))
                            .collect()
                    } else {
                        bfs_truncated(&gl, p.id, schedule[i], usize::MAX, None)
                            .unwrap()
                            .members
                            .iter()
                            .map(|m| (m.vertex, m.dist))
                            .collect()
                    };
                    assert_eq!(got, want, "vertex {} phase {}", p.id, i + 1);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn oracle_equivalence(seed in 0u64..200, n in 1usize..60, dense in proptest::bool::ANY, k_pick in 0usize..4) {
            let k = [6u32, 8, 10, 12][k_pick];
            let p = if dense { 0.3 } else { 0.08 };
            let g = gnp(n, p, seed).unwrap();
            let result = nearest_neighbors(&g, k).unwrap();
            assert_matches_oracle(&g, k, &result);
        }
    }
}
