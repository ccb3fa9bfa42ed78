//! Audits for finished runs: exact stretch measurement of a spanner
//! against its host graph, plus hitting-set checks. The clustering audit
//! lives with the clustering code and is re-exported here so every
//! check a harness needs is reachable from one module.
//!
//! The stretch audit is exact and therefore quadratic-ish: one BFS in the
//! spanner per distinct endpoint that lost an edge. It refuses graphs
//! larger than [`oracle_limit`] vertices so a sweep cannot accidentally
//! spend hours inside a verifier.

use std::collections::BTreeMap;

pub use crate::dense::audit_clustering;
use crate::graph::{distances_from, EdgeSet, Graph, DEFAULT_ORACLE_LIMIT};
use crate::hitting::HittingSetInstance;
use crate::{Error, Result};

/// Environment variable that overrides the audit size limit.
pub const ORACLE_LIMIT_ENV: &str = "SPANNER_ORACLE_LIMIT";

/// Largest vertex count the exact audits accept: the value of
/// `SPANNER_ORACLE_LIMIT` when it parses as a positive integer, otherwise
/// [`DEFAULT_ORACLE_LIMIT`].
pub fn oracle_limit() -> usize {
    match std::env::var(ORACLE_LIMIT_ENV) {
        Ok(raw) => raw.trim().parse::<usize>().ok().filter(|&v| v > 0).unwrap_or(DEFAULT_ORACLE_LIMIT),
        Err(_) => DEFAULT_ORACLE_LIMIT,
    }
}

/// Exact stretch measurement of a spanner. `stretches` lists every host
/// edge in lexicographic order with its distance inside the spanner;
/// edges kept by the spanner contribute 1, edges whose endpoints fall in
/// different spanner components contribute [`INFINITY`](crate::graph::INFINITY).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StretchAudit {
    /// The bound the audit was asked to certify.
    pub bound: u32,
    /// Per host edge `(u, v)` with `u < v`: `dist_H(u, v)`.
    pub stretches: Vec<((u32, u32), u32)>,
    /// Largest stretch over all host edges; 0 for an edgeless host.
    pub max_stretch: u32,
    /// Lexicographically first edge attaining `max_stretch`.
    pub worst_edge: Option<(u32, u32)>,
    /// Stretch value -> number of host edges with that stretch.
    pub histogram: BTreeMap<u32, usize>,
    /// Whether `max_stretch <= bound`.
    pub pass: bool,
}

/// Measures `dist_H(u, v)` for every edge `(u, v)` of `g` and checks the
/// maximum against `bound`.
///
/// Edges present in `spanner` have stretch 1 by definition. For the rest,
/// the audit runs one BFS inside the spanner per distinct lower endpoint
/// (host edges are scanned in lexicographic order, so each BFS front is
/// reused across all missing edges sharing it).
///
/// Errors: a spanner edge absent from `g` (or a vertex-count mismatch) is
/// an input error, and a host larger than [`oracle_limit`] vertices is a
/// resource error naming the override variable.
pub fn audit_stretch(g: &Graph, spanner: &EdgeSet, bound: u32) -> Result<StretchAudit> {
    let n = g.n();
    if spanner.n() != n {
        return Err(Error::InvalidInput(format!(
            "spanner is over {} vertices, host graph has {n}",
            spanner.n()
        )));
    }
    let limit = oracle_limit();
    if n > limit {
        return Err(Error::ResourceLimit(format!(
            "stretch audit limited to {limit} vertices, graph has {n}; raise {ORACLE_LIMIT_ENV} to override"
        )));
    }
    for (u, v) in spanner.iter() {
        if !g.has_edge(u, v) {
            return Err(Error::InvalidInput(format!(
                "spanner edge ({u}, {v}) does not exist in the host graph"
            )));
        }
    }

    let h = spanner.to_graph();
    let mut stretches = Vec::with_capacity(g.m());
    let mut histogram: BTreeMap<u32, usize> = BTreeMap::new();
    let mut max_stretch = 0u32;
    let mut worst_edge = None;
    // Distances from the lower endpoint of the edge group currently being
    // scanned; host edges arrive sorted by that endpoint.
    let mut front: Option<(u32, Vec<u32>)> = None;
    for (u, v) in g.edges() {
        let stretch = if spanner.contains(u, v) {
            1
        } else {
            match &front {
                Some((root, dist)) if *root == u => dist[v as usize],
                _ => {
                    let dist = distances_from(&h, u);
                    let s = dist[v as usize];
                    front = Some((u, dist));
                    s
                }
            }
        };
        stretches.push(((u, v), stretch));
        *histogram.entry(stretch).or_insert(0) += 1;
        if stretch > max_stretch || worst_edge.is_none() {
            max_stretch = stretch;
            worst_edge = Some((u, v));
        }
    }
    let pass = max_stretch <= bound;
    Ok(StretchAudit {
        bound,
        stretches,
        max_stretch,
        worst_edge,
        histogram,
        pass,
    })
}

/// Outcome of checking a candidate hitting set against an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingAudit {
    /// Whether every set of the instance contains a member of `z`.
    pub pass: bool,
    /// Number of distinct elements in the candidate.
    pub size: usize,
}

/// Checks that `z` hits every set of `instance` and reports its size.
pub fn audit_hitting(instance: &HittingSetInstance, z: &[u32]) -> HittingAudit {
    let mut sorted: Vec<u32> = z.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    HittingAudit {
        pass: instance.is_hitting(&sorted),
        size: sorted.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_pairs_distances, complete, cycle, gnp, path, INFINITY};
    use crate::rng::Rng;
    use std::collections::BTreeMap as Map;

    #[test]
    fn the_graph_is_its_own_stretch_one_spanner() {
        let g = gnp(40, 0.2, 7).unwrap();
        let audit = audit_stretch(&g, &EdgeSet::from_graph(&g), 1).unwrap();
        assert_eq!(audit.max_stretch, 1);
        assert!(audit.pass);
        assert_eq!(audit.histogram.get(&1), Some(&g.m()));
        assert_eq!(audit.stretches.len(), g.m());
    }

    #[test]
    fn dropping_one_cycle_edge_costs_the_long_way_round() {
        // Removing (0, 4) from the 5-cycle leaves the path 0-1-2-3-4, so
        // the dropped edge detours over all four remaining hops.
        let g = cycle(5).unwrap();
        let mut spanner = EdgeSet::from_graph(&g);
        let removed = spanner.remove(0, 4);
        assert!(removed);
        let audit = audit_stretch(&g, &spanner, 4).unwrap();
        assert_eq!(audit.max_stretch, 4);
        assert_eq!(audit.worst_edge, Some((0, 4)));
        assert!(audit.pass);
        assert!(!audit_stretch(&g, &spanner, 3).unwrap().pass);
    }

    #[test]
    fn a_star_spans_the_complete_graph_with_stretch_two() {
        let g = complete(4).unwrap();
        let mut spanner = EdgeSet::new(4);
        for leaf in 1..4 {
            spanner.insert(0, leaf);
        }
        let audit = audit_stretch(&g, &spanner, 2).unwrap();
        assert_eq!(audit.max_stretch, 2);
        assert!(audit.pass);
        // Three kept edges at stretch 1, three detours at stretch 2.
        assert_eq!(audit.histogram.get(&1), Some(&3));
        assert_eq!(audit.histogram.get(&2), Some(&3));
    }

    #[test]
    fn a_disconnecting_spanner_reports_infinite_stretch() {
        let g = path(3).unwrap();
        let mut spanner = EdgeSet::new(3);
        spanner.insert(0, 1);
        let audit = audit_stretch(&g, &spanner, 1000).unwrap();
        assert_eq!(audit.max_stretch, INFINITY);
        assert_eq!(audit.worst_edge, Some((1, 2)));
        assert!(!audit.pass);
    }

    #[test]
    fn foreign_spanner_edges_are_rejected() {
        let g = path(4).unwrap();
        let mut spanner = EdgeSet::new(4);
        spanner.insert(0, 3);
        match audit_stretch(&g, &spanner, 10) {
            Err(Error::InvalidInput(msg)) => assert!(msg.contains("(0, 3)")),
            other => panic!("expected an input error, got {other:?}"),
        }
    }

    #[test]
    fn oversized_hosts_are_refused_with_the_override_hint() {
        let g = Graph::empty(DEFAULT_ORACLE_LIMIT + 1);
        let spanner = EdgeSet::new(DEFAULT_ORACLE_LIMIT + 1);
        match audit_stretch(&g, &spanner, 1) {
            Err(Error::ResourceLimit(msg)) => assert!(msg.contains(ORACLE_LIMIT_ENV)),
            other => panic!("expected a resource error, got {other:?}"),
        }
    }

    #[test]
    fn an_edgeless_host_passes_vacuously() {
        let g = Graph::empty(5);
        let audit = audit_stretch(&g, &EdgeSet::new(5), 0).unwrap();
        assert_eq!(audit.max_stretch, 0);
        assert_eq!(audit.worst_edge, None);
        assert!(audit.pass);
    }

    #[test]
    fn audits_agree_with_the_distance_oracle() {
        // 100 random (graph, sub-spanner) pairs, checked edge by edge
        // against the all-pairs oracle run on the spanner alone.
        let mut rng = Rng::new(0x5eed_ab17);
        for trial in 0..100u64 {
            let n = 20 + (trial as usize % 5) * 8;
            let g = gnp(n, 0.12, 900 + trial).unwrap();
            let mut spanner = EdgeSet::new(n);
            for (u, v) in g.edges() {
                if rng.next_f64() < 0.7 {
                    spanner.insert(u, v);
                }
            }
            let audit = audit_stretch(&g, &spanner, 1).unwrap();
            let dist = all_pairs_distances(&spanner.to_graph(), n).unwrap();
            let mut expected_max = 0u32;
            for &((u, v), s) in &audit.stretches {
                assert_eq!(s, dist[u as usize][v as usize], "edge ({u}, {v})");
                expected_max = expected_max.max(s);
            }
            assert_eq!(audit.max_stretch, expected_max);
        }
    }

    #[test]
    fn hitting_audits_count_distinct_members() {
        let mut sets = Map::new();
        sets.insert(0, vec![1, 2, 3]);
        sets.insert(1, vec![3, 4, 5]);
        let instance = HittingSetInstance::new((1..=5).collect(), sets, 3).unwrap();
        let hit = audit_hitting(&instance, &[3, 3, 3]);
        assert!(hit.pass);
        assert_eq!(hit.size, 1);
        let miss = audit_hitting(&instance, &[1, 4]);
        assert!(miss.pass); // 1 hits the first set, 4 the second.
        let empty = audit_hitting(&instance, &[]);
        assert!(!empty.pass);
        assert_eq!(empty.size, 0);
    }
}
