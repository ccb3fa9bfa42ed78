//! Hitting sets for families of large subsets: randomized sampling, a
//! small-seed d-wise hash family, and a deterministic seed search by the
//! method of conditional expectations.
//!
//! An instance is a universe plus a collection of owned sets, each of size
//! at least `delta`. The goal is a small subset Z of the universe that
//! intersects every set. The three constructions trade randomness for
//! rounds:
//!
//! * [`randomized_hitting_set`] — independent coin per element, succeeds
//!   with high probability, one plain round to announce membership.
//! * [`dwise_hitting_draw`] — one short random seed for a d-wise
//!   independent hash; membership is `h'(u) = 0`.
//! * [`derandomized_hitting_set`] — fixes that seed deterministically,
//!   chunk by chunk, so that a pessimistic failure estimator never grows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rng::Rng;
use crate::{Error, Result};

pub mod derand;
pub mod dwise;
pub mod gf2;

pub use derand::{
    conditional_failure_probability, derandomized_hitting_set, derandomized_hitting_set_with,
    size_term, DerandOutcome, SeedPrefix, ENUMERATION_LIMIT_BITS,
};
pub use dwise::{dwise_hitting_draw, default_beta, DwiseDraw, DwiseFamily, DwiseParams};

/// A hitting-set problem: a universe of labels and a family of sets drawn
/// from it, each of size at least `delta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HittingSetInstance {
    /// Sorted, duplicate-free element labels.
    universe: Vec<u32>,
    /// Owner id -> sorted member list. Owners are arbitrary labels; in the
    /// spanner pipeline they are vertex ids.
    sets: BTreeMap<u32, Vec<u32>>,
    /// Guaranteed lower bound on every set size (>= 1).
    delta: usize,
}

impl HittingSetInstance {
    /// Validates and normalizes an instance. Sets are sorted and checked
    /// for membership in the universe; `delta` must hold for every set.
    pub fn new(
        universe: Vec<u32>,
        sets: BTreeMap<u32, Vec<u32>>,
        delta: usize,
    ) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidInput(
                "hitting-set bound delta must be at least 1".into(),
            ));
        }
        let mut universe = universe;
        universe.sort_unstable();
        universe.dedup();
        let mut normalized = BTreeMap::new();
        for (owner, mut set) in sets {
            set.sort_unstable();
            set.dedup();
            if set.len() < delta {
                return Err(Error::InvalidInput(format!(
                    "set owned by {owner} has {} elements, below delta={delta}",
                    set.len()
                )));
            }
            for &x in &set {
                if universe.binary_search(&x).is_err() {
                    return Err(Error::InvalidInput(format!(
                        "set owned by {owner} contains {x}, not in the universe"
                    )));
                }
            }
            normalized.insert(owner, set);
        }
        Ok(HittingSetInstance {
            universe,
            sets: normalized,
            delta,
        })
    }

    pub fn universe(&self) -> &[u32] {
        &self.universe
    }

    pub fn sets(&self) -> &BTreeMap<u32, Vec<u32>> {
        &self.sets
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Parses the JSON form: `{"universe": [..], "sets": {"id": [..]}, "delta": k}`.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            universe: Vec<u32>,
            sets: BTreeMap<String, Vec<u32>>,
            delta: usize,
        }
        let raw: Raw = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("bad hitting-set instance JSON: {e}")))?;
        let mut sets = BTreeMap::new();
        for (key, value) in raw.sets {
            let owner: u32 = key.parse().map_err(|_| {
                Error::InvalidInput(format!("set key {key:?} is not a vertex id"))
            })?;
            sets.insert(owner, value);
        }
        Self::new(raw.universe, sets, raw.delta)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Raw<'a> {
            universe: &'a [u32],
            sets: BTreeMap<String, &'a [u32]>,
            delta: usize,
        }
        let raw = Raw {
            universe: &self.universe,
            sets: self
                .sets
                .iter()
                .map(|(k, v)| (k.to_string(), v.as_slice()))
                .collect(),
            delta: self.delta,
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }

    /// Does `z` intersect every set?
    pub fn is_hitting(&self, z: &[u32]) -> bool {
        let mut sorted = z.to_vec();
        sorted.sort_unstable();
        self.sets
            .values()
            .all(|set| set.iter().any(|x| sorted.binary_search(x).is_ok()))
    }

    /// Effective problem size used in the sampling rate: the larger of the
    /// universe and the number of sets, floored at 2 so ln stays positive.
    pub fn effective_size(&self) -> usize {
        self.universe.len().max(self.sets.len()).max(2)
    }
}

/// Per-element inclusion probability for the randomized construction:
/// min(1, c * ln(n_eff) / delta).
pub fn sampling_probability(instance: &HittingSetInstance, c: f64) -> f64 {
    let n_eff = instance.effective_size() as f64;
    (c * n_eff.ln() / instance.delta as f64).min(1.0)
}

/// Samples each universe element independently with probability
/// min(1, c * ln(n_eff) / delta). With c >= 2 the result hits every set
/// with probability at least 1 - 1/n_eff.
pub fn randomized_hitting_set(instance: &HittingSetInstance, c: f64, seed: u64) -> Vec<u32> {
    let p = sampling_probability(instance, c);
    let mut rng = Rng::new(seed);
    instance
        .universe
        .iter()
        .copied()
        .filter(|_| rng.bernoulli(p))
        .collect()
}

/// Deterministic greedy hitting set: repeatedly take the element covering
/// the most not-yet-hit sets (smallest label on ties). Always succeeds;
/// size is within a ln(#sets)+1 factor of optimal. Used as a fallback when
/// the seed search is configured out of its feasible range.
pub fn greedy_hitting_set(instance: &HittingSetInstance) -> Vec<u32> {
    let mut remaining: Vec<&Vec<u32>> = instance.sets.values().collect();
    let mut z = Vec::new();
    while !remaining.is_empty() {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for set in &remaining {
            for &x in *set {
                *count.entry(x).or_insert(0) += 1;
            }
        }
        // BTreeMap iterates in ascending label order, so `>` keeps the
        // smallest label among maxima.
        let (&best, _) = count
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("nonempty sets remain");
        z.push(best);
        remaining.retain(|set| set.binary_search(&best).is_err());
    }
    z.sort_unstable();
    z
}

/// How a hitting set gets computed inside the spanner pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HittingSetBackend {
    /// Independent per-element coins at rate min(1, c ln(n_eff)/delta).
    Randomized { c: f64, seed: u64 },
    /// One random seed for the d-wise family; membership is h'(u) = 0.
    DwiseRandom { d: u32, seed: u64 },
    /// Deterministic seed search (conditional expectations) over the
    /// d-wise family, falling back to the greedy cover if the search is
    /// out of range or its initial estimator is not below 1.
    Derandomized { d: u32 },
}

/// Result of running a backend, with the round cost the caller should
/// charge to its simulation: the seed or membership announcements are
/// plain broadcasts, the greedy fallback ships whole sets to a leader.
#[derive(Debug, Clone)]
pub struct BackendOutcome {
    pub z: Vec<u32>,
    pub plain_rounds: usize,
    pub routing_rounds: usize,
    /// True when the derandomized backend had to fall back to greedy.
    pub fell_back: bool,
}

/// Runs `backend` on `instance`. Randomized backends may fail to hit
/// (reported as an error by callers who verify); the derandomized backend
/// either proves its seed or falls back to the greedy cover, so its result
/// always hits.
pub fn compute_hitting_set(
    instance: &HittingSetInstance,
    backend: HittingSetBackend,
) -> Result<BackendOutcome> {
    match backend {
        HittingSetBackend::Randomized { c, seed } => Ok(BackendOutcome {
            z: randomized_hitting_set(instance, c, seed),
            plain_rounds: 1,
            routing_rounds: 0,
            fell_back: false,
        }),
        HittingSetBackend::DwiseRandom { d, seed } => {
            let draw = dwise_hitting_draw(instance, d, seed)?;
            Ok(BackendOutcome {
                z: draw.z,
                plain_rounds: 1,
                routing_rounds: 0,
                fell_back: false,
            })
        }
        HittingSetBackend::Derandomized { d } => {
            let m = instance.universe().len();
            if m == 0 {
                return Ok(BackendOutcome {
                    z: Vec::new(),
                    plain_rounds: 0,
                    routing_rounds: 0,
                    fell_back: false,
                });
            }
            let mut params = dwise::default_params(instance, d);
            // Relax the low-bit width until the initial estimator drops
            // below 1; fewer output bits mean a denser, easier target.
            loop {
                match derandomized_hitting_set(instance, params) {
                    Ok(outcome) => {
                        let chunks = outcome.chunks;
                        return Ok(BackendOutcome {
                            z: outcome.z,
                            plain_rounds: chunks,
                            routing_rounds: 0,
                            fell_back: false,
                        });
                    }
                    Err(Error::InvalidInput(_)) if params.beta > 1 => {
                        params.beta -= 1;
                    }
                    Err(Error::InvalidInput(_)) | Err(Error::ResourceLimit(_)) => {
                        return Ok(greedy_fallback(instance));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

fn greedy_fallback(instance: &HittingSetInstance) -> BackendOutcome {
    let z = greedy_hitting_set(instance);
    let n = instance.effective_size();
    let upload: usize = instance.sets.values().map(|s| s.len() + 1).sum();
    BackendOutcome {
        // Sets ship to a leader (routed), then Z broadcasts back out.
        routing_rounds: upload.div_ceil(n) + z.len().div_ceil(n),
        plain_rounds: 0,
        z,
        fell_back: true,
    }
}
