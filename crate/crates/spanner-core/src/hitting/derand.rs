//! Deterministic seed selection by the method of conditional expectations.
//!
//! The failure estimator for a partially fixed seed is
//!
//! ```text
//! psi(prefix) = Pr[|Z| > size_threshold | prefix]
//!             + sum_u Pr[S_u intersect Z = empty | prefix]
//! ```
//!
//! with all probabilities over the uniform completion of the unfixed seed
//! bits. psi is an average over one-chunk extensions, so some extension
//! never increases it; if psi < 1 at the start, the final fully fixed seed
//! has psi = 0, i.e. Z hits every set and stays within the size bound.
//!
//! Probabilities here are exact dyadic rationals. Everything is computed
//! as an integer count of bad suffixes over the denominator 2^(free bits),
//! so the conservation and monotonicity checks are exact integer
//! identities, not float comparisons.
//!
//! The count enumerates completions of the coefficients a_1..a_{d-1} and
//! handles a_0 in closed form: h'(x) = 0 iff the low bits of a_0 equal the
//! low bits of c(x) = sum_{j>=1} a_j x^j, so for a fixed high part the bad
//! a_0 count follows from the set of low-bit patterns {c(x) : x in S_u}
//! (and, for the size term, from a pattern histogram over the universe).
//! The seed reveals most-significant-bit first with a_0 packed lowest, so
//! the free bits of a_0 are always its low bits and the closed form stays
//! available at every prefix length. Counts agree bit-for-bit with full
//! suffix enumeration; the enumeration budget is still enforced on the
//! suffix space itself.

use crate::{Error, Result};

use super::dwise::{low_mask64, DwiseFamily, DwiseParams};
use super::HittingSetInstance;

/// Default cap on the enumerated suffix space: 2^24 completions.
pub const ENUMERATION_LIMIT_BITS: u32 = 24;

/// Hard ceiling for a configured limit; beyond this the walk is hopeless
/// anyway and the u64 seed packing would be at risk.
const LIMIT_CEILING: u32 = 30;

/// A partially revealed seed: the first `len` bits of the seed integer,
/// most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeedPrefix {
    value: u64,
    len: u32,
}

impl SeedPrefix {
    pub fn empty() -> Self {
        SeedPrefix::default()
    }

    pub fn push(&mut self, chunk: u64, width: u32) {
        debug_assert!(width <= 32 && chunk <= low_mask64(width));
        self.value = (self.value << width) | chunk;
        self.len += width;
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The bits revealed so far, first bit highest.
    pub fn bits(&self) -> u64 {
        self.value
    }
}

/// Per-coefficient view of a prefix: which bits of a_j are fixed.
struct PrefixView {
    gamma: u32,
    total_bits: u32,
    prefix: SeedPrefix,
}

impl PrefixView {
    fn new(params: DwiseParams, prefix: SeedPrefix) -> PrefixView {
        PrefixView {
            gamma: params.gamma,
            total_bits: params.d * params.gamma,
            prefix,
        }
    }

    fn total_free(&self) -> u32 {
        self.total_bits - self.prefix.len
    }

    /// Number of free (low-order) bits of coefficient a_j.
    fn free_bits(&self, j: u32) -> u32 {
        let unfixed = self.total_free();
        unfixed.saturating_sub(j * self.gamma).min(self.gamma)
    }

    /// Coefficient a_j with its free bits zeroed.
    fn fixed_coeff(&self, j: u32) -> u32 {
        let f = self.free_bits(j);
        if f == self.gamma {
            return 0;
        }
        let shift = j * self.gamma + f - self.total_free();
        (((self.prefix.value >> shift) & low_mask64(self.gamma - f)) as u32) << f
    }

    /// Full seed integer; only meaningful when nothing is free.
    fn full_seed(&self) -> u64 {
        debug_assert_eq!(self.total_free(), 0);
        self.prefix.value
    }
}

/// What to count for a given prefix.
struct CountRequest<'a> {
    /// Point sets (field elements); one bad-suffix count per set.
    sets: &'a [&'a [u32]],
    /// (threshold, universe size): also count suffixes with
    /// |{x in 0..m : h'(x) = 0}| > threshold.
    size: Option<(usize, usize)>,
}

/// Exact bad-suffix counts; the common denominator is 2^denom_bits.
struct Counts {
    per_set: Vec<u64>,
    size: u64,
    denom_bits: u32,
}

fn failure_counts(
    family: &DwiseFamily,
    prefix: SeedPrefix,
    req: &CountRequest,
    limit_bits: u32,
) -> Result<Counts> {
    let params = family.params();
    let d = params.d;
    let gamma = params.gamma;
    let beta = params.beta;
    let g = d * gamma;
    if prefix.len() > g {
        return Err(Error::InvalidInput(format!(
            "prefix of {} bits exceeds seed length {g}",
            prefix.len()
        )));
    }
    let limit = limit_bits.min(LIMIT_CEILING);
    let view = PrefixView::new(params, prefix);
    let free = view.total_free();
    if free > limit {
        return Err(Error::ResourceLimit(format!(
            "suffix space 2^{free} exceeds the enumeration limit 2^{limit}; \
             reduce d or gamma (seed is {g} bits)"
        )));
    }
    let field_size = family.field().size();
    for set in req.sets {
        for &x in set.iter() {
            if x >= field_size {
                return Err(Error::InvalidInput(format!(
                    "point {x} outside the field of size {field_size}"
                )));
            }
        }
    }
    if let Some((_, m)) = req.size {
        if m > field_size as usize {
            return Err(Error::InvalidInput(format!(
                "universe of {m} does not fit in the field of size {field_size}"
            )));
        }
    }

    let f0 = view.free_bits(0);
    let a0_fixed = view.fixed_coeff(0);
    let high_free: u32 = (1..d).map(|j| view.free_bits(j)).sum();
    debug_assert_eq!(high_free + f0, free);

    let beta_mask = low_mask64(beta) as u32;
    let patterns = 1usize << beta;
    // Pattern scratch, generation-stamped so it needs no clearing.
    let mut stamp = vec![0u32; patterns];
    let mut hist = vec![0u32; patterns];
    let mut hist_gen = vec![0u32; patterns];
    let mut gen = 0u32;

    let mut per_set = vec![0u64; req.sets.len()];
    let mut size_count = 0u64;
    let mut coeffs = vec![0u32; d as usize];

    for t in 0..(1u64 << high_free) {
        // Distribute the enumeration bits over the free (low) bits of
        // a_1..a_{d-1}.
        let mut rest = t;
        for j in 1..d {
            let f = view.free_bits(j);
            coeffs[j as usize] = view.fixed_coeff(j) | ((rest & low_mask64(f)) as u32);
            rest >>= f;
        }
        coeffs[0] = 0; // c(x) below is the a_0-free part of the hash

        for (i, set) in req.sets.iter().enumerate() {
            gen += 1;
            let mut distinct = 0u32;
            for &x in set.iter() {
                let pat = (family.eval(&coeffs, x) & beta_mask) as usize;
                if stamp[pat] != gen {
                    stamp[pat] = gen;
                    distinct += 1;
                }
            }
            per_set[i] += if f0 >= beta {
                // Low beta bits of a_0 are fully free: each pattern value
                // is taken 2^(f0 - beta) times; bad ones avoid the set.
                ((1u64 << beta) - distinct as u64) << (f0 - beta)
            } else {
                // Only the low f0 bits of a_0 vary; the rest of its low-
                // beta pattern is already pinned.
                let pinned = a0_fixed & beta_mask & !(low_mask64(f0) as u32);
                (0..(1u32 << f0))
                    .filter(|t0| stamp[(pinned | t0) as usize] != gen)
                    .count() as u64
            };
        }

        if let Some((threshold, m)) = req.size {
            gen += 1;
            for x in 0..m as u32 {
                let pat = (family.eval(&coeffs, x) & beta_mask) as usize;
                if hist_gen[pat] != gen {
                    hist_gen[pat] = gen;
                    hist[pat] = 0;
                }
                hist[pat] += 1;
            }
            let over = |pat: usize| -> bool {
                hist_gen[pat] == gen && hist[pat] as usize > threshold
            };
            size_count += if f0 >= beta {
                let exceed = (0..patterns).filter(|&p| over(p)).count() as u64;
                exceed << (f0 - beta)
            } else {
                let pinned = a0_fixed & beta_mask & !(low_mask64(f0) as u32);
                (0..(1u32 << f0))
                    .filter(|t0| over((pinned | t0) as usize))
                    .count() as u64
            };
        }
    }

    Ok(Counts {
        per_set,
        size: size_count,
        denom_bits: free,
    })
}

fn to_probability(count: u64, denom_bits: u32) -> f64 {
    // Exact: counts are below 2^30 and the denominator is a power of two.
    count as f64 / (1u64 << denom_bits) as f64
}

/// Pr[S intersect Z = empty | prefix], exactly, under uniform completion
/// of the seed. Points are field elements (universe ranks).
pub fn conditional_failure_probability(
    family: &DwiseFamily,
    prefix: SeedPrefix,
    set: &[u32],
) -> Result<f64> {
    let counts = failure_counts(
        family,
        prefix,
        &CountRequest {
            sets: &[set],
            size: None,
        },
        ENUMERATION_LIMIT_BITS,
    )?;
    Ok(to_probability(counts.per_set[0], counts.denom_bits))
}

/// Pr[|Z| > size_threshold | prefix] for Z = {x in 0..universe_size :
/// h'(x) = 0}, exactly.
pub fn size_term(
    family: &DwiseFamily,
    prefix: SeedPrefix,
    size_threshold: usize,
    universe_size: usize,
) -> Result<f64> {
    let counts = failure_counts(
        family,
        prefix,
        &CountRequest {
            sets: &[],
            size: Some((size_threshold, universe_size)),
        },
        ENUMERATION_LIMIT_BITS,
    )?;
    Ok(to_probability(counts.size, counts.denom_bits))
}

/// A certified deterministic hitting set.
#[derive(Debug, Clone)]
pub struct DerandOutcome {
    pub params: DwiseParams,
    /// The chosen seed as packed coefficient bits.
    pub seed: u64,
    pub coeffs: Vec<u32>,
    /// Hitting set in original universe labels.
    pub z: Vec<u32>,
    /// |Z| is certified to stay at or below this.
    pub size_threshold: usize,
    /// Bits revealed per step (floor(log2 m), at least 1).
    pub chunk_width: u32,
    /// Number of reveal steps — the rounds a central run broadcasts.
    pub chunks: usize,
    /// Exact initial estimator value (below 1, or this errored).
    pub initial_psi: f64,
}

/// Deterministic hitting set with the default size threshold
/// ceil(2 * E|Z|) and the default enumeration limit.
pub fn derandomized_hitting_set(
    instance: &HittingSetInstance,
    params: DwiseParams,
) -> Result<DerandOutcome> {
    derandomized_hitting_set_with(instance, params, None, ENUMERATION_LIMIT_BITS)
}

/// Full-control variant: explicit size threshold (None for the default)
/// and enumeration limit (capped at 2^30).
pub fn derandomized_hitting_set_with(
    instance: &HittingSetInstance,
    params: DwiseParams,
    size_threshold: Option<usize>,
    limit_bits: u32,
) -> Result<DerandOutcome> {
    params.validate()?;
    let universe = instance.universe();
    let m = universe.len();
    if m == 0 {
        return Ok(DerandOutcome {
            params,
            seed: 0,
            coeffs: vec![0; params.d as usize],
            z: Vec::new(),
            size_threshold: 0,
            chunk_width: 1,
            chunks: 0,
            initial_psi: 0.0,
        });
    }
    let family = DwiseFamily::new(params)?;
    if m > family.field().size() as usize {
        return Err(Error::InvalidInput(format!(
            "universe of {m} needs gamma >= {}, got {}",
            super::dwise::index_bits(m),
            params.gamma
        )));
    }
    // Hash by rank in the sorted universe.
    let sets: Vec<Vec<u32>> = instance
        .sets()
        .values()
        .map(|set| {
            set.iter()
                .map(|x| universe.binary_search(x).expect("validated member") as u32)
                .collect()
        })
        .collect();
    let set_refs: Vec<&[u32]> = sets.iter().map(|s| s.as_slice()).collect();
    let threshold =
        size_threshold.unwrap_or_else(|| (2 * m).div_ceil(1usize << params.beta));
    let g = params.d * params.gamma;
    let chunk_width = (usize::BITS - 1 - m.leading_zeros()).max(1);

    let request = CountRequest {
        sets: &set_refs,
        size: Some((threshold, m)),
    };
    let psi_num = |prefix: SeedPrefix| -> Result<(u64, u64, u64)> {
        let counts = failure_counts(&family, prefix, &request, limit_bits)?;
        let miss: u64 = counts.per_set.iter().sum();
        Ok((miss + counts.size, miss, counts.size))
    };

    let mut prefix = SeedPrefix::empty();
    let (mut current, miss0, size0) = psi_num(prefix)?;
    let initial_psi = to_probability(current, g);
    if current >= 1u64 << g {
        return Err(Error::InvalidInput(format!(
            "initial failure estimator {:.6} is not below 1 \
             (miss terms {:.6}, size term {:.6}); \
             widen the family or lower beta",
            initial_psi,
            to_probability(miss0, g),
            to_probability(size0, g),
        )));
    }

    let mut chunks = 0usize;
    while prefix.len() < g {
        let width = chunk_width.min(g - prefix.len());
        let mut best: Option<(u64, u64)> = None;
        let mut total = 0u64;
        for y in 0..(1u64 << width) {
            let mut candidate = prefix;
            candidate.push(y, width);
            let (num, _, _) = psi_num(candidate)?;
            total += num;
            // Strict < keeps the smallest chunk value among ties.
            if best.map_or(true, |(b, _)| num < b) {
                best = Some((num, y));
            }
        }
        let (min_num, min_y) = best.expect("at least one candidate");
        // The children partition the parent's suffix space exactly.
        assert_eq!(total, current, "estimator mass must be conserved");
        // Some child is at or below the average, so the minimum never
        // lets the estimator grow.
        assert!(
            min_num << width <= current,
            "estimator must be monotone under the greedy choice"
        );
        prefix.push(min_y, width);
        current = min_num;
        chunks += 1;
    }

    // psi < 1 over a denominator of 1 means zero failure events.
    assert_eq!(current, 0, "final seed must certify all events");
    let view = PrefixView::new(params, prefix);
    let seed = view.full_seed();
    let coeffs = family.coeffs_from_seed(seed);
    let z: Vec<u32> = universe
        .iter()
        .enumerate()
        .filter(|&(i, _)| family.eval_low(&coeffs, i as u32) == 0)
        .map(|(_, &label)| label)
        .collect();
    if !instance.is_hitting(&z) || z.len() > threshold {
        return Err(Error::Internal(format!(
            "certified seed {seed:#x} fails its own guarantee (|Z|={}, threshold {threshold})",
            z.len()
        )));
    }
    Ok(DerandOutcome {
        params,
        seed,
        coeffs,
        z,
        size_threshold: threshold,
        chunk_width,
        chunks,
        initial_psi,
    })
}
