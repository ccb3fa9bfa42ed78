//! A d-wise independent hash family over GF(2^gamma) with truncated
//! output, and the one-seed randomized hitting-set draw built on it.
//!
//! A seed is d field coefficients a_0..a_{d-1}; the hash of a point x is
//! h(x) = sum a_j x^j, and the working value h'(x) keeps only the low
//! `beta` bits. For distinct points x_1..x_d the map from seeds to
//! (h(x_1), ..., h(x_d)) is a linear bijection (Vandermonde), so the full
//! values — and any fixed slice of their bits — are jointly uniform.
//!
//! Seed bit order matters to the deterministic search in [`super::derand`]:
//! the seed integer packs a_j into bits [j*gamma, (j+1)*gamma), and bits
//! are revealed from the most significant end. The highest-degree
//! coefficient is fixed first and a_0 last, so an unfixed suffix always
//! leaves the *low-order* bits of a_0 free.

use crate::params::EPS;
use crate::rng::Rng;
use crate::{Error, Result};

use super::gf2::Gf2;
use super::HittingSetInstance;

/// Shape of a d-wise family: polynomial degree bound, field exponent, and
/// output truncation width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DwiseParams {
    /// Number of coefficients; any d distinct points hash independently.
    pub d: u32,
    /// Field exponent: points and hashes live in GF(2^gamma).
    pub gamma: u32,
    /// Output width: membership tests use the low `beta` bits, 1 <= beta <= gamma.
    pub beta: u32,
}

impl DwiseParams {
    /// Default degree for randomized draws.
    pub const DEFAULT_D: u32 = 8;

    /// Total seed length in bits.
    pub fn seed_bits(&self) -> u32 {
        self.d * self.gamma.max(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("family degree d must be >= 1".into()));
        }
        if self.beta == 0 || self.beta > self.gamma {
            return Err(Error::InvalidInput(format!(
                "output width beta={} must be in 1..=gamma ({})",
                self.beta, self.gamma
            )));
        }
        Ok(())
    }
}

/// The family with its field tables built.
#[derive(Debug, Clone)]
pub struct DwiseFamily {
    params: DwiseParams,
    field: Gf2,
}

impl DwiseFamily {
    pub fn new(params: DwiseParams) -> Result<Self> {
        params.validate()?;
        let field = Gf2::new(params.gamma)?;
        Ok(DwiseFamily { params, field })
    }

    pub fn params(&self) -> DwiseParams {
        self.params
    }

    pub fn field(&self) -> &Gf2 {
        &self.field
    }

    /// Full gamma-bit hash value.
    pub fn eval(&self, coeffs: &[u32], x: u32) -> u32 {
        debug_assert_eq!(coeffs.len(), self.params.d as usize);
        debug_assert!(x < self.field.size());
        self.field.eval_poly(coeffs, x)
    }

    /// Truncated hash: the low `beta` bits of the full value.
    pub fn eval_low(&self, coeffs: &[u32], x: u32) -> u32 {
        self.eval(coeffs, x) & low_mask(self.params.beta)
    }

    /// Packs coefficients into the seed integer (a_j at bits
    /// [j*gamma, (j+1)*gamma)). Requires seed_bits() <= 64.
    pub fn seed_from_coeffs(&self, coeffs: &[u32]) -> u64 {
        let g = self.params.gamma;
        assert!(self.params.seed_bits() <= 64);
        let mut seed = 0u64;
        for (j, &c) in coeffs.iter().enumerate() {
            seed |= (c as u64) << (j as u32 * g);
        }
        seed
    }

    /// Inverse of [`Self::seed_from_coeffs`].
    pub fn coeffs_from_seed(&self, seed: u64) -> Vec<u32> {
        let g = self.params.gamma;
        (0..self.params.d)
            .map(|j| ((seed >> (j * g)) & low_mask64(g)) as u32)
            .collect()
    }
}

fn low_mask(w: u32) -> u32 {
    if w >= 32 {
        u32::MAX
    } else {
        (1 << w) - 1
    }
}

pub(crate) fn low_mask64(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1 << w) - 1
    }
}

/// Smallest gamma with 2^gamma >= m, floored at 1.
pub(crate) fn index_bits(m: usize) -> u32 {
    let mut g = 1;
    while (1usize << g) < m {
        g += 1;
    }
    g as u32
}

/// Output width from the instance shape: beta = floor(log2(sqrt(delta) /
/// m^(1/16))), clamped into 1..=gamma. Returns (beta, clamped?). The clamp
/// engages for small delta (sampling rate would exceed 1/2) — degenerate
/// but usable, and flagged so callers can report it.
pub fn default_beta(delta: usize, universe_size: usize, gamma: u32) -> (u32, bool) {
    let m = universe_size.max(1) as f64;
    let raw = ((delta as f64).sqrt() / m.powf(1.0 / 16.0)).log2() + EPS;
    let raw = raw.floor();
    let clamped = raw.max(1.0).min(gamma as f64) as u32;
    (clamped, (clamped as f64 - raw).abs() > 0.5)
}

/// Family parameters matched to an instance: the field just covers the
/// re-indexed universe and beta follows the default rule.
pub fn default_params(instance: &HittingSetInstance, d: u32) -> DwiseParams {
    let m = instance.universe().len();
    let gamma = index_bits(m);
    let (beta, _) = default_beta(instance.delta(), m, gamma);
    DwiseParams { d, gamma, beta }
}

/// One random draw from the family.
#[derive(Debug, Clone)]
pub struct DwiseDraw {
    pub params: DwiseParams,
    /// Coefficients a_0..a_{d-1}, each gamma bits.
    pub coeffs: Vec<u32>,
    /// Universe elements with h'(index) = 0, in original labels.
    pub z: Vec<u32>,
    /// True when the beta rule had to be clamped (degenerate small delta).
    pub beta_clamped: bool,
}

/// Draws one seed and returns Z = {u : h'(u) = 0}, hashing each universe
/// element by its rank in the sorted universe so the field tracks the
/// universe size. Requires even d >= 2 (the tail bounds behind the size
/// guarantee need even moments). Coefficients are drawn highest index
/// first, each as the low gamma bits of one generator word.
pub fn dwise_hitting_draw(
    instance: &HittingSetInstance,
    d: u32,
    seed: u64,
) -> Result<DwiseDraw> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "draw degree d must be even and >= 2, got {d}"
        )));
    }
    let m = instance.universe().len();
    let gamma = index_bits(m);
    let (beta, beta_clamped) = default_beta(instance.delta(), m, gamma);
    let params = DwiseParams { d, gamma, beta };
    let family = DwiseFamily::new(params)?;
    let mut rng = Rng::new(seed);
    let mut coeffs = vec![0u32; d as usize];
    for j in (0..d as usize).rev() {
        coeffs[j] = (rng.next_u64() & low_mask64(gamma)) as u32;
    }
    let z = instance
        .universe()
        .iter()
        .enumerate()
        .filter(|&(i, _)| family.eval_low(&coeffs, i as u32) == 0)
        .map(|(_, &label)| label)
        .collect();
    Ok(DwiseDraw {
        params,
        coeffs,
        z,
        beta_clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn family(d: u32, gamma: u32, beta: u32) -> DwiseFamily {
        DwiseFamily::new(DwiseParams { d, gamma, beta }).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DwiseParams { d: 0, gamma: 3, beta: 1 }.validate().is_err());
        assert!(DwiseParams { d: 2, gamma: 3, beta: 0 }.validate().is_err());
        assert!(DwiseParams { d: 2, gamma: 3, beta: 4 }.validate().is_err());
        assert!(DwiseParams { d: 2, gamma: 3, beta: 3 }.validate().is_ok());
        assert_eq!(DwiseParams { d: 4, gamma: 6, beta: 2 }.seed_bits(), 24);
    }

    #[test]
    fn seed_packing_round_trips() {
        let f = family(3, 5, 2);
        let coeffs = vec![0b10110, 0b00001, 0b11111];
        let seed = f.seed_from_coeffs(&coeffs);
        assert_eq!(f.coeffs_from_seed(seed), coeffs);
        // a_0 sits in the low bits.
        assert_eq!(seed & 0b11111, 0b10110);
    }

    #[test]
    fn zero_seed_selects_everything() {
        let inst = HittingSetInstance::new(
            (0..10).collect(),
            [(0u32, (0..10).collect::<Vec<u32>>())].into_iter().collect(),
            10,
        )
        .unwrap();
        let f = DwiseFamily::new(default_params(&inst, 4)).unwrap();
        let coeffs = vec![0; 4];
        for i in 0..10 {
            assert_eq!(f.eval_low(&coeffs, i), 0);
        }
    }

    #[test]
    fn single_bit_marginal_is_exactly_half() {
        // beta = 1, gamma = 3, d = 2: over all 64 seeds, each point lands
        // in Z exactly half the time.
        let f = family(2, 3, 1);
        for x in 0..8u32 {
            let mut zeros = 0;
            for seed in 0..64u64 {
                let coeffs = f.coeffs_from_seed(seed);
                if f.eval_low(&coeffs, x) == 0 {
                    zeros += 1;
                }
            }
            assert_eq!(zeros, 32, "x={x}");
        }
    }

    #[test]
    fn pairwise_joint_values_are_uniform() {
        // d=2, gamma=3: for every ordered pair of distinct points, the map
        // seed -> (h(x), h(y)) is a bijection onto all 64 value pairs.
        let f = family(2, 3, 3);
        for x in 0..8u32 {
            for y in 0..8u32 {
                if x == y {
                    continue;
                }
                let mut seen = [false; 64];
                for seed in 0..64u64 {
                    let coeffs = f.coeffs_from_seed(seed);
                    let cell = (f.eval(&coeffs, x) * 8 + f.eval(&coeffs, y)) as usize;
                    assert!(!seen[cell], "pair ({x},{y}) repeats cell {cell}");
                    seen[cell] = true;
                }
            }
        }
    }

    #[test]
    fn four_wise_joint_values_are_uniform_small_field() {
        // d=4, gamma=2: the single 4-tuple of distinct points (0,1,2,3)
        // maps the 256 seeds bijectively onto all 256 value tuples.
        let f = family(4, 2, 2);
        let mut seen = [false; 256];
        for seed in 0..256u64 {
            let coeffs = f.coeffs_from_seed(seed);
            let mut cell = 0usize;
            for x in 0..4u32 {
                cell = cell * 4 + f.eval(&coeffs, x) as usize;
            }
            assert!(!seen[cell], "seed {seed} repeats cell {cell}");
            seen[cell] = true;
        }
    }

    #[test]
    fn four_wise_low_bits_are_uniform() {
        // d=4, gamma=4, beta=2: full seed enumeration (2^16); for a spread
        // of distinct 4-tuples the joint low-bit vector must hit each of
        // the 256 cells exactly 65536/256 = 256 times.
        let f = family(4, 4, 2);
        let mut tuples = Vec::new();
        for a in 0..16u32 {
            for b in (a + 1)..16 {
                for c in (b + 1)..16 {
                    for e in (c + 1)..16 {
                        if (a + 2 * b + 3 * c + 5 * e) % 17 < 2 {
                            tuples.push([a, b, c, e]);
                        }
                    }
                }
            }
        }
        assert!(tuples.len() >= 100, "want a broad sample, got {}", tuples.len());
        let mut counts = vec![[0u32; 256]; tuples.len()];
        let mut lows = [0u32; 16];
        for seed in 0..(1u64 << 16) {
            let coeffs = f.coeffs_from_seed(seed);
            for (x, slot) in lows.iter_mut().enumerate() {
                *slot = f.eval_low(&coeffs, x as u32);
            }
            for (t, tuple) in tuples.iter().enumerate() {
                let cell = tuple
                    .iter()
                    .fold(0usize, |acc, &x| acc * 4 + lows[x as usize] as usize);
                counts[t][cell] += 1;
            }
        }
        for (t, per_cell) in counts.iter().enumerate() {
            for (cell, &c) in per_cell.iter().enumerate() {
                assert_eq!(c, 256, "tuple {t} cell {cell}");
            }
        }
    }

    #[test]
    fn beta_rule_matches_hand_computation() {
        // delta=64, m=256: floor(log2(8 / 256^(1/16))) = floor(2.5) = 2.
        assert_eq!(default_beta(64, 256, 8), (2, false));
        // delta=2, m=4: raw value is negative, clamps to 1.
        let (beta, clamped) = default_beta(2, 4, 2);
        assert_eq!(beta, 1);
        assert!(clamped);
        // Exact power-of-two boundary: delta=16, m=1 gives log2(4) = 2.
        assert_eq!(default_beta(16, 1, 8), (2, false));
    }

    #[test]
    fn draw_requires_even_degree() {
        let inst = HittingSetInstance::new(
            (0..4).collect(),
            [(0u32, vec![0, 1])].into_iter().collect(),
            2,
        )
        .unwrap();
        assert!(dwise_hitting_draw(&inst, 3, 1).is_err());
        assert!(dwise_hitting_draw(&inst, 0, 1).is_err());
        assert!(dwise_hitting_draw(&inst, 2, 1).is_ok());
    }

    #[test]
    fn draw_is_deterministic_and_labels_respect_reindexing() {
        // Universe labels are sparse; hashing goes by rank, so gamma stays
        // small and Z reports original labels.
        let universe: Vec<u32> = (0..32).map(|i| i * 100 + 7).collect();
        let sets: BTreeMap<u32, Vec<u32>> =
            [(1u32, universe.clone())].into_iter().collect();
        let inst = HittingSetInstance::new(universe.clone(), sets, 32).unwrap();
        let a = dwise_hitting_draw(&inst, 4, 42).unwrap();
        let b = dwise_hitting_draw(&inst, 4, 42).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        assert_eq!(a.z, b.z);
        assert_eq!(a.params.gamma, 5);
        for z in &a.z {
            assert!(universe.contains(z));
        }
    }

    #[test]
    fn draw_size_concentrates() {
        // 64 window sets of size 64 over a 256 universe, d = 8: beta = 2,
        // E|Z| = 64. Most draws keep |Z| <= 2 E|Z| and hit every set.
        let universe: Vec<u32> = (0..256).collect();
        let sets: BTreeMap<u32, Vec<u32>> = (0..64u32)
            .map(|o| (o, ((o * 3)..(o * 3 + 64)).map(|x| x % 256).collect()))
            .collect();
        let inst = HittingSetInstance::new(universe, sets, 64).unwrap();
        let mut small = 0;
        let mut all_hit = 0;
        let trials = 60;
        for t in 0..trials {
            let draw = dwise_hitting_draw(&inst, 8, 0x1000 + t).unwrap();
            assert_eq!(draw.params.beta, 2);
            assert!(!draw.beta_clamped);
            if draw.z.len() <= 128 {
                small += 1;
            }
            if inst.is_hitting(&draw.z) {
                all_hit += 1;
            }
        }
        assert!(small * 3 >= trials * 2, "only {small}/{trials} small");
        assert!(all_hit * 10 >= trials * 9, "only {all_hit}/{trials} hit");
    }
}
