//! Shared numeric parameters: neighborhood capacities, selection budgets,
//! and the doubling schedule that drives neighborhood growth.
//!
//! All fractional-power thresholds are computed in f64 and converted to
//! integers with an epsilon-guarded ceiling so that values which are
//! mathematically integral (e.g. n^(1/2) for a perfect square) do not get
//! bumped up by floating-point noise.

/// Tolerance used when comparing counts against fractional thresholds.
pub const EPS: f64 = 1e-9;

/// Ceiling that forgives floating-point overshoot just above an integer,
/// clamped to at least 1.
pub fn ceil_eps(x: f64) -> usize {
    let c = (x - EPS).ceil();
    if c < 1.0 {
        1
    } else {
        c as usize
    }
}

/// `n^(1/2 - 1/k)`: the neighborhood-size threshold separating sparse from
/// dense vertices. Comparisons against it are strict with [`EPS`] slack:
/// a count exceeds the threshold iff `count > thr + EPS`.
pub fn neighborhood_threshold(n: usize, k: u32) -> f64 {
    (n as f64).powf(0.5 - 1.0 / k as f64)
}

/// `true` iff `count` strictly exceeds the sparse/dense threshold.
pub fn exceeds_threshold(count: usize, n: usize, k: u32) -> bool {
    count as f64 > neighborhood_threshold(n, k) + EPS
}

/// Capacity of a truncated neighborhood: `ceil(n^(1/2 - 1/k))`.
pub fn capacity(n: usize, k: u32) -> usize {
    ceil_eps(neighborhood_threshold(n, k))
}

/// Per-round selection budget `ceil(n^(1/k))` of the local spanner loop.
pub fn selection_budget(n: usize, k: u32) -> usize {
    ceil_eps((n as f64).powf(1.0 / k as f64))
}

/// Cluster-adjacency cutoff `ceil(n^(1/k) * ln n)` below which a vertex
/// reports all its adjacent clusters individually.
pub fn adjacency_cutoff(n: usize, k: u32) -> usize {
    ceil_eps((n as f64).powf(1.0 / k as f64) * (n as f64).ln())
}

/// Neighborhood-radius schedule: gamma(1) = 2 and
/// gamma(i+1) = min(2 * gamma(i) - 1, floor(k/2)), ending when the cap
/// floor(k/2) is reached. Requires k >= 4 so the cap is at least 2.
pub fn gamma_schedule(k: u32) -> Vec<u32> {
    assert!(k >= 4, "gamma_schedule requires k >= 4, got {k}");
    let cap = k / 2;
    let mut schedule = vec![2.min(cap)];
    while *schedule.last().unwrap() < cap {
        let next = (2 * schedule.last().unwrap() - 1).min(cap);
        schedule.push(next);
    }
    schedule
}
