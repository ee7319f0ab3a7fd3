//! Frequency and drive grids.

use crate::model::Drive;

/// Default number of points of [`frequency_grid`].
pub const DEFAULT_GRID_POINTS: usize = 4001;

/// Symmetric grid over `[-1.5 ω_m, 1.5 ω_m]` with logarithmic clustering
/// around `0` and `±ω_m`. `points` is made odd so `ω = 0` is always present.
///
/// Each half is split 2:1:1:1 between a uniform background, a cluster
/// approaching zero and the two flanks of the mechanical resonance.
pub fn frequency_grid(omega_m: f64, points: usize) -> Vec<f64> {
    let half = points.max(11) / 2;
    let n_cluster = half / 5;
    let n_uniform = half - 3 * n_cluster;
    let span = 1.5 * omega_m;

    let mut positive = Vec::with_capacity(half);
    positive.extend((1..=n_uniform).map(|i| span * i as f64 / n_uniform as f64));
    for u in logspace(-9.0, -0.35, n_cluster) {
        positive.push(omega_m * u);
        positive.push(omega_m * (1.0 + u));
    }
    for u in logspace(-9.0, -0.35, n_cluster) {
        positive.push(omega_m * (1.0 - u));
    }
    positive.sort_by(f64::total_cmp);
    positive.dedup();

    let mut grid: Vec<f64> = positive.iter().rev().map(|w| -w).collect();
    grid.push(0.0);
    grid.extend(positive);
    grid
}

/// Non-negative half of [`frequency_grid`].
pub fn positive_frequency_grid(omega_m: f64, points: usize) -> Vec<f64> {
    frequency_grid(omega_m, 2 * points)
        .into_iter()
        .filter(|&w| w >= 0.0)
        .collect()
}

/// `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` points from `10^lo` to `10^hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo, hi, n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

/// Drive grid of offsets `(Ω - Ω_c)` given in units of `γ_m`.
pub fn offset_drives(offsets_over_gamma_m: &[f64], gamma_m: f64) -> Vec<Drive> {
    offsets_over_gamma_m
        .iter()
        .map(|&x| Drive::CriticalOffset(x * gamma_m))
        .collect()
}
