//! End-to-end comparison of simulated trajectories with the analytic PSD at
//! a cheap "desk-scale" operating point.
//!
//! The desk-scale system keeps the dimensionless structure of the
//! experiment (sideband-unresolved cavity, high-Q mechanics, a pitchfork
//! threshold) at `ω_m/2π = 1 kHz`, `Q_m = 100` and `γ_c = 50 ω_m`. The
//! coupling `g = -1e-9 ω_m` puts the displacement scale `Q_s` far above the
//! thermal spread, so the linearized spectrum applies to the trajectories.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Drive, SystemParams, HBAR, K_B};
use crate::noise::thermal_spectrum;
use crate::oracle::langevin::{integrate_langevin, LangevinOptions, Scheme};
use crate::oracle::welch::{estimate_psd, WelchOptions};
use crate::spectral::{chi_norm_sqr, ChiMode};
use crate::steady_state::steady_state;

/// Desk-scale parameters at temperature `k_B T = thermal_ratio · ħω_m`.
pub fn desk_scale_params(drive: Drive, thermal_ratio: f64) -> Result<SystemParams> {
    let wm = TAU * 1e3;
    let temperature = thermal_ratio * HBAR * wm / K_B;
    SystemParams::new(-1e-9 * wm, wm, wm / 100.0, 50.0 * wm, drive, temperature)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloConfig {
    pub seed: u64,
    pub n_traj: usize,
    pub drive: Drive,
    pub thermal_ratio: f64,
    pub burn_in_seconds: f64,
    pub record_seconds: f64,
    pub record_every: u64,
    pub n_per_seg: usize,
    pub scheme: Scheme,
    /// Upper edge of the compared band in units of `ω_m`.
    pub band_over_omega_m: f64,
}

impl Default for MonteCarloConfig {
    /// Upper broken phase just above threshold (`ω_eff ≈ 0.2 ω_m`), sampled
    /// at about 8 kHz with 1 s segments.
    fn default() -> Self {
        MonteCarloConfig {
            seed: 2024,
            n_traj: 16,
            drive: Drive::CriticalExcess(0.01),
            thermal_ratio: 1e3,
            burn_in_seconds: 0.5,
            record_seconds: 4.1,
            record_every: 785,
            n_per_seg: 8192,
            scheme: Scheme::StochasticHeun,
            band_over_omega_m: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub omega: Vec<f64>,
    /// Two-sided estimate (half the one-sided Welch density).
    pub estimate: Vec<f64>,
    pub std_error: Vec<f64>,
    /// `|χ(ω)|² S_m,th(ω)`: the analytic PSD restricted to the thermal
    /// channel the trajectories are driven by.
    pub analytic: Vec<f64>,
    pub within: Vec<bool>,
    pub fraction_within: f64,
    pub warnings: Vec<String>,
}

/// Integrates the ensemble, estimates its PSD and compares bins in
/// `[2Δω, band]` against the analytic spectrum at three standard errors.
/// The two lowest bins are skipped because each segment has its mean removed.
pub fn run_monte_carlo(cfg: &MonteCarloConfig) -> Result<MonteCarloReport> {
    let params = desk_scale_params(cfg.drive, cfg.thermal_ratio)?;
    let dt = 0.05 / params.gamma_c();
    let steps = |seconds: f64| {
        let n = (seconds / dt).round() as u64;
        n.div_ceil(cfg.record_every) * cfg.record_every
    };
    let mut opts = LangevinOptions::new(cfg.seed, cfg.n_traj, dt, steps(cfg.record_seconds));
    opts.burn_in_steps = steps(cfg.burn_in_seconds);
    opts.record_every = cfg.record_every;
    opts.scheme = cfg.scheme;
    let ensemble = integrate_langevin(&params, &opts)?;
    let series = estimate_psd(&ensemble, &WelchOptions::new(cfg.n_per_seg))?;

    let steady = steady_state(&params);
    let band = cfg.band_over_omega_m * params.omega_m();
    let values = series.values().as_real().expect("PSD estimates are real");
    let se = series
        .std_error()
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| vec![0.0; values.len()]);

    let mut report = MonteCarloReport {
        omega: Vec::new(),
        estimate: Vec::new(),
        std_error: Vec::new(),
        analytic: Vec::new(),
        within: Vec::new(),
        fraction_within: 0.0,
        warnings: series.warnings().to_vec(),
    };
    for (i, &w) in series.omega_grid().iter().enumerate().skip(2) {
        if w > band {
            break;
        }
        let analytic = chi_norm_sqr(&params, &steady, w, ChiMode::Exact)?
            * thermal_spectrum(&params, w, params.temperature());
        let estimate = 0.5 * values[i];
        let error = 0.5 * se[i];
        report.omega.push(w);
        report.estimate.push(estimate);
        report.std_error.push(error);
        report.analytic.push(analytic);
        report
            .within
            .push((estimate - analytic).abs() <= 3.0 * error);
    }
    let hits = report.within.iter().filter(|&&b| b).count();
    report.fraction_within = hits as f64 / report.within.len().max(1) as f64;
    Ok(report)
}
