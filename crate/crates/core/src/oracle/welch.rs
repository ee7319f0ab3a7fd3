//! Welch power-spectral-density estimation.
//!
//! Output is one-sided per unit `ω/2π` (per Hz): integrating it over
//! `f ∈ [0, f_s/2]` returns the variance of the (mean-removed) signal. A
//! two-sided spectrum such as the analytic `S_qq` is half of it.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{SeriesValues, SpectrumKind, SpectrumSeries};
use crate::oracle::langevin::TrajectoryEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    #[default]
    Hann,
    Rect,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rect => vec![1.0; n],
            // periodic Hann
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (TAU * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchOptions {
    pub n_per_seg: usize,
    pub overlap_fraction: f64,
    pub window: Window,
}

impl WelchOptions {
    pub fn new(n_per_seg: usize) -> Self {
        WelchOptions {
            n_per_seg,
            overlap_fraction: 0.5,
            window: Window::Hann,
        }
    }

    fn hop(&self) -> Result<usize> {
        if self.n_per_seg < 2 {
            return Err(Error::validation(
                "n_per_seg",
                "need at least 2 samples per segment",
            ));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::validation("overlap_fraction", "must be in [0, 1)"));
        }
        let hop = ((1.0 - self.overlap_fraction) * self.n_per_seg as f64).round() as usize;
        Ok(hop.max(1))
    }
}

/// Fewer segments than this attach a statistical-power warning.
pub const MIN_SEGMENTS: usize = 8;

/// Segment-averaged periodogram of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    /// Angular frequencies `2πk / (N Δt)`, `k = 0..=N/2`.
    pub omega: Vec<f64>,
    pub density: Vec<f64>,
    pub segments: usize,
}

/// Welch estimate of a single real signal sampled every `sample_interval` seconds.
/// Each segment has its own mean removed before windowing.
pub fn welch_psd(signal: &[f64], sample_interval: f64, opts: &WelchOptions) -> Result<Periodogram> {
    let n = opts.n_per_seg;
    let hop = opts.hop()?;
    if signal.len() < n {
        return Err(Error::validation(
            "n_per_seg",
            format!("segment length {n} exceeds signal length {}", signal.len()),
        ));
    }
    if sample_interval.is_nan() || sample_interval <= 0.0 {
        return Err(Error::validation("sample_interval", "must be > 0"));
    }
    let window = opts.window.weights(n);
    let power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let n_bins = n / 2 + 1;
    let mut density = vec![0.0; n_bins];
    let mut buffer = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut segments = 0;
    for start in (0..=signal.len() - n).step_by(hop) {
        let segment = &signal[start..start + n];
        let mean = segment.iter().sum::<f64>() / n as f64;
        for ((b, &x), &w) in buffer.iter_mut().zip(segment).zip(&window) {
            *b = Complex::new((x - mean) * w, 0.0);
        }
        fft.process_with_scratch(&mut buffer, &mut scratch);
        for (d, b) in density.iter_mut().zip(&buffer) {
            *d += b.norm_sqr();
        }
        segments += 1;
    }
    let scale = sample_interval / (power * segments as f64);
    for (k, d) in density.iter_mut().enumerate() {
        let nyquist = n.is_multiple_of(2) && k == n / 2;
        *d *= if k == 0 || nyquist {
            scale
        } else {
            2.0 * scale
        };
    }
    let omega = (0..n_bins)
        .map(|k| 2.0 * PI * k as f64 / (n as f64 * sample_interval))
        .collect();
    Ok(Periodogram {
        omega,
        density,
        segments,
    })
}

/// Welch estimate averaged over all trajectories of an ensemble.
///
/// The standard error of each bin is taken from the spread of the
/// per-trajectory estimates when there are at least two trajectories,
/// otherwise the result has no error bars.
pub fn estimate_psd(ensemble: &TrajectoryEnsemble, opts: &WelchOptions) -> Result<SpectrumSeries> {
    let per_traj = ensemble
        .records()
        .par_iter()
        .map(|r| welch_psd(r, ensemble.sample_interval, opts))
        .collect::<Result<Vec<_>>>()?;
    let first = per_traj
        .first()
        .ok_or_else(|| Error::validation("ensemble", "no trajectories"))?;
    let n_bins = first.omega.len();
    let k = per_traj.len() as f64;
    let mean: Vec<f64> = (0..n_bins)
        .map(|i| per_traj.iter().map(|p| p.density[i]).sum::<f64>() / k)
        .collect();
    let segments: usize = per_traj.iter().map(|p| p.segments).sum();

    let mut series = SpectrumSeries::new(
        first.omega.clone(),
        SeriesValues::Real(mean.clone()),
        SpectrumKind::Psd,
        "s (one-sided, per unit omega/2pi)",
    )?;
    if per_traj.len() >= 2 {
        let std_error = (0..n_bins)
            .map(|i| {
                let var = per_traj
                    .iter()
                    .map(|p| (p.density[i] - mean[i]).powi(2))
                    .sum::<f64>()
                    / (k - 1.0);
                (var / k).sqrt()
            })
            .collect();
        series = series.with_std_error(std_error)?;
    }
    if segments < MIN_SEGMENTS {
        series = series.with_warning(format!(
            "only {segments} segments averaged (< {MIN_SEGMENTS}); low statistical power"
        ));
    }
    Ok(series)
}
