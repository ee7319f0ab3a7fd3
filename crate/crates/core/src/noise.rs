//! Thermal and radiation-pressure noise spectra and the position PSD
//! `S_qq(ω) = |χ(ω)|² [S_m,th(ω) + S_c,vac(ω)]`.
//!
//! All spectra follow the two-sided convention `⟨q²⟩ = ∫ S_qq(ω) dω/2π`
//! and carry units of seconds.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemParams, HBAR, K_B};
use crate::spectral::{chi_norm_sqr, susceptibility, ChiMode};
use crate::steady_state::SteadyState;

/// Below this `|ħω/2k_BT|` the Laurent series of coth is used.
const SMALL_ARGUMENT: f64 = 1e-6;

/// `1 + coth(x)` for `x != 0`, written so that neither sign overflows.
fn one_plus_coth(x: f64) -> f64 {
    -2.0 / (-2.0 * x).exp_m1()
}

/// Mechanical thermal noise `S_m,th(ω) = (γ_m/ω_m) ω [1 + coth(ħω/2k_BT)]`.
///
/// At `ω = 0` this returns the limit `2γ_m k_B T / (ħ ω_m)`; at `T = 0` the
/// coth collapses to `sign(ω)`.
pub fn thermal_spectrum(params: &SystemParams, omega: f64, temperature: f64) -> f64 {
    let prefactor = params.gamma_m() / params.omega_m();
    if temperature <= 0.0 {
        return if omega > 0.0 {
            2.0 * prefactor * omega
        } else {
            0.0
        };
    }
    let thermal_rate = 2.0 * K_B * temperature / HBAR;
    let x = omega / thermal_rate;
    if x.abs() < SMALL_ARGUMENT {
        // ω coth(x) = 2k_BT/ħ + ω x/3 + O(x³)
        prefactor * (omega + thermal_rate + omega * x / 3.0)
    } else {
        prefactor * omega * one_plus_coth(x)
    }
}

/// Radiation-pressure (optical vacuum) noise
/// `S_c,vac(ω) = 16 g² Q_s² |α|² γ_c / [(γ_c/2)² + (2gQ_s² - ω)²]`.
pub fn radiation_spectrum(params: &SystemParams, steady: &SteadyState, omega: f64) -> f64 {
    if steady.q_s2 == 0.0 {
        return 0.0;
    }
    let g = params.g();
    let gc = params.gamma_c();
    let detuned = 2.0 * g * steady.q_s2 - omega;
    16.0 * g * g * steady.q_s2 * steady.intensity() * gc / (0.25 * gc * gc + detuned * detuned)
}

/// The three factors of the PSD at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdComponents {
    pub chi_norm_sqr: f64,
    pub thermal: f64,
    pub radiation: f64,
    pub total: f64,
}

pub fn psd_components(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
    temperature: f64,
    mode: ChiMode,
) -> Result<PsdComponents> {
    let chi = chi_norm_sqr(params, steady, omega, mode)?;
    let thermal = thermal_spectrum(params, omega, temperature);
    let radiation = radiation_spectrum(params, steady, omega);
    let floor = thermal + radiation;
    let total = if chi.is_infinite() && floor > 0.0 {
        f64::INFINITY
    } else {
        chi * floor
    };
    Ok(PsdComponents {
        chi_norm_sqr: chi,
        thermal,
        radiation,
        total,
    })
}

/// Position PSD `S_qq(ω)` in seconds. The critical-point divergence
/// propagates as `+∞`.
pub fn psd(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
    temperature: f64,
    mode: ChiMode,
) -> Result<f64> {
    Ok(psd_components(params, steady, omega, temperature, mode)?.total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Chi,
    ThermalNoise,
    RadiationNoise,
    Psd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SeriesValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl SeriesValues {
    pub fn len(&self) -> usize {
        match self {
            SeriesValues::Real(v) => v.len(),
            SeriesValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            SeriesValues::Real(v) => Some(v),
            SeriesValues::Complex(_) => None,
        }
    }
}

/// A spectrum sampled on a strictly increasing angular-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSeries {
    omega_grid: Vec<f64>,
    values: SeriesValues,
    kind: SpectrumKind,
    units: String,
    std_error: Option<Vec<f64>>,
    warnings: Vec<String>,
}

impl SpectrumSeries {
    pub fn new(
        omega_grid: Vec<f64>,
        values: SeriesValues,
        kind: SpectrumKind,
        units: impl Into<String>,
    ) -> Result<Self> {
        if omega_grid.len() != values.len() {
            return Err(Error::validation(
                "values",
                format!(
                    "length {} does not match grid length {}",
                    values.len(),
                    omega_grid.len()
                ),
            ));
        }
        if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation(
                "omega_grid",
                "must be strictly increasing",
            ));
        }
        if kind != SpectrumKind::Chi {
            let real = values
                .as_real()
                .ok_or_else(|| Error::validation("values", "noise spectra and PSDs are real"))?;
            let negative = omega_grid
                .iter()
                .zip(real)
                .any(|(&w, &v)| w > 0.0 && v < 0.0);
            if negative {
                return Err(Error::validation("values", "spectral density is negative"));
            }
        }
        Ok(SpectrumSeries {
            omega_grid,
            values,
            kind,
            units: units.into(),
            std_error: None,
            warnings: Vec::new(),
        })
    }

    pub fn with_std_error(mut self, std_error: Vec<f64>) -> Result<Self> {
        if std_error.len() != self.omega_grid.len() {
            return Err(Error::validation("std_error", "length does not match grid"));
        }
        self.std_error = Some(std_error);
        Ok(self)
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn omega_grid(&self) -> &[f64] {
        &self.omega_grid
    }
    pub fn values(&self) -> &SeriesValues {
        &self.values
    }
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }
    pub fn units(&self) -> &str {
        &self.units
    }
    pub fn std_error(&self) -> Option<&[f64]> {
        self.std_error.as_deref()
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub fn len(&self) -> usize {
        self.omega_grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.omega_grid.is_empty()
    }
}

/// Samples one of the analytic spectra over `grid`.
pub fn spectrum_series(
    params: &SystemParams,
    steady: &SteadyState,
    grid: &[f64],
    temperature: f64,
    kind: SpectrumKind,
    mode: ChiMode,
) -> Result<SpectrumSeries> {
    let values = match kind {
        SpectrumKind::Chi => SeriesValues::Complex(
            grid.iter()
                .map(|&w| susceptibility(params, steady, w, mode))
                .collect::<Result<_>>()?,
        ),
        SpectrumKind::ThermalNoise => SeriesValues::Real(
            grid.iter()
                .map(|&w| thermal_spectrum(params, w, temperature))
                .collect(),
        ),
        SpectrumKind::RadiationNoise => SeriesValues::Real(
            grid.iter()
                .map(|&w| radiation_spectrum(params, steady, w))
                .collect(),
        ),
        SpectrumKind::Psd => SeriesValues::Real(
            grid.iter()
                .map(|&w| psd(params, steady, w, temperature, mode))
                .collect::<Result<_>>()?,
        ),
    };
    SpectrumSeries::new(grid.to_vec(), values, kind, "s")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Drive;
    use crate::spectral::eta;
    use crate::steady_state::steady_state;
    use approx::assert_relative_eq;

    #[test]
    fn zero_frequency_limit_is_classical() {
        let p = SystemParams::reference();
        let expected = 2.0 * p.gamma_m() * K_B * 300.0 / (HBAR * p.omega_m());
        assert_relative_eq!(
            thermal_spectrum(&p, 0.0, 300.0),
            expected,
            max_relative = 1e-15
        );
    }

    #[test]
    fn zero_temperature_is_pure_zero_point() {
        let p = SystemParams::reference();
        assert_relative_eq!(
            thermal_spectrum(&p, p.omega_m(), 0.0),
            2.0 * p.gamma_m(),
            max_relative = 1e-15
        );
        assert_eq!(thermal_spectrum(&p, -p.omega_m(), 0.0), 0.0);
        assert_eq!(thermal_spectrum(&p, 0.0, 0.0), 0.0);
    }

    #[test]
    fn thermal_spectrum_matches_arbitrary_precision_value() {
        // mpmath, 50 digits: (γ_m/ω_m) ω_m [1 + coth(ħω_m / 2k_B·300K)]
        let p = SystemParams::reference();
        let reference = 7_855_225_818.804_87;
        assert_relative_eq!(
            thermal_spectrum(&p, p.omega_m(), 300.0),
            reference,
            max_relative = 1e-9
        );
    }

    #[test]
    fn series_and_closed_coth_agree_at_the_switch() {
        let p = SystemParams::reference();
        let t = 1e-3;
        let rate = 2.0 * K_B * t / HBAR;
        let below = thermal_spectrum(&p, 0.999_999 * SMALL_ARGUMENT * rate, t);
        let above = thermal_spectrum(&p, 1.000_001 * SMALL_ARGUMENT * rate, t);
        assert_relative_eq!(below, above, max_relative = 1e-9);
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        let p = SystemParams::reference();
        for w in [-1e12, -1e3, 1e3, 1e12] {
            for t in [1e-9, 1.0, 1e4] {
                let s = thermal_spectrum(&p, w, t);
                assert!(s.is_finite() && s >= 0.0, "w={w} t={t} s={s}");
            }
        }
    }

    #[test]
    fn radiation_noise_vanishes_below_threshold() {
        let p = SystemParams::reference()
            .with_drive(Drive::CriticalOffset(0.0))
            .unwrap();
        let s = steady_state(&p);
        assert_eq!(radiation_spectrum(&p, &s, 0.0), 0.0);
        assert_eq!(radiation_spectrum(&p, &s, 1e6), 0.0);
    }

    #[test]
    fn radiation_noise_peaks_at_shifted_cavity() {
        let p = SystemParams::reference()
            .with_drive(Drive::CriticalExcess(0.3))
            .unwrap();
        let s = steady_state(&p);
        let g = p.g();
        let center = 2.0 * g * s.q_s2;
        let expected = 64.0 * g * g * s.q_s2 * s.intensity() / p.gamma_c();
        assert_relative_eq!(
            radiation_spectrum(&p, &s, center),
            expected,
            max_relative = 1e-14
        );
    }

    #[test]
    fn radiation_noise_is_eta_squared() {
        let p = SystemParams::reference()
            .with_drive(Drive::CriticalOffset(0.2 * 5466.0))
            .unwrap();
        let s = steady_state(&p);
        for w in [0.0, 1e3, 0.5 * p.omega_m(), -p.omega_m()] {
            assert_relative_eq!(
                radiation_spectrum(&p, &s, w),
                eta(&p, &s, w).norm_sqr(),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn bare_resonance_psd() {
        let p = SystemParams::reference();
        let s = steady_state(&p);
        let w = p.omega_m();
        let value = psd(&p, &s, w, 300.0, ChiMode::Exact).unwrap();
        assert_relative_eq!(
            value,
            thermal_spectrum(&p, w, 300.0) / p.gamma_m().powi(2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn series_rejects_mismatched_or_unsorted_grids() {
        assert!(SpectrumSeries::new(
            vec![0.0, 1.0],
            SeriesValues::Real(vec![1.0]),
            SpectrumKind::Psd,
            "s"
        )
        .is_err());
        assert!(SpectrumSeries::new(
            vec![1.0, 0.0],
            SeriesValues::Real(vec![1.0, 1.0]),
            SpectrumKind::Psd,
            "s"
        )
        .is_err());
        assert!(SpectrumSeries::new(
            vec![0.0, 1.0],
            SeriesValues::Real(vec![1.0, -1.0]),
            SpectrumKind::Psd,
            "s"
        )
        .is_err());
    }

    #[test]
    fn radiation_spectrum_ignores_temperature() {
        let p = SystemParams::reference()
            .with_drive(Drive::CriticalExcess(1e-6))
            .unwrap();
        let s = steady_state(&p);
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 1e6).collect();
        let cold = spectrum_series(
            &p,
            &s,
            &grid,
            0.1,
            SpectrumKind::RadiationNoise,
            ChiMode::Exact,
        )
        .unwrap();
        let hot = spectrum_series(
            &p,
            &s,
            &grid,
            300.0,
            SpectrumKind::RadiationNoise,
            ChiMode::Exact,
        )
        .unwrap();
        assert_eq!(cold, hot);
    }
}
