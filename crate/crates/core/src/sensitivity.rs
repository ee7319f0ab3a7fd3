//! Temperature sensitivity `ξ(ω) = dS_qq(ω)/dT`: a numerical derivative of
//! the PSD and the closed forms for the symmetric phase (`ξ_S`), the broken
//! phases (`ξ_B`) and the undriven resonator (`ξ_0`).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Drive, SystemParams, HBAR, K_B};
use crate::noise::psd;
use crate::spectral::{chi_norm_sqr, classify_regime, eigenfrequencies, ChiMode, Regime};
use crate::steady_state::{steady_state, SteadyState};
use crate::table::SweepResult;

/// Which form of a temperature-dependent closed form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalLimit {
    #[default]
    Full,
    /// `k_BT ≫ ħω`.
    HighT,
    /// `k_BT ≪ ħω`.
    LowT,
}

/// Asymptotic temperature regime of an evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitLabel {
    None,
    HighT,
    LowT,
}

impl LimitLabel {
    /// `HighT` for `ħω/2k_BT < 0.1`, `LowT` above 10.
    pub fn classify(omega: f64, temperature: f64) -> Self {
        if temperature <= 0.0 {
            return LimitLabel::LowT;
        }
        let x = HBAR * omega.abs() / (2.0 * K_B * temperature);
        if x < 0.1 {
            LimitLabel::HighT
        } else if x > 10.0 {
            LimitLabel::LowT
        } else {
            LimitLabel::None
        }
    }
}

/// Where `ξ` is evaluated across a drive sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaPolicy {
    /// Always at `ω = 0`.
    AtZero,
    /// `ω = 0` in the symmetric phase (EPs included), `|Re ω_+|` in the
    /// broken phases and `ω_m` for an undriven resonator.
    #[default]
    AtOmegaEff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub xi_numeric: f64,
    pub xi_closed_form: Option<f64>,
    pub regime: Option<Regime>,
    pub omega_eval: f64,
    pub limit_label: LimitLabel,
}

/// `dS_qq(ω)/dT` by a central difference with one Richardson step.
///
/// The step is `h = max(1e-6 T, 1e-9 K)`, capped at `T/2` so `T - h` stays
/// physical.
pub fn sensitivity_numeric(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
    temperature: f64,
) -> Result<f64> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::Domain(format!(
            "numerical derivative needs T > 0 (got {temperature} K)"
        )));
    }
    let h = (1e-6 * temperature).max(1e-9).min(0.5 * temperature);
    let s = |t: f64| psd(params, steady, omega, t, ChiMode::Exact);
    let central =
        |h: f64| -> Result<f64> { Ok((s(temperature + h)? - s(temperature - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `ξ_S = 2k_B ω_m γ_m / (ħ |ω_+ ω_-|²)`, the temperature-independent slope of
/// `S_qq(0)` in the symmetric phase. Infinite at the critical point.
pub fn sensitivity_s(params: &SystemParams, steady: &SteadyState) -> Result<f64> {
    let regime = classify_regime(params)?;
    if !regime.is_symmetric() {
        return Err(Error::Regime {
            operation: "sensitivity_s",
            required: "anti-PT-symmetric",
            found: regime.label().to_string(),
        });
    }
    let product = eigenfrequencies(params, steady).product().norm_sqr();
    Ok(2.0 * K_B * params.omega_m() * params.gamma_m() / (HBAR * product))
}

/// `ξ_B = |χ(ω_eff)|² (ħω_eff² γ_m / 2ω_m k_B T²) csch²(ħω_eff / 2k_BT)` in
/// the broken phases, with `ω_eff = |Re ω_+|`.
pub fn sensitivity_b(params: &SystemParams, steady: &SteadyState, temperature: f64) -> Result<f64> {
    sensitivity_b_limit(params, steady, temperature, ThermalLimit::Full)
}

/// [`sensitivity_b`] or one of its asymptotic forms.
pub fn sensitivity_b_limit(
    params: &SystemParams,
    steady: &SteadyState,
    temperature: f64,
    limit: ThermalLimit,
) -> Result<f64> {
    let regime = classify_regime(params)?;
    if regime.is_symmetric() {
        return Err(Error::Regime {
            operation: "sensitivity_b",
            required: "anti-PT-broken",
            found: regime.label().to_string(),
        });
    }
    if limit != ThermalLimit::HighT && (temperature.is_nan() || temperature <= 0.0) {
        return Err(Error::Domain(format!(
            "sensitivity_b needs T > 0 (got {temperature} K)"
        )));
    }
    let omega_eff = eigenfrequencies(params, steady).effective_frequency();
    let chi2 = chi_norm_sqr(params, steady, omega_eff, ChiMode::Exact)?;
    let prefactor = params.gamma_m() / params.omega_m();
    Ok(chi2 * prefactor * thermal_slope(omega_eff, temperature, limit))
}

/// `ξ_0` of the undriven resonator, evaluated at `ω = ω_m` where `|χ|² = 1/γ_m²`.
pub fn sensitivity_0(params: &SystemParams, temperature: f64, limit: ThermalLimit) -> Result<f64> {
    if limit != ThermalLimit::HighT && (temperature.is_nan() || temperature <= 0.0) {
        return Err(Error::Domain(format!(
            "sensitivity_0 needs T > 0 (got {temperature} K)"
        )));
    }
    let gm = params.gamma_m();
    Ok(thermal_slope(params.omega_m(), temperature, limit) / (gm * params.omega_m()))
}

/// `d/dT [ω coth(ħω/2k_BT)] = (ħω²/2k_BT²) csch²(ħω/2k_BT)` and its limits.
fn thermal_slope(omega: f64, temperature: f64, limit: ThermalLimit) -> f64 {
    match limit {
        ThermalLimit::HighT => 2.0 * K_B / HBAR,
        ThermalLimit::LowT => {
            let x = HBAR * omega / (2.0 * K_B * temperature);
            2.0 * HBAR * omega * omega / (K_B * temperature * temperature) * (-2.0 * x).exp()
        }
        ThermalLimit::Full => {
            let x = HBAR * omega / (2.0 * K_B * temperature);
            if x == 0.0 {
                return 2.0 * K_B / HBAR;
            }
            // csch²(x) = 4e^{-2x} / (1 - e^{-2x})², stable for any x > 0
            let m = (-2.0 * x).exp_m1();
            let csch2 = 4.0 * (-2.0 * x).exp() / (m * m);
            HBAR * omega * omega / (2.0 * K_B * temperature * temperature) * csch2
        }
    }
}

fn evaluation_frequency(
    params: &SystemParams,
    steady: &SteadyState,
    regime: Option<Regime>,
    policy: OmegaPolicy,
) -> f64 {
    if policy == OmegaPolicy::AtZero {
        return 0.0;
    }
    if params.omega() == 0.0 {
        return params.omega_m();
    }
    match regime {
        Some(r) if r.is_symmetric() => 0.0,
        _ => eigenfrequencies(params, steady).effective_frequency(),
    }
}

/// Which closed form applies at `(params, ω)`, if any.
fn closed_form(
    params: &SystemParams,
    steady: &SteadyState,
    regime: Option<Regime>,
    omega: f64,
    temperature: f64,
) -> Option<(&'static str, Result<f64>)> {
    if params.omega() == 0.0 && omega == params.omega_m() {
        return Some((
            "xi_0",
            sensitivity_0(params, temperature, ThermalLimit::Full),
        ));
    }
    match regime? {
        r if r.is_symmetric() && omega == 0.0 => Some(("xi_s", sensitivity_s(params, steady))),
        r if !r.is_symmetric()
            && omega == eigenfrequencies(params, steady).effective_frequency() =>
        {
            Some(("xi_b", sensitivity_b(params, steady, temperature)))
        }
        _ => None,
    }
}

/// Numerical and closed-form sensitivity at the policy's evaluation frequency.
pub fn sensitivity_report(
    params: &SystemParams,
    temperature: f64,
    policy: OmegaPolicy,
) -> Result<SensitivityReport> {
    let steady = steady_state(params);
    let regime = classify_regime(params).ok();
    let omega_eval = evaluation_frequency(params, &steady, regime, policy);
    let xi_numeric = sensitivity_numeric(params, &steady, omega_eval, temperature)?;
    let xi_closed_form = match closed_form(params, &steady, regime, omega_eval, temperature) {
        Some((_, value)) => Some(value?),
        None => None,
    };
    Ok(SensitivityReport {
        xi_numeric,
        xi_closed_form,
        regime,
        omega_eval,
        limit_label: LimitLabel::classify(omega_eval, temperature),
    })
}

struct SweepRow {
    offset: f64,
    omega: f64,
    temperature: f64,
    regime: String,
    omega_eval: f64,
    kind: &'static str,
    closed: f64,
    numeric: f64,
    flag: String,
}

fn sweep_row(base: &SystemParams, drive: Drive, temperature: f64, policy: OmegaPolicy) -> SweepRow {
    let mut row = SweepRow {
        offset: f64::NAN,
        omega: f64::NAN,
        temperature,
        regime: String::new(),
        omega_eval: f64::NAN,
        kind: "numeric",
        closed: f64::NAN,
        numeric: f64::NAN,
        flag: String::new(),
    };
    let params = match base
        .with_drive(drive)
        .and_then(|p| p.with_temperature(temperature.max(0.0)))
    {
        Ok(p) => p,
        Err(e) => {
            row.flag = e.to_string();
            return row;
        }
    };
    row.offset = params.drive_offset_over_gamma_m().unwrap_or(f64::NAN);
    row.omega = params.omega();
    let steady = steady_state(&params);
    let regime = classify_regime(&params).ok();
    row.regime = regime.map_or("none", Regime::label).to_string();
    row.omega_eval = evaluation_frequency(&params, &steady, regime, policy);

    let mut flags = Vec::new();
    match sensitivity_numeric(&params, &steady, row.omega_eval, temperature) {
        Ok(v) => row.numeric = v,
        Err(e) => flags.push(e.to_string()),
    }
    if let Some((kind, value)) = closed_form(&params, &steady, regime, row.omega_eval, temperature)
    {
        row.kind = kind;
        match value {
            Ok(v) => row.closed = v,
            Err(e) => flags.push(e.to_string()),
        }
    }
    row.flag = flags.join("; ");
    row
}

/// `ξ` over a drive × temperature grid, long-form with drive as the outer
/// loop. Per-point failures become flagged rows with NaN values.
pub fn sensitivity_sweep(
    base: &SystemParams,
    drive_grid: &[Drive],
    temperature_grid: &[f64],
    policy: OmegaPolicy,
) -> Result<SweepResult> {
    if drive_grid.is_empty() {
        return Err(Error::validation("drive_grid", "must not be empty"));
    }
    if temperature_grid.is_empty() {
        return Err(Error::validation("temperature_grid", "must not be empty"));
    }
    let points: Vec<(Drive, f64)> = drive_grid
        .iter()
        .flat_map(|&d| temperature_grid.iter().map(move |&t| (d, t)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(d, t)| sweep_row(base, d, t, policy))
        .collect();

    let mut table = SweepResult::new(
        "sensitivity_sweep",
        1,
        "omega_drive_rad_s rad/s; temperature_k K; omega_eval_rad_s rad/s; xi_* s/K",
    );
    let col = |f: fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    table.push_float("omega_drive_offset_over_gamma_m", col(|r| r.offset))?;
    table.push_float("omega_drive_rad_s", col(|r| r.omega))?;
    table.push_float("temperature_k", col(|r| r.temperature))?;
    table.push_text("regime", rows.iter().map(|r| r.regime.clone()).collect())?;
    table.push_float("omega_eval_rad_s", col(|r| r.omega_eval))?;
    table.push_text("xi_kind", rows.iter().map(|r| r.kind.to_string()).collect())?;
    table.push_float("xi_closed_s_per_k", col(|r| r.closed))?;
    table.push_float("xi_numeric_s_per_k", col(|r| r.numeric))?;
    table.push_float(
        "relative_difference",
        col(|r| ((r.numeric - r.closed) / r.closed).abs()),
    )?;
    table.push_text("flag", rows.iter().map(|r| r.flag.clone()).collect())?;
    Ok(table)
}
