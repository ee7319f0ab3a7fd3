//! Linearized fluctuation spectrum: optical response factors, mechanical
//! susceptibility, complex eigenfrequencies and the anti-PT regime structure.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::steady_state::{steady_state, SteadyState};

/// Anti-PT phase of the mechanical eigenfrequencies as a function of drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `Ω < Ω_EP1`: two peaks at `±Re(ω_±)`.
    AntiPTBrokenLower,
    /// `Ω_EP1 ≤ Ω ≤ Ω_EP2`: purely imaginary `ω_±`, single peak at zero.
    AntiPTSymmetric,
    /// `Ω > Ω_EP2`.
    AntiPTBrokenUpper,
}

impl Regime {
    pub fn is_symmetric(self) -> bool {
        self == Regime::AntiPTSymmetric
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::AntiPTBrokenLower => "anti_pt_broken_lower",
            Regime::AntiPTSymmetric => "anti_pt_symmetric",
            Regime::AntiPTBrokenUpper => "anti_pt_broken_upper",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How the mechanical susceptibility is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMode {
    /// Full frequency-dependent optical response `ζ(ω)`.
    #[default]
    Exact,
    /// Static `ζ₀` and the pole form `-ω_m / ((ω - ω_+)(ω - ω_-))`.
    Factored,
}

/// The pair of complex mechanical eigenfrequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenfrequencies {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Eigenfrequencies {
    pub fn product(&self) -> Complex64 {
        self.plus * self.minus
    }

    /// `|Re(ω_+)|`, the peak frequency in the broken phases.
    pub fn effective_frequency(&self) -> f64 {
        self.plus.re.abs()
    }
}

/// Drive strengths bounding the anti-PT-symmetric window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalPoints {
    pub omega_ep1: f64,
    pub omega_ep2: f64,
    /// `Ω_EP1²/Ω_c² - 1 = -(γ_m/2ω_m)²`.
    pub excess_ep1: f64,
    /// `Ω_EP2²/Ω_c² - 1 = δ/(1-δ)` with `δ = (γ_m/4ω_m)²`.
    pub excess_ep2: f64,
}

/// Everything the drive strength decides about the fluctuation spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralStructure {
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub omega_c_drive: f64,
    pub omega_ep1: f64,
    pub omega_ep2: f64,
    pub regime: Regime,
}

/// `1 - ζ(ω) = (4gQ_s²)² / [(γ_c/2 - iω)² + (2gQ_s²)²]`.
pub(crate) fn one_minus_zeta(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
) -> Result<Complex64> {
    let detuning = 2.0 * params.g() * steady.q_s2;
    if detuning == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let half = 0.5 * params.gamma_c();
    let base = Complex64::new(half, -omega);
    let denominator = base * base + detuning * detuning;
    if denominator.norm() < 1e-12 * half * half {
        return Err(Error::Degenerate(format!(
            "zeta denominator vanishes at omega = {omega} rad/s"
        )));
    }
    Ok(Complex64::new(4.0 * detuning * detuning, 0.0) / denominator)
}

/// Optical back-action factor `ζ(ω)`.
pub fn zeta(params: &SystemParams, steady: &SteadyState, omega: f64) -> Result<Complex64> {
    Ok(1.0 - one_minus_zeta(params, steady, omega)?)
}

fn one_minus_zeta0(params: &SystemParams, steady: &SteadyState) -> f64 {
    let detuning = 2.0 * params.g() * steady.q_s2;
    let half = 0.5 * params.gamma_c();
    4.0 * detuning * detuning / (half * half + detuning * detuning)
}

/// Static limit `ζ₀ = ζ(0)`, valid for `ω ≪ γ_c/2`.
pub fn zeta0(params: &SystemParams, steady: &SteadyState) -> f64 {
    1.0 - one_minus_zeta0(params, steady)
}

/// Optical-noise transfer factor `η(ω)`.
pub fn eta(params: &SystemParams, steady: &SteadyState, omega: f64) -> Complex64 {
    let g = params.g();
    let numerator = -4.0 * g * steady.q_s * steady.alpha.conj() * params.gamma_c().sqrt();
    let denominator = Complex64::new(0.5 * params.gamma_c(), 2.0 * g * steady.q_s2 - omega);
    numerator / denominator
}

/// `ω_m + 4g|α|²ζ₀` in rad/s; the static effective stiffness.
pub fn effective_stiffness(params: &SystemParams, steady: &SteadyState) -> f64 {
    steady.stiffness - 4.0 * params.g() * steady.intensity() * one_minus_zeta0(params, steady)
}

fn divergent() -> Complex64 {
    Complex64::new(f64::INFINITY, 0.0)
}

/// Mechanical susceptibility `χ(ω)` in seconds.
///
/// A vanishing denominator (the critical point at `ω = 0`) returns a
/// real `+∞` instead of NaN so sweeps can carry the divergence.
pub fn susceptibility(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
    mode: ChiMode,
) -> Result<Complex64> {
    let wm = params.omega_m();
    let denominator = match mode {
        ChiMode::Exact => {
            // ω_m² + 4ω_m g|α|²ζ = ω_m(ω_m + 4g|α|²) - 4ω_m g|α|²(1 - ζ)
            let spring = -4.0
                * wm
                * params.g()
                * steady.intensity()
                * one_minus_zeta(params, steady, omega)?;
            Complex64::new(
                wm * steady.stiffness - omega * omega,
                -params.gamma_m() * omega,
            ) + spring
        }
        ChiMode::Factored => {
            let eig = eigenfrequencies(params, steady);
            -((omega - eig.plus) * (omega - eig.minus))
        }
    };
    if denominator == Complex64::new(0.0, 0.0) {
        return Ok(divergent());
    }
    Ok(Complex64::new(wm, 0.0) / denominator)
}

/// `ω_± = -iγ_m/2 ± √(ω_m(ω_m + 4g|α|²ζ₀) - γ_m²/4)`.
///
/// A negative radicand takes the root `+i√|radicand|`, so inside the
/// symmetric window `|Im ω_+| ≤ |Im ω_-|` and `ω_+` is the mode whose
/// damping vanishes at the critical point.
pub fn eigenfrequencies(params: &SystemParams, steady: &SteadyState) -> Eigenfrequencies {
    let half_gamma = 0.5 * params.gamma_m();
    let radicand = params.omega_m() * effective_stiffness(params, steady) - half_gamma * half_gamma;
    let root = if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-radicand).sqrt())
    };
    let center = Complex64::new(0.0, -half_gamma);
    Eigenfrequencies {
        plus: center + root,
        minus: center - root,
    }
}

/// Drive strengths of the two exceptional points.
pub fn exceptional_points(params: &SystemParams) -> Result<ExceptionalPoints> {
    let omega_c = params.critical_drive()?;
    let ratio = params.gamma_m() / params.omega_m();
    if ratio >= 2.0 {
        return Err(Error::Domain(format!(
            "gamma_m >= 2 omega_m (ratio {ratio}): EP1 does not exist"
        )));
    }
    let eps1 = 0.25 * ratio * ratio;
    let delta = 0.0625 * ratio * ratio;
    let excess_ep1 = -eps1;
    let excess_ep2 = delta / (1.0 - delta);
    Ok(ExceptionalPoints {
        omega_ep1: omega_c * (1.0 - eps1).sqrt(),
        omega_ep2: omega_c / (1.0 - delta).sqrt(),
        excess_ep1,
        excess_ep2,
    })
}

/// Regime of the current drive; EP boundaries belong to the symmetric phase.
pub fn classify_regime(params: &SystemParams) -> Result<Regime> {
    let eps = exceptional_points(params)?;
    let excess = params
        .drive_excess()
        .ok_or_else(|| Error::Domain("CP requires negative g".into()))?;
    Ok(if excess < eps.excess_ep1 {
        Regime::AntiPTBrokenLower
    } else if excess > eps.excess_ep2 {
        Regime::AntiPTBrokenUpper
    } else {
        Regime::AntiPTSymmetric
    })
}

pub fn spectral_structure(params: &SystemParams) -> Result<SpectralStructure> {
    let eps = exceptional_points(params)?;
    let regime = classify_regime(params)?;
    let eig = eigenfrequencies(params, &steady_state(params));
    Ok(SpectralStructure {
        omega_plus: eig.plus,
        omega_minus: eig.minus,
        omega_c_drive: params.critical_drive()?,
        omega_ep1: eps.omega_ep1,
        omega_ep2: eps.omega_ep2,
        regime,
    })
}

/// `|χ(ω)|²`, with the divergence indicator mapped to `+∞`.
pub fn chi_norm_sqr(
    params: &SystemParams,
    steady: &SteadyState,
    omega: f64,
    mode: ChiMode,
) -> Result<f64> {
    let chi = susceptibility(params, steady, omega, mode)?;
    Ok(if chi.re.is_infinite() {
        f64::INFINITY
    } else {
        chi.norm_sqr()
    })
}

/// Locates the maximum of `|χ|²` on `grid` and refines it by golden-section
/// search between the neighbouring grid points.
pub fn peak_chi_norm_sqr(
    params: &SystemParams,
    steady: &SteadyState,
    grid: &[f64],
    mode: ChiMode,
) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::validation("grid", "empty frequency grid"));
    }
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &w) in grid.iter().enumerate() {
        let v = chi_norm_sqr(params, steady, w, mode)?;
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    if best_value.is_infinite() {
        return Ok((grid[best], best_value));
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let f = |w: f64| chi_norm_sqr(params, steady, w, mode).unwrap_or(f64::NAN);
    let (w, v) = golden_max(f, lo, hi, 200);
    Ok(if v > best_value {
        (w, v)
    } else {
        (grid[best], best_value)
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
