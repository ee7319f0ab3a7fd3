//! Mean-field steady state, pitchfork bifurcation and effective potential.

use num_complex::Complex64;
use serde::Serialize;

use crate::model::SystemParams;

/// Which of the two symmetry-broken displacement branches to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

/// Steady-state means `⟨A⟩ = α`, `⟨Q⟩ = Q_s`, `⟨P⟩ = P_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    pub alpha: Complex64,
    pub q_s2: f64,
    pub q_s: f64,
    pub p_s: f64,
    pub above_threshold: bool,
    /// `ω_m + 4g|α|²` in rad/s, the bare-plus-optical-spring stiffness of the
    /// linearized mechanics. Evaluated without cancellation: it is exactly
    /// zero above threshold and `-ω_m (Ω²/Ω_c² - 1)` below.
    pub stiffness: f64,
}

impl SteadyState {
    pub fn intensity(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Steady state on the default (`+√Q_s²`) branch.
pub fn steady_state(params: &SystemParams) -> SteadyState {
    steady_state_on(params, Branch::Positive)
}

/// Steady state on an explicit branch.
///
/// Above threshold `Q_s² = (γ_c / 4|g|) √(Ω²/Ω_c² - 1)`, which is the piecewise
/// square-root rule rewritten in terms of the drive excess so it stays
/// accurate arbitrarily close to `Ω_c`. `g >= 0` has no bifurcation and
/// always gives `Q_s = 0`.
pub fn steady_state_on(params: &SystemParams, branch: Branch) -> SteadyState {
    let g = params.g();
    let omega = params.omega();
    let (q_s2, stiffness) = match params.drive_excess() {
        Some(excess) if excess > 0.0 => (params.gamma_c() / (4.0 * g.abs()) * excess.sqrt(), 0.0),
        Some(excess) => (0.0, -params.omega_m() * excess),
        None => {
            let intensity = 4.0 * omega * omega / (params.gamma_c() * params.gamma_c());
            (0.0, params.omega_m() + 4.0 * g * intensity)
        }
    };
    let alpha =
        Complex64::new(0.0, -2.0 * omega) / Complex64::new(params.gamma_c(), 4.0 * g * q_s2);
    let magnitude = q_s2.sqrt();
    let q_s = match branch {
        Branch::Positive => magnitude,
        Branch::Negative => -magnitude,
    };
    SteadyState {
        alpha,
        q_s2,
        q_s,
        p_s: 0.0,
        above_threshold: q_s2 > 0.0,
        stiffness,
    }
}

/// Time derivatives of the mean-field equations evaluated at a candidate
/// fixed point, each divided by its natural scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResiduals {
    pub position: f64,
    pub momentum: f64,
    pub cavity: f64,
}

impl FixedPointResiduals {
    pub fn max(&self) -> f64 {
        self.position.max(self.momentum).max(self.cavity)
    }
}

/// Substitutes `(α, Q_s, P_s)` into the mean-field Langevin equations.
pub fn fixed_point_residuals(params: &SystemParams, state: &SteadyState) -> FixedPointResiduals {
    let (wm, gm, gc, g) = (
        params.omega_m(),
        params.gamma_m(),
        params.gamma_c(),
        params.g(),
    );
    let omega = params.omega();
    let alpha = state.alpha;
    let q = state.q_s;
    let p = state.p_s;

    let dq = wm * p;
    let dp = -wm * q - 4.0 * g * alpha.norm_sqr() * q - gm * p;
    let da = -0.5 * gc * alpha
        - Complex64::new(0.0, 2.0 * g * q * q) * alpha
        - Complex64::new(0.0, omega);

    let scale_mech = wm * q.abs().max(1.0);
    let scale_cav = (gc * alpha.norm()).max(omega).max(f64::MIN_POSITIVE);
    FixedPointResiduals {
        position: dq.abs() / scale_mech,
        momentum: dp.abs() / scale_mech,
        cavity: da.norm() / scale_cav,
    }
}

/// Adiabatic potential of the mechanics with the cavity slaved to `Q`:
/// `V(Q) = ω_m Q²/2 + (2Ω²/γ_c) atan(4gQ²/γ_c)` in rad/s (energy over ħ).
pub fn effective_potential(params: &SystemParams, q: f64) -> f64 {
    let omega = params.omega();
    let gc = params.gamma_c();
    0.5 * params.omega_m() * q * q
        + 2.0 * omega * omega / gc * (4.0 * params.g() * q * q / gc).atan()
}

/// `dV/dQ` of [`effective_potential`].
pub fn effective_potential_gradient(params: &SystemParams, q: f64) -> f64 {
    let omega = params.omega();
    let gc = params.gamma_c();
    let g = params.g();
    let u = 4.0 * g * q * q / gc;
    params.omega_m() * q + 16.0 * g * omega * omega * q / (gc * gc * (1.0 + u * u))
}
