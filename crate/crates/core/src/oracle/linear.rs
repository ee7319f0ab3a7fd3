//! Frequency-domain solve of the linearized fluctuation equations.
//!
//! The state is `x = (δq, δp, δa, δa†)` with `dx/dt = M x + B n`, where the
//! noise vector is `n = (ξ, a_in, a_in†)`. Spectra follow from
//! `G(ω) = (-iωI - M)⁻¹ B` contracted with the noise correlations, so nothing
//! here touches the closed-form χ, η or ζ.

use nalgebra::{Matrix2, Matrix4, Matrix4x3, Vector4};
use num_complex::Complex64;

use crate::model::SystemParams;
use crate::noise::thermal_spectrum;
use crate::steady_state::SteadyState;

const Q: usize = 0;
const P: usize = 1;
const A: usize = 2;
const A_DAG: usize = 3;

const XI: usize = 0;
const A_IN: usize = 1;
const A_IN_DAG: usize = 2;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Drift and noise-input matrices of the fluctuation equations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    pub drift: Matrix4<Complex64>,
    pub noise_input: Matrix4x3<Complex64>,
    params: SystemParams,
}

/// Which noise inputs feed the solved spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseChannels {
    pub thermal: bool,
    pub optical: bool,
}

impl NoiseChannels {
    pub const ALL: NoiseChannels = NoiseChannels {
        thermal: true,
        optical: true,
    };
    pub const THERMAL: NoiseChannels = NoiseChannels {
        thermal: true,
        optical: false,
    };
    pub const OPTICAL: NoiseChannels = NoiseChannels {
        thermal: false,
        optical: true,
    };
}

/// Assembles `M` and `B` from the steady state.
///
/// The `δq → δp` entry uses the cancellation-free stiffness carried by the
/// steady state instead of forming `ω_m + 4g|α|²` again.
pub fn build_linearized(params: &SystemParams, steady: &SteadyState) -> LinearizedSystem {
    let wm = params.omega_m();
    let gm = params.gamma_m();
    let gc = params.gamma_c();
    let g = params.g();
    let alpha = steady.alpha;
    let qs = steady.q_s;
    let shift = 2.0 * g * steady.q_s2;

    let mut m = Matrix4::<Complex64>::zeros();
    m[(Q, P)] = c(wm, 0.0);
    m[(P, Q)] = c(-steady.stiffness, 0.0);
    m[(P, P)] = c(-gm, 0.0);
    m[(P, A)] = -4.0 * g * qs * alpha.conj();
    m[(P, A_DAG)] = -4.0 * g * qs * alpha;
    m[(A, Q)] = c(0.0, -4.0 * g * qs) * alpha;
    m[(A, A)] = c(-0.5 * gc, -shift);
    m[(A_DAG, Q)] = c(0.0, 4.0 * g * qs) * alpha.conj();
    m[(A_DAG, A_DAG)] = c(-0.5 * gc, shift);

    let mut b = Matrix4x3::<Complex64>::zeros();
    b[(P, XI)] = c(1.0, 0.0);
    b[(A, A_IN)] = c(gc.sqrt(), 0.0);
    b[(A_DAG, A_IN_DAG)] = c(gc.sqrt(), 0.0);

    LinearizedSystem {
        drift: m,
        noise_input: b,
        params: *params,
    }
}

impl LinearizedSystem {
    /// Row `δq` of `G(ω) = (-iωI - M)⁻¹ B`, or `None` when the solve is singular.
    pub fn position_response(&self, omega: f64) -> Option<[Complex64; 3]> {
        let a = Matrix4::<Complex64>::from_diagonal_element(c(0.0, -omega)) - self.drift;
        // row q of A⁻¹ solves Aᵀ y = e_q
        let y = a.transpose().lu().solve(&Vector4::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ))?;
        let row = y.transpose() * self.noise_input;
        if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        Some([row[XI], row[A_IN], row[A_IN_DAG]])
    }

    /// Eigenvalues of the drift matrix, sorted by real part (least damped last).
    pub fn drift_eigenvalues(&self) -> Vec<Complex64> {
        let mut values: Vec<Complex64> = self
            .drift
            .schur()
            .eigenvalues()
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default();
        values.sort_by(|a, b| a.re.total_cmp(&b.re));
        values
    }

    /// Mechanical drift after eliminating the cavity at zero frequency
    /// (Schur complement `M_mm - M_mc M_cc⁻¹ M_cm`).
    pub fn adiabatic_mechanical_drift(&self) -> Matrix2<Complex64> {
        let m = &self.drift;
        let mut reduced = Matrix2::new(m[(Q, Q)], m[(Q, P)], m[(P, Q)], m[(P, P)]);
        for cav in [A, A_DAG] {
            let inv = 1.0 / m[(cav, cav)];
            for (i, row) in [Q, P].into_iter().enumerate() {
                for (j, col) in [Q, P].into_iter().enumerate() {
                    reduced[(i, j)] -= m[(row, cav)] * inv * m[(cav, col)];
                }
            }
        }
        reduced
    }

    /// Eigenvalues of [`Self::adiabatic_mechanical_drift`]; they equal `-iω_±`.
    pub fn adiabatic_eigenvalues(&self) -> [Complex64; 2] {
        let r = self.adiabatic_mechanical_drift();
        let half_trace = 0.5 * (r[(0, 0)] + r[(1, 1)]);
        let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
        let root = (half_trace * half_trace - det).sqrt();
        [half_trace + root, half_trace - root]
    }
}

/// `S_qq(ω) = Σ_jk G_qj(ω) G_qk(-ω) N_jk(ω)` with `N_ξξ = S_m,th(ω, T)`,
/// `N[a_in, a_in†] = 1` and all other entries zero. A singular solve returns `+∞`.
pub fn spectrum_by_linear_solve(system: &LinearizedSystem, omega: f64, temperature: f64) -> f64 {
    spectrum_by_linear_solve_channels(system, omega, temperature, NoiseChannels::ALL)
}

pub fn spectrum_by_linear_solve_channels(
    system: &LinearizedSystem,
    omega: f64,
    temperature: f64,
    channels: NoiseChannels,
) -> f64 {
    let (Some(gp), Some(gm)) = (
        system.position_response(omega),
        system.position_response(-omega),
    ) else {
        return f64::INFINITY;
    };
    let mut total = c(0.0, 0.0);
    if channels.thermal {
        total += gp[XI] * gm[XI] * thermal_spectrum(&system.params, omega, temperature);
    }
    if channels.optical {
        total += gp[A_IN] * gm[A_IN_DAG];
    }
    total.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Drive;
    use crate::noise::psd;
    use crate::spectral::{eigenfrequencies, ChiMode};
    use crate::steady_state::steady_state;

    fn system_at(drive: Drive) -> (SystemParams, SteadyState, LinearizedSystem) {
        let p = SystemParams::reference().with_drive(drive).unwrap();
        let s = steady_state(&p);
        let sys = build_linearized(&p, &s);
        (p, s, sys)
    }

    #[test]
    fn undriven_system_is_block_diagonal() {
        let (p, _, sys) = system_at(Drive::OFF);
        for mech in [Q, P] {
            for cav in [A, A_DAG] {
                assert_eq!(sys.drift[(mech, cav)], c(0.0, 0.0));
                assert_eq!(sys.drift[(cav, mech)], c(0.0, 0.0));
            }
        }
        let wm = p.omega_m();
        let s = spectrum_by_linear_solve(&sys, wm, 300.0);
        let expected = thermal_spectrum(&p, wm, 300.0) / (p.gamma_m() * p.gamma_m());
        assert!((s / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn critical_point_at_zero_frequency_is_singular() {
        let (p, _, sys) = system_at(Drive::CriticalOffset(0.0));
        assert_eq!(spectrum_by_linear_solve(&sys, 0.0, 1.0), f64::INFINITY);
        let least_damped = *sys.drift_eigenvalues().last().unwrap();
        assert!(least_damped.re.abs() < 1e-8 * p.gamma_m());
    }

    #[test]
    fn reduced_eigenvalues_are_the_mechanical_modes() {
        let gm = SystemParams::reference().gamma_m();
        for offset in [-3.0, -0.2, 0.01, 0.02, 1.0] {
            let (p, s, sys) = system_at(Drive::CriticalOffset(offset * gm));
            let eig = eigenfrequencies(&p, &s);
            let mut expected = [c(0.0, -1.0) * eig.plus, c(0.0, -1.0) * eig.minus];
            let mut got = sys.adiabatic_eigenvalues();
            let key = |z: &Complex64| (z.re, z.im);
            expected.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (e, g) in expected.iter().zip(&got) {
                assert!(
                    (e - g).norm() < 1e-6 * e.norm(),
                    "offset {offset}: {e} vs {g}"
                );
            }
        }
    }

    #[test]
    fn matches_analytic_psd_across_regimes() {
        let gm = SystemParams::reference().gamma_m();
        let wm = SystemParams::reference().omega_m();
        for offset in [-5.0, -0.3, 0.005, 0.02, 0.5] {
            let (p, s, sys) = system_at(Drive::CriticalOffset(offset * gm));
            for w in [0.0, 1e-3 * wm, 0.3 * wm, wm, 1.4 * wm] {
                for t in [1e-6, 300.0] {
                    let a = psd(&p, &s, w, t, ChiMode::Exact).unwrap();
                    let b = spectrum_by_linear_solve(&sys, w, t);
                    assert!(
                        (a / b - 1.0).abs() < 1e-6,
                        "offset {offset}, w {w}, T {t}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn optical_channel_alone_is_the_radiation_term() {
        let (p, s, sys) = system_at(Drive::CriticalExcess(0.02));
        for w in [0.0, 0.5 * p.omega_m(), 2.0 * p.omega_m()] {
            let parts = crate::noise::psd_components(&p, &s, w, 0.0, ChiMode::Exact).unwrap();
            let optical = spectrum_by_linear_solve_channels(&sys, w, 0.0, NoiseChannels::OPTICAL);
            let expected = parts.chi_norm_sqr * parts.radiation;
            assert!(
                (optical / expected - 1.0).abs() < 1e-8,
                "{optical} vs {expected}"
            );
        }
    }
}
