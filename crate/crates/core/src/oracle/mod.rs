//! Independent numerical checks of the analytic spectra.
//!
//! [`linear`] solves the full linearized fluctuation system frequency by
//! frequency. [`langevin`] integrates the nonlinear classical equations of
//! motion, [`welch`] turns trajectories into spectra, and [`montecarlo`]
//! runs the two end to end against the analytic PSD.

pub mod langevin;
pub mod linear;
pub mod montecarlo;
pub mod welch;

pub use langevin::{
    integrate_langevin, read_store, write_store, LangevinOptions, Scheme, TrajectoryEnsemble,
};
pub use linear::{
    build_linearized, spectrum_by_linear_solve, spectrum_by_linear_solve_channels,
    LinearizedSystem, NoiseChannels,
};
pub use montecarlo::{desk_scale_params, run_monte_carlo, MonteCarloConfig, MonteCarloReport};
pub use welch::{estimate_psd, welch_psd, Periodogram, WelchOptions, Window};
