//! Simulation of a quadratically coupled optomechanical resonator used as a
//! thermometer: mean-field steady states, the anti-PT eigenstructure of the
//! linearized mechanics, thermal displacement spectra and the temperature
//! sensitivity built on them.
//!
//! Independent numerical cross-checks (linear-system solve of the full
//! fluctuation equations, stochastic Langevin integration and Welch
//! estimation) live in [`oracle`].

pub mod cli;
pub mod error;
pub mod figures;
pub mod grid;
pub mod model;
pub mod noise;
pub mod oracle;
pub mod sensitivity;
pub mod spectral;
pub mod steady_state;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Drive, ExperimentParams, SystemParams, HBAR, K_B};
pub use noise::{psd, psd_components, thermal_spectrum, PsdComponents, SpectrumSeries};
pub use spectral::{
    classify_regime, eigenfrequencies, exceptional_points, spectral_structure, susceptibility,
    ChiMode, Eigenfrequencies, ExceptionalPoints, Regime, SpectralStructure,
};
pub use steady_state::{steady_state, steady_state_on, Branch, SteadyState};
pub use table::SweepResult;
