//! System parameters, unit conversion and physical constants.
//!
//! Everything inside the crate works in SI angular frequency (rad/s).
//! Values enter and leave in Hz through [`ExperimentParams`], which is also
//! the on-disk parameter file format.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 exact values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054571817e-34,
    k_b: 1.380649e-23,
};

pub const HBAR: f64 = CONSTANTS.hbar;
pub const K_B: f64 = CONSTANTS.k_b;

/// Optical drive strength.
///
/// Near the critical point the interesting structure lives within about
/// `1e-9` relative of `Ω_c`, below the resolution of an absolute `f64` in
/// rad/s. The relative variants keep the distance to `Ω_c` exact, and all
/// threshold-sensitive quantities are derived from [`SystemParams::drive_excess`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Drive {
    /// `Ω` in rad/s.
    Absolute(f64),
    /// `Ω - Ω_c` in rad/s.
    CriticalOffset(f64),
    /// `Ω²/Ω_c² - 1`.
    CriticalExcess(f64),
}

impl Drive {
    pub const OFF: Drive = Drive::Absolute(0.0);

    pub fn is_relative(&self) -> bool {
        !matches!(self, Drive::Absolute(_))
    }
}

/// Physical parameters of the driven quadratic optomechanical system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    g: f64,
    omega_m: f64,
    gamma_m: f64,
    gamma_c: f64,
    drive: Drive,
    temperature: f64,
}

impl SystemParams {
    /// Builds a validated parameter set. All rates are in rad/s, `temperature` in K.
    pub fn new(
        g: f64,
        omega_m: f64,
        gamma_m: f64,
        gamma_c: f64,
        drive: Drive,
        temperature: f64,
    ) -> Result<Self> {
        check_finite("g", g)?;
        check_positive("omega_m", omega_m)?;
        check_positive("gamma_m", gamma_m)?;
        check_positive("gamma_c", gamma_c)?;
        check_finite("temperature", temperature)?;
        if temperature < 0.0 {
            return Err(Error::validation("temperature", "must be >= 0 K"));
        }
        let params = SystemParams {
            g,
            omega_m,
            gamma_m,
            gamma_c,
            drive: Drive::OFF,
            temperature,
        };
        params.with_drive(drive)
    }

    /// The experimental set used throughout: g/2π = -245 Hz, ω_m/2π = 8.7 MHz,
    /// Q_m = 1e4, γ_c/2π = 5 GHz; undriven at 300 K.
    pub fn reference() -> Self {
        ExperimentParams::reference()
            .to_params()
            .expect("built-in parameters are valid")
    }

    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }
    pub fn drive(&self) -> Drive {
        self.drive
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn with_drive(mut self, drive: Drive) -> Result<Self> {
        match drive {
            Drive::Absolute(omega) => {
                check_finite("omega", omega)?;
                if omega < 0.0 {
                    return Err(Error::validation("omega", "drive strength must be >= 0"));
                }
            }
            Drive::CriticalOffset(offset) => {
                check_finite("omega_offset", offset)?;
                let omega_c = self.critical_drive()?;
                if offset < -omega_c {
                    return Err(Error::validation(
                        "omega_offset",
                        "offset below -Ω_c gives a negative drive",
                    ));
                }
            }
            Drive::CriticalExcess(excess) => {
                check_finite("omega_excess", excess)?;
                self.critical_drive()?;
                if excess < -1.0 {
                    return Err(Error::validation(
                        "omega_excess",
                        "Ω²/Ω_c² - 1 must be >= -1",
                    ));
                }
            }
        }
        self.drive = drive;
        Ok(self)
    }

    pub fn with_temperature(mut self, temperature: f64) -> Result<Self> {
        check_finite("temperature", temperature)?;
        if temperature < 0.0 {
            return Err(Error::validation("temperature", "must be >= 0 K"));
        }
        self.temperature = temperature;
        Ok(self)
    }

    /// Critical drive `Ω_c = sqrt(-γ_c² ω_m / (16 g))`; only defined for `g < 0`.
    pub fn critical_drive(&self) -> Result<f64> {
        if self.g >= 0.0 {
            return Err(Error::Domain(format!(
                "CP requires negative g (got g = {} rad/s)",
                self.g
            )));
        }
        Ok((-self.gamma_c * self.gamma_c * self.omega_m / (16.0 * self.g)).sqrt())
    }

    /// Absolute drive strength `Ω` in rad/s.
    pub fn omega(&self) -> f64 {
        match self.drive {
            Drive::Absolute(omega) => omega,
            Drive::CriticalOffset(offset) => self.omega_c_unchecked() + offset,
            Drive::CriticalExcess(excess) => self.omega_c_unchecked() * (1.0 + excess).sqrt(),
        }
    }

    /// `Ω²/Ω_c² - 1`, evaluated without cancellation. `None` when `g >= 0`.
    pub fn drive_excess(&self) -> Option<f64> {
        let omega_c = self.critical_drive().ok()?;
        Some(match self.drive {
            Drive::Absolute(omega) => (omega - omega_c) * (omega + omega_c) / (omega_c * omega_c),
            Drive::CriticalOffset(offset) => {
                offset * (2.0 * omega_c + offset) / (omega_c * omega_c)
            }
            Drive::CriticalExcess(excess) => excess,
        })
    }

    /// `(Ω - Ω_c)` in units of `γ_m`; `None` when `g >= 0`.
    pub fn drive_offset_over_gamma_m(&self) -> Option<f64> {
        let omega_c = self.critical_drive().ok()?;
        let offset = match self.drive {
            Drive::Absolute(omega) => omega - omega_c,
            Drive::CriticalOffset(offset) => offset,
            Drive::CriticalExcess(excess) => omega_c * excess / ((1.0 + excess).sqrt() + 1.0),
        };
        Some(offset / self.gamma_m)
    }

    /// Mechanical quality factor `ω_m / γ_m`.
    pub fn quality_factor(&self) -> f64 {
        self.omega_m / self.gamma_m
    }

    /// Non-fatal diagnostics about the validity of approximations.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.gamma_c < 10.0 * self.omega_m {
            notes.push(format!(
                "gamma_c/omega_m = {:.3} < 10: outside the sideband-unresolved regime, \
                 the static zeta0 approximation degrades",
                self.gamma_c / self.omega_m
            ));
        }
        notes
    }

    fn omega_c_unchecked(&self) -> f64 {
        // with_drive guarantees g < 0 for relative drives
        self.critical_drive().unwrap_or(f64::NAN)
    }
}

fn check_finite(field: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be finite (got {value})"),
        ))
    }
}

fn check_positive(field: &str, value: f64) -> Result<()> {
    check_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be > 0 (got {value})"),
        ))
    }
}

/// Parameters in laboratory units; also the parameter-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    /// Quadratic coupling g/2π in Hz (signed).
    pub g_hz: f64,
    /// Mechanical frequency ω_m/2π in Hz.
    pub f_m_hz: f64,
    /// Mechanical quality factor.
    pub q_m: f64,
    /// Optical damping γ_c/2π in Hz.
    pub gamma_c_hz: f64,
    /// Drive strength Ω/2π in Hz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_hz: Option<f64>,
    /// Drive given as (Ω - Ω_c)/γ_m; exclusive with `omega_hz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_offset_gamma_m: Option<f64>,
    /// Bath temperature in K.
    #[serde(default)]
    pub temperature_k: f64,
}

impl ExperimentParams {
    pub fn reference() -> Self {
        ExperimentParams {
            g_hz: -245.0,
            f_m_hz: 8.7e6,
            q_m: 1e4,
            gamma_c_hz: 5e9,
            omega_hz: Some(0.0),
            omega_offset_gamma_m: None,
            temperature_k: 300.0,
        }
    }

    pub fn to_params(&self) -> Result<SystemParams> {
        let mut params = params_from_experiment(
            self.g_hz,
            self.f_m_hz,
            self.q_m,
            self.gamma_c_hz,
            self.omega_hz.unwrap_or(0.0),
            self.temperature_k,
        )?;
        if let Some(offset) = self.omega_offset_gamma_m {
            if self.omega_hz.is_some() {
                return Err(Error::Config(
                    "`omega_hz` and `omega_offset_gamma_m` are mutually exclusive".into(),
                ));
            }
            params = params.with_drive(Drive::CriticalOffset(offset * params.gamma_m()))?;
        }
        Ok(params)
    }

    /// Converts back to laboratory units. Relative drives are written as
    /// `omega_offset_gamma_m` so they survive the round trip exactly.
    pub fn from_params(params: &SystemParams) -> Self {
        let (omega_hz, omega_offset_gamma_m) = match params.drive() {
            Drive::Absolute(omega) => (Some(omega / TAU), None),
            _ => (None, params.drive_offset_over_gamma_m()),
        };
        ExperimentParams {
            g_hz: params.g() / TAU,
            f_m_hz: params.omega_m() / TAU,
            q_m: params.quality_factor(),
            gamma_c_hz: params.gamma_c() / TAU,
            omega_hz,
            omega_offset_gamma_m,
            temperature_k: params.temperature(),
        }
    }

    /// Loads a TOML or JSON (by `.json` extension) parameter file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Applies a `key=value` override using the parameter-file key names.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let parsed: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("override `{key}`: `{value}` is not a number")))?;
        match key.trim() {
            "g_hz" => self.g_hz = parsed,
            "f_m_hz" => self.f_m_hz = parsed,
            "q_m" => self.q_m = parsed,
            "gamma_c_hz" => self.gamma_c_hz = parsed,
            "omega_hz" => {
                self.omega_hz = Some(parsed);
                self.omega_offset_gamma_m = None;
            }
            "omega_offset_gamma_m" => {
                self.omega_offset_gamma_m = Some(parsed);
                self.omega_hz = None;
            }
            "temperature_k" => self.temperature_k = parsed,
            other => return Err(Error::Config(format!("unknown parameter key `{other}`"))),
        }
        Ok(())
    }
}

/// Converts laboratory inputs (Hz, quality factor) to a [`SystemParams`].
///
/// Every frequency-like input is multiplied by 2π and `γ_m = ω_m / Q_m`.
pub fn params_from_experiment(
    g_hz: f64,
    f_m: f64,
    q_m: f64,
    gamma_c_hz: f64,
    omega_hz: f64,
    temperature: f64,
) -> Result<SystemParams> {
    check_positive("f_m", f_m)?;
    check_positive("q_m", q_m)?;
    check_positive("gamma_c_hz", gamma_c_hz)?;
    check_finite("g_hz", g_hz)?;
    let omega_m = TAU * f_m;
    SystemParams::new(
        TAU * g_hz,
        omega_m,
        omega_m / q_m,
        TAU * gamma_c_hz,
        Drive::Absolute(TAU * omega_hz),
        temperature,
    )
}
