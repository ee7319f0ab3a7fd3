//! Stochastic integration of the nonlinear classical equations of motion
//!
//! ```text
//! dQ = ω_m P dt
//! dP = (-ω_m Q - 4g|A|²Q - γ_m P) dt + √D dW,   D = 2γ_m k_BT / (ħω_m)
//! dA = (-(γ_c/2) A - 2igAQ² - iΩ) dt [+ √γ_c dZ]
//! ```
//!
//! with the thermal force in its classical white-noise limit. Each
//! trajectory draws from its own ChaCha stream keyed by `(seed, trajectory,
//! channel)`, so results do not depend on thread count or scheduling.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{ExperimentParams, SystemParams, HBAR, K_B};
use crate::steady_state::{steady_state_on, Branch};
use crate::table::TOOL_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerMaruyama,
    #[default]
    StochasticHeun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinOptions {
    pub seed: u64,
    pub n_traj: usize,
    /// Base time step in seconds.
    pub dt: f64,
    /// Recorded steps per trajectory, in units of `dt`.
    pub n_steps: u64,
    pub scheme: Scheme,
    /// Slave the cavity to `α(Q) = -2iΩ / (γ_c + 4igQ²)`.
    pub adiabatic: bool,
    /// Drive the cavity with vacuum noise (off by default).
    pub optical_noise: bool,
    /// Discarded steps before recording starts, in units of `dt`.
    pub burn_in_steps: u64,
    /// Keep every n-th sample of `q`.
    pub record_every: u64,
    /// Split every step into `2^refine` substeps by Brownian bridging. The
    /// coarse noise path is unchanged, so runs at different refinement see
    /// the same realization.
    pub refine: u32,
    /// Starting position; defaults to the steady state of `branch`.
    pub initial_q: Option<f64>,
    pub initial_p: f64,
    pub branch: Branch,
}

impl LangevinOptions {
    pub fn new(seed: u64, n_traj: usize, dt: f64, n_steps: u64) -> Self {
        LangevinOptions {
            seed,
            n_traj,
            dt,
            n_steps,
            scheme: Scheme::default(),
            adiabatic: false,
            optical_noise: false,
            burn_in_steps: 0,
            record_every: 1,
            refine: 0,
            initial_q: None,
            initial_p: 0.0,
            branch: Branch::Positive,
        }
    }

    fn validate(&self, params: &SystemParams) -> Result<()> {
        if self.n_traj == 0 {
            return Err(Error::validation("n_traj", "must be >= 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation(
                "dt",
                "must be a positive finite time step",
            ));
        }
        if self.record_every == 0 {
            return Err(Error::validation("record_every", "must be >= 1"));
        }
        if self.refine > 16 {
            return Err(Error::validation("refine", "at most 16 bridge levels"));
        }
        let (limit, rule) = if self.adiabatic {
            (
                0.01 / params.omega_m(),
                "0.01/omega_m with adiabatic elimination",
            )
        } else {
            (0.05 / params.gamma_c(), "0.05/gamma_c")
        };
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::validation(
                "dt",
                format!("{} s exceeds {rule} = {limit} s", self.dt),
            ));
        }
        let t = params.temperature();
        if t > 0.0 && K_B * t < 10.0 * HBAR * params.omega_m() {
            return Err(Error::Domain(format!(
                "classical white-noise force needs k_B T >= 10 hbar omega_m (T = {t} K)"
            )));
        }
        if let Some(offset) = params.drive_offset_over_gamma_m() {
            if params.omega() > 0.0 && offset.abs() <= 0.1 {
                return Err(Error::Domain(format!(
                    "drive within 0.1 gamma_m of the critical point (offset {offset} gamma_m)"
                )));
            }
        }
        Ok(())
    }
}

/// Decimated position records of an ensemble plus everything needed to
/// regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub seed: u64,
    pub n_traj: usize,
    /// Integration step actually used (base step over `2^refine`).
    pub dt: f64,
    /// Recorded integration steps per trajectory at `dt`.
    pub n_steps: u64,
    pub sample_interval: f64,
    pub scheme: Scheme,
    pub adiabatic: bool,
    pub optical_noise: bool,
    pub params: SystemParams,
    records: Vec<Vec<f64>>,
}

impl TrajectoryEnsemble {
    pub fn records(&self) -> &[Vec<f64>] {
        &self.records
    }

    pub fn manifest(&self) -> Value {
        json!({
            "tool_version": TOOL_VERSION,
            "seed": self.seed,
            "n_traj": self.n_traj,
            "dt": self.dt,
            "n_steps": self.n_steps,
            "sample_interval": self.sample_interval,
            "n_records": self.records.first().map_or(0, Vec::len),
            "scheme": self.scheme,
            "adiabatic": self.adiabatic,
            "optical_noise": self.optical_noise,
            "params": ExperimentParams::from_params(&self.params),
        })
    }

    pub fn write_store(&self, path: &Path) -> Result<()> {
        write_store(path, self.sample_interval, &self.records)
    }
}

/// Magic bytes of the flat trajectory store.
pub const STORE_MAGIC: &[u8; 8] = b"QOMTRAJ1";

/// Writes columns of equal length as: magic, u64 column count, u64 record
/// count, f64 sample interval, then each column contiguously. All values
/// little-endian.
pub fn write_store(path: &Path, sample_interval: f64, columns: &[Vec<f64>]) -> Result<()> {
    let n_records = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != n_records) {
        return Err(Error::validation(
            "columns",
            "all columns must have the same length",
        ));
    }
    let mut out = Vec::with_capacity(32 + 8 * n_records * columns.len());
    out.extend_from_slice(STORE_MAGIC);
    out.extend_from_slice(&(columns.len() as u64).to_le_bytes());
    out.extend_from_slice(&(n_records as u64).to_le_bytes());
    out.extend_from_slice(&sample_interval.to_le_bytes());
    for column in columns {
        for x in column {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    std::fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

/// Reads a store written by [`write_store`]: `(sample_interval, columns)`.
pub fn read_store(path: &Path) -> Result<(f64, Vec<Vec<f64>>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let bad = |why: &str| Error::Config(format!("{}: {why}", path.display()));
    if bytes.len() < 32 || &bytes[..8] != STORE_MAGIC {
        return Err(bad("not a trajectory store"));
    }
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[8 * i..8 * i + 8]).expect("8-byte slice");
    let n_columns = u64::from_le_bytes(word(1)) as usize;
    let n_records = u64::from_le_bytes(word(2)) as usize;
    let sample_interval = f64::from_le_bytes(word(3));
    let expected = n_columns
        .checked_mul(n_records)
        .and_then(|n| n.checked_add(4))
        .ok_or_else(|| bad("header sizes overflow"))?;
    if bytes.len() != 8 * expected {
        return Err(bad("length does not match header"));
    }
    let columns = (0..n_columns)
        .map(|c| {
            (0..n_records)
                .map(|r| f64::from_le_bytes(word(4 + c * n_records + r)))
                .collect()
        })
        .collect();
    Ok((sample_interval, columns))
}

const CHANNEL_THERMAL: u64 = 0;
const CHANNEL_OPTICAL: u64 = 1;
const CHANNEL_THERMAL_BRIDGE: u64 = 2;
const CHANNEL_OPTICAL_BRIDGE: u64 = 3;

fn stream(seed: u64, trajectory: usize, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4 * trajectory as u64 + channel);
    rng
}

/// Wiener increments in units of `√dt_fine`, bridged down from the base step.
struct Increments {
    coarse: ChaCha8Rng,
    bridge: ChaCha8Rng,
    levels: u32,
    buffer: Vec<f64>,
    next: usize,
}

impl Increments {
    fn new(coarse: ChaCha8Rng, bridge: ChaCha8Rng, levels: u32) -> Self {
        Increments {
            coarse,
            bridge,
            levels,
            buffer: vec![0.0; 1 << levels],
            next: 1 << levels,
        }
    }

    #[inline]
    fn sample(&mut self) -> f64 {
        if self.levels == 0 {
            return self.coarse.sample(StandardNormal);
        }
        if self.next == self.buffer.len() {
            self.refill();
        }
        let w = self.buffer[self.next];
        self.next += 1;
        w
    }

    fn refill(&mut self) {
        // increment over the base step is √(2^L) Z in fine units
        let n = self.buffer.len();
        let z: f64 = self.coarse.sample(StandardNormal);
        self.buffer[0] = (n as f64).sqrt() * z;
        let mut width = n;
        while width > 1 {
            let half = width / 2;
            for start in (0..n).step_by(width) {
                let w = self.buffer[start];
                let spread: f64 = self.bridge.sample(StandardNormal);
                let first = 0.5 * w + 0.5 * (width as f64).sqrt() * spread;
                self.buffer[start] = first;
                self.buffer[start + half] = w - first;
            }
            width = half;
        }
        self.next = 0;
    }
}

#[derive(Clone, Copy)]
struct State {
    q: f64,
    p: f64,
    a: Complex64,
}

struct Model {
    wm: f64,
    gm: f64,
    g: f64,
    half_gc: f64,
    gc: f64,
    omega: f64,
    adiabatic: bool,
}

impl Model {
    #[inline]
    fn slaved_intensity(&self, q: f64) -> f64 {
        let u = 4.0 * self.g * q * q;
        4.0 * self.omega * self.omega / (self.gc * self.gc + u * u)
    }

    #[inline]
    fn slaved_field(&self, q: f64) -> Complex64 {
        Complex64::new(0.0, -2.0 * self.omega) / Complex64::new(self.gc, 4.0 * self.g * q * q)
    }

    #[inline]
    fn drift(&self, s: &State) -> State {
        let intensity = if self.adiabatic {
            self.slaved_intensity(s.q)
        } else {
            s.a.norm_sqr()
        };
        let da = if self.adiabatic {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-self.half_gc, -2.0 * self.g * s.q * s.q) * s.a
                - Complex64::new(0.0, self.omega)
        };
        State {
            q: self.wm * s.p,
            p: -(self.wm + 4.0 * self.g * intensity) * s.q - self.gm * s.p,
            a: da,
        }
    }
}

/// Integrates `opts.n_traj` independent trajectories in parallel.
///
/// `T = 0` together with `optical_noise = false` gives a noiseless run.
pub fn integrate_langevin(
    params: &SystemParams,
    opts: &LangevinOptions,
) -> Result<TrajectoryEnsemble> {
    opts.validate(params)?;
    let records = (0..opts.n_traj)
        .into_par_iter()
        .map(|k| integrate_one(params, opts, k))
        .collect::<Result<Vec<_>>>()?;
    let substeps = 1u64 << opts.refine;
    Ok(TrajectoryEnsemble {
        seed: opts.seed,
        n_traj: opts.n_traj,
        dt: opts.dt / substeps as f64,
        n_steps: opts.n_steps * substeps,
        sample_interval: opts.dt * opts.record_every as f64,
        scheme: opts.scheme,
        adiabatic: opts.adiabatic,
        optical_noise: opts.optical_noise,
        params: *params,
        records,
    })
}

fn integrate_one(
    params: &SystemParams,
    opts: &LangevinOptions,
    trajectory: usize,
) -> Result<Vec<f64>> {
    let model = Model {
        wm: params.omega_m(),
        gm: params.gamma_m(),
        g: params.g(),
        half_gc: 0.5 * params.gamma_c(),
        gc: params.gamma_c(),
        omega: params.omega(),
        adiabatic: opts.adiabatic,
    };
    let steady = steady_state_on(params, opts.branch);
    let substeps = 1u64 << opts.refine;
    let dt = opts.dt / substeps as f64;
    let limit = 1e6 * steady.q_s2.sqrt() + 1e6;

    let diffusion = 2.0 * params.gamma_m() * K_B * params.temperature() / (HBAR * params.omega_m());
    let thermal_scale = (diffusion * dt).sqrt();
    // complex vacuum increment with E|dZ|² = dt, scaled by √γ_c
    let optical_scale = (0.5 * params.gamma_c() * dt).sqrt();
    let thermal_on = diffusion > 0.0;
    let optical_on = opts.optical_noise && !opts.adiabatic;

    let mut thermal = Increments::new(
        stream(opts.seed, trajectory, CHANNEL_THERMAL),
        stream(opts.seed, trajectory, CHANNEL_THERMAL_BRIDGE),
        opts.refine,
    );
    let mut optical_re = Increments::new(
        stream(opts.seed, trajectory, CHANNEL_OPTICAL),
        stream(opts.seed, trajectory, CHANNEL_OPTICAL_BRIDGE),
        opts.refine,
    );

    let q0 = opts.initial_q.unwrap_or(steady.q_s);
    let mut s = State {
        q: q0,
        p: opts.initial_p,
        a: model.slaved_field(q0),
    };

    let total = (opts.burn_in_steps + opts.n_steps) * substeps;
    let burn_in = opts.burn_in_steps * substeps;
    let every = opts.record_every * substeps;
    let mut records = Vec::with_capacity((opts.n_steps / opts.record_every) as usize);

    // burn-in is padded so that recording stays on the `every` grid
    let mut countdown = if burn_in.is_multiple_of(every) {
        every
    } else {
        burn_in % every
    };
    for step in 0..total {
        let dw = if thermal_on {
            thermal_scale * thermal.sample()
        } else {
            0.0
        };
        let dz = if optical_on {
            // real and imaginary parts share one bridged stream, drawn in pairs
            let re = optical_re.sample();
            let im = optical_re.sample();
            optical_scale * Complex64::new(re, im)
        } else {
            Complex64::new(0.0, 0.0)
        };

        let k1 = model.drift(&s);
        let euler = State {
            q: s.q + k1.q * dt,
            p: s.p + k1.p * dt + dw,
            a: s.a + k1.a * dt + dz,
        };
        s = match opts.scheme {
            Scheme::EulerMaruyama => euler,
            Scheme::StochasticHeun => {
                let k2 = model.drift(&euler);
                State {
                    q: s.q + 0.5 * (k1.q + k2.q) * dt,
                    p: s.p + 0.5 * (k1.p + k2.p) * dt + dw,
                    a: s.a + 0.5 * (k1.a + k2.a) * dt + dz,
                }
            }
        };

        if s.q.is_nan() || s.q.abs() > limit {
            return Err(Error::Unstable {
                trajectory,
                step,
                value: s.q.abs(),
                limit,
            });
        }
        countdown -= 1;
        if countdown == 0 {
            countdown = every;
            if step >= burn_in {
                records.push(s.q);
            }
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Drive;

    fn desk(drive: Drive, temperature: f64) -> SystemParams {
        let wm = std::f64::consts::TAU * 1e3;
        SystemParams::new(-1e-9 * wm, wm, wm / 100.0, 50.0 * wm, drive, temperature).unwrap()
    }

    #[test]
    fn store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.bin");
        let columns = vec![vec![1.0, -2.5, 3.0], vec![f64::MAX, 0.0, -0.0]];
        write_store(&path, 1.25e-4, &columns).unwrap();
        let (dt, back) = read_store(&path).unwrap();
        assert_eq!(dt, 1.25e-4);
        assert_eq!(back, columns);
        std::fs::write(&path, b"garbage").unwrap();
        assert!(read_store(&path).is_err());
    }

    #[test]
    fn bridge_preserves_the_coarse_path() {
        let coarse_sum = |levels: u32| {
            let mut inc = Increments::new(stream(3, 0, 0), stream(3, 0, 2), levels);
            let n = 1usize << levels;
            (0..4)
                .map(|_| (0..n).map(|_| inc.sample()).sum::<f64>() / (n as f64).sqrt())
                .collect::<Vec<f64>>()
        };
        let base = coarse_sum(0);
        for levels in 1..4 {
            for (a, b) in base.iter().zip(coarse_sum(levels)) {
                assert!((a - b).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn rejects_steps_that_do_not_resolve_the_cavity() {
        let p = desk(Drive::OFF, 1.0);
        let dt = 0.05 / p.gamma_c();
        assert!(integrate_langevin(&p, &LangevinOptions::new(1, 1, 1.01 * dt, 10)).is_err());
        assert!(integrate_langevin(&p, &LangevinOptions::new(1, 1, dt, 10)).is_ok());
    }

    #[test]
    fn rejects_quantum_temperatures_and_critical_drives() {
        let p = desk(Drive::OFF, 1e-12);
        let dt = 0.05 / p.gamma_c();
        assert!(matches!(
            integrate_langevin(&p, &LangevinOptions::new(1, 1, dt, 10)),
            Err(Error::Domain(_))
        ));
        let p = desk(Drive::CriticalOffset(0.0), 1.0);
        assert!(matches!(
            integrate_langevin(&p, &LangevinOptions::new(1, 1, dt, 10)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn noiseless_run_relaxes_to_the_branch() {
        let p = desk(Drive::CriticalExcess(0.01), 0.0);
        let qs = steady_state_on(&p, Branch::Positive).q_s;
        let dt = 0.05 / p.gamma_c();
        let mut opts = LangevinOptions::new(0, 1, dt, 4_000_000);
        opts.initial_q = Some(1.05 * qs);
        opts.record_every = 1_000_000;
        let ens = integrate_langevin(&p, &opts).unwrap();
        let last = *ens.records()[0].last().unwrap();
        assert!((last / qs - 1.0).abs() < 1e-3, "{last} vs {qs}");
    }

    #[test]
    fn identical_seeds_give_identical_trajectories() {
        let p = desk(Drive::CriticalExcess(0.01), 1e-3);
        let dt = 0.05 / p.gamma_c();
        let mut opts = LangevinOptions::new(42, 3, dt, 20_000);
        opts.record_every = 100;
        let a = integrate_langevin(&p, &opts).unwrap();
        let b = integrate_langevin(&p, &opts).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records()[0], a.records()[1]);
        opts.seed = 43;
        assert_ne!(
            integrate_langevin(&p, &opts).unwrap().records()[0],
            a.records()[0]
        );
    }

    #[test]
    fn runaway_trajectories_are_reported() {
        let p = desk(Drive::CriticalExcess(0.01), 0.0);
        let qs = steady_state_on(&p, Branch::Positive).q_s;
        let mut opts = LangevinOptions::new(0, 2, 0.05 / p.gamma_c(), 10);
        opts.initial_q = Some(2e6 * qs);
        match integrate_langevin(&p, &opts) {
            Err(Error::Unstable {
                step: 0,
                value,
                limit,
                ..
            }) => assert!(value > limit),
            other => panic!("expected an unstable trajectory, got {other:?}"),
        }
    }
}
