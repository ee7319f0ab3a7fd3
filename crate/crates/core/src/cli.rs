//! `qom-sense` command-line front end.
//!
//! Every command resolves a parameter set (file, then `--set` overrides),
//! produces one or more tables and writes them with a manifest. Without
//! `--out` tables go to stdout and the manifest to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::figures::{figure_data, FigureId, OutputFormat};
use crate::grid::{linspace, positive_frequency_grid, DEFAULT_GRID_POINTS};
use crate::model::{ExperimentParams, SystemParams};
use crate::noise::psd_components;
use crate::sensitivity::{sensitivity_report, sensitivity_sweep, OmegaPolicy};
use crate::spectral::{
    classify_regime, eigenfrequencies, exceptional_points, susceptibility, ChiMode,
};
use crate::steady_state::{fixed_point_residuals, steady_state};
use crate::table::{float_json, SweepResult, TOOL_VERSION};
use crate::verify::{verify, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "qom-sense",
    version,
    about = "Quadratic optomechanical thermometry simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Parameter file (TOML, or JSON by extension); defaults to the reference set.
    #[arg(long, global = true, value_name = "FILE")]
    pub params: Option<PathBuf>,
    /// Parameter override applied after the file, e.g. `--set temperature_k=4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory; tables go to stdout when omitted.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChiModeArg {
    Exact,
    Factored,
}

impl From<ChiModeArg> for ChiMode {
    fn from(m: ChiModeArg) -> Self {
        match m {
            ChiModeArg::Exact => ChiMode::Exact,
            ChiModeArg::Factored => ChiMode::Factored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    AtZero,
    AtOmegaEff,
}

impl From<PolicyArg> for OmegaPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::AtZero => OmegaPolicy::AtZero,
            PolicyArg::AtOmegaEff => OmegaPolicy::AtOmegaEff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Mean-field steady state and fixed-point residuals.
    Steady,
    /// Eigenfrequencies, regime and exceptional points.
    Eigen,
    /// Mechanical susceptibility over a frequency grid.
    Chi {
        #[arg(long, value_enum, default_value_t = ChiModeArg::Exact)]
        chi_mode: ChiModeArg,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        points: usize,
    },
    /// Position PSD and its noise components for ω ≥ 0.
    Psd {
        #[arg(long, value_enum, default_value_t = ChiModeArg::Exact)]
        chi_mode: ChiModeArg,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        points: usize,
    },
    /// Temperature sensitivity at the configured point, or over a sweep.
    Sensitivity {
        #[arg(long, value_enum, default_value_t = PolicyArg::AtOmegaEff)]
        policy: PolicyArg,
        /// Drive sweep `(Ω - Ω_c)/γ_m` from LO to HI in N points.
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "N"], allow_negative_numbers = true)]
        offset_range: Option<Vec<f64>>,
        /// Temperatures in K for the sweep (comma separated); defaults to the file value.
        #[arg(long, value_delimiter = ',')]
        temperatures: Vec<f64>,
    },
    /// Run the self-checks and write a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
    },
    /// Regenerate the data behind one figure panel.
    ReproduceFigure {
        /// One of 1a 1b 2a 2b 2c 3a 3b 3c 4a 4b.
        id: FigureId,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Eigen => "eigen",
            Command::Chi { .. } => "chi",
            Command::Psd { .. } => "psd",
            Command::Sensitivity { .. } => "sensitivity",
            Command::Verify { .. } => "verify",
            Command::ReproduceFigure { .. } => "reproduce-figure",
        }
    }
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Degenerate(_) => EXIT_DEGENERATE,
        _ => EXIT_FAILURE,
    }
}

/// Loads the parameter file (or the reference set) and applies overrides.
pub fn resolve_params(common: &CommonArgs) -> Result<ExperimentParams> {
    let mut exp = match &common.params {
        Some(path) => ExperimentParams::load(path)?,
        None => ExperimentParams::reference(),
    };
    for item in &common.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{item}` is not KEY=VALUE")))?;
        exp.apply_override(key, value)?;
    }
    Ok(exp)
}

/// What a command produced.
struct Outcome {
    tables: Vec<SweepResult>,
    /// Extra JSON documents written as `<name>.json`.
    documents: Vec<(String, Value)>,
    exit: i32,
    /// Lines echoed to stderr.
    messages: Vec<String>,
}

impl Outcome {
    fn tables(tables: Vec<SweepResult>) -> Self {
        Outcome {
            tables,
            documents: Vec::new(),
            exit: EXIT_OK,
            messages: Vec::new(),
        }
    }
}

fn table(name: &str, units: &str, exp: &ExperimentParams) -> SweepResult {
    SweepResult::new(name, SCHEMA_VERSION, units).with_params(exp.clone())
}

fn offset_of(p: &SystemParams) -> f64 {
    p.drive_offset_over_gamma_m().unwrap_or(f64::NAN)
}

fn cmd_steady(exp: &ExperimentParams, p: &SystemParams) -> Result<Outcome> {
    let s = steady_state(p);
    let r = fixed_point_residuals(p, &s);
    let mut t = table(
        "steady",
        "omega_drive_rad_s rad/s; q_s, p_s, q_s2 dimensionless; alpha_* sqrt(photons); stiffness_rad_s rad/s",
        exp,
    );
    t.push_float("omega_drive_rad_s", vec![p.omega()])?;
    t.push_float("omega_drive_offset_over_gamma_m", vec![offset_of(p)])?;
    t.push_float("q_s2", vec![s.q_s2])?;
    t.push_float("q_s", vec![s.q_s])?;
    t.push_float("p_s", vec![s.p_s])?;
    t.push_float("alpha_re", vec![s.alpha.re])?;
    t.push_float("alpha_im", vec![s.alpha.im])?;
    t.push_float("intensity", vec![s.intensity()])?;
    t.push_bool("above_threshold", vec![s.above_threshold])?;
    t.push_float("stiffness_rad_s", vec![s.stiffness])?;
    t.push_float("max_residual", vec![r.max()])?;
    Ok(Outcome::tables(vec![t]))
}

fn cmd_eigen(exp: &ExperimentParams, p: &SystemParams) -> Result<Outcome> {
    let e = eigenfrequencies(p, &steady_state(p));
    let gm = p.gamma_m();
    let mut t = table(
        "eigen",
        "*_rad_s rad/s; re_/im_omega_* over gamma_m; omega_drive_offset_over_gamma_m (Omega-Omega_c)/gamma_m",
        exp,
    );
    t.push_float("omega_drive_rad_s", vec![p.omega()])?;
    t.push_float("omega_drive_offset_over_gamma_m", vec![offset_of(p)])?;
    t.push_float("re_omega_plus", vec![e.plus.re / gm])?;
    t.push_float("im_omega_plus", vec![e.plus.im / gm])?;
    t.push_float("re_omega_minus", vec![e.minus.re / gm])?;
    t.push_float("im_omega_minus", vec![e.minus.im / gm])?;
    t.push_float("re_omega_plus_rad_s", vec![e.plus.re])?;
    t.push_float("im_omega_plus_rad_s", vec![e.plus.im])?;
    t.push_float("re_omega_minus_rad_s", vec![e.minus.re])?;
    t.push_float("im_omega_minus_rad_s", vec![e.minus.im])?;
    let (regime, cp, ep1, ep2) = match exceptional_points(p) {
        Ok(eps) => (
            classify_regime(p)?.label().to_string(),
            p.critical_drive()?,
            eps.omega_ep1,
            eps.omega_ep2,
        ),
        Err(_) => ("none".to_string(), f64::NAN, f64::NAN, f64::NAN),
    };
    t.push_text("regime", vec![regime])?;
    t.push_float("omega_c_rad_s", vec![cp])?;
    t.push_float("omega_ep1_rad_s", vec![ep1])?;
    t.push_float("omega_ep2_rad_s", vec![ep2])?;
    Ok(Outcome::tables(vec![t]))
}

fn cmd_chi(
    exp: &ExperimentParams,
    p: &SystemParams,
    mode: ChiMode,
    points: usize,
) -> Result<Outcome> {
    let s = steady_state(p);
    let grid = positive_frequency_grid(p.omega_m(), points);
    let chi = grid
        .iter()
        .map(|&w| susceptibility(p, &s, w, mode))
        .collect::<Result<Vec<_>>>()?;
    let norm: Vec<f64> = chi
        .iter()
        .map(|c| {
            if c.re.is_infinite() {
                f64::INFINITY
            } else {
                c.norm_sqr()
            }
        })
        .collect();
    let mut t = table(
        "chi",
        "omega_rad_s rad/s; omega_over_omega_m omega/omega_m; chi_re, chi_im s; abs_chi_sq s^2",
        exp,
    );
    t.push_float(
        "omega_over_omega_m",
        grid.iter().map(|w| w / p.omega_m()).collect(),
    )?;
    t.push_float("omega_rad_s", grid)?;
    t.push_float("chi_re", chi.iter().map(|c| c.re).collect())?;
    t.push_float("chi_im", chi.iter().map(|c| c.im).collect())?;
    t.push_float("log10_abs_chi_sq", norm.iter().map(|v| v.log10()).collect())?;
    t.push_float("abs_chi_sq", norm)?;
    Ok(Outcome::tables(vec![t]))
}

fn cmd_psd(
    exp: &ExperimentParams,
    p: &SystemParams,
    mode: ChiMode,
    points: usize,
) -> Result<Outcome> {
    let s = steady_state(p);
    let grid = positive_frequency_grid(p.omega_m(), points);
    let parts = grid
        .iter()
        .map(|&w| psd_components(p, &s, w, p.temperature(), mode))
        .collect::<Result<Vec<_>>>()?;
    let mut t = table(
        "psd",
        "omega_rad_s rad/s; abs_chi_sq s^2; s_thermal, s_radiation 1/s; s_qq_seconds s (two-sided)",
        exp,
    );
    t.push_float(
        "omega_over_omega_m",
        grid.iter().map(|w| w / p.omega_m()).collect(),
    )?;
    t.push_float("omega_rad_s", grid)?;
    t.push_float("abs_chi_sq", parts.iter().map(|c| c.chi_norm_sqr).collect())?;
    t.push_float("s_thermal", parts.iter().map(|c| c.thermal).collect())?;
    t.push_float("s_radiation", parts.iter().map(|c| c.radiation).collect())?;
    t.push_float("s_qq_seconds", parts.iter().map(|c| c.total).collect())?;
    Ok(Outcome::tables(vec![t]))
}

fn cmd_sensitivity(
    exp: &ExperimentParams,
    p: &SystemParams,
    policy: OmegaPolicy,
    offset_range: Option<&[f64]>,
    temperatures: &[f64],
) -> Result<Outcome> {
    if let Some(range) = offset_range {
        let n = range[2];
        if !(n >= 1.0 && n.fract() == 0.0) {
            return Err(Error::Config(format!(
                "--offset-range N must be a positive integer (got {n})"
            )));
        }
        let gm = p.gamma_m();
        let drives: Vec<_> = linspace(range[0], range[1], n as usize)
            .into_iter()
            .map(|x| crate::model::Drive::CriticalOffset(x * gm))
            .collect();
        let temps = if temperatures.is_empty() {
            vec![p.temperature()]
        } else {
            temperatures.to_vec()
        };
        let t = sensitivity_sweep(p, &drives, &temps, policy)?.with_params(exp.clone());
        return Ok(Outcome::tables(vec![t]));
    }
    if p.drive_excess() == Some(0.0) {
        return Err(Error::Degenerate(
            "drive is exactly at the critical point, where S_qq(0) and xi_S diverge".into(),
        ));
    }
    let r = sensitivity_report(p, p.temperature(), policy)?;
    let mut t = table(
        "sensitivity",
        "temperature_k K; omega_eval_rad_s rad/s; xi_* s/K",
        exp,
    );
    t.push_float("omega_drive_rad_s", vec![p.omega()])?;
    t.push_float("omega_drive_offset_over_gamma_m", vec![offset_of(p)])?;
    t.push_float("temperature_k", vec![p.temperature()])?;
    t.push_text(
        "regime",
        vec![r.regime.map_or("none", |g| g.label()).to_string()],
    )?;
    t.push_float("omega_eval_rad_s", vec![r.omega_eval])?;
    t.push_float("xi_numeric_s_per_k", vec![r.xi_numeric])?;
    t.push_float(
        "xi_closed_s_per_k",
        vec![r.xi_closed_form.unwrap_or(f64::NAN)],
    )?;
    let label = serde_json::to_value(r.limit_label)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string));
    t.push_text("limit_label", vec![label.unwrap_or_default()])?;
    Ok(Outcome::tables(vec![t]))
}

fn cmd_verify(exp: &ExperimentParams, level: LevelArg, seed: u64) -> Outcome {
    let level = match level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let report = verify(exp, level, seed);
    let messages = report.checks.iter().map(ToString::to_string).collect();
    let value = serde_json::to_value(&report).expect("report serializes");
    Outcome {
        tables: Vec::new(),
        documents: vec![("verify_report".to_string(), value)],
        exit: if report.passed { EXIT_OK } else { EXIT_FAILURE },
        messages,
    }
}

fn execute(cli: &Cli, exp: &ExperimentParams, seed: u64) -> Result<Outcome> {
    let params = || exp.to_params();
    match &cli.command {
        Command::Steady => cmd_steady(exp, &params()?),
        Command::Eigen => cmd_eigen(exp, &params()?),
        Command::Chi { chi_mode, points } => cmd_chi(exp, &params()?, (*chi_mode).into(), *points),
        Command::Psd { chi_mode, points } => cmd_psd(exp, &params()?, (*chi_mode).into(), *points),
        Command::Sensitivity {
            policy,
            offset_range,
            temperatures,
        } => cmd_sensitivity(
            exp,
            &params()?,
            (*policy).into(),
            offset_range.as_deref(),
            temperatures,
        ),
        Command::Verify { level } => Ok(cmd_verify(exp, *level, seed)),
        Command::ReproduceFigure { id } => {
            let out = figure_data(*id, exp)?;
            let mut outcome = Outcome::tables(out.tables);
            if let Some(summary) = out.summary {
                outcome
                    .documents
                    .push((format!("fig{id}_summary"), summary));
            }
            Ok(outcome)
        }
    }
}

fn to_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON value serializes") + "\n"
}

fn write_outputs(outcome: &Outcome, dir: &Path, format: OutputFormat) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for t in &outcome.tables {
        let name = format!("{}.{}", t.name, format.extension());
        let path = dir.join(&name);
        match format {
            OutputFormat::Csv => t.write_csv(&path)?,
            OutputFormat::Json => t.write_json(&path)?,
        }
        names.push(name);
    }
    for (stem, doc) in &outcome.documents {
        let name = format!("{stem}.json");
        std::fs::write(dir.join(&name), to_text(doc))?;
        names.push(name);
    }
    Ok(names)
}

fn print_outputs(outcome: &Outcome, format: OutputFormat) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    for t in &outcome.tables {
        match format {
            OutputFormat::Csv => stdout.write_all(t.to_csv_string().as_bytes())?,
            OutputFormat::Json => stdout.write_all(to_text(&t.to_json_value()).as_bytes())?,
        }
    }
    for (_, doc) in &outcome.documents {
        stdout.write_all(to_text(doc).as_bytes())?;
    }
    Ok(())
}

fn manifest(
    cli: &Cli,
    args: &[String],
    exp: &ExperimentParams,
    seed: u64,
    wall: f64,
    outputs: &[String],
) -> Value {
    json!({
        "tool_version": TOOL_VERSION,
        "command": cli.command.name(),
        "arguments": args,
        "params_file": cli.common.params.as_ref().map(|p| p.display().to_string()),
        "overrides": cli.common.overrides,
        "resolved_params": exp,
        "format": match cli.common.format { Format::Csv => "csv", Format::Json => "json" },
        "seed": seed,
        "jobs": cli.common.jobs,
        "schema_version": SCHEMA_VERSION,
        "outputs": outputs,
        "wall_time_seconds": float_json(wall),
    })
}

/// Default seed when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 42;

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let echo: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match run_parsed(&cli, &echo) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run_parsed(cli: &Cli, echo: &[String]) -> Result<i32> {
    let start = Instant::now();
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let seed = cli.common.seed.unwrap_or(DEFAULT_SEED);
    let exp = resolve_params(&cli.common)?;
    let outcome = execute(cli, &exp, seed)?;
    for line in &outcome.messages {
        eprintln!("{line}");
    }
    let format = cli.common.format.into();
    match &cli.common.out {
        Some(dir) => {
            let outputs = write_outputs(&outcome, dir, format)?;
            let wall = start.elapsed().as_secs_f64();
            let m = manifest(cli, echo, &exp, seed, wall, &outputs);
            let stem = match &cli.command {
                Command::ReproduceFigure { id } => format!("fig{id}"),
                other => other.name().to_string(),
            };
            std::fs::write(dir.join(format!("{stem}.manifest.json")), to_text(&m))?;
        }
        None => {
            print_outputs(&outcome, format)?;
            let wall = start.elapsed().as_secs_f64();
            eprint!("{}", to_text(&manifest(cli, echo, &exp, seed, wall, &[])));
        }
    }
    Ok(outcome.exit)
}
