//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Tolerances are fixed here and are not tuned per run.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qom_sense::grid::linspace;
use qom_sense::oracle::{
    build_linearized, run_monte_carlo, spectrum_by_linear_solve, MonteCarloConfig,
};
use qom_sense::sensitivity::{
    sensitivity_0, sensitivity_b, sensitivity_numeric, sensitivity_s, ThermalLimit,
};
use qom_sense::spectral::peak_chi_norm_sqr;
use qom_sense::steady_state::fixed_point_residuals;
use qom_sense::{
    classify_regime, eigenfrequencies, exceptional_points, psd, steady_state, ChiMode, Drive,
    Regime, SystemParams, HBAR, K_B,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn reference() -> SystemParams {
    SystemParams::reference()
}

fn at(drive: Drive) -> SystemParams {
    reference().with_drive(drive).unwrap()
}

fn xi0_high_t() -> Outcome {
    let xi0 = sensitivity_0(&reference(), 300.0, ThermalLimit::HighT).unwrap();
    outcome(
        rel(xi0, 0.876) <= 0.005,
        format!("xi_0 = {xi0:.6} s/K (target 0.876 ± 0.5%)"),
    )
}

fn cp_enhanced_sensitivity() -> Outcome {
    let p = reference();
    let eps = exceptional_points(&p).unwrap();
    let ep2 = at(Drive::CriticalExcess(eps.excess_ep2));
    let xi = sensitivity_s(&ep2, &steady_state(&ep2)).unwrap();
    let analytic = 32.0 * K_B * p.omega_m() / (HBAR * p.gamma_m().powi(3));
    outcome(
        rel(xi, 1.4e9) <= 0.05 && rel(xi, analytic) <= 1e-6,
        format!("xi_S(EP2) = {xi:.6e} s/K (target 1.4e9 ± 5%, analytic {analytic:.6e})"),
    )
}

fn susceptibility_enhancement() -> Outcome {
    let off = reference();
    let gm = off.gamma_m();
    let near = at(Drive::CriticalOffset(0.01 * gm));
    let (_, peak_off) = peak_chi_norm_sqr(
        &off,
        &steady_state(&off),
        &linspace(0.0, 2.0 * off.omega_m(), 4001),
        ChiMode::Exact,
    )
    .unwrap();
    let (_, peak_near) = peak_chi_norm_sqr(
        &near,
        &steady_state(&near),
        &linspace(0.0, 2.5 * gm, 2001),
        ChiMode::Exact,
    )
    .unwrap();
    let orders = (peak_near / peak_off).log10();
    outcome(
        orders >= 10.5,
        format!("log10 ratio = {orders:.4} (target >= 10.5)"),
    )
}

fn bifurcation() -> Outcome {
    let p = reference();
    let pinned = p.omega_m() / (4.0 * p.g().abs());
    let mut residual: f64 = 0.0;
    let mut pin: f64 = 0.0;
    let mut below_zero = true;
    let mut above: Vec<f64> = Vec::new();
    for u in linspace(0.0, 2.0, 200) {
        let q = at(Drive::CriticalExcess(u * u - 1.0));
        let s = steady_state(&q);
        if u > 0.0 {
            residual = residual.max(fixed_point_residuals(&q, &s).max());
        }
        if u <= 1.0 {
            below_zero &= s.q_s2 == 0.0;
        } else {
            above.push(s.q_s2);
            pin = pin.max(rel(s.intensity(), pinned));
        }
    }
    let increasing = above.windows(2).all(|w| w[1] > w[0]) && above[0] > 0.0;
    // continuity at threshold: Q_s² → 0 as Ω → Ω_c⁺
    let onset = steady_state(&at(Drive::CriticalExcess(1e-8))).q_s2 / above[above.len() - 1];
    outcome(
        below_zero && increasing && onset < 1e-3 && residual < 1e-10 && pin < 1e-12,
        format!(
            "Q_s^2 = 0 below: {below_zero}, increasing above: {increasing}, onset ratio {onset:.1e}, \
             max residual {residual:.1e} (< 1e-10), |alpha|^2 pin {pin:.1e} (< 1e-12)"
        ),
    )
}

fn ep_degeneracy() -> Outcome {
    let p = reference();
    let gm = p.gamma_m();
    let eps = exceptional_points(&p).unwrap();
    let eig = |excess: f64| {
        let q = at(Drive::CriticalExcess(excess));
        eigenfrequencies(&q, &steady_state(&q))
    };
    let split = [eps.excess_ep1, eps.excess_ep2]
        .map(|x| {
            let e = eig(x);
            (e.plus - e.minus).norm() / gm
        })
        .into_iter()
        .fold(0.0, f64::max);
    let im_cp = eig(0.0).plus.im.abs() / gm;
    let window = linspace(eps.excess_ep1, eps.excess_ep2, 203);
    let re_max = window[1..window.len() - 1]
        .iter()
        .map(|&x| {
            let e = eig(x);
            e.plus.re.abs().max(e.minus.re.abs())
        })
        .fold(0.0, f64::max);
    outcome(
        split < 1e-6 && im_cp < 1e-8 && re_max == 0.0,
        format!("EP split {split:.2e} gamma_m (< 1e-6), |Im w+| at CP {im_cp:.2e} (< 1e-8), max |Re| in window {re_max:.1e}"),
    )
}

fn linear_solve_equivalence() -> Outcome {
    let p = reference();
    let (gm, wm) = (p.gamma_m(), p.omega_m());
    let eps = exceptional_points(&p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    let mut counts = [0usize; 3];
    for i in 0..64 {
        let drive = match i % 3 {
            0 => Drive::CriticalExcess(eps.excess_ep1 * rng.random_range(1.05f64..1e4)),
            1 => Drive::CriticalExcess(rng.random_range(eps.excess_ep1..eps.excess_ep2)),
            _ => Drive::CriticalExcess(eps.excess_ep2 * rng.random_range(1.05f64..1e3)),
        };
        let q = at(drive);
        let omega = if rng.random_bool(0.5) {
            gm * 10f64.powf(rng.random_range(-3.0..1.0))
        } else {
            wm * rng.random_range(0.0..1.5)
        };
        let t = 10f64.powf(rng.random_range(-6.0..3.0));
        let s = steady_state(&q);
        let a = psd(&q, &s, omega, t, ChiMode::Exact).unwrap();
        let b = spectrum_by_linear_solve(&build_linearized(&q, &s), omega, t);
        worst = worst.max(rel(a, b));
        counts[match classify_regime(&q).unwrap() {
            Regime::AntiPTBrokenLower => 0,
            Regime::AntiPTSymmetric => 1,
            Regime::AntiPTBrokenUpper => 2,
        }] += 1;
    }
    outcome(
        worst < 1e-6 && counts.iter().all(|&c| c > 0),
        format!("64 points, worst rel diff {worst:.2e} (< 1e-6), per regime {counts:?}"),
    )
}

fn monte_carlo() -> Outcome {
    let cfg = MonteCarloConfig::default();
    let report = run_monte_carlo(&cfg).unwrap();
    // determinism on a shortened run
    let short = MonteCarloConfig {
        n_traj: 2,
        record_seconds: 1.1,
        burn_in_seconds: 0.1,
        n_per_seg: 2048,
        ..cfg.clone()
    };
    let a = run_monte_carlo(&short).unwrap();
    let b = run_monte_carlo(&short).unwrap();
    let deterministic = a == b;
    outcome(
        report.fraction_within >= 0.95 && report.warnings.is_empty() && deterministic,
        format!(
            "{:.4} of {} bins within 3 SE (>= 0.95), seed-deterministic: {deterministic}",
            report.fraction_within,
            report.within.len()
        ),
    )
}

fn linearity() -> Outcome {
    let q = at(Drive::CriticalOffset(0.01 * reference().gamma_m()));
    let s = steady_state(&q);
    let xi = sensitivity_s(&q, &s).unwrap();
    let temps = linspace(0.01, 300.0, 61);
    let values: Vec<f64> = temps
        .iter()
        .map(|&t| psd(&q, &s, 0.0, t, ChiMode::Exact).unwrap())
        .collect();
    let n = temps.len() as f64;
    let mt = temps.iter().sum::<f64>() / n;
    let ms = values.iter().sum::<f64>() / n;
    let sxy: f64 = temps
        .iter()
        .zip(&values)
        .map(|(t, v)| (t - mt) * (v - ms))
        .sum();
    let sxx: f64 = temps.iter().map(|t| (t - mt).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ms - slope * mt;
    let affine = temps
        .iter()
        .zip(&values)
        .map(|(t, v)| rel(intercept + slope * t, *v))
        .fold(0.0, f64::max);
    outcome(
        rel(slope, xi) < 1e-6 && affine < 1e-6,
        format!(
            "fitted slope / xi_S - 1 = {:.1e} (< 1e-6), max affine deviation {affine:.1e}",
            slope / xi - 1.0
        ),
    )
}

fn low_t_flatness() -> Outcome {
    let t = 1e-6;
    let gm = reference().gamma_m();
    let sym = at(Drive::CriticalOffset(0.01 * gm));
    let s = steady_state(&sym);
    let xi_s = sensitivity_s(&sym, &s).unwrap();
    let numeric = sensitivity_numeric(&sym, &s, 0.0, t).unwrap();
    let broken = at(Drive::CriticalOffset(gm));
    let xi_b = sensitivity_b(&broken, &steady_state(&broken), t).unwrap();
    let xi_0 = sensitivity_0(&reference(), t, ThermalLimit::Full).unwrap();
    outcome(
        rel(numeric, xi_s) < 1e-4 && xi_s / xi_b > 1e3 && xi_s / xi_0 > 1e3,
        format!(
            "numeric/xi_S - 1 = {:.1e} (< 1e-4), xi_S/xi_B = {:.3e}, xi_S/xi_0 = {:.3e} (> 1e3)",
            numeric / xi_s - 1.0,
            xi_s / xi_b,
            xi_s / xi_0
        ),
    )
}

const FIGURE_HEADERS: [(&str, &str); 11] = [
    ("fig1a.csv", "omega_drive_rad_s,omega_minus_omega_c_over_gamma_m,omega_drive_over_omega_c,q_s2,above_threshold"),
    ("fig1a_potential.csv", "omega_drive_over_omega_c,q,potential_rad_s"),
    (
        "fig1b.csv",
        "omega_drive_offset_over_gamma_m,re_omega_plus,re_omega_minus,im_omega_plus,im_omega_minus,\
         re_omega_plus_rad_s,re_omega_minus_rad_s,im_omega_plus_rad_s,im_omega_minus_rad_s,regime",
    ),
    ("fig2a.csv", "omega_over_omega_m,omega_over_gamma_m,omega_drive_offset_over_gamma_m,log10_abs_chi_sq"),
    ("fig2b.csv", "omega_over_omega_m,omega_over_gamma_m,omega_rad_s,omega_drive_offset_over_gamma_m,log10_abs_chi_sq"),
    ("fig2c.csv", "omega_over_omega_m,omega_over_gamma_m,omega_rad_s,omega_drive_offset_over_gamma_m,log10_abs_chi_sq"),
    ("fig3a.csv", "omega_over_omega_m,omega_rad_s,s_qq_seconds,temperature_k,omega_drive_offset_over_gamma_m"),
    ("fig3b.csv", "temperature_k,s_qq_zero_seconds,omega_drive_offset_over_gamma_m"),
    ("fig3c.csv", "temperature_k,s_qq_zero_seconds,omega_drive_offset_over_gamma_m"),
    ("fig4a.csv", "omega_drive_offset_over_gamma_m,xi_s_per_k,xi0_s_per_k,xi_stitched_s_per_k,regime"),
    ("fig4b.csv", "temperature_k,xi_s,xi_b,xi0,regime_xi_s,regime_xi_b,regime_xi0"),
];

fn header_of(path: &Path) -> Option<String> {
    let text = std::fs::read_to_string(path).ok()?;
    text.lines()
        .find(|l| !l.starts_with('#'))
        .map(str::to_string)
}

fn figure_completeness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut failures = Vec::new();
    for id in ["1a", "1b", "2a", "2b", "2c", "3a", "3b", "3c", "4a", "4b"] {
        let status = Command::new(env!("CARGO_BIN_EXE_qom-sense"))
            .args(["reproduce-figure", id, "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        if !status.success() {
            failures.push(format!("{id}: exit {status}"));
        }
        if !dir.path().join(format!("fig{id}.manifest.json")).exists() {
            failures.push(format!("{id}: no manifest"));
        }
    }
    for (file, golden) in FIGURE_HEADERS {
        if header_of(&dir.path().join(file)).as_deref() != Some(golden) {
            failures.push(format!("{file}: header mismatch"));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "10 figures, 11 tables, golden headers match".to_string()
        } else {
            failures.join("; ")
        },
    )
}

type Criterion = fn() -> Outcome;

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("xi0 high-T reproduction", xi0_high_t),
        ("CP-enhanced sensitivity at EP2", cp_enhanced_sensitivity),
        (
            "eleven-order susceptibility enhancement",
            susceptibility_enhancement,
        ),
        ("bifurcation structure", bifurcation),
        ("EP degeneracy and CP", ep_degeneracy),
        ("linear-solve oracle equivalence", linear_solve_equivalence),
        ("Monte Carlo oracle equivalence", monte_carlo),
        ("linearity of the sensing signal", linearity),
        ("low-temperature flatness", low_t_flatness),
        ("figure data completeness", figure_completeness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| outcome(false, "panicked".to_string()));
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} [{:>2}] {name}: {} ({:.2} s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
