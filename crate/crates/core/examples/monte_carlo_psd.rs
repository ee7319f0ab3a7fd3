//! Stochastic Langevin trajectories at desk scale compared with the
//! analytic thermal spectrum.
//!
//! ```bash
//! cargo run --release --example monte_carlo_psd [-- n_traj seed]
//! ```

use qom_sense::oracle::{run_monte_carlo, MonteCarloConfig};

fn main() -> qom_sense::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = MonteCarloConfig::default();
    if let Some(n) = args.next().and_then(|a| a.parse().ok()) {
        cfg.n_traj = n;
    }
    if let Some(seed) = args.next().and_then(|a| a.parse().ok()) {
        cfg.seed = seed;
    }

    let start = std::time::Instant::now();
    let report = run_monte_carlo(&cfg)?;
    println!(
        "{} trajectories, {} bins: {:.2}% within 3 SE ({:.1} s)",
        cfg.n_traj,
        report.within.len(),
        100.0 * report.fraction_within,
        start.elapsed().as_secs_f64()
    );
    for w in &report.warnings {
        println!("warning: {w}");
    }

    let step = (report.omega.len() / 12).max(1);
    println!(
        "\n{:>12} {:>14} {:>14} {:>12}",
        "omega", "estimate", "analytic", "SE"
    );
    for i in (0..report.omega.len()).step_by(step) {
        println!(
            "{:>12.4e} {:>14.6e} {:>14.6e} {:>12.3e}",
            report.omega[i], report.estimate[i], report.analytic[i], report.std_error[i]
        );
    }
    Ok(())
}
