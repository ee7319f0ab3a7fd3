//! Temperature sensitivity `ξ = dS_qq/dT` in each phase.
//!
//! Prints the undriven baseline, the value at EP2, the temperature
//! dependence of the three closed forms and writes a drive × temperature
//! sweep to CSV.
//!
//! ```bash
//! cargo run --example temperature_sensitivity [-- out.csv]
//! ```

use qom_sense::grid::offset_drives;
use qom_sense::sensitivity::{
    sensitivity_0, sensitivity_b, sensitivity_s, sensitivity_sweep, OmegaPolicy, ThermalLimit,
};
use qom_sense::{exceptional_points, steady_state, Drive, SystemParams};

fn main() -> qom_sense::Result<()> {
    let base = SystemParams::reference();
    let gm = base.gamma_m();

    let xi0 = sensitivity_0(&base, 300.0, ThermalLimit::HighT)?;
    let eps = exceptional_points(&base)?;
    let ep2 = base.with_drive(Drive::CriticalExcess(eps.excess_ep2))?;
    let xi_ep2 = sensitivity_s(&ep2, &steady_state(&ep2))?;
    println!("xi_0 (high T)  = {xi0:.4} s/K");
    println!(
        "xi_S at EP2    = {xi_ep2:.4e} s/K ({:.2e} x xi_0)",
        xi_ep2 / xi0
    );

    let sym = base.with_drive(Drive::CriticalOffset(0.01 * gm))?;
    let broken = base.with_drive(Drive::CriticalOffset(gm))?;
    let xi_s = sensitivity_s(&sym, &steady_state(&sym))?;
    let bs = steady_state(&broken);
    println!(
        "\n{:>10} {:>12} {:>12} {:>12}",
        "T (K)", "xi_S", "xi_B", "xi_0"
    );
    for t in [1e-8, 1e-7, 1e-6, 1e-4, 1e-2, 1.0, 300.0] {
        println!(
            "{t:>10.0e} {xi_s:>12.4e} {:>12.4e} {:>12.4e}",
            sensitivity_b(&broken, &bs, t)?,
            sensitivity_0(&base, t, ThermalLimit::Full)?
        );
    }

    let drives = offset_drives(&[-1.0, -0.2, 0.01, 0.05, 0.5, 1.0], gm);
    let sweep = sensitivity_sweep(&base, &drives, &[1e-3, 300.0], OmegaPolicy::AtOmegaEff)?;
    let path = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("sensitivity_sweep.csv"));
    sweep.write_csv(&path)?;
    println!("\nwrote {} rows to {}", sweep.n_rows(), path.display());
    Ok(())
}
