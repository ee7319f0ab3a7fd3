//! Enhancement of the mechanical susceptibility near the critical point.
//!
//! Compares the peak of `|χ(ω)|²` for the undriven resonator with the peak
//! just inside the symmetric window, `Ω = Ω_c + 0.01 γ_m`.
//!
//! ```bash
//! cargo run --example susceptibility_enhancement
//! ```

use qom_sense::grid::linspace;
use qom_sense::spectral::peak_chi_norm_sqr;
use qom_sense::{steady_state, ChiMode, Drive, SystemParams};

fn main() -> qom_sense::Result<()> {
    let off = SystemParams::reference();
    let gm = off.gamma_m();
    let near = off.with_drive(Drive::CriticalOffset(0.01 * gm))?;

    let (w_off, peak_off) = peak_chi_norm_sqr(
        &off,
        &steady_state(&off),
        &linspace(0.0, 2.0 * off.omega_m(), 4001),
        ChiMode::Exact,
    )?;
    let (w_near, peak_near) = peak_chi_norm_sqr(
        &near,
        &steady_state(&near),
        &linspace(0.0, 2.5 * gm, 2001),
        ChiMode::Exact,
    )?;

    println!(
        "Omega = 0:                 peak |chi|^2 = {peak_off:.4e} s^2 at omega/omega_m = {:.6}",
        w_off / off.omega_m()
    );
    println!(
        "Omega = Omega_c + 0.01 gm: peak |chi|^2 = {peak_near:.4e} s^2 at omega/gamma_m = {:.6}",
        w_near / gm
    );
    println!("enhancement: 10^{:.3}", (peak_near / peak_off).log10());

    // The exact and factored forms agree near threshold.
    let s = steady_state(&near);
    for w in [0.0, 0.05 * gm, 0.2 * gm] {
        let exact = qom_sense::spectral::chi_norm_sqr(&near, &s, w, ChiMode::Exact)?;
        let factored = qom_sense::spectral::chi_norm_sqr(&near, &s, w, ChiMode::Factored)?;
        println!(
            "  omega = {:.3} gm: exact/factored - 1 = {:+.2e}",
            w / gm,
            exact / factored - 1.0
        );
    }
    Ok(())
}
