//! Position spectrum and its thermal and radiation-pressure parts.
//!
//! In the symmetric window the zero-frequency peak grows linearly with the
//! bath temperature, which is the sensing signal.
//!
//! ```bash
//! cargo run --example thermal_psd
//! ```

use qom_sense::{psd, psd_components, steady_state, ChiMode, Drive, SystemParams};

fn main() -> qom_sense::Result<()> {
    let base = SystemParams::reference();
    let gm = base.gamma_m();
    let p = base.with_drive(Drive::CriticalOffset(0.01 * gm))?;
    let s = steady_state(&p);

    println!(
        "{:>10} {:>14} {:>14} {:>14} {:>14}",
        "omega/gm", "|chi|^2", "S_th", "S_rad", "S_qq"
    );
    for f in [0.0, 0.01, 0.03, 0.1, 0.3, 1.0] {
        let c = psd_components(&p, &s, f * gm, 300.0, ChiMode::Exact)?;
        println!(
            "{f:>10.2} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            c.chi_norm_sqr, c.thermal, c.radiation, c.total
        );
    }

    println!("\nS_qq(0) against temperature:");
    let s0 = psd(&p, &s, 0.0, 0.0, ChiMode::Exact)?;
    for t in [0.01, 1.0, 10.0, 100.0, 300.0] {
        let v = psd(&p, &s, 0.0, t, ChiMode::Exact)?;
        println!(
            "  T = {t:>7.2} K: S_qq(0) = {v:.6e} s, slope from T=0: {:.6e} s/K",
            (v - s0) / t
        );
    }
    Ok(())
}
