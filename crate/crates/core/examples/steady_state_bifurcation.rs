//! Pitchfork of the mean-field steady state.
//!
//! Below the critical drive the mechanics stays at `Q_s = 0`; above it two
//! symmetric minima of the adiabatic potential appear and the intracavity
//! intensity locks to `ω_m / 4|g|`.
//!
//! ```bash
//! cargo run --example steady_state_bifurcation
//! ```

use qom_sense::steady_state::{effective_potential, fixed_point_residuals};
use qom_sense::{steady_state, Drive, SystemParams};

fn main() -> qom_sense::Result<()> {
    let base = SystemParams::reference();
    let omega_c = base.critical_drive()?;
    let pinned = base.omega_m() / (4.0 * base.g().abs());
    println!("Omega_c = {omega_c:.6e} rad/s, pinned |alpha|^2 = {pinned:.6e}");
    println!(
        "{:>10} {:>14} {:>14} {:>10}",
        "Omega/Oc", "Q_s^2", "|alpha|^2", "residual"
    );

    for ratio in [0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 1.5, 2.0] {
        let p = base.with_drive(Drive::CriticalExcess(ratio * ratio - 1.0))?;
        let s = steady_state(&p);
        let r = fixed_point_residuals(&p, &s).max();
        println!(
            "{ratio:>10.2} {:>14.6e} {:>14.6e} {r:>10.1e}",
            s.q_s2,
            s.intensity()
        );
    }

    // Potential minima sit at ±Q_s above threshold.
    let p = base.with_drive(Drive::CriticalExcess(0.21))?;
    let q_s = steady_state(&p).q_s;
    println!("\nV(Q) at 1.1 Omega_c (Q_s = {q_s:.4}):");
    for f in [0.0, 0.5, 1.0, 1.5] {
        println!(
            "  V({:>6.3}) = {:.6e} rad/s",
            f * q_s,
            effective_potential(&p, f * q_s)
        );
    }
    Ok(())
}
