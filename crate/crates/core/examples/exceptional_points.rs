//! Anti-PT spectral structure of the linearized mechanics.
//!
//! Between the two exceptional points the eigenfrequencies `ω_±` are purely
//! imaginary; at the critical point one of them reaches zero damping.
//!
//! ```bash
//! cargo run --example exceptional_points
//! ```

use qom_sense::{
    classify_regime, eigenfrequencies, exceptional_points, steady_state, Drive, SystemParams,
};

fn main() -> qom_sense::Result<()> {
    let base = SystemParams::reference();
    let gm = base.gamma_m();
    let eps = exceptional_points(&base)?;
    let omega_c = base.critical_drive()?;
    println!(
        "EP1 at (Omega - Omega_c)/gamma_m = {:+.6}",
        (eps.omega_ep1 - omega_c) / gm
    );
    println!(
        "EP2 at (Omega - Omega_c)/gamma_m = {:+.6}",
        (eps.omega_ep2 - omega_c) / gm
    );

    let mut drives: Vec<Drive> = [-1.0, -0.5, -0.2, 0.0, 0.05, 0.5, 1.0]
        .iter()
        .map(|x| Drive::CriticalOffset(x * gm))
        .collect();
    drives.extend([
        Drive::CriticalExcess(eps.excess_ep1),
        Drive::CriticalExcess(eps.excess_ep2),
    ]);

    println!(
        "\n{:>10} {:>12} {:>12} {:>12} {:>12}  regime",
        "offset", "Re w+/gm", "Im w+/gm", "Re w-/gm", "Im w-/gm"
    );
    for d in drives {
        let p = base.with_drive(d)?;
        let e = eigenfrequencies(&p, &steady_state(&p));
        println!(
            "{:>+10.4} {:>12.5} {:>12.5} {:>12.5} {:>12.5}  {}",
            p.drive_offset_over_gamma_m().unwrap_or(f64::NAN),
            e.plus.re / gm,
            e.plus.im / gm,
            e.minus.re / gm,
            e.minus.im / gm,
            classify_regime(&p)?.label()
        );
    }
    Ok(())
}
