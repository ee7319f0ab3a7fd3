//! Cross-check of the closed-form spectrum against a direct solve of the
//! 4×4 linearized fluctuation equations.
//!
//! ```bash
//! cargo run --example linear_solve_oracle
//! ```

use num_complex::Complex64;
use qom_sense::oracle::{build_linearized, spectrum_by_linear_solve};
use qom_sense::{eigenfrequencies, psd, steady_state, ChiMode, Drive, SystemParams};

fn main() -> qom_sense::Result<()> {
    let base = SystemParams::reference();
    let (gm, wm) = (base.gamma_m(), base.omega_m());

    println!(
        "{:>8} {:>10} {:>14} {:>14} {:>10}",
        "offset", "omega", "closed form", "linear solve", "rel diff"
    );
    for offset in [-2.0, 0.02, 1.0] {
        let p = base.with_drive(Drive::CriticalOffset(offset * gm))?;
        let s = steady_state(&p);
        let sys = build_linearized(&p, &s);
        for w in [0.0, 0.5 * gm, 0.5 * wm, wm] {
            let a = psd(&p, &s, w, 300.0, ChiMode::Exact)?;
            let b = spectrum_by_linear_solve(&sys, w, 300.0);
            println!(
                "{offset:>+8.2} {w:>10.3e} {a:>14.6e} {b:>14.6e} {:>10.1e}",
                (a / b - 1.0).abs()
            );
        }

        // Eliminating the cavity leaves a 2×2 drift with eigenvalues -iω_±.
        let e = eigenfrequencies(&p, &s);
        let reduced = sys.adiabatic_eigenvalues();
        println!(
            "         reduced eigenvalues {:.4} {:.4}; -i w+ = {:.4}",
            reduced[0],
            reduced[1],
            -e.plus * Complex64::i()
        );
    }
    Ok(())
}
