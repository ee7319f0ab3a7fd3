//! Integrating an ensemble, saving the decimated positions and estimating
//! their spectrum from the stored file.
//!
//! ```bash
//! cargo run --release --example trajectory_store
//! ```

use qom_sense::oracle::{
    desk_scale_params, integrate_langevin, read_store, welch_psd, LangevinOptions, WelchOptions,
};
use qom_sense::Drive;

fn main() -> qom_sense::Result<()> {
    let params = desk_scale_params(Drive::CriticalExcess(0.01), 1e3)?;
    let dt = 0.05 / params.gamma_c();
    let mut opts = LangevinOptions::new(7, 4, dt, 785 * 8192);
    opts.record_every = 785;
    opts.burn_in_steps = 785 * 512;
    let ensemble = integrate_langevin(&params, &opts)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&ensemble.manifest()).unwrap_or_default()
    );

    let path = std::env::temp_dir().join("qom_trajectories.bin");
    ensemble.write_store(&path)?;
    let (interval, columns) = read_store(&path)?;
    println!(
        "stored {} columns of {} samples at {interval:.3e} s",
        columns.len(),
        columns[0].len()
    );

    let p = welch_psd(&columns[0], interval, &WelchOptions::new(1024))?;
    let peak = p
        .density
        .iter()
        .enumerate()
        .skip(2)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| p.omega[i])
        .unwrap_or(f64::NAN);
    println!(
        "{} segments, spectral peak near omega/omega_m = {:.3}",
        p.segments,
        peak / params.omega_m()
    );
    Ok(())
}
