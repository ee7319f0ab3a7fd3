//! Property tests over randomized parameters.

use proptest::prelude::*;

use qom_sense::oracle::{build_linearized, spectrum_by_linear_solve};
use qom_sense::sensitivity::{sensitivity_numeric, sensitivity_s};
use qom_sense::table::format_float;
use qom_sense::{
    exceptional_points, psd, steady_state, steady_state_on, thermal_spectrum, Branch, ChiMode,
    Drive, ExperimentParams, SystemParams, HBAR, K_B,
};

fn experiment() -> impl Strategy<Value = ExperimentParams> {
    (
        -1e3f64..-1.0,
        1e5f64..1e8,
        1e2f64..1e6,
        1e7f64..1e10,
        prop::option::of(-3.0f64..3.0),
        0.0f64..400.0,
    )
        .prop_map(|(g, f, q, gc, offset, t)| ExperimentParams {
            g_hz: g,
            f_m_hz: f,
            q_m: q,
            gamma_c_hz: gc,
            omega_hz: if offset.is_none() { Some(0.0) } else { None },
            omega_offset_gamma_m: offset,
            temperature_k: t,
        })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn hz_and_rad_s_round_trip(exp in experiment()) {
        let back = ExperimentParams::from_params(&exp.to_params().unwrap());
        prop_assert!(close(back.g_hz, exp.g_hz, 1e-12));
        prop_assert!(close(back.f_m_hz, exp.f_m_hz, 1e-12));
        prop_assert!(close(back.q_m, exp.q_m, 1e-12));
        prop_assert!(close(back.gamma_c_hz, exp.gamma_c_hz, 1e-12));
        if let Some(offset) = exp.omega_offset_gamma_m {
            prop_assert!((back.omega_offset_gamma_m.unwrap() - offset).abs() < 1e-12 * offset.abs().max(1.0));
        }
        prop_assert_eq!(back.temperature_k, exp.temperature_k);
    }

    #[test]
    fn spectra_do_not_depend_on_the_branch(offset in -3.0f64..3.0, w_rel in 0.0f64..2.0, t in 1e-3f64..300.0) {
        let base = SystemParams::reference();
        let p = base.with_drive(Drive::CriticalOffset(offset * base.gamma_m())).unwrap();
        let w = w_rel * p.omega_m();
        let pos = steady_state_on(&p, Branch::Positive);
        let neg = steady_state_on(&p, Branch::Negative);
        prop_assert_eq!(pos.q_s2, neg.q_s2);
        let a = psd(&p, &pos, w, t, ChiMode::Exact).unwrap();
        let b = psd(&p, &neg, w, t, ChiMode::Exact).unwrap();
        prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
    }

    #[test]
    fn thermal_noise_obeys_detailed_balance(w_rel in 1e-3f64..3.0, t in 1e-3f64..300.0) {
        let p = SystemParams::reference();
        let w = w_rel * p.omega_m();
        let ratio = thermal_spectrum(&p, -w, t) / thermal_spectrum(&p, w, t);
        let boltzmann = (-HBAR * w / (K_B * t)).exp();
        prop_assert!((ratio - boltzmann).abs() <= 1e-9 * boltzmann.max(1e-300), "{} vs {}", ratio, boltzmann);
    }

    #[test]
    fn linear_solve_matches_closed_form(exp in experiment(), w_rel in 0.0f64..1.5, t in 1e-6f64..300.0) {
        let p = exp.to_params().unwrap();
        prop_assume!(p.gamma_m() < 0.5 * p.omega_m());
        // keep away from the exact CP divergence
        prop_assume!(p.drive_offset_over_gamma_m().is_none_or(|x| x.abs() > 1e-3));
        let s = steady_state(&p);
        let w = w_rel * p.omega_m();
        let a = psd(&p, &s, w, t, ChiMode::Exact).unwrap();
        let b = spectrum_by_linear_solve(&build_linearized(&p, &s), w, t);
        prop_assert!(close(a, b, 1e-6), "{} vs {}", a, b);
    }

    #[test]
    fn symmetric_phase_slope_is_temperature_free(frac in 0.0f64..1.0, t in 1e-6f64..300.0) {
        let base = SystemParams::reference();
        let eps = exceptional_points(&base).unwrap();
        let excess = eps.excess_ep1 + frac * (eps.excess_ep2 - eps.excess_ep1);
        prop_assume!(excess != 0.0);
        let p = base.with_drive(Drive::CriticalExcess(excess)).unwrap();
        let s = steady_state(&p);
        let closed = sensitivity_s(&p, &s).unwrap();
        let numeric = sensitivity_numeric(&p, &s, 0.0, t).unwrap();
        prop_assert!(close(numeric, closed, 1e-6), "{} vs {}", numeric, closed);
    }

    #[test]
    fn emitted_floats_round_trip_exactly(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
