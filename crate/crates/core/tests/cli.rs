//! End-to-end tests of the `qom-sense` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qom-sense"))
        .args(args)
        .output()
        .unwrap()
}

fn qom_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let d = dir.to_str().unwrap();
    full.extend(["--out", d]);
    qom(&full)
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn golden_headers() {
    let cases = [
        (
            vec!["steady"],
            "omega_drive_rad_s,omega_drive_offset_over_gamma_m,q_s2,q_s,p_s,alpha_re,alpha_im,intensity,\
             above_threshold,stiffness_rad_s,max_residual",
        ),
        (
            vec!["eigen"],
            "omega_drive_rad_s,omega_drive_offset_over_gamma_m,re_omega_plus,im_omega_plus,re_omega_minus,\
             im_omega_minus,re_omega_plus_rad_s,im_omega_plus_rad_s,re_omega_minus_rad_s,im_omega_minus_rad_s,\
             regime,omega_c_rad_s,omega_ep1_rad_s,omega_ep2_rad_s",
        ),
        (
            vec!["chi", "--points", "101"],
            "omega_over_omega_m,omega_rad_s,chi_re,chi_im,log10_abs_chi_sq,abs_chi_sq",
        ),
        (
            vec!["psd", "--points", "101"],
            "omega_over_omega_m,omega_rad_s,abs_chi_sq,s_thermal,s_radiation,s_qq_seconds",
        ),
        (
            vec!["sensitivity", "--set", "omega_offset_gamma_m=0.01"],
            "omega_drive_rad_s,omega_drive_offset_over_gamma_m,temperature_k,regime,omega_eval_rad_s,\
             xi_numeric_s_per_k,xi_closed_s_per_k,limit_label",
        ),
        (
            vec!["sensitivity", "--offset-range", "-1", "1", "5", "--temperatures", "1e-3,300"],
            "omega_drive_offset_over_gamma_m,omega_drive_rad_s,temperature_k,regime,omega_eval_rad_s,xi_kind,\
             xi_closed_s_per_k,xi_numeric_s_per_k,relative_difference,flag",
        ),
    ];
    for (args, golden) in cases {
        let out = qom(&args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert_eq!(header(&stdout), golden, "{args:?}");
    }
}

#[test]
fn sweep_rows_are_long_form_and_ordered() {
    let out = qom(&[
        "sensitivity",
        "--offset-range",
        "-1",
        "1",
        "5",
        "--temperatures",
        "1e-3,300",
        "--jobs",
        "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 10);
    let offsets: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(offsets.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = qom(&["steady", "--set", "omega_offset_gamma_m=0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let first = row.split(',').next().unwrap();
    let mantissa = first.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{first}");
}

#[test]
fn exit_codes() {
    assert_eq!(qom(&["reproduce-figure", "5c"]).status.code(), Some(2));
    assert_eq!(qom(&["steady", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(qom(&["steady", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(qom(&["--help"]).status.code(), Some(0));

    let cp = qom(&["sensitivity", "--set", "omega_offset_gamma_m=0"]);
    assert_eq!(cp.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&cp.stderr).contains("critical point"));

    assert_eq!(
        qom(&["steady", "--set", "nonsense=1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        qom(&["steady", "--params", "/definitely/missing.toml"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qom(&["steady", "--set", "q_m=-3"]).status.code(), Some(1));
}

#[test]
fn verify_fast_passes_and_names_the_headline_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = qom_in(dir.path(), &["verify", "--level", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("PASS xi0_high_T: 0.876 ± 0.5%"), "{stderr}");
    let report = read_json(&dir.path().join("verify_report.json"));
    assert_eq!(report["passed"], true);
}

#[test]
fn verify_with_positive_coupling_fails_with_a_domain_error() {
    let out = qom(&["verify", "--set", "g_hz=245"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("FAIL ep_degeneracy") && stderr.contains("domain error"),
        "{stderr}"
    );
}

#[test]
fn verify_full_reports_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = qom_in(dir.path(), &["verify", "--level", "full", "--seed", "42"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("verify_report.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn manifest_echoes_overrides_and_regenerates_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.toml");
    std::fs::write(
        &params,
        "g_hz = -245.0\nf_m_hz = 8.7e6\nq_m = 1e4\ngamma_c_hz = 5e9\nomega_offset_gamma_m = 0.02\ntemperature_k = 4.0\n",
    )
    .unwrap();
    let first = dir.path().join("first");
    let out = qom_in(
        &first,
        &[
            "psd",
            "--params",
            params.to_str().unwrap(),
            "--set",
            "temperature_k=77",
            "--points",
            "201",
        ],
    );
    assert!(out.status.success());
    let manifest = read_json(&first.join("psd.manifest.json"));
    assert_eq!(manifest["overrides"][0], "temperature_k=77");
    assert_eq!(manifest["resolved_params"]["temperature_k"], 77.0);
    assert_eq!(manifest["resolved_params"]["omega_offset_gamma_m"], 0.02);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["outputs"][0], "psd.csv");

    // rerun from the manifest's resolved parameters alone
    let resolved = dir.path().join("resolved.json");
    std::fs::write(&resolved, manifest["resolved_params"].to_string()).unwrap();
    let second = dir.path().join("second");
    let out = qom_in(
        &second,
        &[
            "psd",
            "--params",
            resolved.to_str().unwrap(),
            "--points",
            "201",
        ],
    );
    assert!(out.status.success());
    let csv = |d: &Path| std::fs::read_to_string(d.join("psd.csv")).unwrap();
    assert_eq!(csv(&first), csv(&second));
}

#[test]
fn json_format_writes_named_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = qom_in(dir.path(), &["reproduce-figure", "3b", "--format", "json"]);
    assert!(out.status.success());
    let table = read_json(&dir.path().join("fig3b.json"));
    assert_eq!(table["schema_version"], 1);
    let t = table["columns"]["temperature_k"].as_array().unwrap();
    let s = table["columns"]["s_qq_zero_seconds"].as_array().unwrap();
    assert_eq!(t.len(), s.len());
    assert!(dir.path().join("fig3b.manifest.json").exists());
}

#[test]
fn figure_1a_is_flat_below_threshold() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qom_in(dir.path(), &["reproduce-figure", "1a"])
        .status
        .success());
    let text = std::fs::read_to_string(dir.path().join("fig1a.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let cols: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ratio = cols
        .iter()
        .position(|c| *c == "omega_drive_over_omega_c")
        .unwrap();
    let q = cols.iter().position(|c| *c == "q_s2").unwrap();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let r: f64 = cells[ratio].parse().unwrap();
        let v: f64 = cells[q].parse().unwrap();
        assert_eq!(r <= 1.0, v == 0.0, "{line}");
    }
}

#[test]
fn figure_4a_contains_the_ep2_point_and_the_baseline() {
    let dir = tempfile::tempdir().unwrap();
    assert!(qom_in(dir.path(), &["reproduce-figure", "4a"])
        .status
        .success());
    let text = std::fs::read_to_string(dir.path().join("fig4a.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').take(3).map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(rows
        .iter()
        .any(|r| (r[1] / 1.4e9 - 1.0).abs() < 0.05 && (r[0] - 0.0846).abs() < 1e-3));
    assert!(rows.iter().all(|r| (r[2] / 0.876 - 1.0).abs() < 0.005));
}
