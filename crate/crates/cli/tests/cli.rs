//! End-to-end tests of the `wgmsim` binary: output contracts, exit codes,
//! determinism, and the configuration override surface.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgmsim"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = bin();
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Data section: everything except `#` provenance lines.
fn data_lines(stdout: &str) -> Vec<&str> {
    stdout
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .collect()
}

fn field(line: &str, idx: usize) -> &str {
    line.split(',').nth(idx).expect("column present")
}

fn value_of(stdout: &str, quantity: &str) -> f64 {
    data_lines(stdout)
        .iter()
        .find(|l| l.starts_with(&format!("{quantity},")))
        .unwrap_or_else(|| panic!("row for {quantity}"))
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap()
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("wgmsim_cli_test_{name}_{}", std::process::id()))
}

const BASELINE_JSON: &str = r#"{
  "system": {
    "omega_m": 63000000.0, "gamma_m": 500.0, "temperature": 0.13,
    "mass": 1e-11, "wavelength": 1.55e-6, "quality_c": 64000000.0,
    "radius": 0.0011, "coupling_j_ratio": 1.0
  },
  "drive": {
    "power_cw": 0.028, "power_ccw": 0.028,
    "theta": 0.6283185307179586, "detuning_ratio": 0.4
  },
  "frequency_convention": "angular"
}"#;

#[test]
fn derive_baseline_emits_provenance_and_values() {
    let (code, out, _) = run(&["derive"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# wgmsim "));
    assert!(out.contains("# generated: "));
    assert!(out.contains("# pumping: double"));
    assert_eq!(data_lines(&out)[0], "quantity,value");
    assert_eq!(value_of(&out, "omega_c"), 1.21525907568e15);
    assert_eq!(value_of(&out, "kappa_0"), 1.89884230575e7);
    assert_eq!(value_of(&out, "g0"), 4.52005785624e2);
    assert_eq!(value_of(&out, "n_m"), 2.69653389205e2);
}

#[test]
fn set_override_propagates() {
    // Halving the quality factor doubles the intrinsic decay rate.
    let (code, out, _) = run(&["derive", "--set", "system.quality_c=3.2e7"]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&out, "kappa_0"), 3.79768461151e7);
}

#[test]
fn invalid_parameter_exits_1() {
    let (code, _, err) = run(&["derive", "--set", "system.mass=-1"]);
    assert_eq!(code, 1);
    assert!(err.contains("mass"));
}

#[test]
fn malformed_set_exits_1() {
    let (code, _, err) = run(&["derive", "--set", "system.mass"]);
    assert_eq!(code, 1);
    assert!(err.contains("KEY=VALUE"));
}

#[test]
fn config_file_round_trip_and_unknown_key() {
    let good = temp_path("good.json");
    std::fs::write(&good, BASELINE_JSON.replace("0.13", "0.26")).unwrap();
    let (code, out, _) = run(&["derive", "--config", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    // Thermal occupation is nearly linear in T at these temperatures.
    assert!((value_of(&out, "n_m") / 2.69653389205e2 - 2.0).abs() < 2e-3);

    let bad = temp_path("bad.json");
    std::fs::write(&bad, BASELINE_JSON.replace("\"drive\"", "\"pump\"")).unwrap();
    let (code, _, err) = run(&["derive", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("config"));

    let _ = std::fs::remove_file(good);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn missing_config_file_exits_1() {
    let (code, _, err) = run(&["derive", "--config", "/nonexistent/nope.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("nope.json"));
}

#[test]
fn stability_columns_are_pinned() {
    let (code, out, _) = run(&["stability"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "theta,detuning_ratio,lambda6,max_real_part,stable"
    );
    assert_eq!(field(lines[1], 4), "true");
    let max_re: f64 = field(lines[1], 3).parse().unwrap();
    assert!((max_re / -8.19468139944e6 - 1.0).abs() < 1e-9);
}

#[test]
fn entangle_baseline_matches_reference() {
    let (code, out, _) = run(&["entangle"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "theta,detuning_ratio,J_over_Gamma,E_N_cw,E_N_ccw,nu_minus_cw,nu_minus_ccw,stable"
    );
    let e_n_cw: f64 = field(lines[1], 3).parse().unwrap();
    let e_n_ccw: f64 = field(lines[1], 4).parse().unwrap();
    let nu_cw: f64 = field(lines[1], 5).parse().unwrap();
    assert!((e_n_cw / 2.462814051396e-1 - 1.0).abs() < 1e-9);
    assert_eq!(e_n_ccw, 0.0);
    assert!((nu_cw / 3.908511094747e-1 - 1.0).abs() < 1e-9);
    assert_eq!(field(lines[1], 7), "true");
}

#[test]
fn entangle_unstable_leaves_fields_empty() {
    let (code, out, _) = run(&["entangle", "--set", "drive.theta=3.141592653589793"]);
    assert_eq!(code, 0);
    let row = data_lines(&out)[1];
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(&cells[3..7], &["", "", "", ""]);
    assert_eq!(cells[7], "false");
}

#[test]
fn wigner_reports_squeezed_ellipse_and_grid() {
    let (code, out, _) = run(&["wigner", "--bipartition", "cw", "--pair", "q_x"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "bipartition,pair,semi_major,semi_minor,angle_rad,squeezed"
    );
    assert_eq!(field(lines[1], 5), "true");
    let minor: f64 = field(lines[1], 3).parse().unwrap();
    // Below the vacuum radius 1 — that is what "squeezed" certifies.
    assert!(minor < 1.0);

    let (code, out, _) = run(&["wigner", "--grid", "4", "--extent", "2.5"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(lines[0], "u,v,w");
    assert_eq!(lines.len(), 1 + 16);
    assert!(out.contains("# ellipse: semi_major"));
    for row in &lines[1..] {
        let w: f64 = field(row, 2).parse().unwrap();
        assert!(w > 0.0 && w.is_finite());
    }
}

#[test]
fn wigner_rejects_degenerate_grid() {
    let (code, _, err) = run(&["wigner", "--grid", "1"]);
    assert_eq!(code, 1);
    assert!(err.contains("grid"));
}

#[test]
fn sweep_scenario_fig5_swaps_squeezing() {
    let (code, out, _) = run(&["sweep", "--scenario", "fig5"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert!(lines[0].starts_with("theta,ellipse_major_cw_q_x"));
    assert!(lines[0].ends_with(",status"));
    assert_eq!(lines.len(), 3);
    let (row_15, row_95) = (lines[1], lines[2]);
    assert_eq!(field(row_15, 3), "1.00000000000e0"); // cw squeezed at π/5
    assert_eq!(field(row_15, 6), "0.00000000000e0");
    assert_eq!(field(row_95, 3), "0.00000000000e0"); // swapped at 9π/5
    assert_eq!(field(row_95, 6), "1.00000000000e0");
    // The two marginals exchange: cw axes at π/5 equal ccw axes at 9π/5.
    for (a, b) in [(1, 4), (2, 5)] {
        let x: f64 = field(row_15, a).parse().unwrap();
        let y: f64 = field(row_95, b).parse().unwrap();
        assert!((x / y - 1.0).abs() < 1e-9, "axis swap mismatch: {x} vs {y}");
    }
}

#[test]
fn sweep_custom_is_deterministic_across_threads() {
    let args = [
        "sweep",
        "--axis",
        "drive.theta=0:6.283185307179586:5",
        "--outputs",
        "E_N_cw,E_N_ccw,lambda6,max_real_part",
    ];
    let (code, first, _) = run_env(&args, &[("WGMSIM_THREADS", "1")]);
    assert_eq!(code, 0);
    let (code, second, _) = run_env(&args, &[("WGMSIM_THREADS", "3")]);
    assert_eq!(code, 0);
    assert_eq!(data_lines(&first), data_lines(&second));
    // 5 nodes, row-major single axis; unstable nodes keep lambda6 but
    // carry empty entanglement fields. θ = π is unstable at this detuning.
    let lines = data_lines(&first);
    assert_eq!(lines.len(), 6);
    let mut saw_unstable = false;
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        if *cells.last().unwrap() == "unstable" {
            saw_unstable = true;
            assert_eq!(cells[1], "");
            assert!(!cells[3].is_empty(), "lambda6 reported for unstable rows");
        }
    }
    assert!(saw_unstable, "grid was expected to cross the unstable lobe");
}

#[test]
fn sweep_scenario_rejects_conflicting_flags() {
    let (code, _, err) = run(&["sweep", "--scenario", "fig5", "--outputs", "E_N_cw"]);
    assert_eq!(code, 1);
    assert!(err.contains("--scenario"));

    let (code, _, err) = run(&["sweep", "--scenario", "nope"]);
    assert_eq!(code, 1);
    assert!(
        err.contains("fig3ab"),
        "unknown scenario lists presets: {err}"
    );

    let (code, _, err) = run(&["sweep", "--axis", "drive.theta=0:1:5"]);
    assert_eq!(code, 1);
    assert!(err.contains("--outputs"));

    let (code, _, err) = run(&[
        "sweep",
        "--axis",
        "drive.theta=0:1:5",
        "--outputs",
        "E_N_cw,bogus",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("bogus"));

    let (code, _, err) = run(&["sweep", "--axis", "drive.theta=0:1", "--outputs", "E_N_cw"]);
    assert_eq!(code, 1);
    assert!(err.contains("--axis"));
}

#[test]
fn sweep_budget_guard_exits_1() {
    let (code, _, err) = run(&[
        "sweep",
        "--axis",
        "drive.theta=0:1:2000",
        "--axis",
        "drive.detuning_ratio=0:2:2000",
        "--outputs",
        "E_N_cw",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("budget"));
}

#[test]
fn scenario_accepts_set_overrides() {
    // Raising the bath temperature on the fig5 preset must not change the
    // squeezing verdict pattern, only weaken the ellipses.
    let (code, out, _) = run(&[
        "sweep",
        "--scenario",
        "fig5",
        "--set",
        "system.temperature=0.5",
    ]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(field(lines[1], 3), "1.00000000000e0");
    assert_eq!(field(lines[2], 6), "1.00000000000e0");
}

#[test]
fn json_format_agrees_with_csv() {
    let (code, csv_out, _) = run(&["entangle"]);
    assert_eq!(code, 0);
    let (code, json_out, _) = run(&["entangle", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&json_out).unwrap();
    assert_eq!(doc["tool"], "wgmsim");
    assert_eq!(doc["command"], "entangle");
    let columns: Vec<&str> = doc["columns"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(columns[3], "E_N_cw");
    let json_en = doc["rows"][0][3].as_f64().unwrap();
    let csv_en: f64 = field(data_lines(&csv_out)[1], 3).parse().unwrap();
    // CSV carries 12 significant digits; JSON carries the full f64.
    assert!((json_en - csv_en).abs() <= 1e-11 * json_en.abs());
    assert!(doc["rows"][0][7].as_bool().unwrap());
}

#[test]
fn json_null_for_unstable_fields() {
    let (code, out, _) = run(&[
        "entangle",
        "--format",
        "json",
        "--set",
        "drive.theta=3.141592653589793",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(doc["rows"][0][3].is_null());
    assert_eq!(doc["rows"][0][7], serde_json::Value::Bool(false));
}

#[test]
fn output_file_holds_the_table() {
    let path = temp_path("sweep_out.csv");
    let (code, out, _) = run(&[
        "sweep",
        "--scenario",
        "fig5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty(), "table goes to the file, not stdout");
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("# command: sweep --scenario fig5"));
    assert_eq!(data_lines(&written).len(), 3);
    let _ = std::fs::remove_file(path);
}

#[test]
fn verify_passes_at_baseline() {
    let (code, out, _) = run(&["verify"]);
    assert_eq!(code, 0);
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "rel_ode,rel_quadrature,lyapunov_residual,tol_ode,tol_quadrature,pass"
    );
    let rel_ode: f64 = field(lines[1], 0).parse().unwrap();
    let rel_quad: f64 = field(lines[1], 1).parse().unwrap();
    assert!(rel_ode <= 1e-6 && rel_quad <= 1e-5);
    assert_eq!(field(lines[1], 5), "true");
}

#[test]
fn verify_requires_a_stable_point() {
    let (code, _, err) = run(&["verify", "--set", "drive.theta=3.141592653589793"]);
    assert_eq!(code, 2);
    assert!(err.contains("unstable"));
}

#[test]
fn threads_env_is_validated() {
    let (code, _, err) = run_env(&["derive"], &[("WGMSIM_THREADS", "zero")]);
    assert_eq!(code, 1);
    assert!(err.contains("WGMSIM_THREADS"));
    let (code, _, err) = run_env(&["derive"], &[("WGMSIM_THREADS", "0")]);
    assert_eq!(code, 1);
    assert!(err.contains("WGMSIM_THREADS"));
}
