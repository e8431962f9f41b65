use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rabi_cli::output::read_csv;

fn rabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = rabi(args);
    assert!(
        out.status.success(),
        "rabi {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn version_lists_code_and_schema() {
    let out = ok(&["--version"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")));
    assert!(text.contains("schema 1"));
}

#[test]
fn analytic_revivals_hit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("an.csv");
    let step = 0.01;
    ok(&[
        "run",
        "--engine",
        "analytic",
        "--g-over-omega",
        "2",
        "--kappa-over-omega",
        "0.01",
        "--delta-over-omega",
        "1",
        "--tau-max",
        &format!("{}", 12.0 * PI),
        "--tau-step",
        "0.01",
        "--output",
        path_str(&csv),
    ]);
    let t = read_csv(&csv).unwrap();
    assert_eq!(
        t.columns[..5],
        ["tau", "mean_photon", "p_g", "p_e", "purity"]
    );
    assert_eq!(t.columns.last().unwrap(), "chain_minus_20");
    let tau = t.column("tau").unwrap();
    let n = t.column("mean_photon").unwrap();
    for l in 1..=6 {
        let target = 2.0 * PI * l as f64;
        let window: Vec<usize> = (0..tau.len())
            .filter(|&k| (tau[k] - target).abs() < 0.5)
            .collect();
        let k = *window
            .iter()
            .min_by(|&&a, &&b| n[a].total_cmp(&n[b]))
            .unwrap();
        assert!(
            (tau[k] - target).abs() <= step + 1e-9,
            "minimum at {}",
            tau[k]
        );
        // damping keeps |β(2πl)|² = g²(1 − e^{−κπl})²/|z|² off zero, and the
        // grid point can miss 2πl by up to one step
        let floor = 4.0 * (1.0 - (-0.01 * PI * l as f64).exp()).powi(2) / (1.0 + 0.25e-4);
        assert!(
            n[k] <= floor + 4.0 * step * step,
            "tau = {}: {} > {floor}",
            tau[k],
            n[k]
        );
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("an.json")).unwrap()).unwrap();
    assert_eq!(meta["engine"], "analytic");
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["config"]["g_over_omega"], 2.0);
}

#[test]
fn mesolve_decay_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("decay.json");
    fs::write(
        &cfg,
        r#"{"engine": "mesolve", "g_over_omega": 0, "kappa_over_omega": 0.5,
            "delta_over_omega": 1, "tau_max": 10, "tau_step": 0.5, "n_max": 6,
            "n_report": 4, "initial_photons": 1}"#,
    )
    .unwrap();
    let csv = dir.path().join("decay.csv");
    ok(&[
        "run",
        "--config",
        path_str(&cfg),
        "--output",
        path_str(&csv),
    ]);
    let t = read_csv(&csv).unwrap();
    for row in &t.rows {
        assert!((row[1] - (-0.5 * row[0]).exp()).abs() < 1e-6);
    }
}

#[test]
fn mcwf_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let csv = dir.path().join(format!("{name}.csv"));
        ok(&[
            "run",
            "--engine",
            "mcwf",
            "--g-over-omega",
            "1",
            "--kappa-over-omega",
            "0.3",
            "--omega0-over-omega",
            "0.2",
            "--tau-max",
            "2",
            "--tau-step",
            "0.25",
            "--n-max",
            "20",
            "--n-report",
            "5",
            "--n-traj",
            "40",
            "--master-seed",
            "17",
            "--output",
            path_str(&csv),
        ]);
        bytes.push(fs::read(&csv).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let t = read_csv(&dir.path().join("a.csv")).unwrap();
    assert!(t.columns.iter().any(|c| c == "stderr_mean_photon"));
    assert!(t.column("purity").unwrap().iter().all(|x| x.is_nan()));
}

#[test]
fn sidecar_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("first.csv");
    ok(&[
        "run",
        "--engine",
        "mesolve",
        "--hamiltonian-mode",
        "full-lab",
        "--g-over-omega",
        "0.7",
        "--kappa-over-omega",
        "0.1",
        "--delta-over-omega",
        "0.6",
        "--tau-max",
        "1",
        "--tau-step",
        "0.25",
        "--n-max",
        "16",
        "--n-report",
        "3",
        "--output",
        path_str(&csv),
    ]);
    let again = dir.path().join("again.csv");
    ok(&[
        "run",
        "--config",
        path_str(&dir.path().join("first.json")),
        "--output",
        path_str(&again),
    ]);
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn compare_analytic_and_master_equation() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "--g-over-omega",
        "2",
        "--kappa-over-omega",
        "0.2",
        "--delta-over-omega",
        "1",
        "--tau-max",
        "3",
        "--tau-step",
        "0.1",
        "--n-max",
        "50",
        "--hamiltonian-mode",
        "slow-qubit",
    ];
    let an = dir.path().join("an.csv");
    let me = dir.path().join("me.csv");
    for (engine, path) in [("analytic", &an), ("mesolve", &me)] {
        let mut args = vec!["run", "--engine", engine, "--output", path_str(path)];
        args.extend(common);
        ok(&args);
    }
    let out = ok(&["compare", path_str(&an), path_str(&me), "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["metric"], "max_abs");
    assert!(report["value"].as_f64().unwrap() < 1e-6);

    let out = ok(&[
        "compare",
        path_str(&an),
        path_str(&an),
        "--metric",
        "rel-at-tau",
        "--tau",
        "1.5",
        "--json",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["value"], 0.0);

    let out = rabi(&[
        "compare",
        path_str(&an),
        path_str(&me),
        "--metric",
        "rel-at-tau",
        "--tau",
        "1.55",
    ]);
    assert_eq!(out.status.code(), Some(2));
    ok(&[
        "compare",
        path_str(&an),
        path_str(&me),
        "--metric",
        "rel-at-tau",
        "--tau",
        "1.55",
        "--interpolate",
    ]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let out = rabi(&[
        "run",
        "--engine",
        "analytic",
        "--g-over-omega",
        "2",
        "--kappa-over-omega",
        "0.01",
        "--tau-max",
        "1",
        "--tau-step",
        "0.1",
        "--output",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(2), "missing detuning");
    let out = rabi(&[
        "run",
        "--engine",
        "mesolve",
        "--g-over-omega",
        "2",
        "--kappa-over-omega",
        "0.01",
        "--delta-over-omega",
        "1",
        "--hamiltonian-mode",
        "slow-qubit",
        "--tau-max",
        "3",
        "--tau-step",
        "0.5",
        "--n-max",
        "8",
        "--n-report",
        "8",
        "--output",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3), "truncation");
    let out = rabi(&["figure", "9", "--out-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_file_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "sweep",
        "--engine",
        "analytic",
        "--g-over-omega",
        "2",
        "--kappa-over-omega",
        "0.01",
        "--delta-over-omega",
        "1",
        "--tau-max",
        "2",
        "--tau-step",
        "0.5",
        "--param",
        "kappa_over_omega",
        "--values",
        "0.1,0.2,0.3",
        "--out-dir",
        path_str(dir.path()),
    ]);
    let listed = String::from_utf8(out.stdout).unwrap();
    assert_eq!(listed.lines().count(), 3);
    for k in ["0.1", "0.2", "0.3"] {
        let meta = dir.path().join(format!("run_kappa_over_omega_{k}.json"));
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(meta).unwrap()).unwrap();
        assert_eq!(
            v["config"]["kappa_over_omega"]
                .as_f64()
                .unwrap()
                .to_string(),
            k
        );
    }
}

#[test]
fn figure_three_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["figure", "3", "--out-dir", path_str(dir.path())]);
    let t = read_csv(&dir.path().join("fig3/snapshots.csv")).unwrap();
    assert_eq!(t.rows.len(), 13);
    let tau = t.column("tau").unwrap();
    assert!((tau[12] - 12.0 * PI).abs() < 1e-9);
    let meta = fs::read_to_string(dir.path().join("fig3/snapshots.json")).unwrap();
    assert!(meta.contains("\"description\""));
    let t = {
        ok(&["figure", "4", "--out-dir", path_str(dir.path())]);
        read_csv(&dir.path().join("fig4/analytic.csv")).unwrap()
    };
    let last = t.rows.last().unwrap();
    let k0p = t.columns.iter().position(|c| c == "chain_plus_0").unwrap();
    let k0m = t.columns.iter().position(|c| c == "chain_minus_0").unwrap();
    // both tend to e^{−|β_S|²}/2 with |β_S|² = 4g²/(κ² + 4Δ²)
    let steady = 0.5 * (-16.0f64 / 4.04).exp();
    assert!((last[k0p] - steady).abs() < 1e-3 && (last[k0m] - steady).abs() < 1e-3);
    assert!(t.rows[0][k0p] == 1.0);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig4/analytic.json")).unwrap())
            .unwrap();
    assert!(meta["chosen"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c == "tau_max"));
}
