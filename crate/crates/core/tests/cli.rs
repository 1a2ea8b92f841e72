use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn optomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optomech")).args(args).output().unwrap()
}

fn csv(path: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let hash = lines.next().unwrap().strip_prefix("# manifest_sha256=").unwrap().to_string();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (hash, header, rows)
}

fn sha256_of(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(fs::read(path).unwrap()))
}

#[test]
fn presets_are_listed() {
    let out = optomech(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("paper-2015"));
    assert!(text.contains("kappa"));
}

#[test]
fn steady_run_writes_hashed_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = optomech(&["--out-dir", out, "steady", "--eta-over-kappa", "10", "--eta-eff-over-kappa", "0.8"]);
    assert!(status.status.success());
    let (hash, header, rows) = csv(&dir.path().join("steady_branches.csv"));
    assert_eq!(hash, sha256_of(&dir.path().join("manifest.json")));
    assert_eq!(header[..5], ["eta_over_kappa", "eta_eff_over_kappa", "delta_over_kappa", "branch", "n_s"]);
    assert_eq!(rows.len(), 3);
    let n: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    let want = [6.814449839854743e-4, 0.012500818002519493, 0.019031183880679506];
    for (g, w) in n.iter().zip(want) {
        assert!((g - w).abs() < 1e-9 * w, "{g} vs {w}");
    }
    assert_eq!(rows[1][8], "unstable");
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(optomech(&["--preset", "nope", "--out-dir", out, "steady"]).status.code(), Some(2));
    assert_eq!(
        optomech(&["--out-dir", out, "sweep", "--from", "1", "--to", "1", "--points", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(optomech(&["--out-dir", out, "--tol", "-1", "steady"]).status.code(), Some(2));
    let cfg = dir.path().join("p.json");
    fs::write(&cfg, "{}").unwrap();
    let both = optomech(&["--preset", "paper-2015", "--config", cfg.to_str().unwrap(), "--out-dir", out, "steady"]);
    assert_eq!(both.status.code(), Some(2));
    // a step budget too small for the run is a numerical failure
    let starved = optomech(&["--out-dir", out, "dynamics", "--method", "rk45", "--rtol", "1e-300", "--atol", "1e-300"]);
    assert_eq!(starved.status.code(), Some(3), "{}", String::from_utf8_lossy(&starved.stderr));
}

#[test]
fn config_file_is_hashed_into_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("params.json");
    let text = r#"{
        "eta": 5.0, "eta_eff": 0.0, "kappa": 1.0, "delta": 10.0,
        "omega_m": 1.0, "omega_r": 1.0, "xi": 1.0, "xi_sm": 0.0,
        "gamma_m": 0.0, "gamma_sm": 0.0
    }"#;
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("out");
    let status = optomech(&["--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "steady"]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["params_source"], "config");
    assert_eq!(manifest["input_sha256"], sha256_of(&cfg));
    let (_, _, rows) = csv(&out.join("steady_branches.csv"));
    let n: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(n.len(), 3);
    assert!((n[0] - 0.26081976453981903).abs() < 1e-13);
}

#[test]
fn replay_reproduces_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let again = dir.path().join("b");
    let args = ["dynamics", "--t-end", "5", "--eta-eff-over-kappa", "0.8", "--model", "full", "--method", "rk45"];
    let mut run = vec!["--out-dir", first.to_str().unwrap()];
    run.extend(args);
    assert!(optomech(&run).status.success());
    let manifest = first.join("manifest.json");
    let status = optomech(&["--out-dir", again.to_str().unwrap(), "replay", "--manifest", manifest.to_str().unwrap()]);
    assert!(status.status.success());
    for name in ["trajectory.csv", "trajectory.json", "manifest.json"] {
        assert_eq!(fs::read(first.join(name)).unwrap(), fs::read(again.join(name)).unwrap(), "{name}");
    }
    let (_, header, _) = csv(&first.join("trajectory.csv"));
    assert_eq!(header, ["t", "q", "q_dot", "Q", "Q_dot", "photon_number"]);
}

#[test]
fn one_dimensional_pump_sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["--out-dir", out, "sweep", "--from", "0.05", "--to", "25", "--points", "50", "--eta-eff-over-kappa", "0,400"];
    assert!(optomech(&args).status.success());
    let (_, header, rows) = csv(&dir.path().join("saturation_windows.csv"));
    assert_eq!(header, ["eta_eff_over_kappa", "eta_lower_over_kappa", "eta_upper_over_kappa", "width"]);
    assert_eq!(rows.len(), 2);
    let upper: f64 = rows[0][2].parse().unwrap();
    assert!((upper - 19.538891148729996).abs() < 1e-8 * upper);
    let (_, header, rows) = csv(&dir.path().join("sweep_hysteresis.csv"));
    assert_eq!(header, ["eta_eff_over_kappa", "eta_over_kappa", "n_s", "direction"]);
    assert_eq!(rows.len(), 2 * 2 * 50);
    assert!(dir.path().join("sweep_branches.csv").exists());
}

#[test]
fn potential_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["--out-dir", out, "potential", "--eta-over-kappa", "10", "--eta-eff-over-kappa", "0.8", "--nq", "31", "--nQ", "31"];
    assert!(optomech(&args).status.success());
    let (_, _, crit) = csv(&dir.path().join("critical_points.csv"));
    let kinds: Vec<&str> = crit.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(kinds, ["minimum", "saddle", "minimum"]);
    let (_, _, grid) = csv(&dir.path().join("potential_grid.csv"));
    assert_eq!(grid.len(), 31 * 31);
    let (_, header, vs) = csv(&dir.path().join("potential_vs.csv"));
    assert_eq!(header, ["n", "V_s", "err_bound"]);
    assert_eq!(vs[0][..2], ["0", "0"]);
}
