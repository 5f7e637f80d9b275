use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use g2_coherence::g2_from_single_j;
use num_complex::Complex64;

fn g2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .parse()
        .unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn eval_defaults() {
    let o = g2(&["eval", "--omegad", "5e14"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "g2"), 0.5);
    for k in 1..=5 {
        assert!((field(&text, &format!("absJ{k}")) - 1.0).abs() < 1e-12, "{text}");
    }
    assert!(text.contains("flags = none"), "{text}");
}

#[test]
fn lorentzian_photon_overlap_decays_exponentially() {
    let o = g2(&["eval", "--model", "lorentzian", "--taup", "2e-12", "--omegad", "5e14"]);
    assert_eq!(o.status.code(), Some(0));
    let j1 = field(&stdout(&o), "absJ1");
    assert!((j1 - (-1.0f64).exp()).abs() < 1e-12, "{j1}");
}

#[test]
fn legacy_kernel_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(g2(&["figure", "1a", "--out", dir.path().to_str().unwrap()]).status.code(), Some(0));
    let tau = csv_column(&dir.path().join("fig1a.csv"), "axis_value");
    let v = csv_column(&dir.path().join("fig1a.csv"), "g2");
    let k = tau.len() - 1;
    let j = (-(2.0 * std::f64::consts::PI).powi(2) * tau[k].abs()).exp();
    let want = g2_from_single_j(Complex64::new(j, 0.0)).unwrap();
    assert!((v[k] - want).abs() < 1e-12, "{} vs {want}", v[k]);
}

#[test]
fn quadrature_agrees_with_closed_form() {
    let args = ["eval", "--taup", "1.5e-12", "--omegad", "4.5e14", "--gamma", "0.77e12"];
    let a = field(&stdout(&g2(&args)), "g2");
    let mut q = args.to_vec();
    q.extend(["--method", "quadrature"]);
    let b = field(&stdout(&g2(&q)), "g2");
    assert!((a - b).abs() <= 1e-8 * a.abs(), "{a} vs {b}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"omega0": 5e14, "colour": 1}"#).unwrap();
    assert_eq!(g2(&["eval", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(g2(&["eval", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(g2(&["figure", "9"]).status.code(), Some(2));
    assert_eq!(g2(&["eval", "--gamma", "0"]).status.code(), Some(2));
    assert_eq!(g2(&["eval", "--model", "voigt"]).status.code(), Some(2));
    let o = g2(&[
        "eval",
        "--method",
        "quadrature",
        "--model",
        "lorentzian",
        "--max_domain_doublings",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_on_every_subcommand() {
    for sub in ["eval", "figure", "sweep", "validate"] {
        assert_eq!(g2(&[sub, "--help"]).status.code(), Some(0), "{sub}");
    }
    assert_eq!(g2(&["--version"]).status.code(), Some(0));
}

#[test]
fn validate_passes_and_negative_control_fails() {
    let o = g2(&["validate", "--draws", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));

    let o = g2(&["validate", "--draws", "0", "--corrupt-closed-form"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("closed form vs quadrature"), "{err}");
    assert!(err.contains("\"photon_model\""), "{err}");
}

#[test]
fn sweep_writes_csv_and_metadata_and_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = g2(&[
        "sweep", "--axis", "tau", "--start", "-5e-12", "--stop", "5e-12", "--points", "41", "--taup", "1.5e-12",
        "--omegad", "4.5e14", "--gamma", "0.77e12", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = dir.path().join("sweep_tau.csv");
    let first = fs::read(&csv).unwrap();
    let header = String::from_utf8_lossy(&first).lines().next().unwrap().to_string();
    assert_eq!(header, g2_coherence::output::CSV_HEADER);
    assert_eq!(String::from_utf8_lossy(&first).lines().count(), 42);

    let sidecar = dir.path().join("sweep_tau.meta.json");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&sidecar).unwrap()).unwrap();
    for key in ["tool", "version", "command", "config", "notes", "datasets", "wall_time_seconds"] {
        assert!(meta.get(key).is_some(), "missing {key}");
    }
    assert_eq!(meta["config"]["gamma"], 0.77e12);

    let again = tempfile::tempdir().unwrap();
    let o = g2(&[
        "sweep",
        "--replay",
        sidecar.to_str().unwrap(),
        "--out",
        again.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(again.path().join("sweep_tau.csv")).unwrap(), first);
}

#[test]
fn gamma_sweep_at_zero_separation_is_flat_half() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2(&[
        "sweep", "--axis", "gamma", "--start", "1e11", "--stop", "5e12", "--points", "50", "--omegad", "4.5e14",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let values = csv_column(&dir.path().join("sweep_gamma.csv"), "g2");
    assert_eq!(values.len(), 50);
    for v in values {
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }
}

#[test]
fn legacy_kernel_figure_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2(&["figure", "1a", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = csv_column(&dir.path().join("fig1a.csv"), "g2");
    let n = v.len();
    for k in 0..n {
        assert!((v[k] - v[n - 1 - k]).abs() < 1e-12);
    }
    assert_eq!(v[n / 2], 0.5);
}

#[test]
fn gaussian_gamma_family_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2(&["figure", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("fig3_omegad4.875e14_taup2.5ps.csv"))
        .unwrap();
    assert!(line.ends_with("maxima 1"), "{line}");
    assert!(dir.path().join("fig3.meta.json").exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 11);
}
