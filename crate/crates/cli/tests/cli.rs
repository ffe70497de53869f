use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vecmag"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Small-grid versions of the figure presets, one golden file each.
const PRESETS: &[(&str, &[&str])] = &[
    ("fig2", &["fig2", "--points", "121"]),
    ("fig2_quarter", &["fig2", "--theta", "0.7853981634", "--points", "121"]),
    ("fig3", &["fig3", "--variant", "gesp-o", "--n", "100", "--mu", "0.6", "--points", "161"]),
    ("fig4", &["fig4", "--n", "100", "--n", "101", "--points", "8", "--mu-min", "1.2"]),
];

fn check_golden(name: &str, args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    let path = golden_dir().join(format!("{name}.csv"));
    if std::env::var_os("VECMAG_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(out.stdout == want, "{name}: output differs from {}", path.display());
}

#[test]
fn golden_fig2() {
    check_golden(PRESETS[0].0, PRESETS[0].1);
    check_golden(PRESETS[1].0, PRESETS[1].1);
}

#[test]
fn golden_fig3() {
    check_golden(PRESETS[2].0, PRESETS[2].1);
}

#[test]
fn golden_fig4() {
    check_golden(PRESETS[3].0, PRESETS[3].1);
}

#[test]
fn thread_count_does_not_change_bytes() {
    let args = ["fig4", "--points", "5", "--mu-min", "1.3"];
    let one = bin().args(args).env("VECMAG_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("VECMAG_THREADS", "4").output().unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = bin().args(["constants"]).env("VECMAG_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_header_echoes_params_and_version() {
    let out = run(&["fig3", "--points", "11"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header[0], format!("# vecmag {}", env!("CARGO_PKG_VERSION")));
    for key in ["n = 100", "mu = 0.6", "variant = gesp-o", "points = 11", "seed = 0"] {
        assert!(header.iter().any(|l| l.contains(key)), "missing {key}");
    }
    assert_eq!(text.lines().nth(header.len()), Some("phi_rad,population_unsqueezed,population"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["constants"]).status.code(), Some(0));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // usage errors
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    let unknown = run(&["spectrum", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    assert_eq!(run(&["--format", "xml", "constants"]).status.code(), Some(2));
    // domain errors
    assert_eq!(run(&["spectrum", "--theta", "-0.1"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--b", "-1e-6"]).status.code(), Some(1));
    let big = run(&["gesp", "--n", "100000000"]);
    assert_eq!(big.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&big.stderr).contains("vecmag sensitivity"));
    assert_eq!(run(&["cavity", "--kappa0", "5"]).status.code(), Some(1));
    assert_eq!(run(&["estimate", "--input", "/nonexistent/spectrum.csv"]).status.code(), Some(1));
}

#[test]
fn large_n_is_fine_for_analytic_sensitivity() {
    let out = run(&["sensitivity", "--atoms", "1e8"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let plain = v["data"]["b_min_T"].as_f64().unwrap();
    let squeezed = v["data"]["b_min_gesp_T"].as_f64().unwrap();
    assert!((plain / squeezed / (0.5e8f64).sqrt() - 1.0).abs() < 1e-12);
}

#[test]
fn output_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, "stale").unwrap();
    let out = run(&["constants", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "constants");
    // only the target remains; the temporary file was renamed into place
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn formats_switch() {
    let csv = run(&["--format", "csv", "cavity"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("# vecmag"));
    assert!(text.contains("\nchi,0.0003\n"));
    let json = run(&["--format", "json", "gesp", "--points", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["data"]["columns"][0], "phi_rad");
    assert_eq!(v["data"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn spectrum_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.csv");
    let est = dir.path().join("e.json");
    let s = run(&["spectrum", "--theta", "0.5", "--b", "2e-6", "--points", "481", "-o", spec.to_str().unwrap()]);
    assert!(s.status.success());
    let e = run(&["estimate", "--input", spec.to_str().unwrap(), "-o", est.to_str().unwrap()]);
    assert!(e.status.success(), "{}", String::from_utf8_lossy(&e.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&est).unwrap()).unwrap();
    let b = v["data"]["estimate"]["b_hat"].as_f64().unwrap();
    let theta = v["data"]["estimate"]["theta_hat"].as_f64().unwrap();
    assert!((b - 2e-6).abs() < 2e-9, "b = {b}");
    assert!((theta - 0.5).abs() < 0.01, "theta = {theta}");
    let dir_vec = &v["data"]["second_pass"]["direction"];
    assert!((dir_vec[2].as_f64().unwrap() - theta.cos()).abs() < 1e-12);
}

#[test]
fn noisy_spectrum_is_seeded() {
    let args = |seed: &'static str| ["--seed", seed, "spectrum", "--points", "41", "--atoms", "1000"];
    let a = run(&args("11"));
    let b = run(&args("11"));
    let c = run(&args("12"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("# atoms = 1000"));
    // counts over 1000 atoms: every population is a multiple of 1e-3
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let p: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((p * 1000.0 - (p * 1000.0).round()).abs() < 1e-9);
    }
}
