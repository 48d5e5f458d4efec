use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fhn_ident::io::{read_manifest, write_signals, MANIFEST_FILE};
use fhn_ident::simulate::SignalSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_fhn-ident")).args(args).output().unwrap();
    (
        status.code().unwrap_or(-1),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn with_sigma(dir: &Path, sigma: &str) -> PathBuf {
    let text = fs::read_to_string(config("experiment2.toml")).unwrap();
    let path = dir.join("cfg.toml");
    fs::write(&path, text.replace("sigma = 0.0085", &format!("sigma = {sigma}"))).unwrap();
    path
}

#[test]
fn bounds_verdicts() {
    let (code, out, _) = run(&["bounds", "--config", s(&config("experiment1.toml"))]);
    assert_eq!(code, 0);
    assert!(out.contains("0.4163"), "{out}");
    assert!(!out.contains("VIOLATED"), "{out}");
    let (code, out, _) = run(&["bounds", "--config", s(&config("experiment2_sigma005.toml"))]);
    assert_eq!(code, 0);
    assert!(out.contains("VIOLATED"), "{out}");
}

#[test]
fn find_topology_reports_two_classes() {
    let (code, out, _) = run(&["find-topology"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2 candidate(s)"), "{out}");
}

#[test]
fn identify_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(&["identify", "--config", s(&config("experiment1.toml")), "--t-end", "2", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{out}{err}");
    let m = read_manifest(dir.path()).unwrap();
    assert!(m.config_hash.is_some());
    for f in &m.files {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert_eq!(m.summary.final_time, Some(2.0));
}

#[test]
fn strong_coupling_divergence_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = with_sigma(dir.path(), "1000.0");
    let (code, out, _) = run(&["identify", "--config", s(&cfg), "--t-end", "5", "--out", s(&dir.path().join("o"))]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("diverged at t ="), "{out}");
    let m = read_manifest(dir.path().join("o")).unwrap();
    assert!(m.summary.diverged_at.is_some());
}

#[test]
fn single_gain_sweep_matches_identify() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("experiment2.toml");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let (code, ..) = run(&["identify", "--config", s(&cfg), "--t-end", "3", "--out", s(&a)]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["sweep-gain", "--config", s(&cfg), "--t-end", "3", "--gains", "1", "--out", s(&b)]);
    assert_eq!(code, 0, "{out}");
    let m = read_manifest(&a).unwrap();
    for f in m.files.iter().map(String::as_str).chain([MANIFEST_FILE]) {
        assert!(
            fs::read(a.join(f)).unwrap() == fs::read(b.join("g_1").join(f)).unwrap(),
            "{f} differs"
        );
    }
    assert!(b.join("sweep.csv").is_file());
}

#[test]
fn invalid_gain_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&[
        "sweep-gain", "--config", s(&config("experiment2.toml")), "--gains", "1,-2", "--out", s(dir.path()),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("positive"), "{err}");
}

#[test]
fn simulate_then_from_data() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("signals.csv");
    let cfg = config("experiment2.toml");
    let (code, out, err) = run(&["simulate", "--config", s(&cfg), "--t-end", "2", "--signals", s(&sig), "--out", s(dir.path())]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(fs::read_to_string(&sig).unwrap().starts_with("t,y1,y2,y3,y4,y5\n"));
    let o = dir.path().join("fd");
    let (code, out, err) = run(&["from-data", "--config", s(&config("from_data.toml")), "--signals", s(&sig), "--out", s(&o)]);
    assert_eq!(code, 0, "{out}{err}");
    assert_eq!(read_manifest(&o).unwrap().summary.final_time, Some(2.0));
}

fn write_noise(path: &Path, len: usize, std: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let normal = Normal::new(0.0, std).unwrap();
    let channels = (0..5).map(|_| (0..len).map(|_| normal.sample(&mut rng)).collect()).collect();
    write_signals(path, &SignalSet::new(0.0, 1e-3, channels).unwrap()).unwrap();
}

#[test]
fn white_noise_does_not_crash() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("noise.csv");
    write_noise(&sig, 20_001, 0.1);
    let (code, out, err) = run(&["from-data", "--config", s(&config("from_data.toml")), "--signals", s(&sig), "--out", s(dir.path())]);
    assert!(code == 0 || code == 1, "{out}{err}");
    assert!(err.is_empty(), "{err}");
    assert!(read_manifest(dir.path()).is_ok());
}

#[test]
fn short_signal_warns() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("short.csv");
    write_noise(&sig, 51, 0.1);
    let (_, out, _) = run(&["from-data", "--config", s(&config("from_data.toml")), "--signals", s(&sig), "--out", s(dir.path())]);
    assert!(out.contains("warning: signal spans"), "{out}");
}

#[test]
fn pe_check_on_constant_signals() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("const.csv");
    write_signals(&sig, &SignalSet::new(0.0, 1e-3, vec![vec![0.5; 3001]; 5]).unwrap()).unwrap();
    let data = config("from_data.toml");
    let (code, out, _) = run(&[
        "pe-check", "--config", s(&data), "--signals", s(&sig), "--l-range", "0.5:2:0.5", "--out", s(dir.path()),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("not positive definite"), "{out}");

    let (code, _, err) = run(&[
        "pe-check", "--config", s(&data), "--signals", s(&sig), "--l-range", "5:6:1", "--out", s(dir.path()),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("outside recorded range"), "{err}");
}

#[test]
fn bad_config_path_reports_error() {
    let (code, _, err) = run(&["identify", "--config", "/nonexistent/x.toml"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
}
