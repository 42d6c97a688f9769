use std::path::Path;
use std::process::{Command, Output};

use besov_dh::{dhf, Grid, SpectralField};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_besov-dh"));
    cmd.env_remove("BESOV_DH_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_EQUIVARIANCE: &str = "[grid]\npoints = 16\n[solver]\ndt = 0.05\nhorizon = 0.25\n";

#[test]
fn norm_prints_value_and_shell_table() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
    let f = SpectralField::cosine_mode(&g, &[3, 0], 1.0);
    let path = dir.path().join("f.dhf1");
    dhf::save(&path, &f).unwrap();
    let o = run(&["norm", "--input", path.to_str().unwrap(), "--s", "-1", "--p", "2", "--q", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    let value: f64 = first.strip_prefix("besov_norm = ").unwrap().parse().unwrap();
    // cos(3x) has L² norm 1/√2 and lives on shells 1 and 2, weighted by 2^{-j}.
    assert!(value > 0.0 && value < 1.0 / 2f64.sqrt());
    assert!(text.lines().nth(1).unwrap().starts_with("j,"));

    let o = run(&["decompose", "--input", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("j,shell_lp_norm,energy"));
}

#[test]
fn picard_on_small_config_converges() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "small.toml",
        "seed = 3\n[grid]\npoints = 16\n[solver]\ndt = 0.05\nhorizon = 0.5\n[data]\namplitude = 0.2\n",
    );
    let out = dir.path().join("out");
    let o = run(&["picard", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["converged"], true);
    assert!(report.get("wall_time_seconds").is_none());
    assert!(out.join("picard.json").exists());
    assert!(out.join("picard.meta.json").exists());
    assert!(out.join("picard.csv").exists());
}

#[test]
fn experiment_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eq.toml", SMALL_EQUIVARIANCE);
    let mut files = Vec::new();
    for run_id in 0..2 {
        let out = dir.path().join(format!("run{run_id}"));
        let o = run(&["experiment", "--kind", "equivariance", "--seed", "7", "-c", &cfg, "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let verdict: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(verdict["passed"], true);
        assert_eq!(verdict["spec"]["seed"], 7);
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("equivariance.meta.json")).unwrap()).unwrap();
        assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);
        files.push(std::fs::read(out.join("equivariance.json")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eq.toml", SMALL_EQUIVARIANCE);
    let o = bin().args(["experiment", "--kind", "equivariance", "-c", &cfg]).env("BESOV_DH_SEED", "42").output().unwrap();
    assert!(o.status.success());
    let verdict: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(verdict["spec"]["seed"], 42);
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // The variation is at least 1, so a bound of 1 cannot pass.
    let cfg = write_config(
        dir.path(),
        "stab.toml",
        "[grid]\npoints = 16\n[solver]\ndt = 0.05\nhorizon = 0.25\n[experiment]\nperturbations = [1e-3, 1e-4]\ntolerance = 1.0\n",
    );
    let o = run(&["experiment", "--kind", "stability", "-c", &cfg, "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_config_exits_two_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "seed = 1\n\n[solver]\ndt = 0.1\nstep_size = 3\n");
    let o = run(&["picard", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5"), "{err}");

    let cfg = write_config(dir.path(), "syntax.toml", "[grid\npoints = 16\n");
    let o = run(&["picard", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["experiment", "--kind", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["norm", "--input", "/nonexistent.dhf1"]).status.code(), Some(2));
    assert_eq!(run(&["norm", "--input", "x", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn evolve_writes_diagnostics_and_charts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ev.toml",
        "[grid]\npoints = 16\n[solver]\ndt = 0.05\nhorizon = 0.5\nsnapshot_every = 5\n",
    );
    let out = dir.path().join("out");
    let o = run(&["evolve", "-c", &cfg, "-o", out.to_str().unwrap(), "--svg", "--snapshots"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let diag: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(diag["steps"], 10);
    assert!(diag["total_zero_mode_drift"].as_f64().unwrap() < 1e-12);
    assert!(std::fs::read_to_string(out.join("amplitude.svg")).unwrap().starts_with("<svg"));
    assert!(out.join("trajectory").join("index.json").exists());
}
