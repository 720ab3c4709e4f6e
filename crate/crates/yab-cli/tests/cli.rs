//! End-to-end checks of the binary: argument handling, exit codes, and
//! byte-level determinism of the generated files.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_yab-sim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).expect("output file exists")
}

/// Keeps the heavier invocations fast without changing behaviour.
const SMALL: [&str; 4] = ["--nsw", "128", "--set", "n_theta=36"];

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    // Clap's native usage exit code is remapped.
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--set", "nonsense", "capbounds"]).status.code(), Some(1));
    assert_eq!(
        run(&["--set", "no_such_key=1", "capbounds"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["--topology", "TRIANGLE", "capbounds"]).status.code(),
        Some(1)
    );
    let sweep_bad_metric = run(&["sweep", "--metrics", "power,nope"]);
    assert_eq!(sweep_bad_metric.status.code(), Some(1));
}

#[test]
fn capbounds_is_deterministic() {
    let a = run(&["capbounds"]);
    let b = run(&["capbounds"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("c_min_f = "));
    assert!(text.contains("within_bounds = true"));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = bin()
            .args(SMALL)
            .args(["--out-dir", dir.path().to_str().unwrap()])
            .args(["sweep", "--phi", "0,0.1", "--vdc", "200", "--metrics", "power"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = read(dir_a.path(), "sweep.csv");
    let b = read(dir_b.path(), "sweep.csv");
    assert_eq!(a, b);
    assert!(a.starts_with("# params:"));
}

#[test]
fn figure_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(SMALL)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["figure", "phase-power"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "phase-power.csv");
    assert!(csv.contains("theta_deg,p_a_yab_w"));
    let plot = read(dir.path(), "phase-power.plot");
    assert!(plot.contains("phase-power.csv"));
}

#[test]
fn dump_cycle_has_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(SMALL)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["dump-cycle", "--theta", "30", "--phi", "0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "cycle.csv");
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "theta,n,v_AN,v_Xx,v_XN,v_L,i_t");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 128);
}

#[test]
fn set_overrides_are_applied_and_recorded() {
    let dir_base = tempfile::tempdir().unwrap();
    let dir_set = tempfile::tempdir().unwrap();
    let base = bin()
        .args(SMALL)
        .args(["--out-dir", dir_base.path().to_str().unwrap()])
        .args(["dump-cycle", "--theta", "30", "--phi", "0.2"])
        .output()
        .unwrap();
    assert_eq!(base.status.code(), Some(0));
    let set = bin()
        .args(SMALL)
        .args(["--set", "v_dc=250"])
        .args(["--out-dir", dir_set.path().to_str().unwrap()])
        .args(["dump-cycle", "--theta", "30", "--phi", "0.2"])
        .output()
        .unwrap();
    assert_eq!(set.status.code(), Some(0));
    let a = read(dir_base.path(), "cycle.csv");
    let b = read(dir_set.path(), "cycle.csv");
    assert_ne!(a, b);
    assert!(a.contains("v_dc=200"));
    assert!(b.contains("v_dc=250"));
}

#[test]
fn config_file_feeds_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("converter.conf");
    std::fs::write(&config, "v_dc = 250\nn_theta = 36\nN_sw = 128\n").unwrap();
    let out = bin()
        .args(["--config", config.to_str().unwrap()])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["dump-cycle", "--theta", "30", "--phi", "0.2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(read(dir.path(), "cycle.csv").contains("v_dc=250"));

    let missing = run(&["--config", "/nonexistent/converter.conf", "capbounds"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn over_modulated_config_fails_validation() {
    let out = run(&["--set", "v_dc=150", "validate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("over-modulation"));
}

#[test]
fn oracle_check_passes_at_default_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["oracle-check", "--points", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "oracle-check.csv");
    assert!(csv.contains("N_sw=2048"));
    assert!(csv.contains("pooled_rel_rms="));
}

#[test]
fn oracle_check_flags_model_violation_with_exit_two() {
    // Starved of resolution the two solvers legitimately disagree beyond the
    // published bound, which must surface as the invariant-violation code.
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--nsw", "64"])
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["oracle-check", "--points", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
