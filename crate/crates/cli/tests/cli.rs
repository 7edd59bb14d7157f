//! End-to-end tests of the `beamnet` binary and the runner library: CSV
//! schema, metadata round-trip, determinism, error reporting, and the
//! worker-count override.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use beamnet_cli::config::{parse_config, resolve, Overrides, RawConfig};
use beamnet_cli::experiment::{metadata_path_for, run_experiment};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beamnet"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = binary().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .expect("CSV exists")
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn degree_recipe_emits_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("degree.csv");
    run_ok(&[
        "degree-vs-density",
        "--output",
        out.to_str().unwrap(),
        "--trials",
        "60",
        "--seed",
        "3",
        "--density-grid",
        "0.5,1",
        "--directivity-grid",
        "0,1",
    ]);
    let lines = csv_lines(&out);
    assert_eq!(
        lines[0],
        "directivity,density,analytic,mc_estimate,mc_std_error,mc_success_fraction,trials"
    );
    assert_eq!(lines.len(), 5, "header plus four grid points");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[6], "60");
        let analytic: f64 = fields[2].parse().unwrap();
        assert!(analytic > 0.0);
    }
}

#[test]
fn metadata_sidecar_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    run_ok(&[
        "connection-vs-distance",
        "--output",
        first.to_str().unwrap(),
        "--orientation",
        "180deg",
        "--trials",
        "200",
        "--seed",
        "11",
        "--distance-grid",
        "0.3,0.6",
        "--directivity-grid",
        "0,1",
    ]);

    // The sidecar is a complete config: running it must reproduce the CSV
    // byte for byte (after pointing the output somewhere fresh).
    let meta = metadata_path_for(&first);
    let mut spec = parse_config(&meta).unwrap();
    let second = dir.path().join("second.csv");
    spec.output = second.clone();
    run_experiment(&spec).unwrap();
    assert_eq!(
        fs::read(&first).unwrap(),
        fs::read(&second).unwrap(),
        "sidecar-driven rerun diverged"
    );
}

#[test]
fn identical_seeds_give_identical_bytes_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.csv");
    let dual = dir.path().join("dual.csv");
    let args = |path: &PathBuf| {
        vec![
            "rate-vs-distance".to_string(),
            "--output".into(),
            path.to_str().unwrap().into(),
            "--trials".into(),
            "150".into(),
            "--seed".into(),
            "7".into(),
            "--distance-grid".into(),
            "0.4,0.8".into(),
            "--directivity-grid".into(),
            "0.5".into(),
        ]
    };
    let first = binary()
        .args(args(&single))
        .env("BEAMNET_WORKERS", "1")
        .output()
        .unwrap();
    assert!(first.status.success());
    let second = binary()
        .args(args(&dual))
        .env("BEAMNET_WORKERS", "2")
        .output()
        .unwrap();
    assert!(second.status.success());
    assert_eq!(
        fs::read(&single).unwrap(),
        fs::read(&dual).unwrap(),
        "worker count changed the output bytes"
    );
}

#[test]
fn config_file_drives_a_run_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("job.toml");
    let out = dir.path().join("from-flag.csv");
    fs::write(
        &config,
        "kind = \"degree-vs-density\"\noutput = \"ignored.csv\"\n\
         [simulation]\ntrials = 40\nseed = 9\n\
         [sweep]\ndensity = [0.5]\ndirectivity = [0.0]\n",
    )
    .unwrap();
    run_ok(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(out.exists(), "--output must override the config file");
    let lines = csv_lines(&out);
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(",40"), "trials from the config: {}", lines[1]);
}

#[test]
fn wp_curve_needs_no_simulation_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wp.csv");
    run_ok(&[
        "wp-curve",
        "--output",
        out.to_str().unwrap(),
        "--exponent-grid",
        "4",
        "--directivity-grid",
        "0:1:0.5",
    ]);
    let lines = csv_lines(&out);
    assert_eq!(lines[0], "pathloss_exponent,directivity,analytic");
    assert_eq!(lines.len(), 4);
    // Directivity zero averages to the full circle.
    let isotropic: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((isotropic - std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn failures_exit_nonzero_with_a_machine_readable_line() {
    let output = binary()
        .args(["run", "--config", "/nonexistent/job.toml"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    let last = stderr.lines().last().unwrap_or_default();
    assert!(
        last.starts_with("{\"error\": \"io\"") && last.ends_with('}'),
        "stderr line: {last}"
    );

    let output = binary()
        .args(["degree-vs-density", "--output", "/tmp/x.csv", "--orthogonality", "1.5"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    let last = stderr.lines().last().unwrap_or_default();
    assert!(
        last.starts_with("{\"error\": \"invalid_param\"") && last.contains("orthogonality"),
        "stderr line: {last}"
    );
}

#[test]
fn bad_worker_counts_are_rejected() {
    let output = binary()
        .args(["wp-curve", "--output", "/tmp/unused.csv"])
        .env("BEAMNET_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("BEAMNET_WORKERS"), "stderr: {stderr}");
}

#[test]
fn help_and_version_succeed() {
    let help = binary().arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("degree-vs-density"));
    let version = binary().arg("--version").output().unwrap();
    assert!(version.status.success());
}

#[test]
fn orientation_grid_accepts_degree_suffixes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orient.csv");
    run_ok(&[
        "connection-vs-orientation",
        "--output",
        out.to_str().unwrap(),
        "--trials",
        "80",
        "--lobes-grid",
        "1",
        "--orientation-grid",
        "0deg:180deg:90deg",
    ]);
    let lines = csv_lines(&out);
    assert_eq!(lines[0], "lobes,orientation,analytic,mc_estimate,mc_std_error,trials");
    assert_eq!(lines.len(), 4);
    let second_angle: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((second_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn disagreements_are_reported_not_fatal() {
    // An absurdly tight allowance turns ordinary Monte Carlo noise into
    // violations; the run must still succeed and list them in the footer.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tight.csv");
    let raw: RawConfig = toml::from_str(&format!(
        "kind = \"connection-vs-distance\"\noutput = {:?}\n\
         agreement_factor = 0.0001\n\
         [simulation]\ntrials = 300\nseed = 2\n\
         [link]\norientation = \"180deg\"\n\
         [sweep]\ndistance = [0.3, 0.5, 0.7]\ndirectivity = [0.0]\n",
        out.to_str().unwrap()
    ))
    .unwrap();
    let spec = resolve(None, raw, &Overrides::default()).unwrap();
    let outcome = run_experiment(&spec).unwrap();
    assert_eq!(outcome.compared_rows, 3);
    assert!(
        !outcome.violations.is_empty(),
        "a 0.0001-sigma allowance should flag sampling noise"
    );
    let metadata = fs::read_to_string(&outcome.metadata_path).unwrap();
    assert!(metadata.contains("# disagreement at row"), "{metadata}");
}
