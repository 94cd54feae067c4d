//! Drives the compiled binary end to end: determinism of artifacts, config
//! and guard failures with useful diagnostics, the verification suite, and
//! the report/compare flows.

use std::path::Path;
use std::process::Command;

const SINGLE_TOML: &str = r#"
[domain]
dim = 1
lengths = [6.283185307179586]
modes = [8]
grid = [12]

[potential]
beta_coeffs = [[3, 1.0]]
lambda = 1.0
nu = 1.0
sigma = 0.1

[run]
tau = 0.25
scheme = "imex1_hyperbolic"
dt = 1e-3
t_final = 0.02
save_every = 5e-3

[initial]
phi = { kind = "cosines", terms = [{ mode = [1], amp = 0.2 }] }
rho = { kind = "cosines", terms = [{ mode = [1], amp = 0.05 }] }
"#;

const SWEEP_TOML: &str = r#"
[domain]
dim = 1
lengths = [6.283185307179586]
modes = [8]
grid = [12]

[potential]
beta_coeffs = [[3, 1.0]]
lambda = 1.0
nu = 1.0
sigma = 0.1

[run]
tau_list = [0.25, 0.125, 0.0625]
scheme = "imex1_hyperbolic"
dt = 1e-3
t_final = 0.02
save_every = 5e-3

[initial]
phi = { kind = "cosines", terms = [{ mode = [1], amp = 0.2 }] }
"#;

struct CliOutput {
    success: bool,
    stdout: String,
    stderr: String,
}

fn run_cli(args: &[&str]) -> CliOutput {
    let output = Command::new(env!("CARGO_BIN_EXE_chrelax"))
        .args(args)
        .output()
        .expect("the binary must run");
    CliOutput {
        success: output.status.success(),
        stdout: String::from_utf8(output.stdout).unwrap(),
        stderr: String::from_utf8(output.stderr).unwrap(),
    }
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), SINGLE_TOML);
    let out_a = work.path().join("a");
    let out_b = work.path().join("b");

    for out in [&out_a, &out_b] {
        let run = run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
        assert!(run.success, "simulate failed: {}", run.stderr);
        assert!(run.stdout.contains("config hash:"));
    }
    for name in [
        "manifest.json",
        "trajectory_imex1_hyperbolic.csv",
        "velocity_imex1_hyperbolic.csv",
        "monitors.csv",
    ] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }

    let compare = run_cli(&[
        "report",
        "--dir",
        out_a.to_str().unwrap(),
        "--compare",
        out_b.to_str().unwrap(),
    ]);
    assert!(compare.success, "compare failed: {}", compare.stderr);
    assert!(compare.stdout.contains("directories match byte for byte"));
}

#[test]
fn compare_flags_a_tampered_artifact() {
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), SINGLE_TOML);
    let out_a = work.path().join("a");
    let out_b = work.path().join("b");
    for out in [&out_a, &out_b] {
        assert!(run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]).success);
    }
    let monitors = out_b.join("monitors.csv");
    let mut text = std::fs::read_to_string(&monitors).unwrap();
    text.push('x');
    std::fs::write(&monitors, text).unwrap();

    let compare = run_cli(&[
        "report",
        "--dir",
        out_a.to_str().unwrap(),
        "--compare",
        out_b.to_str().unwrap(),
    ]);
    assert!(!compare.success);
    assert!(compare.stdout.contains("DIFFERS: monitors.csv"));
}

#[test]
fn subcommands_reject_the_wrong_config_shape() {
    let work = tempfile::tempdir().unwrap();
    let single = write_config(work.path(), SINGLE_TOML);
    let out = work.path().join("out");

    let sweep_on_single = run_cli(&["sweep-tau", "--config", &single, "--out", out.to_str().unwrap()]);
    assert!(!sweep_on_single.success);
    assert!(sweep_on_single.stderr.contains("simulate"));

    let sweep_path = work.path().join("sweep.toml");
    std::fs::write(&sweep_path, SWEEP_TOML).unwrap();
    let simulate_on_sweep = run_cli(&[
        "simulate",
        "--config",
        sweep_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!simulate_on_sweep.success);
    assert!(simulate_on_sweep.stderr.contains("sweep-tau"));
}

#[test]
fn simulate_without_an_output_directory_is_an_error() {
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), SINGLE_TOML);
    let run = run_cli(&["simulate", "--config", &config]);
    assert!(!run.success);
    assert!(run.stderr.contains("no output directory"));
}

#[test]
fn guard_violating_step_size_reports_the_positivity_guard() {
    let unstable = SINGLE_TOML
        .replace("dt = 1e-3", "dt = 40.0")
        .replace("t_final = 0.02", "t_final = 40.0")
        .replace("save_every = 5e-3", "save_every = 40.0")
        .replace("sigma = 0.1", "sigma = 0.01")
        .replace(
            "beta_coeffs = [[3, 1.0]]",
            "beta_coeffs = []\ndiagnostic = true",
        );
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), &unstable);
    let out = work.path().join("out");
    let run = run_cli(&["simulate", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(!run.success);
    assert!(
        run.stderr.contains("positivity guard"),
        "stderr: {}",
        run.stderr
    );
}

#[test]
fn verify_lists_runs_and_catches_injected_faults() {
    let list = run_cli(&["verify", "--list"]);
    assert!(list.success);
    assert!(list.stdout.contains("laplacian-eigenvalue"));
    assert!(list.stdout.contains("mean-channel-bitwise"));

    let all = run_cli(&["verify"]);
    assert!(all.success, "checks failed: {}", all.stdout);
    assert!(all.stdout.contains(" 0 failed"));

    let faulted = run_cli(&["verify", "--filter", "neumann", "--fault", "neumann-sign"]);
    assert!(!faulted.success);
    assert!(faulted.stdout.contains("FAIL"));

    let unknown = run_cli(&["verify", "--filter", "no-such-check"]);
    assert!(!unknown.success);
    assert!(unknown.stderr.contains("no check name contains"));
}

#[test]
fn sweep_writes_artifacts_and_report_summarizes_them() {
    let work = tempfile::tempdir().unwrap();
    let config = write_config(work.path(), SWEEP_TOML);
    let out = work.path().join("sweep");

    let sweep = run_cli(&[
        "sweep-tau",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(sweep.success, "sweep failed: {}", sweep.stderr);
    assert!(sweep.stdout.contains("fit c0_vstar"));
    for name in ["manifest.json", "errors.csv", "ratefit.json", "stability.json"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }

    let report = run_cli(&["report", "--dir", out.to_str().unwrap()]);
    assert!(report.success, "report failed: {}", report.stderr);
    assert!(report.stdout.contains("kind: sweep"));
    assert!(report.stdout.contains("fit c0_vstar"));
    assert!(report.stdout.contains("stability ratios"));
}

#[test]
fn report_on_an_empty_directory_names_the_missing_manifest() {
    let work = tempfile::tempdir().unwrap();
    let run = run_cli(&["report", "--dir", work.path().to_str().unwrap()]);
    assert!(!run.success);
    assert!(run.stderr.contains("manifest.json"), "stderr: {}", run.stderr);
}
