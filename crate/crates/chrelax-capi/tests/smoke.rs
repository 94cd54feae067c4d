//! End-to-end exercises of the C entry points from Rust, covering the happy
//! paths and the documented failure modes.

use std::ffi::{c_char, CStr, CString};

use chrelax_capi::*;

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
t_final = 0.01
save_every = 5e-3

[initial]
phi = { kind = "cosines", terms = [{ mode = [1], amp = 0.2 }] }
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
t_final = 0.01
save_every = 5e-3

[initial]
phi = { kind = "cosines", terms = [{ mode = [1], amp = 0.2 }] }
rho = { kind = "cosines", terms = [{ mode = [1], amp = 0.05 }] }
"#;

fn last_error() -> String {
    let ptr = chrelax_last_error();
    assert!(!ptr.is_null(), "an error message was expected");
    unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string()
}

fn parse(toml: &str) -> *mut ChrelaxConfig {
    let text = CString::new(toml).unwrap();
    let mut config = std::ptr::null_mut();
    let status = unsafe { chrelax_config_from_toml(text.as_ptr(), &mut config) };
    assert_eq!(status, ChrelaxStatus::Ok);
    assert!(!config.is_null());
    config
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(chrelax_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn simulate_and_read_back() {
    let config = parse(SINGLE_TOML);

    let mut hash = [0 as c_char; 65];
    let status = unsafe { chrelax_config_hash(config, hash.as_mut_ptr(), hash.len()) };
    assert_eq!(status, ChrelaxStatus::Ok);
    let hash = unsafe { CStr::from_ptr(hash.as_ptr()) }.to_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);

    let mut traj = std::ptr::null_mut();
    let status = unsafe { chrelax_simulate(config, &mut traj) };
    assert_eq!(status, ChrelaxStatus::Ok);

    let len = unsafe { chrelax_trajectory_len(traj) };
    assert_eq!(len, 3, "0, 5e-3, 1e-2");
    let coeffs = unsafe { chrelax_trajectory_coeff_count(traj) };
    assert_eq!(coeffs, 8);

    let mut t = f64::NAN;
    assert_eq!(
        unsafe { chrelax_trajectory_time(traj, 2, &mut t) },
        ChrelaxStatus::Ok
    );
    assert!((t - 0.01).abs() < 1e-12);

    let mut state = vec![0.0f64; coeffs];
    assert_eq!(
        unsafe { chrelax_trajectory_state(traj, 0, state.as_mut_ptr(), state.len()) },
        ChrelaxStatus::Ok
    );
    let expect = 0.2 * (0.5 * 6.283185307179586f64).sqrt();
    assert!((state[1] - expect).abs() < 1e-15);

    let mut velocity = vec![0.0f64; coeffs];
    assert_eq!(
        unsafe { chrelax_trajectory_velocity(traj, 1, velocity.as_mut_ptr(), velocity.len()) },
        ChrelaxStatus::Ok
    );

    let mut energy = f64::NAN;
    assert_eq!(
        unsafe { chrelax_trajectory_energy(traj, 0, &mut energy) },
        ChrelaxStatus::Ok
    );
    assert!(energy.is_finite());

    assert_eq!(
        unsafe { chrelax_trajectory_time(traj, 99, &mut t) },
        ChrelaxStatus::IndexOutOfRange
    );
    assert!(last_error().contains("99"));

    let mut short = [0.0f64; 2];
    assert_eq!(
        unsafe { chrelax_trajectory_state(traj, 0, short.as_mut_ptr(), short.len()) },
        ChrelaxStatus::BufferTooSmall
    );

    unsafe {
        chrelax_trajectory_free(traj);
        chrelax_config_free(config);
    }
}

#[test]
fn simulate_writes_artifacts() {
    let config = parse(SINGLE_TOML);
    let dir = tempfile::tempdir().unwrap();
    let dir_c = CString::new(dir.path().to_str().unwrap()).unwrap();
    let status = unsafe { chrelax_simulate_to_dir(config, dir_c.as_ptr()) };
    assert_eq!(status, ChrelaxStatus::Ok);
    assert!(dir.path().join("manifest.json").is_file());
    assert!(dir.path().join("monitors.csv").is_file());
    unsafe { chrelax_config_free(config) };
}

#[test]
fn sweep_runs_and_reports_rates() {
    let config = parse(SWEEP_TOML);
    let mut sweep = std::ptr::null_mut();
    let status = unsafe { chrelax_sweep_run(config, 2, &mut sweep) };
    assert_eq!(status, ChrelaxStatus::Ok);
    assert_eq!(unsafe { chrelax_sweep_count(sweep) }, 3);

    let mut tau = f64::NAN;
    let mut errors = [f64::NAN; 4];
    assert_eq!(
        unsafe { chrelax_sweep_error_row(sweep, 0, &mut tau, errors.as_mut_ptr()) },
        ChrelaxStatus::Ok
    );
    assert_eq!(tau, 0.25);
    assert!(errors.iter().all(|e| e.is_finite() && *e > 0.0));

    let name = CString::new("c0_vstar").unwrap();
    let (mut slope, mut r_squared) = (f64::NAN, f64::NAN);
    assert_eq!(
        unsafe { chrelax_sweep_rate(sweep, name.as_ptr(), &mut slope, &mut r_squared) },
        ChrelaxStatus::Ok
    );
    assert!(slope.is_finite());
    assert!(r_squared.is_finite());

    let missing = CString::new("no_such_norm").unwrap();
    assert_eq!(
        unsafe { chrelax_sweep_rate(sweep, missing.as_ptr(), &mut slope, &mut r_squared) },
        ChrelaxStatus::InvalidParameter
    );
    assert!(last_error().contains("no_such_norm"));

    // A sweep config cannot be simulated directly.
    let mut traj = std::ptr::null_mut();
    assert_eq!(
        unsafe { chrelax_simulate(config, &mut traj) },
        ChrelaxStatus::InvalidConfig
    );

    unsafe {
        chrelax_sweep_free(sweep);
        chrelax_config_free(config);
    }
}

#[test]
fn verify_checks_run_through_the_boundary() {
    let (mut total, mut failed) = (0usize, 0usize);
    let status =
        unsafe { chrelax_verify_run(std::ptr::null(), 0, &mut total, &mut failed) };
    assert_eq!(status, ChrelaxStatus::Ok);
    assert!(total >= 20);
    assert_eq!(failed, 0);

    let filter = CString::new("neumann").unwrap();
    let status = unsafe { chrelax_verify_run(filter.as_ptr(), 1, &mut total, &mut failed) };
    assert_eq!(status, ChrelaxStatus::Ok);
    assert!(failed >= 2, "the injected fault must be caught");
}

#[test]
fn error_paths_set_messages_and_statuses() {
    let mut config = std::ptr::null_mut();
    assert_eq!(
        unsafe { chrelax_config_from_toml(std::ptr::null(), &mut config) },
        ChrelaxStatus::NullArgument
    );
    assert!(last_error().contains("text"));

    let bad = CString::new("not toml at all").unwrap();
    assert_eq!(
        unsafe { chrelax_config_from_toml(bad.as_ptr(), &mut config) },
        ChrelaxStatus::InvalidConfig
    );

    let missing = CString::new("/no/such/file.toml").unwrap();
    assert_eq!(
        unsafe { chrelax_config_from_file(missing.as_ptr(), &mut config) },
        ChrelaxStatus::Io
    );

    // Guard violations surface with their own status.
    let unstable = SINGLE_TOML
        .replace("dt = 1e-3", "dt = 40.0")
        .replace("t_final = 0.01", "t_final = 40.0")
        .replace("save_every = 5e-3", "save_every = 40.0")
        .replace("sigma = 0.1", "sigma = 0.01")
        .replace(
            "beta_coeffs = [[3, 1.0]]",
            "beta_coeffs = []\ndiagnostic = true",
        );
    let text = CString::new(unstable).unwrap();
    let mut cfg = std::ptr::null_mut();
    assert_eq!(
        unsafe { chrelax_config_from_toml(text.as_ptr(), &mut cfg) },
        ChrelaxStatus::Ok
    );
    let mut traj = std::ptr::null_mut();
    let status = unsafe { chrelax_simulate(cfg, &mut traj) };
    assert_eq!(status, ChrelaxStatus::GuardViolation);
    assert!(last_error().contains("positivity guard"));
    unsafe { chrelax_config_free(cfg) };
}
