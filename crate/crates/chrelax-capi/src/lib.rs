//! C ABI over the chrelax solver.
//!
//! Every entry point is panic-safe: panics are caught at the boundary and
//! reported as a status code. Functions that can fail return a
//! [`ChrelaxStatus`]; on failure a thread-local message is retrievable with
//! [`chrelax_last_error`]. Handles are opaque and must be released with the
//! matching `_free` function exactly once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use chrelax::config::ExperimentConfig;
use chrelax::integrate::{run, Trajectory};
use chrelax::lab::{sweep_tau, SweepOutcome};
use chrelax::output::{write_simulation, write_sweep};
use chrelax::verify::{run_checks, FaultInjection};
use chrelax::Error;

/// Outcome of a C API call. Zero is success; anything else is an error whose
/// message is available from `chrelax_last_error`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChrelaxStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    InvalidConfig = 4,
    DomainMismatch = 5,
    GuardViolation = 6,
    Overflow = 7,
    Io = 8,
    MalformedArtifact = 9,
    BufferTooSmall = 10,
    IndexOutOfRange = 11,
    Panic = 12,
}

/// Opaque parsed and validated experiment configuration.
pub struct ChrelaxConfig {
    inner: ExperimentConfig,
}

/// Opaque sampled trajectory of one run.
pub struct ChrelaxTrajectory {
    inner: Trajectory,
}

/// Opaque result of a relaxation sweep.
pub struct ChrelaxSweep {
    inner: SweepOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("NUL bytes removed"));
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn status_of(error: &Error) -> ChrelaxStatus {
    match error {
        Error::InvalidParameter(_) => ChrelaxStatus::InvalidParameter,
        Error::InvalidConfig(_) | Error::ConfigParse(_) => ChrelaxStatus::InvalidConfig,
        Error::DomainMismatch(_) => ChrelaxStatus::DomainMismatch,
        Error::GuardViolation { .. } => ChrelaxStatus::GuardViolation,
        Error::NonFinite { .. } | Error::StepOverflow { .. } => ChrelaxStatus::Overflow,
        Error::MissingFile(_) | Error::Io { .. } => ChrelaxStatus::Io,
        Error::MalformedArtifact { .. } | Error::Json(_) => ChrelaxStatus::MalformedArtifact,
    }
}

fn fail(error: &Error) -> ChrelaxStatus {
    set_last_error(error.to_string());
    status_of(error)
}

fn guarded(f: impl FnOnce() -> ChrelaxStatus) -> ChrelaxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_last_error(format!("internal panic: {message}"));
            ChrelaxStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, ChrelaxStatus> {
    if ptr.is_null() {
        set_last_error(format!("{name} must not be null"));
        return Err(ChrelaxStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(format!("{name} is not valid UTF-8"));
        ChrelaxStatus::InvalidUtf8
    })
}

fn require<T>(ptr: *const T, name: &str) -> Result<(), ChrelaxStatus> {
    if ptr.is_null() {
        set_last_error(format!("{name} must not be null"));
        Err(ChrelaxStatus::NullArgument)
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chrelax_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on this thread, or null after a
/// success. The pointer is valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn chrelax_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Parse and validate a TOML configuration from memory.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_config_from_toml(
    text: *const c_char,
    out: *mut *mut ChrelaxConfig,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(out, "out") {
            return status;
        }
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match ExperimentConfig::from_toml_str(text) {
            Ok(config) => {
                clear_last_error();
                *out = Box::into_raw(Box::new(ChrelaxConfig { inner: config }));
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parse and validate a TOML configuration from a file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_config_from_file(
    path: *const c_char,
    out: *mut *mut ChrelaxConfig,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(out, "out") {
            return status;
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(status) => return status,
        };
        match ExperimentConfig::from_file(path) {
            Ok(config) => {
                clear_last_error();
                *out = Box::into_raw(Box::new(ChrelaxConfig { inner: config }));
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Write the configuration's canonical hash (64 hex digits plus NUL) into
/// `buf`; `len` must be at least 65.
///
/// # Safety
/// `config` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn chrelax_config_hash(
    config: *const ChrelaxConfig,
    buf: *mut c_char,
    len: usize,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(config, "config").and_then(|_| require(buf, "buf")) {
            return status;
        }
        let hash = match (*config).inner.canonical_hash() {
            Ok(hash) => hash,
            Err(e) => return fail(&e),
        };
        if len < hash.len() + 1 {
            set_last_error(format!("buffer of {len} bytes holds no {}-byte hash", hash.len() + 1));
            return ChrelaxStatus::BufferTooSmall;
        }
        std::ptr::copy_nonoverlapping(hash.as_ptr(), buf as *mut u8, hash.len());
        *buf.add(hash.len()) = 0;
        clear_last_error();
        ChrelaxStatus::Ok
    })
}

/// Release a configuration handle (null is allowed).
///
/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chrelax_config_free(config: *mut ChrelaxConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

fn simulate_inner(config: &ExperimentConfig) -> chrelax::Result<Trajectory> {
    if config.is_sweep() {
        return Err(Error::InvalidConfig(
            "this configuration sweeps run.tau_list; use chrelax_sweep_run".into(),
        ));
    }
    let single = config.build_single()?;
    run(
        &single.system,
        single.state,
        &single.cfg,
        single.t_final,
        single.save_every,
    )
}

/// Run the configured simulation and return a trajectory handle.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_simulate(
    config: *const ChrelaxConfig,
    out: *mut *mut ChrelaxTrajectory,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(config, "config").and_then(|_| require(out, "out")) {
            return status;
        }
        match simulate_inner(&(*config).inner) {
            Ok(traj) => {
                clear_last_error();
                *out = Box::into_raw(Box::new(ChrelaxTrajectory { inner: traj }));
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Run the configured simulation and write its artifacts into `dir`.
///
/// # Safety
/// `config` must be a live handle and `dir` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chrelax_simulate_to_dir(
    config: *const ChrelaxConfig,
    dir: *const c_char,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(config, "config") {
            return status;
        }
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(status) => return status,
        };
        let config = &(*config).inner;
        let traj = match simulate_inner(config) {
            Ok(traj) => traj,
            Err(e) => return fail(&e),
        };
        match write_simulation(Path::new(dir), config, &traj) {
            Ok(_) => {
                clear_last_error();
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of saved samples.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_len(traj: *const ChrelaxTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).inner.len()
}

/// Number of coefficients per saved state.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_coeff_count(traj: *const ChrelaxTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).inner.phi(0).to_flat().len()
}

/// Time of sample `i`.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_time(
    traj: *const ChrelaxTrajectory,
    i: usize,
    out: *mut f64,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(traj, "traj").and_then(|_| require(out, "out")) {
            return status;
        }
        let times = (*traj).inner.times();
        if i >= times.len() {
            set_last_error(format!("sample {i} of {}", times.len()));
            return ChrelaxStatus::IndexOutOfRange;
        }
        *out = times[i];
        clear_last_error();
        ChrelaxStatus::Ok
    })
}

unsafe fn copy_state(
    traj: *const ChrelaxTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
    velocity: bool,
) -> ChrelaxStatus {
    if let Err(status) = require(traj, "traj").and_then(|_| require(buf, "buf")) {
        return status;
    }
    let inner = &(*traj).inner;
    if i >= inner.len() {
        set_last_error(format!("sample {i} of {}", inner.len()));
        return ChrelaxStatus::IndexOutOfRange;
    }
    let field = if velocity {
        match inner.rho(i) {
            Some(rho) => rho,
            None => {
                set_last_error("this run has no velocity field (tau = 0)".into());
                return ChrelaxStatus::InvalidParameter;
            }
        }
    } else {
        inner.phi(i)
    };
    let flat = field.to_flat();
    if len != flat.len() {
        set_last_error(format!(
            "buffer holds {len} values but the state has {}",
            flat.len()
        ));
        return ChrelaxStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(flat.as_ptr(), buf, flat.len());
    clear_last_error();
    ChrelaxStatus::Ok
}

/// Copy the coefficients of sample `i` into `buf` (length from
/// `chrelax_trajectory_coeff_count`).
///
/// # Safety
/// `traj` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_state(
    traj: *const ChrelaxTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> ChrelaxStatus {
    guarded(|| copy_state(traj, i, buf, len, false))
}

/// Copy the velocity coefficients of sample `i` into `buf`; fails for runs
/// without a velocity (tau = 0).
///
/// # Safety
/// `traj` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_velocity(
    traj: *const ChrelaxTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> ChrelaxStatus {
    guarded(|| copy_state(traj, i, buf, len, true))
}

/// Total energy recorded at sample `i`.
///
/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_energy(
    traj: *const ChrelaxTrajectory,
    i: usize,
    out: *mut f64,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(traj, "traj").and_then(|_| require(out, "out")) {
            return status;
        }
        let monitors = (*traj).inner.monitors();
        if i >= monitors.len() {
            set_last_error(format!("sample {i} of {}", monitors.len()));
            return ChrelaxStatus::IndexOutOfRange;
        }
        *out = monitors[i].energy_total;
        clear_last_error();
        ChrelaxStatus::Ok
    })
}

/// Release a trajectory handle (null is allowed).
///
/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chrelax_trajectory_free(traj: *mut ChrelaxTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Run the configured relaxation sweep with `jobs` worker threads and return
/// a sweep handle.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_run(
    config: *const ChrelaxConfig,
    jobs: usize,
    out: *mut *mut ChrelaxSweep,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(config, "config").and_then(|_| require(out, "out")) {
            return status;
        }
        let plan = match (*config).inner.build_sweep() {
            Ok(plan) => plan,
            Err(e) => return fail(&e),
        };
        match sweep_tau(&plan, jobs) {
            Ok(outcome) => {
                clear_last_error();
                *out = Box::into_raw(Box::new(ChrelaxSweep { inner: outcome }));
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Run the configured sweep and write its artifacts into `dir`.
///
/// # Safety
/// `config` must be a live handle and `dir` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_to_dir(
    config: *const ChrelaxConfig,
    jobs: usize,
    dir: *const c_char,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(config, "config") {
            return status;
        }
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(status) => return status,
        };
        let config = &(*config).inner;
        let outcome = match config.build_sweep().and_then(|plan| sweep_tau(&plan, jobs)) {
            Ok(outcome) => outcome,
            Err(e) => return fail(&e),
        };
        match write_sweep(Path::new(dir), config, &outcome) {
            Ok(_) => {
                clear_last_error();
                ChrelaxStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of tau values measured by the sweep.
///
/// # Safety
/// `sweep` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_count(sweep: *const ChrelaxSweep) -> usize {
    if sweep.is_null() {
        return 0;
    }
    (*sweep).inner.reports.len()
}

/// Copy row `i` of the sweep error table: tau plus the four error norms in
/// file order (c0_vstar, l2_w, l2_wstar_mu, l2_h_w).
///
/// # Safety
/// `sweep` must be a live handle; `out_tau` and `out_errors` (4 doubles)
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_error_row(
    sweep: *const ChrelaxSweep,
    i: usize,
    out_tau: *mut f64,
    out_errors: *mut f64,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(sweep, "sweep")
            .and_then(|_| require(out_tau, "out_tau"))
            .and_then(|_| require(out_errors, "out_errors"))
        {
            return status;
        }
        let reports = &(*sweep).inner.reports;
        if i >= reports.len() {
            set_last_error(format!("row {i} of {}", reports.len()));
            return ChrelaxStatus::IndexOutOfRange;
        }
        let r = &reports[i];
        *out_tau = r.tau;
        for (j, (_, value)) in r.norm_fields().into_iter().enumerate() {
            *out_errors.add(j) = value;
        }
        clear_last_error();
        ChrelaxStatus::Ok
    })
}

/// Fitted decay rate of one error norm (name as in the error table header).
///
/// # Safety
/// `sweep` must be a live handle, `name` a valid NUL-terminated string, and
/// the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_rate(
    sweep: *const ChrelaxSweep,
    name: *const c_char,
    out_slope: *mut f64,
    out_r_squared: *mut f64,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(sweep, "sweep")
            .and_then(|_| require(out_slope, "out_slope"))
            .and_then(|_| require(out_r_squared, "out_r_squared"))
        {
            return status;
        }
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(status) => return status,
        };
        match (*sweep).inner.fits.get(name) {
            Some(fit) => {
                *out_slope = fit.slope;
                *out_r_squared = fit.r_squared;
                clear_last_error();
                ChrelaxStatus::Ok
            }
            None => {
                set_last_error(format!("no rate fit named '{name}'"));
                ChrelaxStatus::InvalidParameter
            }
        }
    })
}

/// Release a sweep handle (null is allowed).
///
/// # Safety
/// `sweep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn chrelax_sweep_free(sweep: *mut ChrelaxSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

/// Run the built-in verification checks. `filter` (nullable) selects checks
/// by substring; a nonzero `inject_neumann_sign` flips the sign of the
/// zero-mean inverse Laplacian to prove the checks catch it. Writes the
/// number of checks run and the number failed.
///
/// # Safety
/// `filter` must be null or a valid NUL-terminated string; the out pointers
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn chrelax_verify_run(
    filter: *const c_char,
    inject_neumann_sign: i32,
    out_total: *mut usize,
    out_failed: *mut usize,
) -> ChrelaxStatus {
    guarded(|| {
        if let Err(status) = require(out_total, "out_total")
            .and_then(|_| require(out_failed, "out_failed"))
        {
            return status;
        }
        let filter = if filter.is_null() {
            None
        } else {
            match str_arg(filter, "filter") {
                Ok(f) => Some(f),
                Err(status) => return status,
            }
        };
        let faults = FaultInjection {
            neumann_sign: inject_neumann_sign != 0,
        };
        let results = run_checks(filter, &faults);
        *out_total = results.len();
        *out_failed = results.iter().filter(|r| !r.pass).count();
        clear_last_error();
        ChrelaxStatus::Ok
    })
}
