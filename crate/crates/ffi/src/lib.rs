//! C ABI for `levy_scl`.
//!
//! Every fallible function returns an [`LsclStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! read back with [`lscl_last_error_message`]. Objects are opaque handles
//! created by `lscl_*_new`/`lscl_*_parse`/`lscl_*_sample` and released with
//! the matching `lscl_*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use levy_scl::entropy::EntropyFamily;
use levy_scl::estimators::{bv_seminorm, fit_rate, lp_norm};
use levy_scl::experiments::{
    emit_report, run_experiment, ExperimentConfig, ExperimentReport, RunOptions,
};
use levy_scl::levy_noise::{
    compensator_integral, Atom, JumpCoefficient, JumpPath, LevyMeasure, PowerLaw, SeedDerivation,
    SpatialProfile, StreamPurpose,
};
use levy_scl::solvers::{solve, Field, FluxModel, Grid1D, NumericalFlux, RecordMode, SolverConfig};
use levy_scl::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsclStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Contract = 4,
    Numerical = 5,
    Cfl = 6,
    BlowUp = 7,
    Config = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsclNoiseShape {
    Zero = 0,
    Linear = 1,
    Tanh = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsclFluxKind {
    /// `speed · u`
    Linear = 0,
    /// `u²/2 + drift · u`
    Burgers = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsclNumericalFlux {
    EngquistOsher = 0,
    Godunov = 1,
    LaxFriedrichs = 2,
}

/// Grid, flux and solver settings for [`lscl_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LsclSolveParams {
    pub x_min: f64,
    pub x_max: f64,
    pub flux_kind: LsclFluxKind,
    /// Speed for a linear flux, drift for Burgers.
    pub flux_param: f64,
    pub numerical_flux: LsclNumericalFlux,
    pub epsilon: f64,
    pub cfl: f64,
    pub max_dt: f64,
    pub horizon: f64,
}

/// Result of [`lscl_fit_rate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LsclRateFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub struct LsclMeasure(LevyMeasure);
pub struct LsclCoefficient(JumpCoefficient);
pub struct LsclPath(JumpPath);
pub struct LsclConfig(ExperimentConfig);
pub struct LsclReport(ExperimentReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LsclStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation { .. } => LsclStatus::Validation,
            Error::Argument { .. } => LsclStatus::InvalidArgument,
            Error::Contract(_) => LsclStatus::Contract,
            Error::Numerical(_) => LsclStatus::Numerical,
            Error::Cfl { .. } => LsclStatus::Cfl,
            Error::BlowUp { .. } => LsclStatus::BlowUp,
            Error::Config { .. } => LsclStatus::Config,
            Error::Io(_) => LsclStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(LsclStatus::NullPointer, format!("`{name}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(LsclStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LsclStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsclStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            LsclStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn input<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, n))
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{name}` is not valid UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn field(x_min: f64, x_max: f64, values: &[f64]) -> Result<Field, Failure> {
    let grid = Grid1D::new(x_min, x_max, values.len())?;
    Ok(Field::new(grid, values.to_vec())?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lscl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lscl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Atomic measure `Σ weights[i] δ_{marks[i]}`, simulated exactly.
///
/// # Safety
/// `marks` and `weights` must point to `n` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_measure_atomic(
    marks: *const f64,
    weights: *const f64,
    n: usize,
    out_measure: *mut *mut LsclMeasure,
) -> LsclStatus {
    guard(|| {
        let out_measure = out(out_measure, "out_measure")?;
        let marks = input(marks, n, "marks")?;
        let weights = input(weights, n, "weights")?;
        let atoms = marks
            .iter()
            .zip(weights)
            .map(|(&mark, &weight)| Atom { mark, weight })
            .collect();
        let m = LevyMeasure::atomic_exact(atoms);
        m.validate()?;
        *out_measure = boxed(LsclMeasure(m));
        Ok(())
    })
}

/// Power-law measure `scale · |z|^{-1-alpha}` on `0 < z <= z_max`, mirrored
/// when `symmetric`; jumps below `cut` are compensated, not simulated.
///
/// # Safety
/// `out_measure` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_measure_power_law(
    alpha: f64,
    scale: f64,
    z_max: f64,
    symmetric: bool,
    cut: f64,
    out_measure: *mut *mut LsclMeasure,
) -> LsclStatus {
    guard(|| {
        let out_measure = out(out_measure, "out_measure")?;
        let m = LevyMeasure::density(
            PowerLaw {
                alpha,
                scale,
                z_max,
                symmetric,
            },
            cut,
        );
        m.validate()?;
        *out_measure = boxed(LsclMeasure(m));
        Ok(())
    })
}

/// `ν(|z| >= kappa)`.
///
/// # Safety
/// `measure` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_measure_intensity(
    measure: *const LsclMeasure,
    kappa: f64,
    out_value: *mut f64,
) -> LsclStatus {
    guard(|| {
        let m = deref(measure, "measure")?;
        *out(out_value, "out_value")? = m.0.truncated_intensity(kappa)?;
        Ok(())
    })
}

/// # Safety
/// `measure` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lscl_measure_free(measure: *mut LsclMeasure) {
    free(measure)
}

/// Jump coefficient `scale · s(u) · (|z| ∧ 1)` with Lipschitz constant
/// `lambda_star` in `u`.
///
/// # Safety
/// `out_coefficient` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_coefficient_new(
    shape: LsclNoiseShape,
    scale: f64,
    lambda_star: f64,
    out_coefficient: *mut *mut LsclCoefficient,
) -> LsclStatus {
    guard(|| {
        let out_coefficient = out(out_coefficient, "out_coefficient")?;
        let c = match shape {
            LsclNoiseShape::Zero => JumpCoefficient::zero(),
            LsclNoiseShape::Linear => JumpCoefficient::linear(scale),
            LsclNoiseShape::Tanh => JumpCoefficient::tanh(scale),
        }
        .with_lambda_star(lambda_star);
        c.validate()?;
        *out_coefficient = boxed(LsclCoefficient(c));
        Ok(())
    })
}

/// Multiplies the coefficient by the Gaussian bump
/// `exp(-(x - center)² / (2 width²))`.
///
/// # Safety
/// `coefficient` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lscl_coefficient_set_bump(
    coefficient: *mut LsclCoefficient,
    center: f64,
    width: f64,
) -> LsclStatus {
    guard(|| {
        let c = out(coefficient, "coefficient")?;
        let updated = c.0.with_profile(SpatialProfile::Bump { center, width });
        updated.validate()?;
        c.0 = updated;
        Ok(())
    })
}

/// `η(x, u; z)`.
///
/// # Safety
/// `coefficient` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_coefficient_eval(
    coefficient: *const LsclCoefficient,
    x: f64,
    u: f64,
    z: f64,
    out_value: *mut f64,
) -> LsclStatus {
    guard(|| {
        let c = deref(coefficient, "coefficient")?;
        *out(out_value, "out_value")? = c.0.eval(x, u, z);
        Ok(())
    })
}

/// # Safety
/// `coefficient` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lscl_coefficient_free(coefficient: *mut LsclCoefficient) {
    free(coefficient)
}

/// `∫_{|z|>=kappa} η(x, u; z) ν(dz)`.
///
/// # Safety
/// Handles must be live and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_compensator_integral(
    coefficient: *const LsclCoefficient,
    measure: *const LsclMeasure,
    kappa: f64,
    x: f64,
    u: f64,
    out_value: *mut f64,
) -> LsclStatus {
    guard(|| {
        let c = deref(coefficient, "coefficient")?;
        let m = deref(measure, "measure")?;
        *out(out_value, "out_value")? = compensator_integral(&c.0, &m.0, kappa, x, u)?;
        Ok(())
    })
}

/// `sup_u ∫ (η − σ)² / (1 + u²) ν(dz)` over `n_u` states of `[u_min, u_max]`.
///
/// # Safety
/// Handles must be live; `out_value` writable; `out_argmax` may be null.
#[no_mangle]
pub unsafe extern "C" fn lscl_noise_distance(
    eta: *const LsclCoefficient,
    sigma: *const LsclCoefficient,
    measure: *const LsclMeasure,
    u_min: f64,
    u_max: f64,
    n_u: usize,
    out_value: *mut f64,
    out_argmax: *mut f64,
) -> LsclStatus {
    guard(|| {
        let eta = deref(eta, "eta")?;
        let sigma = deref(sigma, "sigma")?;
        let m = deref(measure, "measure")?;
        let out_value = out(out_value, "out_value")?;
        let d = levy_scl::entropy::noise_distance(&eta.0, &sigma.0, &m.0, (u_min, u_max), n_u)?;
        *out_value = d.value;
        if let Some(a) = out_argmax.as_mut() {
            *a = d.argmax_u;
        }
        Ok(())
    })
}

/// Samples path `path_index` of the ensemble seeded by `seed` on `[0, horizon]`,
/// using the measure's own cut.
///
/// # Safety
/// `measure` must be a live handle and `out_path` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_path_sample(
    measure: *const LsclMeasure,
    horizon: f64,
    seed: u64,
    path_index: u64,
    out_path: *mut *mut LsclPath,
) -> LsclStatus {
    guard(|| {
        let m = deref(measure, "measure")?;
        let out_path = out(out_path, "out_path")?;
        if path_index >= 1 << 56 {
            return Err(invalid(format!("path_index {path_index} out of range")));
        }
        let mut rng = SeedDerivation::new(seed).stream(path_index, StreamPurpose::JumpPath);
        let p = m.0.sample_path(m.0.cut, horizon, &mut rng)?;
        *out_path = boxed(LsclPath(p));
        Ok(())
    })
}

/// Number of jump events on the path.
///
/// # Safety
/// `path` must be a live handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_path_len(path: *const LsclPath, out_len: *mut usize) -> LsclStatus {
    guard(|| {
        let p = deref(path, "path")?;
        *out(out_len, "out_len")? = p.0.events().len();
        Ok(())
    })
}

/// Copies event times and marks into caller buffers of length `capacity`.
/// Fails with `BufferTooSmall` when the path has more events.
///
/// # Safety
/// `times` and `marks` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lscl_path_events(
    path: *const LsclPath,
    times: *mut f64,
    marks: *mut f64,
    capacity: usize,
) -> LsclStatus {
    guard(|| {
        let p = deref(path, "path")?;
        let events = p.0.events();
        if events.len() > capacity {
            return Err(Failure(
                LsclStatus::BufferTooSmall,
                format!("path has {} events, capacity is {capacity}", events.len()),
            ));
        }
        if events.is_empty() {
            return Ok(());
        }
        if times.is_null() || marks.is_null() {
            return Err(null("times/marks"));
        }
        let times = slice::from_raw_parts_mut(times, events.len());
        let marks = slice::from_raw_parts_mut(marks, events.len());
        for (i, e) in events.iter().enumerate() {
            times[i] = e.time;
            marks[i] = e.mark;
        }
        Ok(())
    })
}

/// # Safety
/// `path` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lscl_path_free(path: *mut LsclPath) {
    free(path)
}

/// Integrates `n_cells` cell averages `u` in place from `t = 0` to
/// `params.horizon` against `path` on a periodic grid.
///
/// # Safety
/// `params`, `coefficient`, `measure` and `path` must be live; `u` must
/// point to `n_cells` readable and writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lscl_solve(
    params: *const LsclSolveParams,
    coefficient: *const LsclCoefficient,
    measure: *const LsclMeasure,
    path: *const LsclPath,
    u: *mut f64,
    n_cells: usize,
) -> LsclStatus {
    guard(|| {
        let params = deref(params, "params")?;
        let c = deref(coefficient, "coefficient")?;
        let m = deref(measure, "measure")?;
        let p = deref(path, "path")?;
        if u.is_null() {
            return Err(null("u"));
        }
        let values = slice::from_raw_parts_mut(u, n_cells);
        let u0 = field(params.x_min, params.x_max, values)?;
        let flux = match params.flux_kind {
            LsclFluxKind::Linear => FluxModel::Linear {
                speed: params.flux_param,
            },
            LsclFluxKind::Burgers => FluxModel::Burgers {
                drift: params.flux_param,
            },
        };
        let numerical_flux = match params.numerical_flux {
            LsclNumericalFlux::EngquistOsher => NumericalFlux::EngquistOsher,
            LsclNumericalFlux::Godunov => NumericalFlux::Godunov,
            LsclNumericalFlux::LaxFriedrichs => NumericalFlux::LaxFriedrichs,
        };
        if !(params.horizon > 0.0 && params.horizon.is_finite()) {
            return Err(invalid(format!(
                "horizon must be positive, got {}",
                params.horizon
            )));
        }
        let cfg = SolverConfig {
            epsilon: params.epsilon,
            cfl: params.cfl,
            numerical_flux,
            snapshot_times: vec![params.horizon],
            max_dt: params.max_dt,
            record: RecordMode::Snapshots,
        };
        let traj = solve(&u0, &flux, &c.0, &m.0, &cfg, &p.0)?;
        let last = traj
            .last_snapshot()
            .ok_or_else(|| Failure(LsclStatus::Numerical, "solver returned no snapshot".into()))?;
        values.copy_from_slice(last.values());
        Ok(())
    })
}

fn entropy_family(xi: f64) -> Result<EntropyFamily, Failure> {
    Ok(EntropyFamily::new(xi)?)
}

/// Smoothed absolute value `β_ξ(r)`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_beta(xi: f64, r: f64, out_value: *mut f64) -> LsclStatus {
    guard(|| {
        *out(out_value, "out_value")? = entropy_family(xi)?.beta(r);
        Ok(())
    })
}

/// `β_ξ'(r)`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_beta_prime(xi: f64, r: f64, out_value: *mut f64) -> LsclStatus {
    guard(|| {
        *out(out_value, "out_value")? = entropy_family(xi)?.beta_prime(r);
        Ok(())
    })
}

/// `β_ξ''(r)`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_beta_second(xi: f64, r: f64, out_value: *mut f64) -> LsclStatus {
    guard(|| {
        *out(out_value, "out_value")? = entropy_family(xi)?.beta_second(r);
        Ok(())
    })
}

/// Periodic total variation `Σ |u_{i+1} − u_i|`.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_bv_seminorm(
    values: *const f64,
    n: usize,
    out_value: *mut f64,
) -> LsclStatus {
    guard(|| {
        let values = input(values, n, "values")?;
        let f = field(0.0, 1.0, values)?;
        *out(out_value, "out_value")? = bv_seminorm(&f);
        Ok(())
    })
}

/// Discrete `L^p` norm of cell averages on `[x_min, x_max)`; `p = INFINITY`
/// gives the max norm.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_lp_norm(
    x_min: f64,
    x_max: f64,
    values: *const f64,
    n: usize,
    p: f64,
    out_value: *mut f64,
) -> LsclStatus {
    guard(|| {
        let values = input(values, n, "values")?;
        let f = field(x_min, x_max, values)?;
        *out(out_value, "out_value")? = lp_norm(&f, p)?;
        Ok(())
    })
}

/// Least-squares fit of `log e = slope · log h + intercept`.
///
/// # Safety
/// `h` and `e` must point to `n` readable doubles; `out_fit` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_fit_rate(
    h: *const f64,
    e: *const f64,
    n: usize,
    out_fit: *mut LsclRateFit,
) -> LsclStatus {
    guard(|| {
        let h = input(h, n, "h")?;
        let e = input(e, n, "e")?;
        let out_fit = out(out_fit, "out_fit")?;
        let points: Vec<(f64, f64)> = h.iter().copied().zip(e.iter().copied()).collect();
        let fit = fit_rate(&points)?;
        *out_fit = LsclRateFit {
            slope: fit.slope,
            intercept: fit.intercept,
            max_residual: fit.max_residual,
        };
        Ok(())
    })
}

/// Parses and validates an experiment config from text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_config` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_config_parse(
    text: *const c_char,
    out_config: *mut *mut LsclConfig,
) -> LsclStatus {
    guard(|| {
        let text = c_str(text, "text")?;
        let out_config = out(out_config, "out_config")?;
        *out_config = boxed(LsclConfig(ExperimentConfig::parse(text)?));
        Ok(())
    })
}

/// Overrides the ensemble size and seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lscl_config_set_ensemble(
    config: *mut LsclConfig,
    paths: usize,
    seed: u64,
) -> LsclStatus {
    guard(|| {
        let c = out(config, "config")?;
        c.0.paths = paths;
        c.0.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lscl_config_free(config: *mut LsclConfig) {
    free(config)
}

/// Runs the experiment on `threads` workers (0 means all cores).
///
/// # Safety
/// `config` must be a live handle and `out_report` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_experiment_run(
    config: *const LsclConfig,
    threads: usize,
    out_report: *mut *mut LsclReport,
) -> LsclStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let out_report = out(out_report, "out_report")?;
        let mut opts = RunOptions::default();
        if threads > 0 {
            opts.threads = threads;
        }
        *out_report = boxed(LsclReport(run_experiment(&c.0, &opts)?));
        Ok(())
    })
}

/// Whether every verdict of the report passed.
///
/// # Safety
/// `report` must be a live handle and `out_passed` writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_report_passed(
    report: *const LsclReport,
    out_passed: *mut bool,
) -> LsclStatus {
    guard(|| {
        let r = deref(report, "report")?;
        *out(out_passed, "out_passed")? = r.0.passed();
        Ok(())
    })
}

/// Mean and standard error of the named report row.
///
/// # Safety
/// `report` must be live, `name` NUL-terminated, `out_mean` writable and
/// `out_std_error` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lscl_report_stat(
    report: *const LsclReport,
    name: *const c_char,
    out_mean: *mut f64,
    out_std_error: *mut f64,
) -> LsclStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let name = c_str(name, "name")?;
        let out_mean = out(out_mean, "out_mean")?;
        let stat =
            r.0.row(name)
                .ok_or_else(|| invalid(format!("no report row `{name}`")))?;
        *out_mean = stat.mean;
        if let Some(se) = out_std_error.as_mut() {
            *se = stat.std_error;
        }
        Ok(())
    })
}

/// Writes the CSV report files into `dir`.
///
/// # Safety
/// `report` must be live and `dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lscl_report_write(
    report: *const LsclReport,
    dir: *const c_char,
) -> LsclStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let dir = c_str(dir, "dir")?;
        emit_report(&r.0, Path::new(dir))?;
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lscl_report_free(report: *mut LsclReport) {
    free(report)
}
