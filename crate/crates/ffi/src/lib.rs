//! C ABI for the splitpde integrators.
//!
//! All objects are opaque handles created and destroyed through this API;
//! every fallible call returns a [`SplitpdeStatus`] and stores a descriptive
//! message retrievable with [`splitpde_last_error_message`] on failure.

use std::cell::RefCell;
use std::os::raw::c_char;

use splitpde::harness::count_local_maxima;
use splitpde::integrators::{integrate, Scheme, StepperConfig};
use splitpde::models::{
    caginalp_initial, grayscott_initial, CaginalpParams, CaginalpProblem, GrayScottParams,
    GrayScottProblem, SplitProblem,
};
use splitpde::norms;
use splitpde::{Error, State};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitpdeStatus {
    Ok = 0,
    NullPointer = 1,
    ConfigError = 2,
    NumericalError = 3,
}

/// Time-stepping scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitpdeScheme {
    PeacemanRachford = 0,
    Lie = 1,
}

impl From<SplitpdeScheme> for Scheme {
    fn from(s: SplitpdeScheme) -> Scheme {
        match s {
            SplitpdeScheme::PeacemanRachford => Scheme::PeacemanRachford,
            SplitpdeScheme::Lie => Scheme::Lie,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> SplitpdeStatus {
    match err {
        Error::Config(_) | Error::Argument(_) => SplitpdeStatus::ConfigError,
        _ => SplitpdeStatus::NumericalError,
    }
}

fn fail(err: Error) -> SplitpdeStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Opaque problem handle: the split operators plus the benchmark initial data.
pub struct SplitpdeProblem {
    problem: Box<dyn SplitProblem>,
    initial: State,
}

/// Opaque two-component state handle.
pub struct SplitpdeState {
    state: State,
}

/// Copies the most recent error message for the calling thread into `buf`
/// (NUL-terminated, truncated to `cap` bytes). Returns the full message
/// length in bytes.
#[no_mangle]
pub unsafe extern "C" fn splitpde_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a Caginalp solidification problem on an `n x n` periodic grid
/// over `(-pi, pi)^2` with latent-heat coupling `ell`.
#[no_mangle]
pub unsafe extern "C" fn splitpde_problem_caginalp(
    n: u32,
    ell: f64,
    out: *mut *mut SplitpdeProblem,
) -> SplitpdeStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return SplitpdeStatus::NullPointer;
    }
    let build = || -> splitpde::Result<SplitpdeProblem> {
        let grid = splitpde::grid::make_grid(n as usize, std::f64::consts::PI)?;
        let params = CaginalpParams::new(ell)?;
        let initial = caginalp_initial(&grid, &params);
        Ok(SplitpdeProblem {
            problem: Box::new(CaginalpProblem::new(grid, params)),
            initial,
        })
    };
    match build() {
        Ok(p) => {
            *out = Box::into_raw(Box::new(p));
            SplitpdeStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a Gray-Scott problem on an `n x n` periodic grid over
/// `(-pi, pi)^2`.
#[no_mangle]
pub unsafe extern "C" fn splitpde_problem_gray_scott(
    n: u32,
    d1: f64,
    d2: f64,
    l1: f64,
    l2: f64,
    out: *mut *mut SplitpdeProblem,
) -> SplitpdeStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return SplitpdeStatus::NullPointer;
    }
    let build = || -> splitpde::Result<SplitpdeProblem> {
        let grid = splitpde::grid::make_grid(n as usize, std::f64::consts::PI)?;
        let params = GrayScottParams::new(d1, d2, l1, l2)?;
        let initial = grayscott_initial(&grid);
        Ok(SplitpdeProblem {
            problem: Box::new(GrayScottProblem::new(grid, params)),
            initial,
        })
    };
    match build() {
        Ok(p) => {
            *out = Box::into_raw(Box::new(p));
            SplitpdeStatus::Ok
        }
        Err(e) => fail(e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn splitpde_problem_free(problem: *mut SplitpdeProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Grid points per dimension of the problem's grid.
#[no_mangle]
pub unsafe extern "C" fn splitpde_problem_grid_size(problem: *const SplitpdeProblem) -> u32 {
    if problem.is_null() {
        return 0;
    }
    (*problem).problem.grid().n as u32
}

/// Fresh copy of the problem's benchmark initial state.
#[no_mangle]
pub unsafe extern "C" fn splitpde_initial_state(
    problem: *const SplitpdeProblem,
    out: *mut *mut SplitpdeState,
) -> SplitpdeStatus {
    if problem.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(SplitpdeState {
        state: (*problem).initial.clone(),
    }));
    SplitpdeStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn splitpde_state_free(state: *mut SplitpdeState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

#[no_mangle]
pub unsafe extern "C" fn splitpde_state_clone(
    state: *const SplitpdeState,
    out: *mut *mut SplitpdeState,
) -> SplitpdeStatus {
    if state.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(SplitpdeState {
        state: (*state).state.clone(),
    }));
    SplitpdeStatus::Ok
}

/// Copies one component (`0` or `1`) into `buf`, row-major, `len == n*n`.
#[no_mangle]
pub unsafe extern "C" fn splitpde_state_read(
    state: *const SplitpdeState,
    component: u32,
    buf: *mut f64,
    len: usize,
) -> SplitpdeStatus {
    if state.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    let field = match component {
        0 => &(*state).state.c0,
        1 => &(*state).state.c1,
        _ => {
            set_error(format!("component must be 0 or 1, got {component}"));
            return SplitpdeStatus::ConfigError;
        }
    };
    if len != field.data.len() {
        set_error(format!("buffer length {len}, expected {}", field.data.len()));
        return SplitpdeStatus::ConfigError;
    }
    std::ptr::copy_nonoverlapping(field.data.as_ptr(), buf, len);
    SplitpdeStatus::Ok
}

/// Overwrites one component (`0` or `1`) from `buf`, row-major, `len == n*n`.
#[no_mangle]
pub unsafe extern "C" fn splitpde_state_write(
    state: *mut SplitpdeState,
    component: u32,
    buf: *const f64,
    len: usize,
) -> SplitpdeStatus {
    if state.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    let field = match component {
        0 => &mut (*state).state.c0,
        1 => &mut (*state).state.c1,
        _ => {
            set_error(format!("component must be 0 or 1, got {component}"));
            return SplitpdeStatus::ConfigError;
        }
    };
    if len != field.data.len() {
        set_error(format!("buffer length {len}, expected {}", field.data.len()));
        return SplitpdeStatus::ConfigError;
    }
    std::ptr::copy_nonoverlapping(buf, field.data.as_mut_ptr(), len);
    SplitpdeStatus::Ok
}

/// Advances `state` in place by `n_steps` steps of size `h`. With
/// `enforce_stability` nonzero a violated step-size restriction is an error.
#[no_mangle]
pub unsafe extern "C" fn splitpde_integrate(
    problem: *const SplitpdeProblem,
    scheme: SplitpdeScheme,
    h: f64,
    n_steps: usize,
    enforce_stability: u8,
    state: *mut SplitpdeState,
) -> SplitpdeStatus {
    if problem.is_null() || state.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    let cfg = StepperConfig {
        scheme: scheme.into(),
        h,
        n_steps,
        enforce_stability: enforce_stability != 0,
    };
    match integrate((*problem).problem.as_ref(), &cfg, &(*state).state, &[]) {
        Ok((u, _)) => {
            (*state).state = u;
            SplitpdeStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Error between two states in the problem's model norm.
#[no_mangle]
pub unsafe extern "C" fn splitpde_error_norm(
    problem: *const SplitpdeProblem,
    a: *const SplitpdeState,
    b: *const SplitpdeState,
    out: *mut f64,
) -> SplitpdeStatus {
    if problem.is_null() || a.is_null() || b.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    let kind = (*problem).problem.norm_kind();
    match norms::error_norm(kind, &(*a).state, &(*b).state) {
        Ok(v) => {
            *out = v;
            SplitpdeStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Strict 8-neighbor local maxima of one component above `threshold`
/// (periodic wrap), the spot-replication diagnostic.
#[no_mangle]
pub unsafe extern "C" fn splitpde_count_local_maxima(
    state: *const SplitpdeState,
    component: u32,
    threshold: f64,
    out: *mut usize,
) -> SplitpdeStatus {
    if state.is_null() || out.is_null() {
        set_error("null pointer argument");
        return SplitpdeStatus::NullPointer;
    }
    let field = match component {
        0 => &(*state).state.c0,
        1 => &(*state).state.c1,
        _ => {
            set_error(format!("component must be 0 or 1, got {component}"));
            return SplitpdeStatus::ConfigError;
        }
    };
    *out = count_local_maxima(field, threshold);
    SplitpdeStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caginalp_round_trip_through_ffi() {
        unsafe {
            let mut p: *mut SplitpdeProblem = std::ptr::null_mut();
            assert_eq!(splitpde_problem_caginalp(16, 0.5, &mut p), SplitpdeStatus::Ok);
            assert_eq!(splitpde_problem_grid_size(p), 16);

            let mut s: *mut SplitpdeState = std::ptr::null_mut();
            assert_eq!(splitpde_initial_state(p, &mut s), SplitpdeStatus::Ok);
            let mut s0: *mut SplitpdeState = std::ptr::null_mut();
            assert_eq!(splitpde_state_clone(s, &mut s0), SplitpdeStatus::Ok);

            assert_eq!(
                splitpde_integrate(p, SplitpdeScheme::PeacemanRachford, 1.0 / 16.0, 16, 1, s),
                SplitpdeStatus::Ok
            );
            let mut err = 0.0;
            assert_eq!(splitpde_error_norm(p, s, s0, &mut err), SplitpdeStatus::Ok);
            assert!(err > 0.0);

            let mut buf = vec![0.0f64; 16 * 16];
            assert_eq!(splitpde_state_read(s, 0, buf.as_mut_ptr(), buf.len()), SplitpdeStatus::Ok);
            assert!(buf.iter().all(|v| v.is_finite()));

            splitpde_state_free(s0);
            splitpde_state_free(s);
            splitpde_problem_free(p);
        }
    }

    #[test]
    fn invalid_grid_reports_config_error_with_message() {
        unsafe {
            let mut p: *mut SplitpdeProblem = std::ptr::null_mut();
            let status = splitpde_problem_caginalp(7, 0.5, &mut p);
            assert_eq!(status, SplitpdeStatus::ConfigError);
            let mut buf = vec![0i8; 256];
            let len = splitpde_last_error_message(buf.as_mut_ptr(), buf.len());
            assert!(len > 0);
        }
    }

    #[test]
    fn stability_violation_is_numerical_error() {
        unsafe {
            let mut p: *mut SplitpdeProblem = std::ptr::null_mut();
            assert_eq!(splitpde_problem_caginalp(8, 0.5, &mut p), SplitpdeStatus::Ok);
            let mut s: *mut SplitpdeState = std::ptr::null_mut();
            assert_eq!(splitpde_initial_state(p, &mut s), SplitpdeStatus::Ok);
            // M[F] = 1, h = 2 > 1 with enforcement on
            let status = splitpde_integrate(p, SplitpdeScheme::PeacemanRachford, 2.0, 1, 1, s);
            assert_eq!(status, SplitpdeStatus::NumericalError);
            splitpde_state_free(s);
            splitpde_problem_free(p);
        }
    }

    #[test]
    fn gray_scott_maxima_through_ffi() {
        unsafe {
            let mut p: *mut SplitpdeProblem = std::ptr::null_mut();
            assert_eq!(
                splitpde_problem_gray_scott(64, 8e-4, 4e-4, 0.024, 0.084, &mut p),
                SplitpdeStatus::Ok
            );
            let mut s: *mut SplitpdeState = std::ptr::null_mut();
            assert_eq!(splitpde_initial_state(p, &mut s), SplitpdeStatus::Ok);
            let mut count = 0usize;
            assert_eq!(
                splitpde_count_local_maxima(s, 1, 0.1, &mut count),
                SplitpdeStatus::Ok
            );
            assert_eq!(count, 4); // the four initial bumps
            splitpde_state_free(s);
            splitpde_problem_free(p);
        }
    }
}
