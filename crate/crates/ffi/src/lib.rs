//! C interface. Objects cross the boundary as opaque handles created by
//! `*_new`/`*_from_json` functions and released with the matching `*_free`.
//! Every fallible call returns a [`FracdynStatus`]; on failure a message is
//! kept per thread and read with [`fracdyn_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fracdyn::fracsolve::ml_propagate;
use fracdyn::lindblad::{DensityMatrix, GkslGenerator};
use fracdyn::specfun::{gamma_fn, m_wright, mittag_leffler};
use fracdyn::spinboson::{dephasing_q, exact_coherence, BathSpec};
use fracdyn::subordination::divisibility_defect;
use fracdyn::{Error, FractionalOrder};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Validation = 4,
    Accuracy = 5,
    Instability = 6,
    IllConditioned = 7,
    Estimation = 8,
    Json = 9,
    BufferTooSmall = 10,
    Internal = 11,
    Panic = 12,
}

/// Quantum dynamical generator (Hamiltonian plus jump channels).
pub struct FracdynGenerator(GkslGenerator);

/// Density matrix.
pub struct FracdynState(DensityMatrix);

/// Spin-boson bath parameters.
pub struct FracdynBath(BathSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> FracdynStatus {
    match err {
        Error::Domain(_) => FracdynStatus::Domain,
        Error::Validation(_) => FracdynStatus::Validation,
        Error::Accuracy { .. } => FracdynStatus::Accuracy,
        Error::Instability { .. } => FracdynStatus::Instability,
        Error::IllConditioned { .. } => FracdynStatus::IllConditioned,
        Error::Estimation(_) => FracdynStatus::Estimation,
        Error::Json(_) => FracdynStatus::Json,
        Error::Internal(_) | Error::Io(_) => FracdynStatus::Internal,
    }
}

struct Fail(FracdynStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FracdynStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, turning errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> FracdynStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FracdynStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside fracdyn".into());
            FracdynStatus::Panic
        }
    }
}

fn order(alpha: f64) -> Result<FractionalOrder, Fail> {
    Ok(FractionalOrder::new(alpha)?)
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail(FracdynStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fracdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fracdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Γ(x).
///
/// # Safety
/// `result` must be NULL or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_gamma(x: f64, result: *mut f64) -> FracdynStatus {
    guard(|| {
        *out(result, "result")? = gamma_fn(x)?;
        Ok(())
    })
}

/// E_α(z) for real z and 0 < α ≤ 1.
///
/// # Safety
/// `result` must be NULL or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_mittag_leffler(alpha: f64, z: f64, result: *mut f64) -> FracdynStatus {
    guard(|| {
        *out(result, "result")? = mittag_leffler(order(alpha)?, z)?;
        Ok(())
    })
}

/// M-Wright function M_α(z) for z ≥ 0 and 0 < α < 1.
///
/// # Safety
/// `result` must be NULL or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_m_wright(alpha: f64, z: f64, result: *mut f64) -> FracdynStatus {
    guard(|| {
        *out(result, "result")? = m_wright(order(alpha)?, z)?;
        Ok(())
    })
}

/// Semigroup defect |E(t) − E(t−τ)E(τ)| of a relaxing mode with rate λ.
///
/// # Safety
/// `result` must be NULL or point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_divisibility_defect(
    alpha: f64,
    lambda: f64,
    t: f64,
    tau: f64,
    result: *mut f64,
) -> FracdynStatus {
    guard(|| {
        *out(result, "result")? = divisibility_defect(order(alpha)?, lambda, t, tau)?;
        Ok(())
    })
}

/// Parses a generator from its JSON layout.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `generator` must be NULL
/// or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_generator_from_json(
    json: *const c_char,
    generator: *mut *mut FracdynGenerator,
) -> FracdynStatus {
    guard(|| {
        let slot = out(generator, "generator")?;
        let gen = GkslGenerator::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(FracdynGenerator(gen)));
        Ok(())
    })
}

/// Qubit with H = (ε/2)σ_z and dephasing σ_z at rate γ.
///
/// # Safety
/// `generator` must be NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_generator_dephasing_qubit(
    epsilon: f64,
    gamma: f64,
    generator: *mut *mut FracdynGenerator,
) -> FracdynStatus {
    guard(|| {
        let slot = out(generator, "generator")?;
        let gen = GkslGenerator::dephasing_qubit(epsilon, gamma)?;
        *slot = Box::into_raw(Box::new(FracdynGenerator(gen)));
        Ok(())
    })
}

/// Hilbert-space dimension, or 0 for NULL.
///
/// # Safety
/// `generator` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_generator_dim(generator: *const FracdynGenerator) -> usize {
    generator.as_ref().map_or(0, |g| g.0.dim())
}

/// # Safety
/// `generator` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_generator_free(generator: *mut FracdynGenerator) {
    if !generator.is_null() {
        drop(Box::from_raw(generator));
    }
}

/// Parses a density matrix from its JSON layout.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `state` must be NULL or
/// point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_state_from_json(json: *const c_char, state: *mut *mut FracdynState) -> FracdynStatus {
    guard(|| {
        let slot = out(state, "state")?;
        let rho = DensityMatrix::from_json(text(json, "json")?)?;
        *slot = Box::into_raw(Box::new(FracdynState(rho)));
        Ok(())
    })
}

/// The qubit state |+⟩⟨+|.
///
/// # Safety
/// `state` must be NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_state_plus(state: *mut *mut FracdynState) -> FracdynStatus {
    guard(|| {
        *out(state, "state")? = Box::into_raw(Box::new(FracdynState(DensityMatrix::plus())));
        Ok(())
    })
}

/// Dimension of the state, or 0 for NULL.
///
/// # Safety
/// `state` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_state_dim(state: *const FracdynState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the entries row-major as interleaved (re, im) pairs; `len` is the
/// buffer length in doubles and must be at least 2·dim².
///
/// # Safety
/// `state` must be NULL or a live handle; `buffer` must be NULL or point to
/// `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_state_entries(
    state: *const FracdynState,
    buffer: *mut f64,
    len: usize,
) -> FracdynStatus {
    guard(|| {
        let rho = &handle(state, "state")?.0;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let entries = rho.row_major();
        if len < 2 * entries.len() {
            return Err(Fail(
                FracdynStatus::BufferTooSmall,
                format!("buffer holds {len} doubles, {} needed", 2 * entries.len()),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, 2 * entries.len());
        for (pair, z) in dst.chunks_exact_mut(2).zip(entries) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_state_free(state: *mut FracdynState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// ρ(t) of the fractional master equation of order α through the
/// Mittag-Leffler spectral propagator. The result is a new handle.
///
/// # Safety
/// `generator` and `initial` must be NULL or live handles; `result` must be
/// NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_propagate(
    generator: *const FracdynGenerator,
    alpha: f64,
    t: f64,
    initial: *const FracdynState,
    result: *mut *mut FracdynState,
) -> FracdynStatus {
    guard(|| {
        let gen = &handle(generator, "generator")?.0;
        let init = &handle(initial, "initial")?.0;
        let slot = out(result, "result")?;
        let rho = ml_propagate(gen, order(alpha)?, t, init)?;
        *slot = Box::into_raw(Box::new(FracdynState(rho)));
        Ok(())
    })
}

/// Bath with J(ω) = η ω^χ ω_c^{1−χ} e^{−ω/ω_c}; pass `INFINITY` for β at
/// zero temperature.
///
/// # Safety
/// `bath` must be NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_bath_new(
    eta: f64,
    chi: f64,
    omega_c: f64,
    beta: f64,
    bath: *mut *mut FracdynBath,
) -> FracdynStatus {
    guard(|| {
        let slot = out(bath, "bath")?;
        *slot = Box::into_raw(Box::new(FracdynBath(BathSpec::new(eta, chi, omega_c, beta)?)));
        Ok(())
    })
}

/// # Safety
/// `bath` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_bath_free(bath: *mut FracdynBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

/// Dephasing exponent Q(t).
///
/// # Safety
/// `bath` must be NULL or a live handle; `result` must be NULL or point to
/// writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_dephasing_q(bath: *const FracdynBath, t: f64, result: *mut f64) -> FracdynStatus {
    guard(|| {
        let b = &handle(bath, "bath")?.0;
        *out(result, "result")? = dephasing_q(b, t)?;
        Ok(())
    })
}

/// Exact coherence u(t) = e^{iεt − Q(t)} at `n` nondecreasing times, written
/// to `values` as `n` interleaved (re, im) pairs.
///
/// # Safety
/// `bath` must be NULL or a live handle; `times` must be NULL or point to
/// `n` readable doubles; `values` must be NULL or point to 2·n writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn fracdyn_exact_coherence(
    bath: *const FracdynBath,
    epsilon: f64,
    times: *const f64,
    n: usize,
    values: *mut f64,
) -> FracdynStatus {
    guard(|| {
        let b = &handle(bath, "bath")?.0;
        if times.is_null() {
            return Err(null("times"));
        }
        if values.is_null() {
            return Err(null("values"));
        }
        let grid = std::slice::from_raw_parts(times, n);
        let series = exact_coherence(b, epsilon, grid)?;
        let dst = std::slice::from_raw_parts_mut(values, 2 * n);
        for (pair, u) in dst.chunks_exact_mut(2).zip(series.values()) {
            pair[0] = u.re;
            pair[1] = u.im;
        }
        Ok(())
    })
}
