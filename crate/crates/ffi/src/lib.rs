//! C ABI over the femtonet analysis routines.
//!
//! Parameters live behind an opaque [`FemtonetParams`] handle. Every
//! fallible call returns a [`FemtonetStatus`] and writes its result through
//! an out-pointer; the message of the last failure on the calling thread is
//! available from [`femtonet_last_error`].

use femtonet::analytics::{self, Backoff};
use femtonet::backoff::{self as bo};
use femtonet::channel::{correlation_coefficient, kmh_to_mps};
use femtonet::mathkit::{bessel_j0, lambert_w, Branch};
use femtonet::params::{db_to_linear, default_params};
use femtonet::{Error, SystemParams};
use std::cell::RefCell;
use std::f64::consts::PI;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FemtonetStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numeric = 3,
    Infeasible = 4,
    Panic = 5,
}

/// Rate selection for the average goodput.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FemtonetBackoff {
    None = 0,
    Optimal = 1,
}

/// Opaque system parameter set.
pub struct FemtonetParams(SystemParams);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn record(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FemtonetStatus {
    match e {
        Error::Domain(_) | Error::Config(_) => FemtonetStatus::Domain,
        Error::Infeasible(_) => FemtonetStatus::Infeasible,
        _ => FemtonetStatus::Numeric,
    }
}

/// Runs `f`, storing its value in `out` and translating errors and panics.
fn guarded<F>(out: *mut f64, f: F) -> FemtonetStatus
where
    F: FnOnce() -> femtonet::Result<f64>,
{
    if out.is_null() {
        record("null output pointer".into());
        return FemtonetStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: checked non-null; the caller guarantees it points to an f64.
            unsafe { *out = v };
            FemtonetStatus::Ok
        }
        Ok(Err(e)) => {
            record(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            record("internal panic".into());
            FemtonetStatus::Panic
        }
    }
}

fn params<'a>(handle: *const FemtonetParams) -> femtonet::Result<&'a SystemParams> {
    // SAFETY: a non-null handle comes from femtonet_params_new and is not yet freed.
    unsafe { handle.as_ref() }
        .map(|h| &h.0)
        .ok_or_else(|| Error::Domain("null parameter handle".into()))
}

fn null_status(handle: *const FemtonetParams) -> Option<FemtonetStatus> {
    handle.is_null().then(|| {
        record("null parameter handle".into());
        FemtonetStatus::NullPointer
    })
}

/// Message of the last failure on this thread; empty after success-only use.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn femtonet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn femtonet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// New handle holding the default deployment. Free with [`femtonet_params_free`].
#[no_mangle]
pub extern "C" fn femtonet_params_new() -> *mut FemtonetParams {
    Box::into_raw(Box::new(FemtonetParams(default_params())))
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `handle` must come from [`femtonet_params_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn femtonet_params_free(handle: *mut FemtonetParams) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Applies `edit` and keeps it only if the result validates.
fn update<F: FnOnce(&mut SystemParams)>(handle: *mut FemtonetParams, edit: F) -> FemtonetStatus {
    if let Some(s) = null_status(handle) {
        return s;
    }
    // SAFETY: non-null handle from femtonet_params_new.
    let h = unsafe { &mut *handle };
    let mut p = h.0;
    edit(&mut p);
    match p.validate() {
        Ok(()) => {
            h.0 = p;
            FemtonetStatus::Ok
        }
        Err(e) => {
            record(e.to_string());
            status_of(&e)
        }
    }
}

/// Base-station and femtocell antenna counts.
#[no_mangle]
pub extern "C" fn femtonet_params_set_antennas(
    handle: *mut FemtonetParams,
    n_b: usize,
    n_f: usize,
) -> FemtonetStatus {
    update(handle, |p| {
        p.n_b = n_b;
        p.n_f = n_f;
    })
}

#[no_mangle]
pub extern "C" fn femtonet_params_set_bits(
    handle: *mut FemtonetParams,
    bits: u32,
) -> FemtonetStatus {
    update(handle, |p| p.bits = bits)
}

#[no_mangle]
pub extern "C" fn femtonet_params_set_velocity_kmh(
    handle: *mut FemtonetParams,
    kmh: f64,
) -> FemtonetStatus {
    update(handle, |p| p.mobility.velocity = kmh_to_mps(kmh))
}

#[no_mangle]
pub extern "C" fn femtonet_params_set_delay_frames(
    handle: *mut FemtonetParams,
    frames: u32,
) -> FemtonetStatus {
    update(handle, |p| p.mobility.delay_frames = frames)
}

/// Femtocell density given as an average count per macrocell.
#[no_mangle]
pub extern "C" fn femtonet_params_set_femtocells_per_cell(
    handle: *mut FemtonetParams,
    count: f64,
) -> FemtonetStatus {
    update(handle, |p| {
        p.density = count / (PI * p.cell_radius * p.cell_radius)
    })
}

/// Distance from the macro base station to the user, m.
#[no_mangle]
pub extern "C" fn femtonet_params_set_user_distance(
    handle: *mut FemtonetParams,
    meters: f64,
) -> FemtonetStatus {
    update(handle, |p| p.user_distance = meters)
}

/// Places the user where the receive SNR equals `snr_db`.
#[no_mangle]
pub extern "C" fn femtonet_params_set_snr_db(
    handle: *mut FemtonetParams,
    snr_db: f64,
) -> FemtonetStatus {
    update(handle, |p| p.user_distance = p.distance_for_snr_db(snr_db))
}

/// Temporal correlation of the channel over the feedback delay.
#[no_mangle]
pub extern "C" fn femtonet_correlation(
    handle: *const FemtonetParams,
    out: *mut f64,
) -> FemtonetStatus {
    null_status(handle)
        .unwrap_or_else(|| guarded(out, || correlation_coefficient(&params(handle)?.mobility)))
}

/// P[SIR >= threshold] for a linear threshold.
#[no_mangle]
pub extern "C" fn femtonet_success_probability(
    handle: *const FemtonetParams,
    threshold: f64,
    out: *mut f64,
) -> FemtonetStatus {
    null_status(handle).unwrap_or_else(|| {
        guarded(out, || {
            analytics::success_probability(threshold, params(handle)?)
        })
    })
}

/// Largest femtocell density (per m^2) keeping outage at or below `epsilon`
/// for an SIR threshold in dB.
#[no_mangle]
pub extern "C" fn femtonet_max_density(
    handle: *const FemtonetParams,
    epsilon: f64,
    threshold_db: f64,
    out: *mut f64,
) -> FemtonetStatus {
    null_status(handle).unwrap_or_else(|| {
        guarded(out, || {
            Ok(analytics::max_density(epsilon, db_to_linear(threshold_db), params(handle)?)?.exact)
        })
    })
}

/// Optimal backoff factor for a transmitter SIR estimate (linear). A zero
/// `interference` selects the delay-only link.
#[no_mangle]
pub extern "C" fn femtonet_beta_star(
    handle: *const FemtonetParams,
    sir_estimate: f64,
    interference: i32,
    out: *mut f64,
) -> FemtonetStatus {
    null_status(handle).unwrap_or_else(|| {
        guarded(out, || {
            let p = params(handle)?;
            let s = if interference != 0 {
                bo::beta_star_interference(sir_estimate, p)?
            } else {
                bo::beta_star_delay(sir_estimate, p)?
            };
            Ok(s.beta_star)
        })
    })
}

/// Average goodput in bit/s/Hz.
#[no_mangle]
pub extern "C" fn femtonet_average_goodput(
    handle: *const FemtonetParams,
    backoff: FemtonetBackoff,
    out: *mut f64,
) -> FemtonetStatus {
    null_status(handle).unwrap_or_else(|| {
        guarded(out, || {
            let mode = match backoff {
                FemtonetBackoff::None => Backoff::None,
                FemtonetBackoff::Optimal => Backoff::Optimal,
            };
            analytics::avg_goodput_analytic(params(handle)?, mode)
        })
    })
}

#[no_mangle]
pub extern "C" fn femtonet_bessel_j0(x: f64, out: *mut f64) -> FemtonetStatus {
    guarded(out, || bessel_j0(x))
}

/// Lambert W; a nonzero `lower` selects the branch W_-1.
#[no_mangle]
pub extern "C" fn femtonet_lambert_w(x: f64, lower: i32, out: *mut f64) -> FemtonetStatus {
    guarded(out, || {
        lambert_w(
            x,
            if lower != 0 {
                Branch::Lower
            } else {
                Branch::Principal
            },
        )
    })
}
