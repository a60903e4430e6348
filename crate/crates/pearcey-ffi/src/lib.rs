//! C ABI over the `pearcey` crate.
//!
//! Every function returns a [`PearceyStatus`]; on failure the message is
//! kept per thread and read with [`pearcey_last_error`]. Handles are opaque
//! and released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use pearcey::borel::{self, DiscKind, QuadParams};
use pearcey::geometry::{char_branch, PlanePoint};
use pearcey::stokes::{self, reference_polyline, WalkStep};
use pearcey::wkb::{borel_coeffs, WkbSeriesTable};
use pearcey::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PearceyStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Numeric = 3,
    TurningPoint = 4,
    OutsideChart = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PearceyComplex {
    pub re: f64,
    pub im: f64,
}

impl From<PearceyComplex> for Complex64 {
    fn from(z: PearceyComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for PearceyComplex {
    fn from(z: Complex64) -> Self {
        PearceyComplex { re: z.re, im: z.im }
    }
}

/// WKB series table with f-coefficients.
pub struct PearceySeries {
    table: WkbSeriesTable,
}

/// Result of a connection walk.
pub struct PearceyWalk {
    steps: Vec<WalkStep>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PearceyStatus {
    match e {
        Error::TurningPoint(_) | Error::NearTurningPoint(_) => PearceyStatus::TurningPoint,
        Error::OutsideChart(..) => PearceyStatus::OutsideChart,
        e if e.is_validation() => PearceyStatus::Validation,
        _ => PearceyStatus::Numeric,
    }
}

fn guard<F: FnOnce() -> Result<(), (PearceyStatus, String)>>(f: F) -> PearceyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PearceyStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal panic");
            PearceyStatus::Panic
        }
    }
}

fn lift(e: Error) -> (PearceyStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (PearceyStatus, String) {
    (PearceyStatus::NullPointer, format!("null pointer: {name}"))
}

fn point(x1: PearceyComplex, x2: PearceyComplex) -> PlanePoint {
    PlanePoint::new(x1.into(), x2.into())
}

/// Message of the last failure on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn pearcey_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pearcey_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build the series table to truncation order `order` (at most 24).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pearcey_series_new(order: u32, out: *mut *mut PearceySeries) -> PearceyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if order > 24 {
            return Err((PearceyStatus::Validation, "order above 24".into()));
        }
        let h = Box::new(PearceySeries {
            table: WkbSeriesTable::full(order as usize),
        });
        *out = Box::into_raw(h);
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`pearcey_series_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pearcey_series_free(h: *mut PearceySeries) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[no_mangle]
pub extern "C" fn pearcey_series_order(h: *const PearceySeries) -> i32 {
    if h.is_null() {
        return -1;
    }
    unsafe { (*h).table.order as i32 }
}

/// Labelled ζ_ℓ and u_ℓ, ℓ = 1, 2, 3, at x.
///
/// # Safety
/// `zeta` and `u` must each point to three writable elements.
#[no_mangle]
pub unsafe extern "C" fn pearcey_char_roots(
    x1: PearceyComplex,
    x2: PearceyComplex,
    zeta: *mut PearceyComplex,
    u: *mut PearceyComplex,
) -> PearceyStatus {
    guard(|| {
        if zeta.is_null() || u.is_null() {
            return Err(null("zeta/u"));
        }
        let b = char_branch(&point(x1, x2)).map_err(lift)?;
        let uu = b.u();
        for i in 0..3 {
            *zeta.add(i) = b.zeta[i].into();
            *u.add(i) = uu[i].into();
        }
        Ok(())
    })
}

/// Borel coefficients of ψ_ℓ: coefficient j multiplies (y − u_ℓ)^{j − 1/2}.
/// Writes min(cap, order + 1) values and the full count to `len`.
///
/// # Safety
/// `out` must hold `cap` elements; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_borel_coeffs(
    h: *const PearceySeries,
    x1: PearceyComplex,
    x2: PearceyComplex,
    ell: u32,
    out: *mut PearceyComplex,
    cap: usize,
    len: *mut usize,
) -> PearceyStatus {
    guard(|| {
        if h.is_null() || len.is_null() || (out.is_null() && cap > 0) {
            return Err(null("h/out/len"));
        }
        let tab = borel_coeffs(&point(x1, x2), ell as usize, &(*h).table).map_err(lift)?;
        *len = tab.coeffs.len();
        for (i, c) in tab.coeffs.iter().take(cap).enumerate() {
            *out.add(i) = (*c).into();
        }
        if cap < tab.coeffs.len() {
            return Err((PearceyStatus::BufferTooSmall, format!("need {} elements", tab.coeffs.len())));
        }
        Ok(())
    })
}

/// ψ_{ℓ,B}(x, y) from the closed form; `validated` is set to 0 outside the
/// chart where the sheet labels were checked.
///
/// # Safety
/// `out` and `validated` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_psi_borel(
    ell: u32,
    x1: PearceyComplex,
    x2: PearceyComplex,
    y: PearceyComplex,
    out: *mut PearceyComplex,
    validated: *mut i32,
) -> PearceyStatus {
    guard(|| {
        if out.is_null() || validated.is_null() {
            return Err(null("out/validated"));
        }
        let v = borel::psi_borel_eval_unvalidated(ell as usize, &point(x1, x2), y.into()).map_err(lift)?;
        *out = v.value.into();
        *validated = v.validated as i32;
        Ok(())
    })
}

/// Δ_{u_k}ψ_ℓ / ψ_k (tilde = 0) or the tilde discontinuity ratio (tilde ≠ 0).
///
/// # Safety
/// `ratio` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_discontinuity(
    h: *const PearceySeries,
    tilde: i32,
    ell: u32,
    k: u32,
    x1: PearceyComplex,
    x2: PearceyComplex,
    ratio: *mut PearceyComplex,
) -> PearceyStatus {
    guard(|| {
        if h.is_null() || ratio.is_null() {
            return Err(null("h/ratio"));
        }
        let kind = if tilde != 0 { DiscKind::Tilde } else { DiscKind::Plain };
        let r = borel::discontinuity(kind, ell as usize, k as usize, &point(x1, x2), &(*h).table).map_err(lift)?;
        *ratio = r.ratio.into();
        Ok(())
    })
}

/// ∫ exp(η(z⁴ + x₂z² + x₁z)) dz from valley `from` to valley `to`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_quadrature(
    x1: PearceyComplex,
    x2: PearceyComplex,
    eta: PearceyComplex,
    from: u32,
    to: u32,
    out: *mut PearceyComplex,
) -> PearceyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = borel::pearcey_quadrature(&point(x1, x2), eta.into(), from as usize, to as usize, &QuadParams::default())
            .map_err(lift)?;
        *out = v.into();
        Ok(())
    })
}

/// Connection walk along the built-in polyline x⁽¹⁾ … x⁽¹³⁾.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_connect_polyline(
    h: *const PearceySeries,
    samples: u32,
    out: *mut *mut PearceyWalk,
) -> PearceyStatus {
    guard(|| {
        if h.is_null() || out.is_null() {
            return Err(null("h/out"));
        }
        let steps = stokes::connection_walk(&reference_polyline(), &(*h).table, samples.max(1) as usize).map_err(lift)?;
        *out = Box::into_raw(Box::new(PearceyWalk { steps }));
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn pearcey_walk_len(w: *const PearceyWalk) -> usize {
    if w.is_null() {
        return 0;
    }
    unsafe { (*w).steps.len() }
}

/// Row-major 3×3 matrix of step `i` (Ψ^{before} = C Ψ^{after}), plus the
/// crossing's path parameter.
///
/// # Safety
/// `entries` must hold nine elements; `param` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pearcey_walk_matrix(
    w: *const PearceyWalk,
    i: usize,
    entries: *mut i64,
    param: *mut f64,
) -> PearceyStatus {
    guard(|| {
        if w.is_null() || entries.is_null() || param.is_null() {
            return Err(null("w/entries/param"));
        }
        let s = (&(*w)).steps.get(i).ok_or_else(|| (PearceyStatus::Validation, format!("step {i} out of range")))?;
        for r in 0..3 {
            for c in 0..3 {
                *entries.add(3 * r + c) = s.matrix.entries[r][c];
            }
        }
        *param = s.event.param;
        Ok(())
    })
}

/// # Safety
/// `w` must come from [`pearcey_connect_polyline`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pearcey_walk_free(w: *mut PearceyWalk) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}
