use std::ffi::CStr;
use std::ptr;

use pearcey_ffi::*;

fn cz(re: f64, im: f64) -> PearceyComplex {
    PearceyComplex { re, im }
}

fn series(order: u32) -> *mut PearceySeries {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { pearcey_series_new(order, &mut h) }, PearceyStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn series_handle_roundtrip() {
    let h = series(4);
    assert_eq!(pearcey_series_order(h), 4);
    assert_eq!(pearcey_series_order(ptr::null()), -1);
    unsafe { pearcey_series_free(h) };
    unsafe { pearcey_series_free(ptr::null_mut()) };
}

#[test]
fn char_roots_on_positive_axis() {
    let mut zeta = [PearceyComplex::default(); 3];
    let mut u = [PearceyComplex::default(); 3];
    let s = unsafe { pearcey_char_roots(cz(1.0, 0.0), cz(0.0, 0.0), zeta.as_mut_ptr(), u.as_mut_ptr()) };
    assert_eq!(s, PearceyStatus::Ok);
    // ζ₃ = −2^{−2/3}, u₃ = 3·2^{−8/3}.
    assert!((zeta[2].re + 2f64.powf(-2.0 / 3.0)).abs() < 1e-12);
    assert!((u[2].re - 3.0 * 2f64.powf(-8.0 / 3.0)).abs() < 1e-12);
    for z in zeta {
        let w = num_complex::Complex64::new(z.re, z.im);
        assert!((4.0 * w * w * w + 1.0).norm() < 1e-12);
    }
}

#[test]
fn turning_point_is_reported() {
    let mut zeta = [PearceyComplex::default(); 3];
    let mut u = [PearceyComplex::default(); 3];
    let s = unsafe { pearcey_char_roots(cz(0.0, 0.0), cz(0.0, 0.0), zeta.as_mut_ptr(), u.as_mut_ptr()) };
    assert_eq!(s, PearceyStatus::TurningPoint);
    let msg = unsafe { CStr::from_ptr(pearcey_last_error()) }.to_str().unwrap();
    assert!(!msg.is_empty());
}

#[test]
fn null_pointers_rejected() {
    let s = unsafe { pearcey_char_roots(cz(1.0, 0.0), cz(0.0, 0.0), ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(s, PearceyStatus::NullPointer);
    assert_eq!(unsafe { pearcey_series_new(4, ptr::null_mut()) }, PearceyStatus::NullPointer);
}

#[test]
fn borel_coeffs_buffer_protocol() {
    let h = series(6);
    let mut len = 0usize;
    let mut buf = [PearceyComplex::default(); 3];
    let s = unsafe { pearcey_borel_coeffs(h, cz(1.0, 0.0), cz(0.1, 0.0), 1, buf.as_mut_ptr(), 3, &mut len) };
    assert_eq!(s, PearceyStatus::BufferTooSmall);
    assert_eq!(len, 7);
    let mut full = vec![PearceyComplex::default(); len];
    let s = unsafe { pearcey_borel_coeffs(h, cz(1.0, 0.0), cz(0.1, 0.0), 1, full.as_mut_ptr(), len, &mut len) };
    assert_eq!(s, PearceyStatus::Ok);
    assert_eq!(full[0], buf[0]);
    let s = unsafe { pearcey_borel_coeffs(h, cz(1.0, 0.0), cz(0.1, 0.0), 4, full.as_mut_ptr(), len, &mut len) };
    assert_eq!(s, PearceyStatus::Validation);
    unsafe { pearcey_series_free(h) };
}

#[test]
fn psi_and_discontinuity() {
    let mut v = PearceyComplex::default();
    let mut ok = 0;
    let s = unsafe { pearcey_psi_borel(3, cz(1.0, 0.0), cz(0.05, 0.0), cz(0.3, 0.2), &mut v, &mut ok) };
    assert_eq!(s, PearceyStatus::Ok);
    assert_eq!(ok, 1);
    assert!(v.re.is_finite() && v.im.is_finite());
    let h = series(8);
    let mut r = PearceyComplex::default();
    let s = unsafe { pearcey_discontinuity(h, 1, 1, 3, cz(1.0, 0.0), cz(0.05, 0.0), &mut r) };
    assert_eq!(s, PearceyStatus::Ok);
    assert!(r.re.hypot(r.im) < 1e-8);
    unsafe { pearcey_series_free(h) };
}

#[test]
fn quadrature_at_origin() {
    let mut v = PearceyComplex::default();
    let s = unsafe { pearcey_quadrature(cz(0.0, 0.0), cz(0.0, 0.0), cz(1.0, 0.0), 0, 1, &mut v) };
    assert_eq!(s, PearceyStatus::Ok);
    // (e^{iθ₁} − e^{iθ₀})Γ(5/4) with θ_k = π/4 + kπ/2.
    let g = 0.906_402_477_055_477_1;
    let th = |k: f64| std::f64::consts::PI / 4.0 + k * std::f64::consts::PI / 2.0;
    let (re, im) = ((th(1.0).cos() - th(0.0).cos()) * g, (th(1.0).sin() - th(0.0).sin()) * g);
    assert!((v.re - re).abs() < 1e-9 && (v.im - im).abs() < 1e-9);
}

#[test]
fn walk_handle() {
    let h = series(8);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { pearcey_connect_polyline(h, 40, &mut w) }, PearceyStatus::Ok);
    assert_eq!(pearcey_walk_len(w), 5);
    let mut e = [0i64; 9];
    let mut p = 0.0;
    assert_eq!(unsafe { pearcey_walk_matrix(w, 0, e.as_mut_ptr(), &mut p) }, PearceyStatus::Ok);
    assert_eq!(e, [1, 0, 0, 0, 1, 0, 0, -1, 1]);
    assert!(p > 2.0 && p < 4.0);
    assert_eq!(unsafe { pearcey_walk_matrix(w, 9, e.as_mut_ptr(), &mut p) }, PearceyStatus::Validation);
    unsafe { pearcey_walk_free(w) };
    unsafe { pearcey_series_free(h) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(pearcey_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
