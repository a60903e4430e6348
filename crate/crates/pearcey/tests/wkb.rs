use num_complex::Complex64;
use pearcey::algebra::{int, rat, ZetaRational};
use pearcey::geometry::{char_branch, PlanePoint};
use pearcey::wkb::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn same(a: &ZetaRational, b: &ZetaRational) -> bool {
    (a - b).is_zero()
}

fn table() -> WkbSeriesTable {
    WkbSeriesTable::full(DEFAULT_ORDER)
}

fn rational(p: &Primitive) -> &ZetaRational {
    match p {
        Primitive::Rational(z) => z,
        Primitive::Log { .. } => panic!("log primitive"),
    }
}

#[test]
fn leading_terms() {
    let t = build_series(2);
    let z = ZetaRational::zeta();
    assert!(same(t.s1(-1), &z));
    assert!(same(t.s2(-1), &z.pow(2)));
    let s0 = (&z * &ZetaRational::d_inv_pow(2)).scale(&int(3));
    assert!(same(t.s1(0), &s0));
}

/// S₀^{(1)} against a central difference of −½ log D along the constraint.
#[test]
fn s0_matches_log_derivative_numerically() {
    let t = build_series(0);
    for (z0, x2) in [(c(0.8, 0.1), c(0.2, 0.0)), (c(-0.5, 0.7), c(-0.3, 0.4))] {
        let x1 = -4.0 * z0 * z0 * z0 - 2.0 * x2 * z0;
        let root = |x1: Complex64| {
            let mut w = z0;
            for _ in 0..60 {
                w -= (4.0 * w * w * w + 2.0 * x2 * w + x1) / (12.0 * w * w + 2.0 * x2);
            }
            w
        };
        let h = 1e-6;
        let f = |w: Complex64| -0.5 * (6.0 * w * w + x2).ln();
        let num = (f(root(x1 + h)) - f(root(x1 - h))) / (2.0 * h);
        let exact = t.s1(0).eval(z0, x2).unwrap();
        assert!((num - exact).norm() < 1e-7 * exact.norm().max(1.0));
    }
}

#[test]
fn closedness_and_homogeneity_are_exact() {
    let t = table();
    let x1 = ZetaRational::x1();
    let x2 = ZetaRational::x2();
    for j in -1..=(t.order as i64) {
        assert!(same(&t.s1(j).d2(), &t.s2(j).d1()), "closedness at j = {j}");
        for (k, s) in [(1i64, t.s1(j)), (2, t.s2(j))] {
            let lhs = &(&(&x1 * &s.d1()).scale(&int(3)) + &(&x2 * &s.d2()).scale(&int(2)))
                + &s.scale(&int(4 * (j + 1) - k));
            assert!(lhs.is_zero(), "homogeneity at j = {j}, k = {k}");
        }
    }
}

#[test]
fn nonlinear_system_residuals_vanish() {
    let t = table();
    let r = system_residuals(&t);
    assert_eq!(r.len(), t.order + 2);
    for (m, r1, r2) in r {
        assert!(r1.is_zero() && r2.is_zero(), "order {m}");
    }
}

#[test]
fn primitives_have_the_right_gradient() {
    let t = table();
    let p = rational(&t.prim[0]);
    let varpi = (&(&ZetaRational::x1() * &ZetaRational::zeta()).scale(&int(3))
        + &(&ZetaRational::x2() * &ZetaRational::zeta().pow(2)).scale(&int(2)))
        .scale(&rat(1, 4));
    assert!(same(p, &varpi));
    let v = p.eval(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((v - c(-3.0, 0.0)).norm() < 1e-14);
    match &t.prim[1] {
        Primitive::Log { argument, multiplier } => {
            assert!(same(argument, &ZetaRational::d()));
            assert_eq!(*multiplier, rat(-1, 2));
        }
        _ => panic!("j = 0 must be logarithmic"),
    }
    for j in 1..=4i64 {
        let p = rational(&t.prim[(j + 1) as usize]);
        assert!(same(&p.d1(), t.s1(j)), "∂₁∫ω_{j}");
        assert!(same(&p.d2(), t.s2(j)), "∂₂∫ω_{j}");
    }
}

#[test]
fn f_coefficients_are_the_exponential() {
    let t = table();
    let a1 = rational(&t.prim[2]);
    let a2 = rational(&t.prim[3]);
    assert!(same(&t.f[0], &ZetaRational::constant(int(1))));
    assert!(same(&t.f[1], a1));
    let f2 = a2 + &(a1 * a1).scale(&rat(1, 2));
    assert!(same(&t.f[2], &f2));
}

#[test]
fn borel_coefficients_examples() {
    let t = table();
    let x = PlanePoint::real(1.0, 0.0);
    let b = borel_coeffs(&x, 3, &t).unwrap();
    assert!((b.base - pearcey::geometry::p_ell(3)).norm() < 1e-13);

    let x = PlanePoint::new(c(0.7, 0.2), c(0.3, -0.1));
    let br = char_branch(&x).unwrap();
    for ell in 1..=3 {
        let b = borel_coeffs(&x, ell, &t).unwrap();
        assert_eq!(b.coeffs.len(), t.order + 1);
        let (z, sd) = (br.zeta[ell - 1], br.sqrt_d[ell - 1]);
        let c0 = 1.0 / (sd * std::f64::consts::PI.sqrt());
        assert!((b.coeffs[0] - c0).norm() < 1e-13 * c0.norm());
        // Γ(1/2)/Γ(3/2) = 2.
        let a1 = rational(&t.prim[2]).eval(z, x.x2).unwrap();
        let r = b.coeffs[1] / b.coeffs[0];
        assert!((r - 2.0 * a1).norm() < 1e-12 * r.norm().max(1.0));
    }
    assert!(borel_coeffs(&PlanePoint::real(2.0 * 2f64.sqrt(), -3.0), 1, &t).is_err());
    assert!(borel_coeffs(&x, 4, &t).is_err());
}

#[test]
fn gamma_ratios() {
    assert_eq!(gamma_half_over_sqrt_pi(0), int(1));
    assert_eq!(gamma_half_over_sqrt_pi(1), rat(1, 2));
    assert_eq!(gamma_half_over_sqrt_pi(3), rat(15, 8));
}

#[test]
fn scaled_expansion_matches_printed_radicals() {
    let t = table();
    for ell in 1..=3 {
        let e = scaled_expansion(ell, 2, &t).unwrap();
        let [c0, r1, r2] = reference_scaled_values(ell);
        assert_eq!(e.c0_sqrt_3pi, c0, "c0 for ℓ = {ell}");
        assert_eq!(e.ratios[1], r1, "c1/c0 for ℓ = {ell}");
        assert_eq!(e.ratios[2], r2, "c2/c0 for ell = {ell}");
        let expect = -(2f64.powf(1.0 / 6.0) / (3.0 * std::f64::consts::PI).sqrt())
            * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * ell as f64 / 3.0);
        assert!((e.c0() - expect).norm() < 1e-14);
    }
    // ℓ = 3: real multiples.
    let e = scaled_expansion(3, 2, &t).unwrap();
    assert!(e.ratios.iter().all(|r| r.unity_thirds == 0));
    assert!(scaled_expansion(0, 2, &t).is_err());
    assert!(scaled_expansion(1, 99, &t).is_err());
}

#[test]
fn series_json_is_stable() {
    let a = build_series(3).to_json();
    let b = build_series(3).to_json();
    assert_eq!(a, b);
    assert_eq!(a["order"], 3);
}
