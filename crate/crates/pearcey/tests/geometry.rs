use num_traits::Zero;
use pearcey::algebra::{int, MultiPoly};
use pearcey::geometry::*;
use pearcey::Error;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

fn has(set: &[C], v: C, tol: f64) -> bool {
    set.iter().any(|&z| close(z, v, tol))
}

/// Off-T points with moderate coordinates.
fn points(n: usize) -> Vec<PlanePoint> {
    let mut runner = TestRunner::deterministic();
    let s = (0.2f64..2.0, -3.0f64..3.0, -1.5f64..1.5, -1.5f64..1.5);
    let mut out = Vec::new();
    while out.len() < n {
        let (r, th, a, b) = s.new_tree(&mut runner).unwrap().current();
        let x = PlanePoint::new(C::from_polar(r, th), c(a, b));
        let (v, _) = turning_discriminant(&x);
        if v.norm() > 0.5 {
            out.push(x);
        }
    }
    out
}

#[test]
fn char_roots_examples() {
    let r = char_roots(&PlanePoint::real(-4.0, 0.0)).unwrap();
    for w in [c(1.0, 0.0), omega(1), omega(2)] {
        assert!(has(&r.values, w, 1e-12));
    }
    assert_eq!(r.kind, RootKind::Zeta);

    let r = char_roots(&PlanePoint::real(0.0, -2.0)).unwrap();
    for w in [0.0, 1.0, -1.0] {
        assert!(has(&r.values, c(w, 0.0), 1e-12));
    }

    let x = PlanePoint::real(1.0, 1.0);
    for z in char_roots(&x).unwrap().values {
        assert!((4.0 * z * z * z + 2.0 * z + 1.0).norm() < 1e-10);
    }
}

#[test]
fn char_roots_error_on_turning_set() {
    let x = PlanePoint::real(2.0 * 2f64.sqrt(), -3.0);
    assert!(matches!(char_roots(&x), Err(Error::TurningPoint(_))));
    assert!(matches!(critical_values(&x), Err(Error::TurningPoint(_))));
    let merged = char_roots_merged(&x).unwrap();
    assert_eq!(merged.len(), 3);
}

#[test]
fn reference_labels_follow_p_ell() {
    for x1 in [0.3, 1.0, 5.0] {
        let u = critical_values(&PlanePoint::real(x1, 0.0)).unwrap();
        for ell in 1..=3 {
            assert!(close(u.get(ell), p_ell(ell) * x1.powf(4.0 / 3.0), 1e-12));
        }
    }
}

#[test]
fn critical_value_examples() {
    let u = critical_values(&PlanePoint::real(4.0, 0.0)).unwrap();
    for w in [c(3.0, 0.0), -3.0 * C::from_polar(1.0, std::f64::consts::FRAC_PI_3), -3.0 * C::from_polar(1.0, -std::f64::consts::FRAC_PI_3)] {
        assert!(has(&u.values, w, 1e-12), "{w}");
    }
    let u = critical_values(&PlanePoint::real(-4.0, 0.0)).unwrap();
    for w in [c(1.0, 0.0), omega(1), omega(2)] {
        assert!(has(&u.values, 3.0 * w, 1e-12));
    }
    // Near T two of the u merge.
    let x = PlanePoint::real(2.0 * 2f64.sqrt() + 1e-7, -3.0);
    let u = critical_values(&x).unwrap().values;
    let m = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).map(|(i, j)| (u[i] - u[j]).norm()).fold(f64::MAX, f64::min);
    assert!(m < 1e-3);
}

#[test]
fn turning_discriminant_examples() {
    assert_eq!(turning_discriminant(&PlanePoint::real(0.0, 0.0)), (C::zero(), true));
    assert!(turning_discriminant(&PlanePoint::real(2.0 * 2f64.sqrt(), -3.0)).1);
    assert_eq!(turning_discriminant(&PlanePoint::real(1.0, 0.0)), (c(27.0, 0.0), false));
}

#[test]
fn singular_locus_cubic_examples() {
    let d = singular_locus_cubic();
    assert_eq!(d.vars(), ["x1", "x2", "y"]);
    // Leading y-coefficient 256.
    let lead = d.coeffs_in(2).last().unwrap().constant_term();
    assert_eq!(lead, int(256));
    // x₂ = 0 gives 256y³ − 27x₁⁴.
    let v = ["x1", "y"];
    let at0 = d.substitute(1, &MultiPoly::zero(d.vars())).drop_var(1);
    let expect = MultiPoly::from_terms(&v, [(vec![0, 3], int(256)), (vec![4, 0], int(-27))]);
    assert_eq!(at0, expect);
}

#[test]
fn singular_locus_cubic_vanishes_on_critical_values() {
    let d = singular_locus_cubic();
    for x in points(20) {
        let u = critical_values(&x).unwrap();
        for ell in 1..=3 {
            let y = u.get(ell);
            let scale = 256.0 * y.norm().powi(3) + 27.0 * x.x1.norm().powi(4) + 1.0;
            assert!(d.eval_complex(&[x.x1, x.x2, y]).norm() <= 1e-10 * scale);
        }
    }
}

fn pair_values(x: &PlanePoint) -> Vec<C> {
    let z = char_roots(x).unwrap().values;
    let mut out = Vec::new();
    for l in 0..3 {
        for k in 0..3 {
            if l != k {
                out.push((z[l] - z[k]) * (3.0 * x.x1 + 2.0 * x.x2 * (z[l] + z[k])) / 4.0);
            }
        }
    }
    out
}

#[test]
fn identity_for_u_differences() {
    for x in points(30) {
        let b = char_branch(&x).unwrap();
        let u = b.u();
        let z = b.zeta;
        for (l, k) in [(0, 1), (0, 2), (1, 2)] {
            let rhs = (z[l] - z[k]) * (3.0 * x.x1 + 2.0 * x.x2 * (z[l] + z[k])) / 4.0;
            // ϖ = −u.
            assert!(close(-(u[l] - u[k]), rhs, 1e-12));
        }
    }
}

#[test]
fn stokes_sextic_roots_are_pairwise_values() {
    let s = stokes_sextic();
    assert_eq!(s.vars(), ["x1", "x2", "F"]);
    assert_eq!(s.degree_in(2), Some(6));
    for x in points(50) {
        let coeffs: Vec<C> = s.coeffs_in(2).iter().map(|p| p.eval_complex(&[x.x1, x.x2, C::zero()])).collect();
        let roots = pearcey::algebra::aberth::root_values(&pearcey::algebra::UniPolyC::new(coeffs).unwrap(), 1e-14).unwrap();
        let direct = pair_values(&x);
        for v in &direct {
            let best = roots.iter().map(|r| (r - v).norm()).fold(f64::MAX, f64::min);
            assert!(best <= 1e-8 * v.norm().max(1.0), "{x}: {v}");
        }
    }
}

#[test]
fn stokes_sextic_at_x2_zero() {
    let s = stokes_sextic();
    let at0 = s.substitute(1, &MultiPoly::zero(s.vars())).drop_var(1);
    let v = ["x1", "F"];
    let expect = MultiPoly::from_terms(&v, [(vec![0, 6], int(1 << 16)), (vec![8, 0], int(3i64.pow(9)))]);
    let ratio = expect.leading_term().unwrap().1.clone() / at0.leading_term().unwrap().1.clone();
    assert_eq!(at0.scale(&ratio), expect);

    let x = PlanePoint::real(-4.0, 0.0);
    for v in pair_values(&x) {
        assert!((v.norm() - 3.0 * 3f64.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn stokes_sextic_constant_term_vanishes_on_t() {
    // F = 0 is a root exactly on T: the F-constant term is divisible by 27x₁² + 8x₂³.
    let s = stokes_sextic();
    let c0 = s.constant_term_in(2);
    let t = MultiPoly::from_terms(s.vars(), [(vec![2, 0, 0], int(27)), (vec![0, 3, 0], int(8))]);
    let q = c0.div_exact(&t).expect("T divides the constant term");
    assert!(!q.is_zero());
}

#[test]
fn scaled_examples() {
    let sc = to_scaled(&PlanePoint::real(1.0, 0.0), p_ell(3), 0).unwrap();
    assert!(close(sc.s, p_ell(3), 1e-14) && sc.t == C::zero());
    let sc = to_scaled(&PlanePoint::real(16.0, 0.0), p_ell(3) * 16f64.powf(4.0 / 3.0), 0).unwrap();
    assert!(close(sc.s, p_ell(3), 1e-12));
    assert!(to_scaled(&PlanePoint::real(0.0, 1.0), c(1.0, 0.0), 0).is_err());
    assert!(to_scaled(&PlanePoint::real(1.0, 1.0), c(1.0, 0.0), 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scaled_round_trip(r in 0.1f64..10.0, th in -3.1f64..3.1, a in -5.0f64..5.0, b in -5.0f64..5.0,
                         ya in -5.0f64..5.0, yb in -5.0f64..5.0, branch in 0u8..3) {
        let x = PlanePoint::new(C::from_polar(r, th), c(a, b));
        let y = c(ya, yb);
        let sc = to_scaled(&x, y, branch).unwrap();
        let (x2, y2) = from_scaled(&sc, x.x1).unwrap();
        prop_assert!(close(x2.x2, x.x2, 1e-12));
        prop_assert!(close(y2, y, 1e-12));
    }

    #[test]
    fn weighted_homogeneity(r in 0.3f64..2.0, th in -1.0f64..1.0, a in -0.5f64..0.5, b in -0.5f64..0.5, lam in 0.5f64..2.0) {
        let x = PlanePoint::new(C::from_polar(r, th), c(a, b));
        prop_assume!(turning_discriminant(&x).0.norm() > 0.5);
        let b0 = char_branch(&x).unwrap();
        // Continue labels along the scaling ray.
        let steps = 32;
        let mut b1 = b0;
        for i in 1..=steps {
            let l = 1.0 + (lam - 1.0) * i as f64 / steps as f64;
            b1 = b1.continue_to(&x.scaled(l)).unwrap();
        }
        let (u0, u1) = (b0.u(), b1.u());
        for i in 0..3 {
            prop_assert!(close(b1.zeta[i], b0.zeta[i] * lam, 1e-10));
            prop_assert!(close(u1[i], u0[i] * lam.powi(4), 1e-10));
        }
    }

    #[test]
    fn labels_are_deterministic(r in 0.3f64..2.0, th in -3.0f64..3.0, a in -1.0f64..1.0) {
        let x = PlanePoint::new(C::from_polar(r, th), c(a, 0.0));
        prop_assume!(turning_discriminant(&x).0.norm() > 0.5);
        prop_assert_eq!(char_roots(&x).unwrap(), char_roots(&x).unwrap());
    }
}
