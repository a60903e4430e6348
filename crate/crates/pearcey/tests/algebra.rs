use num_complex::Complex64;
use num_traits::Zero;
use pearcey::algebra::aberth::root_values;
use pearcey::algebra::resultant::sylvester_matrix;
use pearcey::algebra::{discriminant, int, rat, resultant, roots_aberth, MultiPoly, UniPolyC, ZetaRational};
use pearcey::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Determinant by Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(m[0][0].vars());
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * &cofactor_det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn oracle_resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> MultiPoly {
    let i = p.index_of(var).unwrap();
    cofactor_det(&sylvester_matrix(p, q, i)).drop_var(i)
}

fn poly(vars: &[&str], terms: &[(&[u32], i64)]) -> MultiPoly {
    MultiPoly::from_terms(vars, terms.iter().map(|(e, c)| (e.to_vec(), int(*c))))
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.im.total_cmp(&b.im));
    v
}

#[test]
fn aberth_quadratic() {
    let p = UniPolyC::from_real(&[1.0, 0.0, 1.0]).unwrap();
    let r = sorted(root_values(&p, 1e-14).unwrap());
    assert!((r[0] - c(0.0, -1.0)).norm() < 1e-12);
    assert!((r[1] - c(0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn aberth_cube_roots_of_unity() {
    // 4ζ³ + 2x₂ζ + x₁ at (−4, 0).
    let p = UniPolyC::from_real(&[-4.0, 0.0, 0.0, 4.0]).unwrap();
    let r = root_values(&p, 1e-14).unwrap();
    for k in 0..3 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
        assert!(r.iter().any(|z| (z - w).norm() < 1e-12), "missing {w}");
    }
}

#[test]
fn aberth_triple_root_cluster() {
    // −27h⁴ + 18h² − 8h + 1 = −27(h − 1/3)³(h + 1).
    let p = UniPolyC::from_real(&[1.0, -8.0, 18.0, 0.0, -27.0]).unwrap();
    let roots = roots_aberth(&p, 1e-14).unwrap();
    let triple = roots.iter().find(|r| (r.value - c(1.0 / 3.0, 0.0)).norm() < 1e-4).expect("triple root");
    assert_eq!(triple.multiplicity, 3);
    assert!(roots.iter().any(|r| (r.value + 1.0).norm() < 1e-10 && r.multiplicity == 1));
}

#[test]
fn aberth_rejects_non_finite() {
    assert!(matches!(UniPolyC::from_real(&[1.0, f64::NAN]), Err(Error::Validation(_))));
}

#[test]
fn resultant_substitution_example() {
    let v = ["z", "x", "y"];
    let p = poly(&v, &[(&[2, 0, 0], 1), (&[0, 1, 0], -1)]);
    let q = poly(&v, &[(&[1, 0, 0], 1), (&[0, 0, 1], -1)]);
    let r = resultant(&p, &q, "z").unwrap();
    let expect = poly(&["x", "y"], &[(&[0, 2], 1), (&[1, 0], -1)]);
    assert_eq!(r, expect);
}

#[test]
fn turning_point_resultant_matches_cofactor_oracle() {
    let v = ["zeta", "x1", "x2"];
    let p = poly(&v, &[(&[3, 0, 0], 4), (&[1, 0, 1], 2), (&[0, 1, 0], 1)]);
    let q = poly(&v, &[(&[2, 0, 0], 12), (&[0, 0, 1], 2)]);
    let r = resultant(&p, &q, "zeta").unwrap();
    assert_eq!(r, oracle_resultant(&p, &q, "zeta"));
    // Proportional to 27x₁² + 8x₂³.
    let t = poly(&["x1", "x2"], &[(&[2, 0], 27), (&[0, 3], 8)]);
    let (_, prim) = r.primitive();
    assert!(prim == t || prim == -&t, "{r}");
}

#[test]
fn quartic_resultant_matches_cofactor_oracle() {
    let v = ["z", "x1", "x2", "y"];
    let p = poly(&v, &[(&[4, 0, 0, 0], 1), (&[2, 0, 1, 0], 1), (&[1, 1, 0, 0], 1), (&[0, 0, 0, 1], 1)]);
    let q = p.deriv(0);
    let r = resultant(&p, &q, "z").unwrap();
    assert_eq!(r, oracle_resultant(&p, &q, "z"));
    // 256y³ − 128x₂²y² + 16x₂(x₂³ + 9x₁²)y − x₁²(27x₁² + 4x₂³), up to a constant.
    let w = ["x1", "x2", "y"];
    let expect = poly(
        &w,
        &[
            (&[0, 0, 3], 256),
            (&[0, 2, 2], -128),
            (&[0, 4, 1], 16),
            (&[2, 1, 1], 144),
            (&[4, 0, 0], -27),
            (&[2, 3, 0], -4),
        ],
    );
    let lead = r.coeffs_in(2)[3].constant_term();
    assert_eq!(r.scale(&(int(256) / lead)), expect);
}

#[test]
fn discriminant_examples() {
    let v = ["z", "b", "c"];
    let p = poly(&v, &[(&[2, 0, 0], 1), (&[1, 1, 0], 1), (&[0, 0, 1], 1)]);
    let d = discriminant(&p, "z").unwrap();
    assert_eq!(d, poly(&["b", "c"], &[(&[2, 0], 1), (&[0, 1], -4)]));

    let v = ["zeta", "x1", "x2"];
    let cubic = poly(&v, &[(&[3, 0, 0], 4), (&[1, 0, 1], 2), (&[0, 1, 0], 1)]);
    let d = discriminant(&cubic, "zeta").unwrap();
    let (_, prim) = d.primitive();
    let t = poly(&["x1", "x2"], &[(&[2, 0], 27), (&[0, 3], 8)]);
    assert!(prim == t || prim == -&t, "{d}");
}

#[test]
fn resultant_errors() {
    let v = ["z", "x"];
    let p = poly(&v, &[(&[0, 1], 1)]);
    assert!(matches!(resultant(&p, &p, "z"), Err(Error::MissingVariable(_))));
    assert!(matches!(resultant(&p, &p, "w"), Err(Error::MissingVariable(_))));
    assert!(discriminant(&poly(&v, &[(&[1, 0], 1)]), "z").is_err());
}

fn same(a: &ZetaRational, b: &ZetaRational) -> bool {
    (a - b).is_zero()
}

#[test]
fn zeta_derivative_examples() {
    let z = ZetaRational::zeta();
    let expect = ZetaRational::d_inv_pow(1).scale(&rat(-1, 2));
    assert!(same(&z.d1(), &expect));
    assert!(ZetaRational::constant(int(1)).d1().is_zero());
    let d = ZetaRational::d();
    let expect = &(&z * &ZetaRational::d_inv_pow(1)).scale(&int(-6)) + &ZetaRational::zero();
    assert!(same(&d.d1(), &expect));
    // ∂₁x₁ = 1 and ∂₂x₂ = 1, ∂₂x₁ = 0 along the constraint.
    assert!(same(&ZetaRational::x1().d1(), &ZetaRational::constant(int(1))));
    assert!(ZetaRational::x1().d2().is_zero());
    assert!(same(&ZetaRational::x2().d2(), &ZetaRational::constant(int(1))));
}

#[test]
fn zeta_eval_examples() {
    let z = ZetaRational::zeta();
    assert_eq!(z.eval(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    let s0 = (&z * &ZetaRational::d_inv_pow(2)).scale(&int(3));
    let v = s0.eval(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((v - c(1.0 / 12.0, 0.0)).norm() < 1e-15);
    assert_eq!(s0.eval_rational(&int(1), &int(0)).unwrap(), rat(1, 12));
    assert!(matches!(s0.eval(c(1.0, 0.0), c(-6.0, 0.0)), Err(Error::NearTurningPoint(_))));
    assert!(s0.eval_rational(&int(1), &int(-6)).is_err());
}

/// Numeric derivative along the constraint: moving x₁ with x₂ fixed moves ζ
/// by −dx₁/(2D).
#[test]
fn d1_matches_finite_differences() {
    let z = ZetaRational::zeta();
    let f = &(&z.pow(3) * &ZetaRational::d_inv_pow(2)) + &(&ZetaRational::x2() * &z);
    let df = f.d1();
    for (z0, x2) in [(c(0.7, 0.2), c(0.3, -0.1)), (c(-1.1, 0.4), c(0.5, 0.0)), (c(0.2, -0.9), c(-0.4, 0.3))] {
        let h = 1e-6;
        // ζ(x₁ ± h) by Newton on 4ζ³ + 2x₂ζ + x₁.
        let x1 = -4.0 * z0 * z0 * z0 - 2.0 * x2 * z0;
        let root = |x1: Complex64| {
            let mut w = z0;
            for _ in 0..50 {
                w -= (4.0 * w * w * w + 2.0 * x2 * w + x1) / (12.0 * w * w + 2.0 * x2);
            }
            w
        };
        let num = (f.eval(root(x1 + h), x2).unwrap() - f.eval(root(x1 - h), x2).unwrap()) / (2.0 * h);
        let exact = df.eval(z0, x2).unwrap();
        assert!((num - exact).norm() <= 1e-6 * exact.norm().max(1.0), "{num} vs {exact}");
    }
}

#[test]
fn multipoly_json_is_deterministic() {
    let v = ["x", "y"];
    let p = poly(&v, &[(&[1, 0], 3), (&[0, 2], -2), (&[0, 0], 1)]);
    let q = poly(&v, &[(&[0, 0], 1), (&[0, 2], -2), (&[1, 0], 3)]);
    assert_eq!(p.to_json(), q.to_json());
    assert!(!(&p - &q).terms().any(|(_, c)| !c.is_zero()));
}
