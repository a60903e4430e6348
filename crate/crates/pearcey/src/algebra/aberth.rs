//! Complex univariate polynomials and simultaneous (Aberth–Ehrlich) root finding.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

/// Dense polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPolyC {
    coeffs: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl UniPolyC {
    /// Trailing exact zeros are dropped; non-finite entries are rejected.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("non-finite polynomial coefficient".into()));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(UniPolyC { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop leading coefficients below `tol` relative to the coefficient scale.
    pub fn trimmed(&self, tol: f64) -> Self {
        let s = self.scale();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= tol * s {
            c.pop();
        }
        UniPolyC { coeffs: c }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative together.
    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return UniPolyC {
                coeffs: vec![Complex64::new(0.0, 0.0)],
            };
        }
        UniPolyC {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        UniPolyC { coeffs: c }
    }

    fn check_leading(&self, tol: f64) -> Result<()> {
        if self.degree() == 0 {
            return Err(Error::Validation("polynomial degree must be at least 1".into()));
        }
        if self.leading().norm() <= tol * self.scale() {
            return Err(Error::DegenerateLeading);
        }
        Ok(())
    }
}

/// Deterministic starting points: a circle of radius from the coefficient
/// ratios, with a fixed angular offset.
fn initial_guesses(p: &UniPolyC) -> Vec<Complex64> {
    let n = p.degree();
    let a0 = p.coeffs[0].norm();
    let an = p.leading().norm();
    let mut radius = if a0 > 0.0 { (a0 / an).powf(1.0 / n as f64) } else { 1.0 };
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let shift = -p.coeffs[n - 1] / (p.leading() * n as f64);
    (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            shift + Complex64::from_polar(radius, th)
        })
        .collect()
}

/// Aberth iteration from caller-supplied starting points.
pub fn aberth_from(p: &UniPolyC, init: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    p.check_leading(1e-14)?;
    let n = p.degree();
    if init.len() != n {
        return Err(Error::Validation("initial guess count must equal the degree".into()));
    }
    let scale = p.scale();
    let mut z = init.to_vec();
    // Break exact coincidences, which would stall the repulsion term.
    for i in 0..n {
        for j in 0..i {
            if z[i] == z[j] {
                let bump = Complex64::new(1e-9, 1e-9) * (1.0 + z[i].norm());
                z[i] += bump;
            }
        }
    }
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (pv, dpv) = p.eval_with_deriv(z[i]);
            let mag = z[i].norm().max(1.0);
            if pv.norm() <= tol * scale * mag.powi(n as i32) * 1e-3 {
                done[i] = true;
                continue;
            }
            all = false;
            let ratio = pv / dpv;
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    rep += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * rep);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                if step.norm() <= 1e-16 * mag {
                    done[i] = true;
                }
            } else {
                done[i] = true;
            }
        }
        if all {
            break;
        }
    }
    for &r in &z {
        let mag = r.norm().max(1.0);
        if p.eval(r).norm() > tol * scale * mag.powi(n as i32) {
            return Err(Error::NoConvergence {
                iterations: MAX_ITER,
                last: z,
            });
        }
    }
    Ok(z)
}

/// All roots with cluster-based multiplicity estimates. Output order follows
/// the deterministic starting circle.
pub fn roots_aberth(p: &UniPolyC, tol: f64) -> Result<Vec<Root>> {
    if tol <= 0.0 {
        return Err(Error::Validation("tolerance must be positive".into()));
    }
    p.check_leading(1e-14)?;
    let z = aberth_from(p, &initial_guesses(p), tol)?;
    Ok(with_multiplicity(&z))
}

/// Plain root values, in starting-circle order.
pub fn root_values(p: &UniPolyC, tol: f64) -> Result<Vec<Complex64>> {
    p.check_leading(1e-14)?;
    aberth_from(p, &initial_guesses(p), tol)
}

fn with_multiplicity(z: &[Complex64]) -> Vec<Root> {
    z.iter()
        .map(|&r| {
            let rad = 1e-4 * r.norm().max(1.0);
            let m = z.iter().filter(|&&s| (s - r).norm() <= rad).count();
            Root {
                value: r,
                multiplicity: m,
            }
        })
        .collect()
}
