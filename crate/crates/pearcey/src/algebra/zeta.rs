//! Elements of ℚ[ζ, x₂] localized at D = 6ζ² + x₂, where ζ is a root of
//! 4ζ³ + 2x₂ζ + x₁ = 0 and x₁ is eliminated.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::multipoly::{int, rat_to_f64, rat_to_string, MultiPoly};
use crate::error::{Error, Result};

pub const VARS: [&str; 2] = ["zeta", "x2"];

/// Default floor on |D| for numeric evaluation.
pub const EVAL_FLOOR: f64 = 1e-12;

/// scalar · numerator / D^denom_power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaRational {
    numerator: MultiPoly,
    denom_power: u32,
    scalar: BigRational,
}

fn d_poly() -> MultiPoly {
    let z = MultiPoly::var(&VARS, "zeta");
    let x2 = MultiPoly::var(&VARS, "x2");
    &(&z * &z).scale(&int(6)) + &x2
}

/// N(ζ, −6ζ²) = 0 exactly when D divides N.
fn divisible_by_d(n: &MultiPoly) -> bool {
    let mut acc = std::collections::BTreeMap::<u32, BigRational>::new();
    for (m, c) in n.terms() {
        let (a, b) = (m.0[0], m.0[1]);
        let coef = c * num_traits::pow(int(-6), b as usize);
        *acc.entry(a + 2 * b).or_insert_with(BigRational::zero) += coef;
    }
    acc.values().all(|v| v.is_zero())
}

impl ZetaRational {
    pub fn new(numerator: MultiPoly, denom_power: u32, scalar: BigRational) -> Self {
        assert_eq!(numerator.vars(), &VARS[..], "numerator must be over (zeta, x2)");
        ZetaRational {
            numerator,
            denom_power,
            scalar,
        }
        .normalized()
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        Self::new(p, 0, BigRational::one())
    }

    pub fn zero() -> Self {
        ZetaRational {
            numerator: MultiPoly::zero(&VARS),
            denom_power: 0,
            scalar: BigRational::zero(),
        }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(MultiPoly::constant(&VARS, c))
    }

    pub fn zeta() -> Self {
        Self::from_poly(MultiPoly::var(&VARS, "zeta"))
    }

    pub fn x2() -> Self {
        Self::from_poly(MultiPoly::var(&VARS, "x2"))
    }

    /// x₁ = −4ζ³ − 2x₂ζ.
    pub fn x1() -> Self {
        let z = MultiPoly::var(&VARS, "zeta");
        let x2 = MultiPoly::var(&VARS, "x2");
        let p = &z.pow(3).scale(&int(-4)) - &(&x2 * &z).scale(&int(2));
        Self::from_poly(p)
    }

    /// D = 6ζ² + x₂.
    pub fn d() -> Self {
        Self::from_poly(d_poly())
    }

    /// D^{-k}.
    pub fn d_inv_pow(k: u32) -> Self {
        Self::new(MultiPoly::one(&VARS), k, BigRational::one())
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.numerator
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn scalar(&self) -> &BigRational {
        &self.scalar
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() || self.numerator.is_zero()
    }

    /// The numerator with the scalar folded in.
    pub fn scaled_numerator(&self) -> MultiPoly {
        self.numerator.scale(&self.scalar)
    }

    fn normalized(self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (c, mut n) = self.numerator.primitive();
        let scalar = self.scalar * c;
        let mut m = self.denom_power;
        let d = d_poly();
        while m > 0 && divisible_by_d(&n) {
            n = n.div_exact(&d).expect("divisibility was checked");
            m -= 1;
        }
        let (c2, n) = n.primitive();
        ZetaRational {
            numerator: n,
            denom_power: m,
            scalar: scalar * c2,
        }
    }

    /// Numerator lifted to denominator power `m ≥ denom_power`, scalar folded in.
    fn lifted(&self, m: u32) -> MultiPoly {
        let extra = m - self.denom_power;
        let n = self.scaled_numerator();
        if extra == 0 {
            n
        } else {
            &n * &d_poly().pow(extra)
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ZetaRational {
            numerator: self.numerator.clone(),
            denom_power: self.denom_power,
            scalar: &self.scalar * c,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// ∂₁ = −(2D)^{-1} ∂_ζ.
    pub fn d1(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = &self.numerator;
        let m = self.denom_power;
        let d = d_poly();
        let z = MultiPoly::var(&VARS, "zeta");
        // −(N_ζ D − 12 m ζ N) / (2 D^{m+2})
        let num = &(&n.deriv(0) * &d) - &(&z * n).scale(&int(12 * m as i64));
        Self::new(num, m + 2, &self.scalar * BigRational::new((-1).into(), 2.into()))
    }

    /// ∂₂ = ∂_{x₂}|_ζ − ζ D^{-1} ∂_ζ.
    pub fn d2(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let n = &self.numerator;
        let m = self.denom_power;
        let mi = int(m as i64);
        let d = d_poly();
        let z = MultiPoly::var(&VARS, "zeta");
        // [(N_{x₂} D − m N) D − ζ (N_ζ D − 12 m ζ N)] / D^{m+2}
        let a = &(&(&n.deriv(1) * &d) - &n.scale(&mi)) * &d;
        let b = &z * &(&(&n.deriv(0) * &d) - &(&z * n).scale(&int(12 * m as i64)));
        Self::new(&a - &b, m + 2, self.scalar.clone())
    }

    pub fn eval(&self, zeta: Complex64, x2: Complex64) -> Result<Complex64> {
        self.eval_with_floor(zeta, x2, EVAL_FLOOR)
    }

    pub fn eval_with_floor(&self, zeta: Complex64, x2: Complex64, floor: f64) -> Result<Complex64> {
        let d = 6.0 * zeta * zeta + x2;
        if self.denom_power > 0 && d.norm() <= floor {
            return Err(Error::NearTurningPoint(d.norm()));
        }
        let n = self.numerator.eval_complex(&[zeta, x2]);
        Ok(n * rat_to_f64(&self.scalar) / d.powu(self.denom_power))
    }

    /// Exact evaluation at rational (ζ, x₂).
    pub fn eval_rational(&self, zeta: &BigRational, x2: &BigRational) -> Result<BigRational> {
        let d = int(6) * zeta * zeta + x2;
        if self.denom_power > 0 && d.is_zero() {
            return Err(Error::NearTurningPoint(0.0));
        }
        let n = self.numerator.eval_rational(&[zeta.clone(), x2.clone()]);
        Ok(n * &self.scalar / num_traits::pow(d, self.denom_power as usize))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self.numerator.to_json(),
            "denom_power": self.denom_power,
            "scalar": rat_to_string(&self.scalar),
        })
    }
}

impl Add for &ZetaRational {
    type Output = ZetaRational;
    fn add(self, rhs: &ZetaRational) -> ZetaRational {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let m = self.denom_power.max(rhs.denom_power);
        ZetaRational::new(&self.lifted(m) + &rhs.lifted(m), m, BigRational::one())
    }
}

impl Sub for &ZetaRational {
    type Output = ZetaRational;
    fn sub(self, rhs: &ZetaRational) -> ZetaRational {
        self + &(-rhs)
    }
}

impl Neg for &ZetaRational {
    type Output = ZetaRational;
    fn neg(self) -> ZetaRational {
        self.scale(&int(-1))
    }
}

impl Mul for &ZetaRational {
    type Output = ZetaRational;
    fn mul(self, rhs: &ZetaRational) -> ZetaRational {
        if self.is_zero() || rhs.is_zero() {
            return ZetaRational::zero();
        }
        ZetaRational::new(
            &self.numerator * &rhs.numerator,
            self.denom_power + rhs.denom_power,
            &self.scalar * &rhs.scalar,
        )
    }
}

impl fmt::Display for ZetaRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let s = rat_to_string(&self.scalar);
        let num = self.numerator.to_string();
        if self.denom_power == 0 {
            write!(f, "{s}*({num})")
        } else {
            write!(f, "{s}*({num})/(6*zeta^2 + x2)^{}", self.denom_power)
        }
    }
}
