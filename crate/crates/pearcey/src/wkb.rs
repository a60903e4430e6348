//! WKB series S_j^{(k)}, closed-form primitives, the coefficients f_j/f₀ and the
//! Borel coefficient tables.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::multipoly::{rat_to_f64, rat_to_string};
use crate::algebra::{int, rat, ZetaRational};
use crate::error::{Error, Result};
use crate::geometry::{char_branch, omega, CharBranch, PlanePoint, C};

pub const DEFAULT_ORDER: usize = 8;

/// ∫ω_j; j = 0 is kept as multiplier · log(argument).
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Log {
        argument: ZetaRational,
        multiplier: BigRational,
    },
    Rational(ZetaRational),
}

#[derive(Clone, Debug)]
pub struct WkbSeriesTable {
    pub order: usize,
    /// S_j^{(1)} at index j + 1, j = −1..=order.
    pub s1: Vec<ZetaRational>,
    /// S_j^{(2)} at index j + 1.
    pub s2: Vec<ZetaRational>,
    /// ∫ω_j at index j + 1 (empty until [`primitives`] runs).
    pub prim: Vec<Primitive>,
    /// f_j/f₀, j = 0..=order (empty until [`wkb_f_coeffs`] runs).
    pub f: Vec<ZetaRational>,
}

impl WkbSeriesTable {
    pub fn s1(&self, j: i64) -> &ZetaRational {
        &self.s1[(j + 1) as usize]
    }

    pub fn s2(&self, j: i64) -> &ZetaRational {
        &self.s2[(j + 1) as usize]
    }

    /// Series, primitives and f-coefficients to order `n`.
    pub fn full(n: usize) -> WkbSeriesTable {
        let mut t = build_series(n);
        primitives(&mut t);
        t.f = wkb_f_coeffs(&t, n).expect("primitives present");
        t
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list = |v: &[ZetaRational]| v.iter().map(|z| z.to_json()).collect::<Vec<_>>();
        let prim: Vec<serde_json::Value> = self
            .prim
            .iter()
            .map(|p| match p {
                Primitive::Log {
                    argument,
                    multiplier,
                } => serde_json::json!({
                    "log_argument": argument.to_json(),
                    "multiplier": rat_to_string(multiplier),
                }),
                Primitive::Rational(z) => z.to_json(),
            })
            .collect();
        serde_json::json!({
            "order": self.order,
            "coordinates": ["zeta", "x2"],
            "j_start": -1,
            "s1": list(&self.s1),
            "s2": list(&self.s2),
            "primitives": prim,
            "f_over_f0": list(&self.f),
        })
    }
}

/// S_j^{(1)}, S_j^{(2)} for j = −1..=n by the recurrences.
pub fn build_series(n: usize) -> WkbSeriesTable {
    let n = n as i64;
    let zeta = ZetaRational::zeta();
    let d = ZetaRational::d();
    let mut s1: Vec<ZetaRational> = vec![zeta.clone()];
    // S₀ = −½ ∂₁ log D = −½ (∂₁D)/D.
    let s0 = &d.d1() * &ZetaRational::d_inv_pow(1);
    s1.push(s0.scale(&rat(-1, 2)));
    let at = |v: &Vec<ZetaRational>, j: i64| v[(j + 1) as usize].clone();
    let d_inv = ZetaRational::d_inv_pow(1);
    let mut d1_cache: Vec<ZetaRational> = vec![s1[0].d1(), s1[1].d1()];
    for j in 1..=n {
        let mut acc = ZetaRational::zero();
        for j1 in -1..j {
            for j2 in -1..j {
                let j3 = j - 2 - j1 - j2;
                if j3 < -1 || j3 >= j {
                    continue;
                }
                acc = &acc + &(&(&at(&s1, j1) * &at(&s1, j2)) * &at(&s1, j3));
            }
        }
        let mut cross = ZetaRational::zero();
        for j1 in -1..j {
            let j2 = j - 2 - j1;
            if j2 < -1 || j2 >= j {
                continue;
            }
            cross = &cross + &(&at(&s1, j1) * &d1_cache[(j2 + 1) as usize]);
        }
        acc = &acc + &cross.scale(&int(3));
        acc = &acc + &d1_cache[(j - 1) as usize].d1();
        let sj = (&d_inv * &acc).scale(&int(-2));
        d1_cache.push(sj.d1());
        s1.push(sj);
    }
    let mut s2 = vec![&zeta * &zeta];
    for j in 0..=n {
        let mut acc = ZetaRational::zero();
        for m in 0..=(j + 1) {
            acc = &acc + &(&at(&s1, m - 1) * &at(&s1, j - m));
        }
        acc = &acc + &d1_cache[j as usize];
        s2.push(acc);
    }
    WkbSeriesTable {
        order: n as usize,
        s1,
        s2,
        prim: Vec::new(),
        f: Vec::new(),
    }
}

/// ∫ω_j = −(3x₁S_j^{(1)} + 2x₂S_j^{(2)})/(4j) for j ≠ 0; j = 0 is −½ log D.
pub fn primitives(table: &mut WkbSeriesTable) {
    let x1 = ZetaRational::x1();
    let x2 = ZetaRational::x2();
    let mut prim = Vec::with_capacity(table.s1.len());
    for j in -1..=(table.order as i64) {
        if j == 0 {
            prim.push(Primitive::Log {
                argument: ZetaRational::d(),
                multiplier: rat(-1, 2),
            });
            continue;
        }
        let a = &(&x1 * table.s1(j)).scale(&int(3)) + &(&x2 * table.s2(j)).scale(&int(2));
        prim.push(Primitive::Rational(a.scale(&rat(-1, 4 * j))));
    }
    table.prim = prim;
}

/// f_j/f₀ for j = 0..=n: coefficients of exp(Σ_{j≥1} η^{-j} ∫ω_j).
pub fn wkb_f_coeffs(table: &WkbSeriesTable, n: usize) -> Result<Vec<ZetaRational>> {
    if table.prim.len() < n + 2 {
        return Err(Error::Validation("primitives not computed to the requested order".into()));
    }
    let a: Vec<ZetaRational> = (0..=n)
        .map(|j| {
            if j == 0 {
                ZetaRational::zero()
            } else {
                match &table.prim[j + 1] {
                    Primitive::Rational(z) => z.clone(),
                    Primitive::Log { .. } => unreachable!("log only at j = 0"),
                }
            }
        })
        .collect();
    // e₀ = 1, e_m = (1/m) Σ_{k=1}^{m} k a_k e_{m−k}.
    let mut e = vec![ZetaRational::constant(BigRational::one())];
    for m in 1..=n {
        let mut acc = ZetaRational::zero();
        for k in 1..=m {
            acc = &acc + &(&a[k] * &e[m - k]).scale(&int(k as i64));
        }
        e.push(acc.scale(&rat(1, m as i64)));
    }
    Ok(e)
}

/// Coefficients of η^{-m}, m = −3..=n−2, of both equations of the nonlinear
/// system after substituting the truncated series.
pub fn system_residuals(table: &WkbSeriesTable) -> Vec<(i64, ZetaRational, ZetaRational)> {
    let n = table.order as i64;
    let x1 = ZetaRational::x1();
    let x2 = ZetaRational::x2();
    let s = |j: i64| -> ZetaRational {
        if (-1..=n).contains(&j) {
            table.s1(j).clone()
        } else {
            ZetaRational::zero()
        }
    };
    let s2 = |j: i64| -> ZetaRational {
        if (-1..=n).contains(&j) {
            table.s2(j).clone()
        } else {
            ZetaRational::zero()
        }
    };
    let mut out = Vec::new();
    for m in -3..=(n - 2) {
        let mut r1 = ZetaRational::zero();
        for j1 in -1..=(m + 2) {
            for j2 in -1..=(m + 2) {
                let j3 = m - j1 - j2;
                if j3 < -1 {
                    continue;
                }
                r1 = &r1 + &(&(&s(j1) * &s(j2)) * &s(j3)).scale(&int(4));
            }
        }
        r1 = &r1 + &(&x2 * &s(m + 2)).scale(&int(2));
        if m == -3 {
            r1 = &r1 + &x1;
        }
        for j1 in -1..=(m + 1) {
            r1 = &r1 + &(&s(j1) * &s(m - j1).d1()).scale(&int(12));
        }
        r1 = &r1 + &s(m).d1().d1().scale(&int(4));
        let mut r2 = &s2(m + 1) - &s(m).d1();
        for j1 in -1..=(m + 1) {
            r2 = &r2 - &(&s(j1) * &s(m - j1));
        }
        out.push((m, r1, r2));
    }
    out
}

/// Γ(j + ½)/√π = (2j)!/(4^j j!).
pub fn gamma_half_over_sqrt_pi(j: usize) -> BigRational {
    let mut num = BigInt::one();
    for k in (j + 1)..=(2 * j) {
        num *= k;
    }
    BigRational::new(num, BigInt::from(4u32).pow(j as u32))
}

/// Ψ-type Borel coefficients at a point for label ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelCoeffTable {
    pub ell: usize,
    pub base: C,
    /// f_j/Γ(j + ½), the coefficient of (y − u_ℓ)^{j−1/2}.
    pub coeffs: Vec<C>,
}

impl BorelCoeffTable {
    /// Sum with a caller-chosen w = (y − u_ℓ)^{1/2}.
    pub fn eval_with_root(&self, w: C) -> C {
        let w2 = w * w;
        let mut acc = C::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * w2 + c;
        }
        acc / w
    }

    /// Principal branch, arg(y − u)^{1/2} ∈ (−π/2, π/2].
    pub fn eval_principal(&self, y: C) -> C {
        self.eval_with_root(sqrt_principal(y - self.base))
    }

    /// Branch with 0 ≤ arg(y − u) < 2π.
    pub fn eval_positive_cut(&self, y: C) -> C {
        self.eval_with_root(sqrt_positive_cut(y - self.base))
    }
}

/// arg ∈ (−π/2, π/2]; the negative real axis maps to +i√|z|.
pub fn sqrt_principal(z: C) -> C {
    if z.im == 0.0 && z.re < 0.0 {
        return C::new(0.0, (-z.re).sqrt());
    }
    z.sqrt()
}

/// Square root with the cut along the positive reals, arg z ∈ [0, 2π).
pub fn sqrt_positive_cut(z: C) -> C {
    let mut a = z.arg();
    if a < 0.0 {
        a += 2.0 * PI;
    }
    C::from_polar(z.norm().sqrt(), a / 2.0)
}

/// Borel coefficients of ψ_ℓ at x, using labels and √D continued along the
/// default provenance.
pub fn borel_coeffs(x: &PlanePoint, ell: usize, table: &WkbSeriesTable) -> Result<BorelCoeffTable> {
    let b = char_branch(x)?;
    borel_coeffs_from(&b, ell, table)
}

pub fn borel_coeffs_from(b: &CharBranch, ell: usize, table: &WkbSeriesTable) -> Result<BorelCoeffTable> {
    if !(1..=3).contains(&ell) {
        return Err(Error::Validation("label must be 1, 2 or 3".into()));
    }
    if table.f.is_empty() {
        return Err(Error::Validation("f coefficients missing from table".into()));
    }
    let z = b.zeta[ell - 1];
    let sd = b.sqrt_d[ell - 1];
    let sqrt_pi = PI.sqrt();
    let mut coeffs = Vec::with_capacity(table.f.len());
    for (j, f) in table.f.iter().enumerate() {
        let v = f.eval(z, b.x.x2)?;
        let g = rat_to_f64(&gamma_half_over_sqrt_pi(j)) * sqrt_pi;
        coeffs.push(v / sd / g);
    }
    Ok(BorelCoeffTable {
        ell,
        base: b.u()[ell - 1],
        coeffs,
    })
}

/// q · 2^{a/6} · e^{2πik/3}, canonical with a ∈ 0..6 and k ∈ 0..3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical {
    pub q: BigRational,
    pub two_sixths: i64,
    pub unity_thirds: i64,
}

impl Radical {
    pub fn new(q: BigRational, two_sixths: i64, unity_thirds: i64) -> Self {
        let (whole, a) = two_sixths.div_mod_floor(&6);
        let q = if whole >= 0 {
            q * BigRational::from_integer(BigInt::from(2).pow(whole as u32))
        } else {
            q / BigRational::from_integer(BigInt::from(2).pow((-whole) as u32))
        };
        let k = unity_thirds.rem_euclid(3);
        if q.is_zero() {
            return Radical {
                q,
                two_sixths: 0,
                unity_thirds: 0,
            };
        }
        Radical {
            q,
            two_sixths: a,
            unity_thirds: k,
        }
    }

    pub fn mul(&self, o: &Radical) -> Radical {
        Radical::new(
            &self.q * &o.q,
            self.two_sixths + o.two_sixths,
            self.unity_thirds + o.unity_thirds,
        )
    }

    pub fn to_complex(&self) -> C {
        omega(self.unity_thirds) * rat_to_f64(&self.q) * 2f64.powf(self.two_sixths as f64 / 6.0)
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.q.is_negative() { "-" } else { "" };
        write!(f, "{sign}{}", rat_to_string(&self.q.abs()))?;
        if self.two_sixths != 0 {
            write!(f, "*2^({}/6)", self.two_sixths)?;
        }
        if self.unity_thirds != 0 {
            write!(f, "*e^(2pi i*{}/3)", self.unity_thirds)?;
        }
        Ok(())
    }
}

/// Exact data of x₁ψ_{ℓ,B}|_{t=0} near s = p_ℓ:
/// c₀·√(3π) and the ratios c_j/c₀.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledExpansion {
    pub ell: usize,
    pub c0_sqrt_3pi: Radical,
    pub ratios: Vec<Radical>,
}

impl ScaledExpansion {
    pub fn c0(&self) -> C {
        self.c0_sqrt_3pi.to_complex() / (3.0 * PI).sqrt()
    }

    pub fn coeffs(&self) -> Vec<C> {
        let c0 = self.c0();
        self.ratios.iter().map(|r| r.to_complex() * c0).collect()
    }
}

/// At x = (1, 0): ζ_ℓ = −2^{−2/3} e^{2πiℓ/3}, √D = √6 ζ_ℓ, f₀ = 1/(√6 ζ_ℓ).
pub fn scaled_expansion(ell: usize, n: usize, table: &WkbSeriesTable) -> Result<ScaledExpansion> {
    if !(1..=3).contains(&ell) {
        return Err(Error::Validation("label must be 1, 2 or 3".into()));
    }
    if n >= table.f.len() {
        return Err(Error::Validation("order exceeds the series table".into()));
    }
    let l = ell as i64;
    // ζ^k = (−1)^k 2^{−4k/6} e^{2πikℓ/3}.
    let zeta_pow = |k: i64| Radical::new(if k.rem_euclid(2) == 0 { int(1) } else { int(-1) }, -4 * k, k * l);
    // c₀√(3π) = ζ^{−1}/√2.
    let c0 = zeta_pow(-1).mul(&Radical::new(int(1), -3, 0));
    let mut ratios = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (r, k) = monomial_at_x2_zero(&table.f[j])?;
        let g = gamma_half_over_sqrt_pi(j);
        ratios.push(zeta_pow(k).mul(&Radical::new(r / g, 0, 0)));
    }
    Ok(ScaledExpansion {
        ell,
        c0_sqrt_3pi: c0,
        ratios,
    })
}

/// f(ζ, 0) = r ζ^k for a weighted-homogeneous f; returns (r, k).
fn monomial_at_x2_zero(f: &ZetaRational) -> Result<(BigRational, i64)> {
    let mut found: Option<(BigRational, i64)> = None;
    for (m, c) in f.numerator().terms() {
        if m.0[1] != 0 {
            continue;
        }
        if found.is_some() {
            return Err(Error::Numeric("coefficient is not a monomial at x2 = 0".into()));
        }
        found = Some((c.clone(), m.0[0] as i64));
    }
    let (c, a) = found.unwrap_or((BigRational::zero(), 0));
    let m = f.denom_power() as i64;
    let six_m = BigRational::from_integer(BigInt::from(6).pow(m as u32));
    Ok((c * f.scalar() / six_m, a - 2 * m))
}

/// Values printed for x₁ψ_{ℓ,B}|_{t=0}, for comparison: c₀√(3π), c₁/c₀, c₂/c₀.
pub fn reference_scaled_values(ell: usize) -> [Radical; 3] {
    let l = ell as i64;
    [
        Radical::new(int(-1), 1, -l),
        Radical::new(rat(-7, 9), -2, -l),
        Radical::new(rat(385, 486), -4, l),
    ]
}

pub fn complex_to_strings(z: Complex64) -> [String; 2] {
    [format!("{:.17e}", z.re), format!("{:.17e}", z.im)]
}
