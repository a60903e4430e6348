//! Characteristic roots, Borel singularities, turning points and the
//! eliminated Stokes/singular-locus polynomials.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{aberth_from, discriminant, int, rat, resultant, MultiPoly, UniPolyC};
use crate::error::{Error, Result};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// e^{2πik/3}.
pub fn omega(k: i64) -> C {
    C::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)
}

/// p_ℓ = 3·4^{-4/3} e^{2πiℓ/3}.
pub fn p_ell(ell: usize) -> C {
    omega(ell as i64) * (3.0 / 4f64.powf(4.0 / 3.0))
}

/// Principal cube root.
pub fn cbrt(z: C) -> C {
    if z == C::zero() {
        return z;
    }
    C::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x1: C,
    pub x2: C,
}

impl PlanePoint {
    pub fn new(x1: C, x2: C) -> Self {
        PlanePoint { x1, x2 }
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        PlanePoint {
            x1: c(x1, 0.0),
            x2: c(x2, 0.0),
        }
    }

    pub fn lerp(&self, other: &PlanePoint, t: f64) -> PlanePoint {
        PlanePoint {
            x1: self.x1 + (other.x1 - self.x1) * t,
            x2: self.x2 + (other.x2 - self.x2) * t,
        }
    }

    /// Weighted scaling (λ³x₁, λ²x₂).
    pub fn scaled(&self, lambda: f64) -> PlanePoint {
        PlanePoint {
            x1: self.x1 * lambda.powi(3),
            x2: self.x2 * lambda.powi(2),
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.x1, self.x2].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x1={}, x2={})", self.x1, self.x2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootKind {
    Zeta,
    U,
}

/// Reference point on {x₂ = 0, x₁ > 0} and the vertices continued through.
/// The first leg runs along the arc |x₁|e^{iφ} at x₂ = 0; later legs are straight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub reference: PlanePoint,
    pub path: Vec<PlanePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledRoots3 {
    pub values: [C; 3],
    pub kind: RootKind,
    pub provenance: Provenance,
}

impl LabeledRoots3 {
    /// Value for label ℓ ∈ {1,2,3}.
    pub fn get(&self, ell: usize) -> C {
        self.values[ell - 1]
    }
}

/// Labeled characteristic roots together with the continued branch of √(6ζ²+x₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharBranch {
    pub x: PlanePoint,
    pub zeta: [C; 3],
    pub sqrt_d: [C; 3],
}

/// Safety ratio between the nearest and next-nearest candidate in sheet matching.
pub const MATCH_RATIO: f64 = 3.0;

fn cubic(x: &PlanePoint) -> UniPolyC {
    UniPolyC::new(vec![x.x1, 2.0 * x.x2, C::zero(), c(4.0, 0.0)]).expect("finite point")
}

/// Match `old` values to `new` roots by nearest neighbour with the safety ratio.
/// Returns `None` when any match is ambiguous or not a bijection.
pub fn nearest_match(old: &[C], new: &[C], ratio: f64) -> Option<Vec<usize>> {
    let mut used = vec![false; new.len()];
    let mut out = Vec::with_capacity(old.len());
    for &o in old {
        let mut d: Vec<(f64, usize)> = new.iter().enumerate().map(|(i, &n)| ((n - o).norm(), i)).collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if d.len() > 1 && d[1].0 < ratio * d[0].0 {
            return None;
        }
        if used[d[0].1] {
            return None;
        }
        used[d[0].1] = true;
        out.push(d[0].1);
    }
    Some(out)
}

fn min_separation(v: &[C]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..v.len() {
        for j in 0..i {
            m = m.min((v[i] - v[j]).norm());
        }
    }
    m
}

impl CharBranch {
    /// Labels on the reference locus x₂ = 0, continued along the arc from x₁ > 0:
    /// ζ_ℓ = −(x₁/4)^{1/3} e^{2πiℓ/3} (principal cube root), √D = √6 ζ.
    pub fn on_axis(x1: C) -> Result<Self> {
        if x1 == C::zero() {
            return Err(Error::TurningPoint("origin".into()));
        }
        let r = cbrt(x1 / 4.0);
        let zeta = [1, 2, 3].map(|l| -r * omega(l));
        let sqrt_d = zeta.map(|z| z * 6f64.sqrt());
        Ok(CharBranch {
            x: PlanePoint::new(x1, C::zero()),
            zeta,
            sqrt_d,
        })
    }

    /// Continue labels and √D along the straight segment to `to`.
    pub fn continue_to(&self, to: &PlanePoint) -> Result<CharBranch> {
        let mut cur = *self;
        let from = self.x;
        let mut lam = 0.0;
        let mut dl: f64 = 1.0 / 16.0;
        while lam < 1.0 {
            dl = dl.min(1.0 - lam);
            let nl = lam + dl;
            let x = from.lerp(to, nl);
            match step_to(&cur, &x) {
                Some(next) => {
                    cur = next;
                    lam = nl;
                    dl *= 1.5;
                }
                None => {
                    dl *= 0.5;
                    if dl < 1e-13 {
                        return Err(Error::TurningPoint(format!("{x}")));
                    }
                }
            }
        }
        cur.x = *to;
        Ok(cur)
    }

    pub fn u(&self) -> [C; 3] {
        self.zeta.map(|z| critical_value_of(&self.x, z))
    }
}

fn step_to(cur: &CharBranch, x: &PlanePoint) -> Option<CharBranch> {
    let guess = cur.zeta;
    let new = aberth_from(&cubic(x), &guess, 1e-12).ok()?;
    let idx = nearest_match(&guess, &new, MATCH_RATIO)?;
    let zeta = [new[idx[0]], new[idx[1]], new[idx[2]]];
    let sep = min_separation(&cur.zeta);
    let disp = (0..3).map(|i| (zeta[i] - cur.zeta[i]).norm()).fold(0.0, f64::max);
    if disp * MATCH_RATIO > sep {
        return None;
    }
    let mut sqrt_d = [C::zero(); 3];
    for i in 0..3 {
        let s = (6.0 * zeta[i] * zeta[i] + x.x2).sqrt();
        let (a, b) = ((s - cur.sqrt_d[i]).norm(), (s + cur.sqrt_d[i]).norm());
        if a.min(b) * MATCH_RATIO <= a.max(b) {
            sqrt_d[i] = if a < b { s } else { -s };
        } else {
            return None;
        }
    }
    Some(CharBranch { x: *x, zeta, sqrt_d })
}

/// u = −(3x₁ζ + 2x₂ζ²)/4, the critical value −(ζ⁴ + x₂ζ² + x₁ζ).
pub fn critical_value_of(x: &PlanePoint, zeta: C) -> C {
    -(3.0 * x.x1 * zeta + 2.0 * x.x2 * zeta * zeta) / 4.0
}

/// Default provenance for a point: arc at x₂ = 0 from |x₁| to x₁, then the
/// straight leg in x₂. For x₁ = 0 the reference is (|x₂|^{3/2}, 0) and the
/// final legs move x₁ to 0 through a waypoint of the same modulus.
pub fn default_provenance(x: &PlanePoint) -> Result<Provenance> {
    if !x.is_finite() {
        return Err(Error::Validation("non-finite point".into()));
    }
    if x.x1 != C::zero() {
        Ok(Provenance {
            reference: PlanePoint::new(c(x.x1.norm(), 0.0), C::zero()),
            path: vec![PlanePoint::new(x.x1, C::zero()), *x],
        })
    } else if x.x2 != C::zero() {
        let r = x.x2.norm().powf(1.5);
        let q = PlanePoint::real(r, 0.0);
        let w = detour(r, x.x2);
        Ok(Provenance {
            reference: q,
            path: vec![q, PlanePoint::new(c(r, 0.0), x.x2), PlanePoint::new(w, x.x2), *x],
        })
    } else {
        Err(Error::TurningPoint("origin".into()))
    }
}

/// Waypoint for the x₁ = 0 legs r → w → 0, kept clear of the two points of T
/// at this x₂.
fn detour(r: f64, x2: C) -> C {
    let t = (-8.0 * x2 * x2 * x2 / 27.0).sqrt();
    let clearance = |a: C, b: C| {
        [t, -t]
            .iter()
            .map(|&p| {
                let d = b - a;
                let l = ((p - a) * d.conj()).re / d.norm_sqr();
                (a + d * l.clamp(0.0, 1.0) - p).norm()
            })
            .fold(f64::MAX, f64::min)
    };
    let start = c(r, 0.0);
    [0.5, -0.5, 0.25, -0.25, 0.75, -0.75]
        .iter()
        .map(|&f| C::from_polar(r, f * PI))
        .find(|&w| clearance(start, w).min(clearance(w, C::zero())) >= 0.25 * r)
        .unwrap_or(c(0.0, r))
}

/// Labels at `x` by continuation along its default provenance.
pub fn char_branch(x: &PlanePoint) -> Result<CharBranch> {
    let prov = default_provenance(x)?;
    let mut b = CharBranch::on_axis(prov.path[0].x1)?;
    for v in &prov.path[1..] {
        b = b.continue_to(v)?;
    }
    Ok(b)
}

/// Labels continued along a user polyline; one state per vertex.
pub fn char_branch_along(path: &[PlanePoint]) -> Result<Vec<CharBranch>> {
    if path.is_empty() {
        return Err(Error::Validation("empty path".into()));
    }
    let mut out = vec![char_branch(&path[0])?];
    for v in &path[1..] {
        let next = out.last().unwrap().continue_to(v)?;
        out.push(next);
    }
    Ok(out)
}

fn check_off_t(x: &PlanePoint) -> Result<()> {
    let (_, on) = turning_discriminant(x);
    if on {
        return Err(Error::TurningPoint(format!("{x}")));
    }
    Ok(())
}

/// Labeled roots of 4ζ³ + 2x₂ζ + x₁ = 0 (strict mode: error on T).
pub fn char_roots(x: &PlanePoint) -> Result<LabeledRoots3> {
    check_off_t(x)?;
    let b = char_branch(x)?;
    Ok(LabeledRoots3 {
        values: b.zeta,
        kind: RootKind::Zeta,
        provenance: default_provenance(x)?,
    })
}

/// Unlabeled roots, allowed on T (merged-root mode for plotting).
pub fn char_roots_merged(x: &PlanePoint) -> Result<[C; 3]> {
    let v = crate::algebra::aberth::root_values(&cubic(x), 1e-10)?;
    Ok([v[0], v[1], v[2]])
}

/// Labeled Borel singularities u_ℓ = −ϖ_ℓ.
pub fn critical_values(x: &PlanePoint) -> Result<LabeledRoots3> {
    check_off_t(x)?;
    let b = char_branch(x)?;
    Ok(LabeledRoots3 {
        values: b.u(),
        kind: RootKind::U,
        provenance: default_provenance(x)?,
    })
}

/// 27x₁² + 8x₂³ and whether x lies on T (relative tolerance 1e-10).
pub fn turning_discriminant(x: &PlanePoint) -> (C, bool) {
    let a = 27.0 * x.x1 * x.x1;
    let b = 8.0 * x.x2 * x.x2 * x.x2;
    let v = a + b;
    let scale = a.norm().max(b.norm()).max(1.0);
    (v, v.norm() <= 1e-10 * scale)
}

/// Disc_z(z⁴ + x₂z² + x₁z + y) over (x₁, x₂, y).
pub fn singular_locus_cubic() -> &'static MultiPoly {
    static CELL: OnceLock<MultiPoly> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = ["z", "x1", "x2", "y"];
        let z = MultiPoly::var(&v, "z");
        let p = &(&(&z.pow(4) + &(&MultiPoly::var(&v, "x2") * &z.pow(2)))
            + &(&MultiPoly::var(&v, "x1") * &z))
            + &MultiPoly::var(&v, "y");
        discriminant(&p, "z").expect("quartic discriminant")
    })
}

/// Elimination of ζ_ℓ, ζ_k from the cubic relations and
/// F = (ζ_ℓ − ζ_k)(3x₁ + 2x₂(ζ_ℓ + ζ_k))/4, with the diagonal factor F³ and the
/// integer content removed. Over (x₁, x₂, F).
pub fn stokes_sextic() -> &'static MultiPoly {
    static CELL: OnceLock<MultiPoly> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = ["zl", "zk", "x1", "x2", "F"];
        let zl = MultiPoly::var(&v, "zl");
        let zk = MultiPoly::var(&v, "zk");
        let x1 = MultiPoly::var(&v, "x1");
        let x2 = MultiPoly::var(&v, "x2");
        let f = MultiPoly::var(&v, "F");
        let cubic_in = |z: &MultiPoly| {
            &(&z.pow(3).scale(&int(4)) + &(&x2 * z).scale(&int(2))) + &x1
        };
        let fexpr = (&(&zl - &zk) * &(&x1.scale(&int(3)) + &(&x2 * &(&zl + &zk)).scale(&int(2))))
            .scale(&rat(1, 4));
        let g = &fexpr - &f;
        let r1 = resultant(&cubic_in(&zl), &g, "zl").expect("first elimination");
        let ck = cubic_in(&zk).drop_var(0);
        let r2 = resultant(&ck, &r1, "zk").expect("second elimination");
        let fv = MultiPoly::var(r2.vars(), "F");
        let mut s = r2;
        while s.constant_term_in(2).is_zero() {
            s = s.div_exact(&fv).expect("F divides");
        }
        s.primitive().1
    })
}

/// Scaled Borel coordinates s = y/x₁^{4/3}, t = x₂/x₁^{2/3}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledCoords {
    pub s: C,
    pub t: C,
    pub cube_root_branch: u8,
}

/// x₁^{1/3} on the declared branch: principal root times e^{2πik/3}.
pub fn x1_cbrt(x1: C, branch: u8) -> C {
    cbrt(x1) * omega(branch as i64)
}

pub fn to_scaled(x: &PlanePoint, y: C, branch: u8) -> Result<ScaledCoords> {
    if x.x1 == C::zero() {
        return Err(Error::Validation("x1 = 0 has no scaled chart".into()));
    }
    if branch > 2 {
        return Err(Error::Validation("cube root branch must be 0, 1 or 2".into()));
    }
    let r = x1_cbrt(x.x1, branch);
    Ok(ScaledCoords {
        s: y / r.powu(4),
        t: x.x2 / (r * r),
        cube_root_branch: branch,
    })
}

/// Inverse of [`to_scaled`] for a given x₁: returns (x, y).
pub fn from_scaled(sc: &ScaledCoords, x1: C) -> Result<(PlanePoint, C)> {
    if x1 == C::zero() {
        return Err(Error::Validation("x1 = 0 has no scaled chart".into()));
    }
    let r = x1_cbrt(x1, sc.cube_root_branch);
    Ok((PlanePoint::new(x1, sc.t * r * r), sc.s * r.powu(4)))
}
