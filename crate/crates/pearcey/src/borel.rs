//! The Borel-plane quartic. Sheets are carried as roots z of
//! z⁴ + x₂z² + x₁z + y = 0, with g = −1/(4z³ + 2x₂z + x₁); in the scaled
//! chart x₁ = 1, x₂ = t, y = s and g is written h.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::aberth::root_values;
use crate::algebra::{rat, resultant, MultiPoly, UniPolyC};
use crate::error::{Error, Result};
use crate::geometry::{c, char_branch, p_ell, to_scaled, CharBranch, PlanePoint, C, MATCH_RATIO};
use crate::quad;
use crate::wkb::{borel_coeffs_from, sqrt_positive_cut, BorelCoeffTable, WkbSeriesTable};

/// Operational bound on |t| = |x₂/x₁^{2/3}| for the closed form of ψ_{ℓ,B}.
pub const VALIDATED_T: f64 = 0.2;

/// Offset from p_ℓ at which local germs are matched.
pub const LOCAL_OFFSET: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Xy,
    St,
}

/// A point (x₁, x₂, y); the st chart is x₁ = 1, x₂ = t, y = s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorelPoint {
    pub x1: C,
    pub x2: C,
    pub y: C,
}

impl BorelPoint {
    pub fn st(s: C, t: C) -> Self {
        BorelPoint {
            x1: c(1.0, 0.0),
            x2: t,
            y: s,
        }
    }

    pub fn xy(x: &PlanePoint, y: C) -> Self {
        BorelPoint { x1: x.x1, x2: x.x2, y }
    }

    pub fn plane(&self) -> PlanePoint {
        PlanePoint::new(self.x1, self.x2)
    }

    pub fn lerp(&self, o: &BorelPoint, l: f64) -> BorelPoint {
        BorelPoint {
            x1: self.x1 + (o.x1 - self.x1) * l,
            x2: self.x2 + (o.x2 - self.x2) * l,
            y: self.y + (o.y - self.y) * l,
        }
    }

    fn dist(&self, o: &BorelPoint) -> f64 {
        (self.x1 - o.x1).norm() + (self.x2 - o.x2).norm() + (self.y - o.y).norm()
    }
}

/// Resultant in z of z⁴ + x₂z² + x₁z + y and (4z³ + 2x₂z + x₁)g + 1,
/// scaled to constant term 1. Variables (g, x1, x2, y).
pub fn quartic_xy_poly() -> &'static MultiPoly {
    static CELL: OnceLock<MultiPoly> = OnceLock::new();
    CELL.get_or_init(|| {
        let v = ["z", "g", "x1", "x2", "y"];
        let z = MultiPoly::var(&v, "z");
        let g = MultiPoly::var(&v, "g");
        let x1 = MultiPoly::var(&v, "x1");
        let x2 = MultiPoly::var(&v, "x2");
        let y = MultiPoly::var(&v, "y");
        let one = MultiPoly::one(&v);
        let p = &(&(&z.pow(4) + &(&x2 * &z.pow(2))) + &(&x1 * &z)) + &y;
        let d = &(&z.pow(3).scale(&rat(4, 1)) + &(&x2 * &z).scale(&rat(2, 1))) + &x1;
        let q = &(&d * &g) + &one;
        let r = resultant(&p, &q, "z").expect("elimination of z");
        let c0 = r.constant_term();
        r.scale(&(num_rational::BigRational::from_integer(1.into()) / c0))
    })
}

/// The same quartic at x₁ = 1 over (h, s, t).
pub fn quartic_st_poly() -> &'static MultiPoly {
    static CELL: OnceLock<MultiPoly> = OnceLock::new();
    CELL.get_or_init(|| {
        let q = quartic_xy_poly();
        let r = q.substitute(1, &MultiPoly::one(q.vars())).drop_var(1);
        MultiPoly::from_terms(
            &["h", "s", "t"],
            r.terms().map(|(m, c)| (vec![m.0[0], m.0[2], m.0[1]], c.clone())),
        )
    })
}

fn quartic_coeff_polys() -> &'static Vec<MultiPoly> {
    static CELL: OnceLock<Vec<MultiPoly>> = OnceLock::new();
    CELL.get_or_init(|| {
        quartic_xy_poly()
            .coeffs_in(0)
            .into_iter()
            .map(|p| p.drop_var(0))
            .collect()
    })
}

/// Numeric quartic in g (or h) at a point, lowest power first. The leading
/// coefficient vanishes on the singular locus, so it is kept even when small.
pub fn quartic_coeffs(p: &BorelPoint) -> [C; 5] {
    let at = [p.x1, p.x2, p.y];
    let mut out = [C::zero(); 5];
    for (k, q) in quartic_coeff_polys().iter().enumerate() {
        out[k] = q.eval_complex(&at);
    }
    out
}

pub fn quartic_at(p: &BorelPoint) -> Result<UniPolyC> {
    UniPolyC::new(quartic_coeffs(p).to_vec())
}

/// |Q(g)| relative to the sizes of its terms.
pub fn quartic_residual(p: &BorelPoint, g: C) -> f64 {
    let q = quartic_coeffs(p);
    let mut acc = C::zero();
    let mut scale = 0.0;
    let mut gk = c(1.0, 0.0);
    for qk in q {
        acc += qk * gk;
        scale += (qk * gk).norm();
        gk *= g;
    }
    acc.norm() / scale.max(f64::MIN_POSITIVE)
}

fn z_eval(p: &BorelPoint, z: C) -> (C, C) {
    let z2 = z * z;
    let f = z2 * z2 + p.x2 * z2 + p.x1 * z + p.y;
    let d = 4.0 * z2 * z + 2.0 * p.x2 * z + p.x1;
    (f, d)
}

/// g = −1/(4z³ + 2x₂z + x₁).
pub fn g_of(p: &BorelPoint, z: C) -> C {
    -1.0 / z_eval(p, z).1
}

pub fn sheet_values(p: &BorelPoint, z: &[C; 4]) -> [C; 4] {
    z.map(|w| g_of(p, w))
}

/// The four z-roots at a point, in the root finder's deterministic order.
pub fn z_roots(p: &BorelPoint) -> Result<[C; 4]> {
    let poly = UniPolyC::new(vec![p.y, p.x1, p.x2, C::zero(), c(1.0, 0.0)])?;
    let v = root_values(&poly, 1e-12)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn min_sep(v: &[C]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..v.len() {
        for j in 0..i {
            m = m.min((v[i] - v[j]).norm());
        }
    }
    m
}

/// One predictor–corrector step from `a` (values `z`) to `b`.
fn pc_step(z: &[C; 4], a: &BorelPoint, b: &BorelPoint) -> Option<[C; 4]> {
    let dx1 = b.x1 - a.x1;
    let dx2 = b.x2 - a.x2;
    let dy = b.y - a.y;
    let sep0 = min_sep(z);
    let mut out = [C::zero(); 4];
    for i in 0..4 {
        let (_, fz) = z_eval(a, z[i]);
        let dl = dx2 * z[i] * z[i] + dx1 * z[i] + dy;
        let mut w = z[i] - dl / fz;
        if (w - z[i]).norm() * 4.0 > sep0 {
            return None;
        }
        let mut ok = false;
        for _ in 0..12 {
            let (f, d) = z_eval(b, w);
            let step = f / d;
            if !(step.re.is_finite() && step.im.is_finite()) {
                return None;
            }
            w -= step;
            if step.norm() <= 1e-15 * (1.0 + w.norm()) {
                ok = true;
                break;
            }
        }
        if !ok {
            let (f, _) = z_eval(b, w);
            let scale = 1.0 + b.y.norm() + b.x1.norm() * w.norm() + b.x2.norm() * w.norm_sqr() + w.norm_sqr().powi(2);
            if f.norm() > 1e-12 * scale {
                return None;
            }
        }
        out[i] = w;
    }
    let sep = min_sep(&out);
    let disp = (0..4).map(|i| (out[i] - z[i]).norm()).fold(0.0, f64::max);
    if !(sep > 0.0) || disp * MATCH_RATIO > sep {
        return None;
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub param: f64,
    pub point: BorelPoint,
    pub z: [C; 4],
    pub sheets: [C; 4],
    pub min_separation: f64,
}

/// Continue the four z-sheets along a polyline, optionally recording steps.
pub fn continue_z(start: [C; 4], path: &[BorelPoint], mut rec: Option<&mut Vec<TraceStep>>) -> Result<[C; 4]> {
    let mut z = start;
    if let Some(r) = rec.as_deref_mut() {
        if let Some(p0) = path.first() {
            r.push(TraceStep {
                param: 0.0,
                point: *p0,
                z,
                sheets: sheet_values(p0, &z),
                min_separation: min_sep(&z),
            });
        }
    }
    for (seg, w) in path.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a.dist(&b) == 0.0 {
            continue;
        }
        let mut lam = 0.0;
        let mut dl: f64 = 0.25;
        let mut cur = a;
        while lam < 1.0 {
            dl = dl.min(1.0 - lam);
            let nl = lam + dl;
            let next = a.lerp(&b, nl);
            match pc_step(&z, &cur, &next) {
                Some(nz) => {
                    z = nz;
                    cur = next;
                    lam = nl;
                    dl *= 1.5;
                    if let Some(r) = rec.as_deref_mut() {
                        r.push(TraceStep {
                            param: seg as f64 + lam,
                            point: cur,
                            z,
                            sheets: sheet_values(&cur, &z),
                            min_separation: min_sep(&z),
                        });
                    }
                }
                None => {
                    dl *= 0.5;
                    if dl < 1e-12 {
                        return Err(Error::NearDiscriminant(format!(
                            "x1={}, x2={}, y={}",
                            next.x1, next.x2, next.y
                        )));
                    }
                }
            }
        }
    }
    Ok(z)
}

/// A permutation of sheets: `images[i] = j` sends sheet i+1 to sheet j+1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetPermutation {
    pub images: Vec<usize>,
}

impl SheetPermutation {
    pub fn identity(n: usize) -> Self {
        SheetPermutation {
            images: (0..n).collect(),
        }
    }

    /// Transposition of 1-based labels.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a - 1, b - 1);
        p
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// First `self`, then `other`.
    pub fn then(&self, other: &SheetPermutation) -> SheetPermutation {
        SheetPermutation {
            images: self.images.iter().map(|&j| other.images[j]).collect(),
        }
    }

    /// Non-trivial cycles, 1-based, each starting from its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut cyc = vec![];
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                cyc.push(j + 1);
                j = self.images[j];
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }
}

impl fmt::Display for SheetPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for cyc in cs {
            let s: Vec<String> = cyc.iter().map(|k| k.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

fn match_perm(from: &[C; 4], to: &[C; 4]) -> Result<SheetPermutation> {
    crate::geometry::nearest_match(from, to, MATCH_RATIO)
        .map(|images| SheetPermutation { images })
        .ok_or_else(|| Error::AmbiguousMatch("sheet identification at path end".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchTrace {
    pub chart: Chart,
    pub path: Vec<BorelPoint>,
    pub steps: Vec<TraceStep>,
    /// Smallest z-sheet separation met along the way; a proxy for the
    /// distance to the discriminant.
    pub min_separation: f64,
    pub permutation: Option<SheetPermutation>,
}

impl BranchTrace {
    pub fn end_z(&self) -> [C; 4] {
        self.steps.last().expect("non-empty trace").z
    }

    pub fn end_sheets(&self) -> [C; 4] {
        self.steps.last().expect("non-empty trace").sheets
    }

    /// Identify the end values with labelled germs at the endpoint.
    pub fn match_against(&mut self, target: &[C; 4]) -> Result<SheetPermutation> {
        let p = match_perm(&self.end_sheets(), target)?;
        self.permutation = Some(p.clone());
        Ok(p)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,param,x1_re,x1_im,x2_re,x2_im,y_re,y_im");
        for k in 1..=4 {
            s.push_str(&format!(",sheet{k}_re,sheet{k}_im"));
        }
        s.push_str(",min_separation\n");
        for (i, st) in self.steps.iter().enumerate() {
            let p = &st.point;
            s.push_str(&format!(
                "{i},{:.12},{:e},{:e},{:e},{:e},{:e},{:e}",
                st.param, p.x1.re, p.x1.im, p.x2.re, p.x2.im, p.y.re, p.y.im
            ));
            for v in &st.sheets {
                s.push_str(&format!(",{:e},{:e}", v.re, v.im));
            }
            s.push_str(&format!(",{:e}\n", st.min_separation));
        }
        s
    }
}

/// Track labelled z-sheets along a path with per-step diagnostics.
pub fn track(chart: Chart, start_z: [C; 4], path: &[BorelPoint]) -> Result<BranchTrace> {
    if path.is_empty() {
        return Err(Error::Validation("empty path".into()));
    }
    let mut steps = Vec::new();
    continue_z(start_z, path, Some(&mut steps))?;
    for st in &steps {
        for g in st.sheets {
            if quartic_residual(&st.point, g) > 1e-9 {
                return Err(Error::Numeric(format!("quartic residual too large at y={}", st.point.y)));
            }
        }
    }
    let min_separation = steps.iter().map(|s| s.min_separation).fold(f64::INFINITY, f64::min);
    Ok(BranchTrace {
        chart,
        path: path.to_vec(),
        steps,
        min_separation,
        permutation: None,
    })
}

/// z-values of the origin-chart sheets h₁..h₄ at s = t = 0.
pub fn origin_z() -> [C; 4] {
    [
        C::from_polar(1.0, -PI / 3.0),
        C::from_polar(1.0, PI / 3.0),
        c(-1.0, 0.0),
        C::zero(),
    ]
}

/// Origin-chart z-sheets at (s, t), continued (0,0) → (0,t) → (s,t).
pub fn branches_at_origin_z(s: C, t: C) -> Result<[C; 4]> {
    let path = [
        BorelPoint::st(C::zero(), C::zero()),
        BorelPoint::st(C::zero(), t),
        BorelPoint::st(s, t),
    ];
    continue_z(origin_z(), &path, None)
}

/// h₁..h₄ at (s, t).
pub fn branches_at_origin(s: C, t: C) -> Result<[C; 4]> {
    let z = branches_at_origin_z(s, t)?;
    Ok(sheet_values(&BorelPoint::st(s, t), &z))
}

/// 2^{−5/6}/√3.
pub fn singular_amplitude() -> f64 {
    1.0 / (2f64.powf(5.0 / 6.0) * 3f64.sqrt())
}

/// Regular values h₃^{(ℓ)}, h₄^{(ℓ)} at s = p_ℓ.
pub fn regular_constants() -> [C; 2] {
    let r = 2f64.sqrt() / 18.0;
    [c(4.0 / 18.0, r), c(4.0 / 18.0, -r)]
}

/// Leading germs of h₁^{(ℓ)}..h₄^{(ℓ)} at t = 0, with (p_ℓ − s)^{−1/2}
/// principal. The cut leaves p_ℓ along s − p_ℓ > 0, away from the segment
/// joining p_ℓ to the origin.
pub fn p_germs(ell: usize, s: C) -> [C; 4] {
    let sing = singular_amplitude() * crate::geometry::omega(-(ell as i64)) / crate::wkb::sqrt_principal(p_ell(ell) - s);
    let [r3, r4] = regular_constants();
    [sing, -sing, r3, r4]
}

/// The singular point p_ℓ(t): u_ℓ at x = (1, t).
pub fn p_of_t(ell: usize, t: C) -> Result<C> {
    if t == C::zero() {
        return Ok(p_ell(ell));
    }
    Ok(char_branch(&PlanePoint::new(c(1.0, 0.0), t))?.u()[ell - 1])
}

fn check_ell(ell: usize) -> Result<()> {
    if (1..=3).contains(&ell) {
        Ok(())
    } else {
        Err(Error::Validation("label must be 1, 2 or 3".into()))
    }
}

/// z-sheets of the p_ℓ chart at (s, t): matched to the germs at
/// (p_ℓ + d₀, 0) with |d₀| ≤ [`LOCAL_OFFSET`], moved with p_ℓ(τ) to τ = t,
/// then radially to s.
pub fn branches_at_p_z(ell: usize, s: C, t: C) -> Result<[C; 4]> {
    check_ell(ell)?;
    let pt = p_of_t(ell, t)?;
    let d = s - pt;
    if d.norm() < 1e-12 {
        return Err(Error::Validation(format!("s = p{ell}(t) is a branch point")));
    }
    let d0 = if d.norm() <= LOCAL_OFFSET { d } else { d * (LOCAL_OFFSET / d.norm()) };
    let s0 = p_ell(ell) + d0;
    let p0 = BorelPoint::st(s0, C::zero());
    let z = z_roots(&p0)?;
    let h = sheet_values(&p0, &z);
    let germs = p_germs(ell, s0);
    let idx = crate::geometry::nearest_match(&germs, &h, MATCH_RATIO)
        .ok_or_else(|| Error::AmbiguousMatch(format!("germs of the p{ell} chart")))?;
    let mut zl = [z[idx[0]], z[idx[1]], z[idx[2]], z[idx[3]]];
    if t != C::zero() {
        let n = 16;
        let mut path = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let tk = t * (k as f64 / n as f64);
            path.push(BorelPoint::st(p_of_t(ell, tk)? + d0, tk));
        }
        zl = continue_z(zl, &path, None)?;
    }
    if d0 != d {
        zl = continue_z(zl, &[BorelPoint::st(pt + d0, t), BorelPoint::st(s, t)], None)?;
    }
    Ok(zl)
}

pub fn branches_at_p(ell: usize, s: C, t: C) -> Result<[C; 4]> {
    let z = branches_at_p_z(ell, s, t)?;
    Ok(sheet_values(&BorelPoint::st(s, t), &z))
}

/// h_j = h^{(ℓ)}_{DICTIONARY[ℓ−1][j−1]} near p_ℓ inside |s| < p₃.
pub const DICTIONARY: [[usize; 4]; 3] = [[2, 4, 3, 1], [3, 2, 4, 1], [4, 3, 1, 2]];

/// For each origin label j, the local label k with h_j = h^{(ℓ)}_k at (s, t).
pub fn dictionary(ell: usize, s: C, t: C) -> Result<[usize; 4]> {
    check_ell(ell)?;
    let o = branches_at_origin(s, t)?;
    let l = branches_at_p(ell, s, t)?;
    let idx = crate::geometry::nearest_match(&o, &l, MATCH_RATIO)
        .ok_or_else(|| Error::AmbiguousMatch("origin and local sheets".into()))?;
    Ok([idx[0] + 1, idx[1] + 1, idx[2] + 1, idx[3] + 1])
}

/// Closed polygon around `center` in the st chart, starting on the side
/// facing the origin.
pub fn loop_around(center: C, radius: f64, t: C, n: usize) -> Vec<BorelPoint> {
    let a0 = (-center).arg();
    (0..=n)
        .map(|k| {
            let a = a0 + 2.0 * PI * k as f64 / n as f64;
            BorelPoint::st(center + C::from_polar(radius, a), t)
        })
        .collect()
}

/// Permutation of origin labels after continuation around a closed st loop.
pub fn monodromy(lp: &[BorelPoint]) -> Result<SheetPermutation> {
    if lp.len() < 3 {
        return Err(Error::Validation("loop needs at least three vertices".into()));
    }
    let (a, b) = (lp[0], lp[lp.len() - 1]);
    if a.dist(&b) > 1e-12 {
        return Err(Error::Validation("loop is not closed".into()));
    }
    if (a.x1 - c(1.0, 0.0)).norm() > 0.0 {
        return Err(Error::Validation("monodromy loops live in the st chart".into()));
    }
    let z0 = branches_at_origin_z(a.y, a.x2)?;
    let z1 = continue_z(z0, lp, None)?;
    let h0 = sheet_values(&a, &z0);
    let h1 = sheet_values(&a, &z1);
    match_perm(&h0, &h1)
}

/// Value of ψ_{ℓ,B} from the closed form, with a validation flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub value: C,
    pub s: C,
    pub t: C,
    pub validated: bool,
}

/// (i/√π)(−1)^{ℓ−1}(g_ℓ − g₄), continued from the origin chart. No bound on |t|.
pub fn psi_borel_eval_unvalidated(ell: usize, x: &PlanePoint, y: C) -> Result<PsiValue> {
    check_ell(ell)?;
    let sc = to_scaled(x, y, 0)?;
    let h = branches_at_origin(sc.s, sc.t)?;
    let sign = if ell % 2 == 1 { 1.0 } else { -1.0 };
    let value = c(0.0, 1.0 / PI.sqrt()) * sign * (h[ell - 1] - h[3]) / x.x1;
    Ok(PsiValue {
        value,
        s: sc.s,
        t: sc.t,
        validated: sc.t.norm() <= VALIDATED_T,
    })
}

pub fn psi_borel_eval(ell: usize, x: &PlanePoint, y: C) -> Result<C> {
    let v = psi_borel_eval_unvalidated(ell, x, y)?;
    if !v.validated {
        return Err(Error::OutsideChart(v.t.norm(), VALIDATED_T));
    }
    Ok(v.value)
}

/// i/√π.
pub fn kappa() -> C {
    c(0.0, 1.0 / PI.sqrt())
}

/// Linear functional Σ wᵢ g(zᵢ) on tracked z-sheets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SheetCombination {
    pub z: [C; 4],
    pub weights: [C; 4],
}

impl SheetCombination {
    pub fn value(&self, p: &BorelPoint) -> C {
        let g = sheet_values(p, &self.z);
        (0..4).map(|i| self.weights[i] * g[i]).sum()
    }

    pub fn moved(&self, z: [C; 4]) -> Self {
        SheetCombination { z, weights: self.weights }
    }
}

/// The pair of sheets that meet at u_ℓ, signed so that κ(g_a − g_b) matches
/// `target` (the series value at `p`) to relative `tol`.
pub fn identify_germ(p: &BorelPoint, zeta: C, target: C, tol: f64) -> Result<SheetCombination> {
    let z = z_roots(p)?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| (z[i] - zeta).norm().partial_cmp(&(z[j] - zeta).norm()).unwrap());
    let g = sheet_values(p, &z);
    let (a, b) = (order[0], order[1]);
    let mut best: Option<(f64, [C; 4])> = None;
    for sign in [1.0, -1.0] {
        let mut w = [C::zero(); 4];
        w[a] = kappa() * sign;
        w[b] = -kappa() * sign;
        let v: C = (0..4).map(|i| w[i] * g[i]).sum();
        let err = (v - target).norm() / target.norm();
        if best.map_or(true, |(e, _)| err < e) {
            best = Some((err, w));
        }
    }
    let (err, weights) = best.unwrap();
    if err > tol {
        return Err(Error::AmbiguousMatch(format!(
            "germ at y={} disagrees with the series (relative {err:.2e})",
            p.y
        )));
    }
    Ok(SheetCombination { z, weights })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscKind {
    Plain,
    Tilde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityResult {
    pub kind: DiscKind,
    pub ell: usize,
    pub k: usize,
    /// Final singularity for the tilde kind.
    pub j: Option<usize>,
    /// Δ extrapolated to the cut.
    pub delta: C,
    /// ψ of the singularity where Δ is taken, at the same point of the cut.
    pub reference: C,
    pub ratio: C,
    pub radius: f64,
    /// Whether the third singularity stays clear of every segment used.
    pub hypothesis_ok: bool,
}

/// Direction of the cut: arg y − arg x₁^{4/3}.
fn cut_angle(x: &PlanePoint) -> f64 {
    4.0 / 3.0 * x.x1.arg()
}

fn pos_angle(v: C, theta0: f64) -> f64 {
    (v.arg() - theta0).rem_euclid(2.0 * PI)
}

/// Series value of ψ on the branch with 0 ≤ arg(s − p) < 2π.
fn series_cut_branch(tab: &BorelCoeffTable, y: C, theta0: f64) -> C {
    let d = y - tab.base;
    let rot = C::from_polar(1.0, -theta0);
    let w = sqrt_positive_cut(d * rot) * C::from_polar(1.0, theta0 / 2.0);
    tab.eval_with_root(w)
}

fn arc(center: C, r: f64, theta0: f64, a0: f64, a1: f64, x: &PlanePoint) -> Vec<BorelPoint> {
    let n = (((a1 - a0).abs() / (2.0 * PI)) * 96.0).ceil().max(2.0) as usize;
    (0..=n)
        .map(|k| {
            let a = a0 + (a1 - a0) * k as f64 / n as f64;
            BorelPoint::xy(x, center + C::from_polar(r, theta0 + a))
        })
        .collect()
}

fn seg_dist(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Discontinuity at u_k of ψ_{ℓ,B} continued along the segment from u_ℓ
/// (plain), or of its continuation once around u_k and on to u_j (tilde).
/// Angles are measured from arg x₁^{4/3}; Δ = f(arg 0+) − f(arg 2π−).
pub fn discontinuity(
    kind: DiscKind,
    ell: usize,
    k: usize,
    x: &PlanePoint,
    table: &WkbSeriesTable,
) -> Result<DiscontinuityResult> {
    check_ell(ell)?;
    check_ell(k)?;
    if ell == k {
        return Err(Error::Validation("discontinuity needs distinct labels".into()));
    }
    let b = char_branch(x)?;
    discontinuity_from(kind, ell, k, &b, table)
}

pub fn discontinuity_from(
    kind: DiscKind,
    ell: usize,
    k: usize,
    b: &CharBranch,
    table: &WkbSeriesTable,
) -> Result<DiscontinuityResult> {
    let x = b.x;
    let u = b.u();
    let j = 6 - ell - k;
    let sep = min_sep(&u);
    let r = 0.05 * sep;
    let th0 = cut_angle(&x);
    let tab_l = borel_coeffs_from(b, ell, table)?;
    let ul = u[ell - 1];
    let uk = u[k - 1];
    let uj = u[j - 1];
    let mut hyp = seg_dist(uj, ul, uk) > 2.0 * r;

    let y0 = ul + (uk - ul) * (r / (uk - ul).norm());
    let p0 = BorelPoint::xy(&x, y0);
    let germ = identify_germ(&p0, b.zeta[ell - 1], series_cut_branch(&tab_l, y0, th0), 1e-6)?;
    let y1 = uk + (ul - uk) * (r / (ul - uk).norm());
    let mut z = continue_z(germ.z, &[p0, BorelPoint::xy(&x, y1)], None)?;
    let (center, arrive, last) = match kind {
        DiscKind::Plain => (uk, pos_angle(y1 - uk, th0), k),
        DiscKind::Tilde => {
            hyp &= seg_dist(ul, uk, uj) > 2.0 * r;
            let a = pos_angle(y1 - uk, th0);
            z = continue_z(z, &arc(uk, r, th0, a, a + 2.0 * PI, &x), None)?;
            let akj = pos_angle(uj - uk, th0);
            z = continue_z(z, &arc(uk, r, th0, a, akj, &x), None)?;
            let y2 = uk + (uj - uk) * (r / (uj - uk).norm());
            let y3 = uj + (uk - uj) * (r / (uk - uj).norm());
            z = continue_z(z, &[BorelPoint::xy(&x, y2), BorelPoint::xy(&x, y3)], None)?;
            (uj, pos_angle(y3 - uj, th0), j)
        }
    };
    let delta_at = |eps: f64| -> Result<C> {
        let up = continue_z(z, &arc(center, r, th0, arrive, eps, &x), None)?;
        let lo = continue_z(z, &arc(center, r, th0, arrive, 2.0 * PI - eps, &x), None)?;
        let pu = BorelPoint::xy(&x, center + C::from_polar(r, th0 + eps));
        let pl = BorelPoint::xy(&x, center + C::from_polar(r, th0 + 2.0 * PI - eps));
        Ok(germ.moved(up).value(&pu) - germ.moved(lo).value(&pl))
    };
    // The two continuations end on the cut itself, which is the limit ε → 0.
    let delta = delta_at(0.0)?;
    let tab_last = borel_coeffs_from(b, last, table)?;
    let reference = series_cut_branch(&tab_last, center + C::from_polar(r, th0), th0);
    Ok(DiscontinuityResult {
        kind,
        ell,
        k,
        j: if kind == DiscKind::Tilde { Some(j) } else { None },
        delta,
        reference,
        ratio: delta / reference,
        radius: r,
        hypothesis_ok: hyp,
    })
}

/// Second-order jet of g in (x₁, x₂, y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: C,
    pub d: [C; 3],
    pub dd: [[C; 3]; 3],
}

struct QuarticDerivs {
    q_g: MultiPoly,
    q_a: [MultiPoly; 3],
    q_gg: MultiPoly,
    q_ga: [MultiPoly; 3],
    q_ab: [[MultiPoly; 3]; 3],
}

fn quartic_derivs() -> &'static QuarticDerivs {
    static CELL: OnceLock<QuarticDerivs> = OnceLock::new();
    CELL.get_or_init(|| {
        let q = quartic_xy_poly();
        let q_g = q.deriv(0);
        let q_a = [1, 2, 3].map(|i| q.deriv(i));
        QuarticDerivs {
            q_gg: q_g.deriv(0),
            q_ga: [1, 2, 3].map(|i| q_g.deriv(i)),
            q_ab: [0, 1, 2].map(|a| [1, 2, 3].map(|i| q_a[a].deriv(i))),
            q_g,
            q_a,
        }
    })
}

/// Jet of the root g of the quartic at (x, y) by implicit differentiation.
pub fn implicit_jet(p: &BorelPoint, g: C) -> Result<Jet> {
    let qd = quartic_derivs();
    let at = [g, p.x1, p.x2, p.y];
    let qg = qd.q_g.eval_complex(&at);
    let scale = quartic_coeffs(p).iter().map(|c| c.norm()).fold(0.0, f64::max) * (1.0 + g.norm()).powi(3);
    if qg.norm() <= 1e-10 * scale {
        return Err(Error::NearDiscriminant(format!("x1={}, x2={}, y={}", p.x1, p.x2, p.y)));
    }
    let qa = [0, 1, 2].map(|i| qd.q_a[i].eval_complex(&at));
    let qgg = qd.q_gg.eval_complex(&at);
    let qga = [0, 1, 2].map(|i| qd.q_ga[i].eval_complex(&at));
    let d = [0, 1, 2].map(|i| -qa[i] / qg);
    let mut dd = [[C::zero(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let qab = qd.q_ab[a][b].eval_complex(&at);
            dd[a][b] = -(qab + qga[a] * d[b] + qga[b] * d[a] + qgg * d[a] * d[b]) / qg;
        }
    }
    Ok(Jet { value: g, d, dd })
}

impl Jet {
    /// Jet of y·g.
    pub fn times_y(&self, y: C) -> Jet {
        let mut d = self.d.map(|v| v * y);
        d[2] += self.value;
        let mut dd = [[C::zero(); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                dd[a][b] = self.dd[a][b] * y;
                if a == 2 {
                    dd[a][b] += self.d[b];
                }
                if b == 2 {
                    dd[a][b] += self.d[a];
                }
            }
        }
        Jet {
            value: self.value * y,
            d,
            dd,
        }
    }
}

/// Terms of P_{i,B} applied to a jet.
pub fn borel_operator_terms(op: usize, p: &BorelPoint, j: &Jet) -> Result<Vec<C>> {
    let (x1, x2, y) = (p.x1, p.x2, p.y);
    let (d1, d2, dy) = (0, 1, 2);
    Ok(match op {
        1 => vec![4.0 * j.dd[d1][d2], 2.0 * x2 * j.dd[d1][dy], x1 * j.dd[dy][dy]],
        2 => vec![
            4.0 * j.dd[d2][d2],
            x1 * j.dd[d1][dy],
            2.0 * x2 * j.dd[d2][dy],
            j.d[dy],
        ],
        3 => vec![j.dd[d2][dy], -j.dd[d1][d1]],
        4 => vec![3.0 * x1 * j.d[d1], 2.0 * x2 * j.d[d2], 4.0 * y * j.d[dy], 3.0 * j.value],
        _ => return Err(Error::Validation("operator index must be 1..4".into())),
    })
}

/// What the operator is applied to in [`verify_annihilation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnihilationTarget {
    /// The sheet g(z) for the z-root with this index.
    Sheet(usize),
    /// y·g for that sheet; not a solution.
    YTimesSheet(usize),
}

/// |P_{i,B} f| over the sum of its term magnitudes.
pub fn verify_annihilation(op: usize, x: &PlanePoint, y: C, target: AnnihilationTarget) -> Result<f64> {
    let p = BorelPoint::xy(x, y);
    let z = z_roots(&p)?;
    if min_sep(&z) < 1e-6 * (1.0 + z.iter().map(|w| w.norm()).fold(0.0, f64::max)) {
        return Err(Error::NearDiscriminant(format!("x1={}, x2={}, y={}", x.x1, x.x2, y)));
    }
    let (idx, times_y) = match target {
        AnnihilationTarget::Sheet(i) => (i, false),
        AnnihilationTarget::YTimesSheet(i) => (i, true),
    };
    if idx > 3 {
        return Err(Error::Validation("sheet index must be 0..3".into()));
    }
    let mut jet = implicit_jet(&p, g_of(&p, z[idx]))?;
    if times_y {
        jet = jet.times_y(y);
    }
    let terms = borel_operator_terms(op, &p, &jet)?;
    let sum: C = terms.iter().sum();
    let mag: f64 = terms.iter().map(|t| t.norm()).sum();
    Ok(sum.norm() / mag.max(f64::MIN_POSITIVE))
}

/// Quadrature controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadParams {
    pub panels: usize,
    pub rel_tol: f64,
    /// Truncate where the integrand falls below this fraction of its peak.
    pub cutoff: f64,
    pub max_doublings: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams {
            panels: 16,
            rel_tol: 1e-10,
            cutoff: 1e-16,
            max_doublings: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceResult {
    pub value: C,
    /// Valleys (0..4) joined by the steepest-descent contour, from → to,
    /// for which ∫ e^{η(z⁴+x₂z²+x₁z)} dz = Ψ_ℓ/κ.
    pub valleys: (usize, usize),
    pub truncation: f64,
}

/// Valley index of a large z for Re η > 0: arg z ≈ (π − arg η)/4 + kπ/2.
pub fn valley_of(z: C, eta: C) -> usize {
    let base = (PI - eta.arg()) / 4.0;
    ((z.arg() - base) / (PI / 2.0)).round().rem_euclid(4.0) as usize
}

/// Ψ_ℓ = ∫_{u_ℓ}^{u_ℓ+∞} e^{−ηy} ψ_{ℓ,B}(y) dy with y = u_ℓ + w².
pub fn laplace_borel_sum(
    ell: usize,
    x: &PlanePoint,
    eta: f64,
    table: &WkbSeriesTable,
    params: &QuadParams,
) -> Result<LaplaceResult> {
    check_ell(ell)?;
    if !(eta > 0.0) {
        return Err(Error::Validation("eta must be positive".into()));
    }
    let b = char_branch(x)?;
    let u = b.u();
    let ul = u[ell - 1];
    let sep = min_sep(&u);
    let tab = borel_coeffs_from(&b, ell, table)?;
    let psi0 = tab.coeffs[0].norm();
    let mut wmax = (40.0 / eta).sqrt();
    while (-eta * wmax * wmax).exp() * (1.0 + wmax) > params.cutoff {
        wmax *= 1.2;
    }
    for (i, &uk) in u.iter().enumerate() {
        if i + 1 == ell {
            continue;
        }
        let d = uk - ul;
        if d.re > 0.0 && d.re <= wmax * wmax && d.im.abs() < 1e-9 * (1.0 + ul.norm()) {
            return Err(Error::Validation(format!("ray from u{ell} meets u{}", i + 1)));
        }
    }
    let ws = (0.05 * sep).sqrt().min(wmax);
    let p0 = BorelPoint::xy(x, ul + ws * ws);
    let germ = identify_germ(&p0, b.zeta[ell - 1], tab.eval_principal(p0.y), 1e-6)?;
    let f_at = |vals: &[C]| -> C { vals.iter().sum() };
    let mut prev: Option<C> = None;
    let mut panels = params.panels;
    for _ in 0..=params.max_doublings {
        let nodes = quad::panel_nodes(0.0, wmax, panels);
        let mut z = germ.z;
        let mut last = p0;
        let mut vals = Vec::with_capacity(nodes.len());
        for &(w, wt) in &nodes {
            let y = ul + w * w;
            let psi = if w <= ws {
                tab.eval_with_root(c(w, 0.0))
            } else {
                let p = BorelPoint::xy(x, y);
                z = continue_z(z, &[last, p], None)?;
                last = p;
                germ.moved(z).value(&p)
            };
            vals.push((-eta * w * w).exp() * psi * 2.0 * w * wt);
        }
        let zend = continue_z(z, &[last, BorelPoint::xy(x, ul + wmax * wmax)], None)?;
        let a = germ.weights.iter().position(|w| (w - kappa()).norm() < 1e-12).unwrap();
        let bb = germ.weights.iter().position(|w| (w + kappa()).norm() < 1e-12).unwrap();
        let valleys = (valley_of(zend[bb], c(eta, 0.0)), valley_of(zend[a], c(eta, 0.0)));
        let v = f_at(&vals);
        if let Some(pv) = prev {
            if (v - pv).norm() <= params.rel_tol * v.norm().max(psi0 * 1e-300) {
                return Ok(LaplaceResult {
                    value: v * (-eta * ul).exp(),
                    valleys,
                    truncation: wmax * wmax,
                });
            }
        }
        prev = Some(v);
        panels *= 2;
    }
    Err(Error::Quadrature("Laplace integral did not converge".into()))
}

/// ∫ e^{η(z⁴ + x₂z² + x₁z)} dz from valley `from` to valley `to`, along the
/// two valley rays through the origin.
pub fn pearcey_quadrature(x: &PlanePoint, eta: C, from: usize, to: usize, params: &QuadParams) -> Result<C> {
    if from > 3 || to > 3 || from == to {
        return Err(Error::Validation("valleys must be distinct indices in 0..4".into()));
    }
    if !(eta.re > 0.0) {
        return Err(Error::Validation("Re eta must be positive".into()));
    }
    Ok(valley_ray(x, eta, to, params)? - valley_ray(x, eta, from, params)?)
}

fn valley_ray(x: &PlanePoint, eta: C, k: usize, params: &QuadParams) -> Result<C> {
    let th = (PI - eta.arg()) / 4.0 + k as f64 * PI / 2.0;
    let dir = C::from_polar(1.0, th);
    let f = |r: f64| -> C {
        let z = dir * r;
        (eta * (z * z * z * z + x.x2 * z * z + x.x1 * z)).exp() * dir
    };
    let mut peak: f64 = 0.0;
    let mut rmax = 1.0;
    for _ in 0..60 {
        let n = 200;
        peak = (0..=n).map(|i| f(rmax * i as f64 / n as f64).norm()).fold(peak, f64::max);
        if f(rmax).norm() < params.cutoff * peak && f(rmax * 0.9).norm() < params.cutoff * peak * 1e3 {
            break;
        }
        rmax *= 1.25;
    }
    if !(f(rmax).norm() < params.cutoff * peak) {
        return Err(Error::Quadrature(format!("tail bound not reached on valley ray {k} (r = {rmax:.3e})")));
    }
    let mut panels = params.panels;
    let mut prev = quad::integrate(f, 0.0, rmax, panels);
    for _ in 0..params.max_doublings {
        panels *= 2;
        let v = quad::integrate(f, 0.0, rmax, panels);
        if (v - prev).norm() <= params.rel_tol * v.norm().max(peak * 1e-300) {
            return Ok(v);
        }
        prev = v;
    }
    Err(Error::Quadrature(format!("valley ray {k} did not converge")))
}
