//! Stokes geometry in the x-plane: indicators, raster sections, trajectories
//! of u_ℓ, event detection along paths and the connection walk.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::aberth::root_values;
use crate::algebra::UniPolyC;
use crate::borel::{continue_z, identify_germ, BorelPoint};
use crate::error::{Error, Result};
use crate::geometry::{
    c, char_branch, critical_values, nearest_match, stokes_sextic, turning_discriminant, CharBranch, PlanePoint, C,
};
use crate::wkb::{borel_coeffs_from, WkbSeriesTable};

/// Unordered label pairs in indicator order.
pub const PAIRS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

pub const BISECTION_TOL: f64 = 1e-10;

pub fn indicator_from(u: &[C; 3]) -> [f64; 3] {
    PAIRS.map(|(j, k)| (u[j - 1] - u[k - 1]).im)
}

/// Im(u_j − u_k) for (1,2), (1,3), (2,3).
pub fn stokes_indicator(x: &PlanePoint) -> Result<[f64; 3]> {
    Ok(indicator_from(&critical_values(x)?.values))
}

/// x⁽¹⁾ … x⁽¹³⁾.
pub fn reference_polyline() -> Vec<PlanePoint> {
    let h = c(0.5, 0.5);
    let mut v = vec![
        PlanePoint::real(0.15, 0.0),
        PlanePoint::real(0.15, 0.32),
        PlanePoint::real(0.15, 0.5),
        PlanePoint::new(c(0.15, 0.0), c(0.5, 0.25)),
        PlanePoint::new(c(0.15, 0.0), h),
    ];
    for x1 in [
        c(0.15, 0.25),
        c(0.15, 0.37),
        c(0.15, 0.45),
        c(0.15, 0.56),
        c(0.15, 0.69),
        c(0.22, 0.69),
        c(0.28, 0.69),
    ] {
        v.push(PlanePoint::new(x1, h));
    }
    v.push(PlanePoint::new(c(0.45, 0.69), h));
    v
}

/// Point at global parameter λ: segment ⌊λ⌋, local fraction λ − ⌊λ⌋.
pub fn path_point(path: &[PlanePoint], lam: f64) -> PlanePoint {
    let n = path.len() - 1;
    let i = (lam.floor() as usize).min(n - 1);
    path[i].lerp(&path[i + 1], lam - i as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackSample {
    pub param: f64,
    pub branch: CharBranch,
}

impl TrackSample {
    pub fn u(&self) -> [C; 3] {
        self.branch.u()
    }
}

fn check_path(path: &[PlanePoint]) -> Result<()> {
    if path.len() < 2 {
        return Err(Error::Validation("path needs at least two vertices".into()));
    }
    if path.iter().any(|p| !p.is_finite()) {
        return Err(Error::Validation("non-finite path vertex".into()));
    }
    Ok(())
}

/// Labelled u-trajectories: each sample solved from the cubic and matched to
/// its predecessor.
pub fn track_u(path: &[PlanePoint], per_segment: usize) -> Result<Vec<TrackSample>> {
    check_path(path)?;
    track_u_from(char_branch(&path[0])?, path, per_segment)
}

pub fn track_u_from(start: CharBranch, path: &[PlanePoint], per_segment: usize) -> Result<Vec<TrackSample>> {
    check_path(path)?;
    let n = per_segment.max(1);
    let mut b = start;
    let mut out = vec![TrackSample { param: 0.0, branch: b }];
    for seg in 0..path.len() - 1 {
        for k in 1..=n {
            let lam = seg as f64 + k as f64 / n as f64;
            let x = path_point(path, lam);
            if turning_discriminant(&x).1 {
                return Err(Error::TurningPoint(format!("{x}")));
            }
            b = b.continue_to(&x)?;
            out.push(TrackSample { param: lam, branch: b });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    StokesCrossing {
        pair: (usize, usize),
        dominant: usize,
        recessive: usize,
        /// Sign of the change of Im(u_rec − u_dom) along the path.
        direction: i32,
    },
    SegmentCrossing {
        point: usize,
        segment: (usize, usize),
        direction: i32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesEvent {
    pub param: f64,
    pub x: PlanePoint,
    pub kind: EventKind,
    /// 1-based index of the nearest path vertex by parameter.
    pub near_vertex: usize,
    pub u: [C; 3],
}

fn orientation(u: &[C; 3]) -> f64 {
    ((u[1] - u[0]) * (u[2] - u[0]).conj()).im
}

/// Bisect a sign change of `f` on [a, b]; `ba` is the branch at a.
fn bisect<F: Fn(&[C; 3]) -> f64>(
    path: &[PlanePoint],
    mut a: f64,
    mut b: f64,
    mut ba: CharBranch,
    f: F,
) -> Result<(f64, CharBranch)> {
    let fa = f(&ba.u());
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let bm = ba.continue_to(&path_point(path, m))?;
        if f(&bm.u()) * fa > 0.0 {
            a = m;
            ba = bm;
        } else {
            b = m;
        }
    }
    let m = 0.5 * (a + b);
    Ok((m, ba.continue_to(&path_point(path, m))?))
}

pub fn detect_events(path: &[PlanePoint], per_segment: usize) -> Result<Vec<StokesEvent>> {
    Ok(detect_events_with_branches(char_branch(&path[0])?, path, per_segment)?
        .into_iter()
        .map(|(e, _)| e)
        .collect())
}

/// Events in path order together with the labelled branch at each.
pub fn detect_events_with_branches(
    start: CharBranch,
    path: &[PlanePoint],
    per_segment: usize,
) -> Result<Vec<(StokesEvent, CharBranch)>> {
    let samples = track_u_from(start, path, per_segment)?;
    let mut out = Vec::new();
    let near = |lam: f64| (lam.round() as usize).min(path.len() - 1) + 1;
    for w in samples.windows(2) {
        let (sa, sb) = (&w[0], &w[1]);
        let (ua, ub) = (sa.u(), sb.u());
        let ia = indicator_from(&ua);
        let ib = indicator_from(&ub);
        let mut found: Vec<(StokesEvent, CharBranch)> = Vec::new();
        for (pi, &(j, k)) in PAIRS.iter().enumerate() {
            if ia[pi] * ib[pi] >= 0.0 {
                continue;
            }
            let f = move |u: &[C; 3]| (u[j - 1] - u[k - 1]).im;
            let (lam, br) = bisect(path, sa.param, sb.param, sa.branch, f)?;
            let u = br.u();
            let re = (u[j - 1] - u[k - 1]).re;
            if re.abs() <= 1e-9 * (1.0 + u[j - 1].norm()) {
                return Err(Error::Dominance(format!("pair ({j},{k}) at parameter {lam:.10}")));
            }
            let (dom, rec) = if re < 0.0 { (j, k) } else { (k, j) };
            let before = (ua[rec - 1] - ua[dom - 1]).im;
            let after = (ub[rec - 1] - ub[dom - 1]).im;
            let direction = if after > before { 1 } else { -1 };
            found.push((
                StokesEvent {
                    param: lam,
                    x: br.x,
                    kind: EventKind::StokesCrossing {
                        pair: (j, k),
                        dominant: dom,
                        recessive: rec,
                        direction,
                    },
                    near_vertex: near(lam),
                    u,
                },
                br,
            ));
        }
        let (oa, ob) = (orientation(&ua), orientation(&ub));
        if oa * ob < 0.0 {
            let (lam, br) = bisect(path, sa.param, sb.param, sa.branch, orientation)?;
            let u = br.u();
            for m in 1..=3 {
                let (j, k) = match m {
                    1 => (2, 3),
                    2 => (1, 3),
                    _ => (1, 2),
                };
                let d = u[k - 1] - u[j - 1];
                let t = ((u[m - 1] - u[j - 1]) * d.conj()).re / d.norm_sqr();
                if t > 0.0 && t < 1.0 {
                    found.push((
                        StokesEvent {
                            param: lam,
                            x: br.x,
                            kind: EventKind::SegmentCrossing {
                                point: m,
                                segment: (j, k),
                                direction: if ob > oa { 1 } else { -1 },
                            },
                            near_vertex: near(lam),
                            u,
                        },
                        br,
                    ));
                }
            }
        }
        found.sort_by(|a, b| a.0.param.partial_cmp(&b.0.param).unwrap());
        out.extend(found);
    }
    Ok(out)
}

/// 3×3 integer matrix C with Ψ^{before} = C Ψ^{after}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionMatrix {
    pub entries: [[i64; 3]; 3],
}

impl ConnectionMatrix {
    pub fn identity() -> Self {
        let mut e = [[0; 3]; 3];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1;
        }
        ConnectionMatrix { entries: e }
    }

    /// Ψ_dom ← Ψ_dom + coef·Ψ_rec, labels 1-based.
    pub fn transvection(dom: usize, rec: usize, coef: i64) -> Self {
        let mut m = Self::identity();
        m.entries[dom - 1][rec - 1] += coef;
        m
    }

    pub fn det(&self) -> i64 {
        let e = &self.entries;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }

    /// Identity or identity plus one off-diagonal entry.
    pub fn is_elementary(&self) -> bool {
        let mut off = 0;
        for i in 0..3 {
            for j in 0..3 {
                let v = self.entries[i][j];
                if i == j && v != 1 {
                    return false;
                }
                if i != j && v != 0 {
                    off += 1;
                }
            }
        }
        off <= 1
    }

    pub fn mul(&self, o: &ConnectionMatrix) -> ConnectionMatrix {
        let mut e = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = (0..3).map(|k| self.entries[i][k] * o.entries[k][j]).sum();
            }
        }
        ConnectionMatrix { entries: e }
    }

    /// Inverse of an elementary matrix.
    pub fn elementary_inverse(&self) -> ConnectionMatrix {
        let mut e = self.entries;
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i != j {
                    *v = -*v;
                }
            }
        }
        ConnectionMatrix { entries: e }
    }
}

impl fmt::Display for ConnectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for i in 0..3 {
            for j in 0..3 {
                let v = self.entries[i][j];
                if i != j && v != 0 {
                    let sign = if v < 0 { "-" } else { "+" };
                    let mag = if v.abs() == 1 { String::new() } else { format!("{} ", v.abs()) };
                    write!(f, "Psi{0}^before = Psi{0}^after {sign} {mag}Psi{1}^after", i + 1, j + 1)?;
                    any = true;
                }
            }
        }
        if !any {
            write!(f, "identity")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Δ of the continuation along the segment u_dom u_rec.
    Plain,
    /// The segment was crossed an odd number of times by the third u.
    Tilde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStep {
    pub event: StokesEvent,
    pub formula: Formula,
    /// Δ_{u_rec}ψ_dom / ψ_rec at the crossing, ψ normalised by √D continued along the path.
    pub jump: C,
    /// Transvection from the discontinuity formula sign (−1)^dom, identity under the tilde formula.
    pub matrix: ConnectionMatrix,
    /// Transvection from the measured jump and the crossing direction.
    pub measured_matrix: ConnectionMatrix,
    /// Jump within 1e-3 of an integer, and zero whenever the tilde formula applies.
    pub consistent: bool,
}

/// Δ_{u_rec}ψ_{dom,B}/ψ_{rec,B} at a Stokes crossing: ψ_dom is continued along
/// the segment to u_rec and the jump is f(above) − f(below) across the ray
/// from u_rec pointing away from u_dom.
pub fn crossing_jump(b: &CharBranch, dom: usize, rec: usize, table: &WkbSeriesTable) -> Result<C> {
    let x = b.x;
    let u = b.u();
    let mut sep = f64::INFINITY;
    for i in 0..3 {
        for j in 0..i {
            sep = sep.min((u[i] - u[j]).norm());
        }
    }
    let r = 0.05 * sep;
    let (ud, ur) = (u[dom - 1], u[rec - 1]);
    let e = (ur - ud) / (ur - ud).norm();
    let tab_d = borel_coeffs_from(b, dom, table)?;
    let tab_r = borel_coeffs_from(b, rec, table)?;
    let p0 = BorelPoint::xy(&x, ud + e * r);
    let germ = identify_germ(&p0, b.zeta[dom - 1], tab_d.eval_principal(p0.y), 1e-6)?;
    let p1 = BorelPoint::xy(&x, ur - e * r);
    let z = continue_z(germ.z, &[p0, p1], None)?;
    let th = e.arg();
    let arc = |a1: f64| -> Vec<BorelPoint> {
        let n = 64;
        (0..=n)
            .map(|k| {
                let a = std::f64::consts::PI + (a1 - std::f64::consts::PI) * k as f64 / n as f64;
                BorelPoint::xy(&x, ur + C::from_polar(r, th + a))
            })
            .collect()
    };
    let za = continue_z(z, &arc(0.0), None)?;
    let zb = continue_z(z, &arc(2.0 * std::f64::consts::PI), None)?;
    let pe = BorelPoint::xy(&x, ur + e * r);
    let jump = germ.moved(za).value(&pe) - germ.moved(zb).value(&pe);
    Ok(jump / tab_r.eval_principal(pe.y))
}

pub fn connection_walk(path: &[PlanePoint], table: &WkbSeriesTable, per_segment: usize) -> Result<Vec<WalkStep>> {
    check_path(path)?;
    connection_walk_from(char_branch(&path[0])?, path, table, per_segment)
}

pub fn connection_walk_from(
    start: CharBranch,
    path: &[PlanePoint],
    table: &WkbSeriesTable,
    per_segment: usize,
) -> Result<Vec<WalkStep>> {
    let events = detect_events_with_branches(start, path, per_segment)?;
    let mut parity: HashMap<(usize, usize), bool> = HashMap::new();
    let mut out = Vec::new();
    for (ev, br) in events {
        match ev.kind {
            EventKind::SegmentCrossing { segment, .. } => {
                *parity.entry(segment).or_insert(false) ^= true;
            }
            EventKind::StokesCrossing {
                pair,
                dominant,
                recessive,
                direction,
            } => {
                let tilde = *parity.get(&pair).unwrap_or(&false);
                let m = crossing_jump(&br, dominant, recessive, table)?;
                let n = m.re.round();
                let integral = (m - c(n, 0.0)).norm() < 1e-3;
                let coef = direction as i64 * n as i64;
                let matrix = if tilde {
                    ConnectionMatrix::identity()
                } else {
                    ConnectionMatrix::transvection(dominant, recessive, if dominant % 2 == 0 { 1 } else { -1 })
                };
                out.push(WalkStep {
                    event: ev,
                    formula: if tilde { Formula::Tilde } else { Formula::Plain },
                    jump: m,
                    matrix,
                    measured_matrix: ConnectionMatrix::transvection(dominant, recessive, coef),
                    consistent: integral && (!tilde || n == 0.0),
                });
            }
        }
    }
    Ok(out)
}

/// One marching-squares segment.
pub type Segment = [C; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterSection {
    pub x2: C,
    /// Re x₁ min, max, Im x₁ min, max.
    pub window: [f64; 4],
    pub resolution: usize,
    /// Row-major node signs of the three indicators (0 where unresolved).
    pub signs: Vec<[i8; 3]>,
    /// Zero-crossing polylines per indicator pair index.
    pub polylines: Vec<(usize, Vec<C>)>,
    /// Im F = 0 polylines from the sextic.
    pub sextic_polylines: Vec<Vec<C>>,
    pub turning_points: Vec<C>,
    /// Fraction of flagged cells on which both constructions agree within one cell.
    pub agreement: f64,
}

impl RasterSection {
    pub fn node(&self, i: usize, j: usize) -> C {
        let [a, b, cc, d] = self.window;
        let n = (self.resolution - 1) as f64;
        c(a + (b - a) * i as f64 / n, cc + (d - cc) * j as f64 / n)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,x1_re,x1_im,sign12,sign13,sign23\n");
        for j in 0..self.resolution {
            for i in 0..self.resolution {
                let x = self.node(i, j);
                let g = self.signs[j * self.resolution + i];
                s.push_str(&format!("{i},{j},{},{},{},{},{}\n", x.re, x.im, g[0], g[1], g[2]));
            }
        }
        s
    }
}

#[derive(Clone, Copy)]
struct Node {
    zeta: [C; 3],
    u: [C; 3],
}

/// Roots of the sextic in F² at a point.
fn sextic_squares(x1: C, x2: C) -> Option<[C; 3]> {
    static CELL: std::sync::OnceLock<Vec<crate::algebra::MultiPoly>> = std::sync::OnceLock::new();
    let cs = CELL.get_or_init(|| stokes_sextic().coeffs_in(2));
    let at = [x1, x2, C::new(0.0, 0.0)];
    let w: Vec<C> = (0..=3).map(|k| cs[2 * k].eval_complex(&at)).collect();
    let p = UniPolyC::new(w).ok()?;
    if p.degree() != 3 {
        return None;
    }
    let r = root_values(&p, 1e-10).ok()?;
    Some([r[0], r[1], r[2]])
}

fn marching(v: [f64; 4], p: [C; 4]) -> Vec<Segment> {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
    let mut pts = Vec::new();
    for &(a, b) in &edges {
        if (v[a] < 0.0) != (v[b] < 0.0) {
            let t = v[a] / (v[a] - v[b]);
            pts.push(p[a] + (p[b] - p[a]) * t);
        }
    }
    match pts.len() {
        2 => vec![[pts[0], pts[1]]],
        4 => {
            let center = v.iter().sum::<f64>() / 4.0;
            if (center < 0.0) == (v[0] < 0.0) {
                vec![[pts[0], pts[3]], [pts[1], pts[2]]]
            } else {
                vec![[pts[0], pts[1]], [pts[2], pts[3]]]
            }
        }
        _ => vec![],
    }
}

fn chain(segs: Vec<Segment>, scale: f64) -> Vec<Vec<C>> {
    let key = |z: C| ((z.re / scale).round() as i64, (z.im / scale).round() as i64);
    let mut used = vec![false; segs.len()];
    let mut by_end: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        by_end.entry(key(s[0])).or_default().push(i);
        by_end.entry(key(s[1])).or_default().push(i);
    }
    let mut out = Vec::new();
    for i in 0..segs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut line: std::collections::VecDeque<C> = segs[i].iter().copied().collect();
        for forward in [true, false] {
            loop {
                let end = if forward { *line.back().unwrap() } else { *line.front().unwrap() };
                let next = by_end
                    .get(&key(end))
                    .and_then(|v| v.iter().copied().find(|&k| !used[k]));
                let Some(k) = next else { break };
                used[k] = true;
                let s = segs[k];
                let other = if key(s[0]) == key(end) { s[1] } else { s[0] };
                if forward {
                    line.push_back(other);
                } else {
                    line.push_front(other);
                }
            }
        }
        out.push(line.into_iter().collect());
    }
    out
}

/// Stokes-set section at fixed x₂ over a window of x₁.
pub fn raster_section(x2: C, window: [f64; 4], resolution: usize) -> Result<RasterSection> {
    if resolution < 16 {
        return Err(Error::Validation("resolution must be at least 16".into()));
    }
    if !(window[1] > window[0] && window[3] > window[2]) {
        return Err(Error::Validation("window must be min,max,min,max with min < max".into()));
    }
    let n = resolution;
    let node_x = |i: usize, j: usize| {
        c(
            window[0] + (window[1] - window[0]) * i as f64 / (n - 1) as f64,
            window[2] + (window[3] - window[2]) * j as f64 / (n - 1) as f64,
        )
    };
    let rows: Vec<Vec<Option<Node>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut row = Vec::with_capacity(n);
            let mut cur: Option<CharBranch> = None;
            for i in 0..n {
                let x = PlanePoint::new(node_x(i, j), x2);
                if turning_discriminant(&x).1 {
                    row.push(None);
                    cur = None;
                    continue;
                }
                let next = match cur {
                    Some(b) => b.continue_to(&x).or_else(|_| char_branch(&x)),
                    None => char_branch(&x),
                };
                cur = next.ok();
                row.push(cur.map(|b| Node { zeta: b.zeta, u: b.u() }));
            }
            row
        })
        .collect();
    let mut signs = Vec::with_capacity(n * n);
    for row in &rows {
        for nd in row {
            signs.push(match nd {
                Some(nd) => indicator_from(&nd.u).map(|v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 }),
                None => [0; 3],
            });
        }
    }
    let squares: Vec<Option<[C; 3]>> = (0..n * n)
        .into_par_iter()
        .map(|idx| sextic_squares(node_x(idx % n, idx / n), x2))
        .collect();

    let mut useg: Vec<Vec<Segment>> = vec![Vec::new(); 3];
    let mut fseg: Vec<Segment> = Vec::new();
    let mut uflag = vec![false; (n - 1) * (n - 1)];
    let mut fflag = vec![false; (n - 1) * (n - 1)];
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let pos = corners.map(|(a, b)| node_x(a, b));
            let nodes: Vec<Option<Node>> = corners.iter().map(|&(a, b)| rows[b][a]).collect();
            if nodes.iter().all(|v| v.is_some()) {
                let base = nodes[0].unwrap();
                let mut us = [base.u; 4];
                let mut ok = true;
                for q in 1..4 {
                    let nd = nodes[q].unwrap();
                    match nearest_match(&base.zeta, &nd.zeta, 1.0) {
                        Some(idx) => us[q] = [nd.u[idx[0]], nd.u[idx[1]], nd.u[idx[2]]],
                        None => ok = false,
                    }
                }
                if ok {
                    for (pi, &(a, b)) in PAIRS.iter().enumerate() {
                        let v = us.map(|u| (u[a - 1] - u[b - 1]).im);
                        let s = marching(v, pos);
                        if !s.is_empty() {
                            uflag[j * (n - 1) + i] = true;
                        }
                        useg[pi].extend(s);
                    }
                }
            }
            let sq: Vec<Option<[C; 3]>> = corners.iter().map(|&(a, b)| squares[b * n + a]).collect();
            if sq.iter().all(|v| v.is_some()) {
                let base = sq[0].unwrap();
                let mut ws = [base; 4];
                let mut ok = true;
                for q in 1..4 {
                    let w = sq[q].unwrap();
                    match nearest_match(&base, &w, 1.0) {
                        Some(idx) => ws[q] = [w[idx[0]], w[idx[1]], w[idx[2]]],
                        None => ok = false,
                    }
                }
                if ok {
                    for r in 0..3 {
                        let f = ws.map(|w| w[r].sqrt());
                        if f.iter().all(|v| v.re > v.im.abs()) {
                            let s = marching(f.map(|v| v.im), pos);
                            if !s.is_empty() {
                                fflag[j * (n - 1) + i] = true;
                            }
                            fseg.extend(s);
                        }
                    }
                }
            }
        }
    }
    let cell = ((window[1] - window[0]) / (n - 1) as f64).max((window[3] - window[2]) / (n - 1) as f64);
    let mut turning_points = Vec::new();
    let r = (-8.0 * x2 * x2 * x2 / 27.0).sqrt();
    for tp in [r, -r] {
        if !turning_points.iter().any(|q: &C| (q - tp).norm() < 1e-14) {
            turning_points.push(tp);
        }
    }
    let near_t = |i: usize, j: usize| {
        let ctr = (node_x(i, j) + node_x(i + 1, j + 1)) * 0.5;
        turning_points.iter().any(|tp| (ctr - tp).norm() < 3.0 * cell)
    };
    let dilated = |flags: &Vec<bool>, i: usize, j: usize| {
        let m = n - 1;
        for dj in -1i64..=1 {
            for di in -1i64..=1 {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a >= 0 && b >= 0 && (a as usize) < m && (b as usize) < m && flags[b as usize * m + a as usize] {
                    return true;
                }
            }
        }
        false
    };
    let (mut total, mut agree) = (0usize, 0usize);
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            if near_t(i, j) {
                continue;
            }
            let (a, b) = (uflag[j * (n - 1) + i], fflag[j * (n - 1) + i]);
            if a {
                total += 1;
                agree += dilated(&fflag, i, j) as usize;
            }
            if b {
                total += 1;
                agree += dilated(&uflag, i, j) as usize;
            }
        }
    }
    let scale = cell * 1e-6;
    let mut polylines = Vec::new();
    for (pi, s) in useg.into_iter().enumerate() {
        for line in chain(s, scale) {
            polylines.push((pi, line));
        }
    }
    Ok(RasterSection {
        x2,
        window,
        resolution: n,
        signs,
        polylines,
        sextic_polylines: chain(fseg, scale),
        turning_points,
        agreement: if total == 0 { 1.0 } else { agree as f64 / total as f64 },
    })
}
