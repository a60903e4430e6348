//! Command-line front end.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::borel::{
    self, branches_at_origin_z, dictionary, discontinuity, laplace_borel_sum, loop_around, monodromy, p_of_t,
    pearcey_quadrature, psi_borel_eval_unvalidated, track, verify_annihilation, AnnihilationTarget, BorelPoint, Chart,
    DiscKind, QuadParams,
};
use crate::error::{Error, Result};
use crate::geometry::{
    c, char_branch, singular_locus_cubic, stokes_sextic, turning_discriminant, PlanePoint, C, MATCH_RATIO,
};
use crate::stokes::{self, reference_polyline, raster_section, EventKind, BISECTION_TOL};
use crate::svg::{self, Panel};
use crate::wkb::{borel_coeffs, WkbSeriesTable, DEFAULT_ORDER};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "pearcey", version, about = "Exact WKB analysis of the Pearcey system", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// WKB series S_j, primitives and f-coefficients as JSON.
    Series,
    /// Characteristic roots, critical values, √D and derived polynomials at a point.
    Geometry,
    /// Borel-plane data: coefficients, ψ values, monodromy, dictionary, discontinuities, traces.
    Borel,
    /// Stokes set section at fixed x2 over an x1 window.
    StokesSection,
    /// Labelled trajectories of u1, u2, u3 along a path.
    TrackU,
    /// Stokes and segment crossings along a path.
    Events,
    /// Connection matrices along a path.
    Connect,
    /// Annihilation and discontinuity checks at a point.
    Verify,
    /// Pearcey integral along a valley pair, optionally against the Laplace sum.
    Quadrature,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorelMode {
    Coeffs,
    Psi,
    Monodromy,
    Dictionary,
    Discontinuity,
    Trace,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Opts {
    /// key=value file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for output files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated output formats.
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Truncation order N of the WKB series.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub x1: String,
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub x2: String,
    #[arg(long, global = true, default_value = "0.3+0.2i", allow_hyphen_values = true)]
    pub y: String,
    /// Chart parameter t (x1 = 1, x2 = t).
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    #[arg(long, global = true, default_value_t = 1)]
    pub ell: usize,
    #[arg(long, global = true, default_value_t = 2)]
    pub k: usize,
    #[arg(long, global = true)]
    pub tilde: bool,
    #[arg(long, global = true, value_enum, default_value_t = BorelMode::Coeffs)]
    pub mode: BorelMode,
    /// Trace start and end in s (st chart).
    #[arg(long, global = true, default_value = "0.1", allow_hyphen_values = true)]
    pub from_s: String,
    #[arg(long, global = true, default_value = "0.3+0.3i", allow_hyphen_values = true)]
    pub to_s: String,
    /// Re x1 min, max, Im x1 min, max.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,1,-1,1")]
    pub window: Vec<f64>,
    #[arg(long, global = true, default_value_t = 128)]
    pub res: usize,
    /// `paper-polyline` or vertices `x1,x2;x1,x2;...`.
    #[arg(long, global = true, default_value = "paper-polyline")]
    pub path: String,
    /// Samples per path segment.
    #[arg(long, global = true, default_value_t = 40)]
    pub samples: usize,
    #[arg(long, global = true, default_value = "10", allow_hyphen_values = true)]
    pub eta: String,
    /// Valley indices 0..3 for the quadrature contour.
    #[arg(long, global = true, default_value_t = 0)]
    pub from: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub to: usize,
    /// Also compute the Laplace sum for --ell.
    #[arg(long, global = true)]
    pub laplace: bool,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Pass threshold for residual checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
}

/// Parse `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<C> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    let bad = || Error::Validation(format!("cannot parse complex number `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|v| c(v, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let imag = |txt: &str| -> Result<f64> {
        match txt {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => txt.parse::<f64>().map_err(|_| bad()),
        }
    };
    let z = match split {
        Some(i) => c(body[..i].parse::<f64>().map_err(|_| bad())?, imag(&body[i..])?),
        None => c(0.0, imag(body)?),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

pub fn parse_path(s: &str) -> Result<Vec<PlanePoint>> {
    if s == "paper-polyline" {
        return Ok(reference_polyline());
    }
    let mut v = Vec::new();
    for vert in s.split(';').filter(|p| !p.trim().is_empty()) {
        let parts: Vec<&str> = vert.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Validation(format!("path vertex `{vert}` must be x1,x2")));
        }
        v.push(PlanePoint::new(parse_complex(parts[0])?, parse_complex(parts[1])?));
    }
    if v.len() < 2 {
        return Err(Error::Validation("path needs at least two vertices".into()));
    }
    Ok(v)
}

/// Floats become shortest round-trip decimal strings, so complex numbers
/// appear as [re, im] string pairs.
pub fn stringify_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => Value::String(format!("{}", n.as_f64().unwrap())),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, stringify_floats(v))).collect()),
        other => other,
    }
}

fn cx(z: C) -> Value {
    json!([z.re, z.im])
}

fn pt(x: &PlanePoint) -> Value {
    json!({"x1": cx(x.x1), "x2": cx(x.x2)})
}

struct Output {
    name: &'static str,
    json: Option<Value>,
    csv: Option<String>,
    svg: Option<String>,
}

impl Output {
    fn json(name: &'static str, v: Value) -> Self {
        Output {
            name,
            json: Some(v),
            csv: None,
            svg: None,
        }
    }
}

fn header(cli: &Cli) -> Value {
    let mut h = Sha256::new();
    h.update(format!("{:?}|{:?}", cli.command, Opts { config: None, out: None, ..cli.opts.clone() }));
    let hash: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "program": "pearcey",
        "version": VERSION,
        "config_hash": hash,
        "tolerances": {
            "bisection": BISECTION_TOL,
            "match_ratio": MATCH_RATIO,
            "quadrature_rel_tol": cli.opts.rel_tol,
            "check_tol": cli.opts.tol,
        },
    })
}

fn header_line(h: &Value) -> String {
    format!(
        "pearcey {} config={} tolerances={}",
        VERSION,
        h["config_hash"].as_str().unwrap_or(""),
        h["tolerances"]
    )
}

fn plane_point(o: &Opts) -> Result<PlanePoint> {
    Ok(PlanePoint::new(parse_complex(&o.x1)?, parse_complex(&o.x2)?))
}

fn check_ell(ell: usize) -> Result<()> {
    if (1..=3).contains(&ell) {
        Ok(())
    } else {
        Err(Error::Validation("--ell and --k must be 1, 2 or 3".into()))
    }
}

fn cmd_series(o: &Opts) -> Result<Output> {
    if o.order > 24 {
        return Err(Error::Validation("--order above 24 is not supported".into()));
    }
    let t = WkbSeriesTable::full(o.order);
    Ok(Output::json("series", t.to_json()))
}

fn cmd_geometry(o: &Opts) -> Result<Output> {
    let x = plane_point(o)?;
    let (disc, on_t) = turning_discriminant(&x);
    let mut v = json!({
        "point": pt(&x),
        "turning_discriminant": cx(disc),
        "on_turning_locus": on_t,
        "singular_locus_cubic": singular_locus_cubic().to_json(),
        "stokes_sextic": stokes_sextic().to_json(),
        "quartic": borel::quartic_xy_poly().to_json(),
    });
    if !on_t {
        let b = char_branch(&x)?;
        v["zeta"] = Value::Array(b.zeta.iter().map(|&z| cx(z)).collect());
        v["u"] = Value::Array(b.u().iter().map(|&z| cx(z)).collect());
        v["sqrt_d"] = Value::Array(b.sqrt_d.iter().map(|&z| cx(z)).collect());
        v["stokes_indicator"] = json!(stokes::indicator_from(&b.u()));
    }
    Ok(Output::json("geometry", v))
}

fn cmd_borel(o: &Opts) -> Result<Output> {
    check_ell(o.ell)?;
    let t = parse_complex(&o.t)?;
    match o.mode {
        BorelMode::Coeffs => {
            let x = plane_point(o)?;
            let table = WkbSeriesTable::full(o.order);
            let tab = borel_coeffs(&x, o.ell, &table)?;
            Ok(Output::json(
                "borel-coeffs",
                json!({
                    "point": pt(&x),
                    "ell": o.ell,
                    "u": cx(tab.base),
                    "exponents": (0..tab.coeffs.len()).map(|j| format!("{}/2", 2 * j as i64 - 1)).collect::<Vec<_>>(),
                    "coeffs": tab.coeffs.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
                }),
            ))
        }
        BorelMode::Psi => {
            let x = plane_point(o)?;
            let y = parse_complex(&o.y)?;
            let table = WkbSeriesTable::full(o.order);
            let v = psi_borel_eval_unvalidated(o.ell, &x, y)?;
            let series = borel_coeffs(&x, o.ell, &table)?.eval_principal(y);
            Ok(Output::json(
                "borel-psi",
                json!({
                    "point": pt(&x), "y": cx(y), "ell": o.ell,
                    "closed_form": cx(v.value), "s": cx(v.s), "t": cx(v.t),
                    "validated": v.validated, "series_principal": cx(series),
                }),
            ))
        }
        BorelMode::Monodromy => {
            let p = p_of_t(o.ell, t)?;
            let lp = loop_around(p, 0.5 * p.norm(), t, 256);
            let perm = monodromy(&lp)?;
            Ok(Output::json(
                "borel-monodromy",
                json!({"ell": o.ell, "t": cx(t), "center": cx(p), "radius": 0.5 * p.norm(), "permutation": perm.to_string()}),
            ))
        }
        BorelMode::Dictionary => {
            let p = p_of_t(o.ell, t)?;
            let s = p * 0.9;
            let d = dictionary(o.ell, s, t)?;
            Ok(Output::json(
                "borel-dictionary",
                json!({"ell": o.ell, "t": cx(t), "s": cx(s),
                       "origin_to_local": d.iter().enumerate().map(|(j, k)| json!({"origin": j + 1, "local": k})).collect::<Vec<_>>()}),
            ))
        }
        BorelMode::Discontinuity => {
            check_ell(o.k)?;
            let x = plane_point(o)?;
            let table = WkbSeriesTable::full(o.order);
            let kind = if o.tilde { DiscKind::Tilde } else { DiscKind::Plain };
            let r = discontinuity(kind, o.ell, o.k, &x, &table)?;
            let expected = if o.tilde {
                c(0.0, 0.0)
            } else {
                c(if o.ell % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            };
            Ok(Output::json(
                "borel-discontinuity",
                json!({
                    "point": pt(&x), "kind": format!("{kind:?}").to_lowercase(), "ell": r.ell, "k": r.k, "j": r.j,
                    "delta": cx(r.delta), "reference": cx(r.reference), "ratio": cx(r.ratio),
                    "formula_ratio": cx(expected), "radius": r.radius, "hypothesis_ok": r.hypothesis_ok,
                }),
            ))
        }
        BorelMode::Trace => {
            let (a, b) = (parse_complex(&o.from_s)?, parse_complex(&o.to_s)?);
            let n = o.samples.max(2);
            let path: Vec<BorelPoint> = (0..=n)
                .map(|k| BorelPoint::st(a + (b - a) * (k as f64 / n as f64), t))
                .collect();
            let tr = track(Chart::St, branches_at_origin_z(a, t)?, &path)?;
            Ok(Output {
                name: "borel-trace",
                json: Some(json!({"chart": "st", "t": cx(t), "min_separation": tr.min_separation, "steps": tr.steps.len()})),
                csv: Some(tr.to_csv()),
                svg: None,
            })
        }
    }
}

fn cmd_section(o: &Opts) -> Result<Output> {
    if o.window.len() != 4 {
        return Err(Error::Validation("--window takes four numbers".into()));
    }
    let x2 = parse_complex(&o.x2)?;
    let r = raster_section(x2, [o.window[0], o.window[1], o.window[2], o.window[3]], o.res)?;
    let lines = |v: &[C]| v.iter().map(|&z| cx(z)).collect::<Vec<_>>();
    let j = json!({
        "x2": cx(x2), "window": o.window, "resolution": r.resolution,
        "polylines": r.polylines.iter().map(|(p, l)| json!({"pair": stokes::PAIRS[*p], "points": lines(l)})).collect::<Vec<_>>(),
        "sextic_polylines": r.sextic_polylines.iter().map(|l| lines(l)).collect::<Vec<_>>(),
        "turning_points": lines(&r.turning_points),
        "agreement": r.agreement,
    });
    Ok(Output {
        name: "stokes-section",
        json: Some(j),
        csv: Some(r.to_csv()),
        svg: Some(svg::section_svg(&r, "")),
    })
}

fn cmd_track(o: &Opts) -> Result<Output> {
    let path = parse_path(&o.path)?;
    let samples = stokes::track_u(&path, o.samples)?;
    let mut csv = String::from("param,u1_re,u1_im,u2_re,u2_im,u3_re,u3_im\n");
    for s in &samples {
        let u = s.u();
        csv.push_str(&format!(
            "{:.10},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            s.param, u[0].re, u[0].im, u[1].re, u[1].im, u[2].re, u[2].im
        ));
    }
    let per = o.samples.max(1);
    let panels: Vec<Panel> = (0..path.len() - 1)
        .map(|seg| {
            let slice = &samples[seg * per..=(seg + 1) * per];
            Panel {
                title: format!("x({}) to x({})", seg + 1, seg + 2),
                tracks: [0, 1, 2].map(|l| slice.iter().map(|s| s.u()[l]).collect()),
            }
        })
        .collect();
    let j = json!({
        "path": path.iter().map(pt).collect::<Vec<_>>(),
        "samples": samples.iter().map(|s| json!({"param": s.param, "u": s.u().iter().map(|&z| cx(z)).collect::<Vec<_>>()})).collect::<Vec<_>>(),
    });
    Ok(Output {
        name: "track-u",
        json: Some(j),
        csv: Some(csv),
        svg: Some(svg::trajectories_svg(&panels, "")),
    })
}

fn event_json(e: &stokes::StokesEvent) -> Value {
    let kind = match e.kind {
        EventKind::StokesCrossing {
            pair,
            dominant,
            recessive,
            direction,
        } => json!({"type": "stokes_crossing", "pair": [pair.0, pair.1], "dominant": dominant, "recessive": recessive, "direction": direction}),
        EventKind::SegmentCrossing { point, segment, direction } => {
            json!({"type": "segment_crossing", "point": point, "segment": [segment.0, segment.1], "direction": direction})
        }
    };
    json!({
        "param": e.param, "x": pt(&e.x), "near_vertex": e.near_vertex, "event": kind,
        "u": e.u.iter().map(|&z| cx(z)).collect::<Vec<_>>(),
    })
}

fn cmd_events(o: &Opts) -> Result<Output> {
    let path = parse_path(&o.path)?;
    let ev = stokes::detect_events(&path, o.samples)?;
    Ok(Output::json("events", json!({"events": ev.iter().map(event_json).collect::<Vec<_>>()})))
}

fn cmd_connect(o: &Opts) -> Result<Output> {
    let path = parse_path(&o.path)?;
    let table = WkbSeriesTable::full(o.order);
    let steps = stokes::connection_walk(&path, &table, o.samples)?;
    let v: Vec<Value> = steps
        .iter()
        .map(|s| {
            json!({
                "crossing": event_json(&s.event),
                "formula": format!("{:?}", s.formula).to_lowercase(),
                "matrix": s.matrix.entries,
                "system": s.matrix.to_string(),
                "measured_jump": cx(s.jump),
                "measured_matrix": s.measured_matrix.entries,
                "consistent": s.consistent,
            })
        })
        .collect();
    Ok(Output::json("connect", json!({"crossings": v.len(), "steps": v})))
}

fn cmd_verify(o: &Opts) -> Result<(Output, bool)> {
    let x = plane_point(o)?;
    let y = parse_complex(&o.y)?;
    let mut ann = Vec::new();
    let mut ok = true;
    for op in 1..=4 {
        for sheet in 0..4 {
            let r = verify_annihilation(op, &x, y, AnnihilationTarget::Sheet(sheet))?;
            ok &= r < o.tol;
            ann.push(json!({"operator": op, "sheet": sheet + 1, "residual": r}));
        }
    }
    let table = WkbSeriesTable::full(o.order);
    let mut disc = Vec::new();
    for l in 1..=3 {
        for k in 1..=3 {
            if l == k {
                continue;
            }
            for kind in [DiscKind::Plain, DiscKind::Tilde] {
                match discontinuity(kind, l, k, &x, &table) {
                    Ok(r) => disc.push(json!({
                        "kind": format!("{kind:?}").to_lowercase(), "ell": l, "k": k,
                        "ratio": cx(r.ratio), "delta": cx(r.delta), "hypothesis_ok": r.hypothesis_ok,
                    })),
                    Err(e) => disc.push(json!({"kind": format!("{kind:?}").to_lowercase(), "ell": l, "k": k, "error": e.to_string()})),
                }
            }
        }
    }
    Ok((
        Output::json(
            "verify",
            json!({"point": pt(&x), "y": cx(y), "annihilation_ok": ok, "annihilation": ann, "discontinuity": disc}),
        ),
        ok,
    ))
}

fn cmd_quadrature(o: &Opts) -> Result<Output> {
    let x = plane_point(o)?;
    let eta = parse_complex(&o.eta)?;
    if o.from > 3 || o.to > 3 || o.from == o.to {
        return Err(Error::Validation("--from and --to are distinct valleys in 0..3".into()));
    }
    let params = QuadParams {
        rel_tol: o.rel_tol,
        ..QuadParams::default()
    };
    let v = pearcey_quadrature(&x, eta, o.from, o.to, &params)?;
    let mut j = json!({"point": pt(&x), "eta": cx(eta), "from": o.from, "to": o.to, "value": cx(v)});
    if o.laplace {
        check_ell(o.ell)?;
        if eta.im != 0.0 {
            return Err(Error::Validation("the Laplace sum needs real positive eta".into()));
        }
        let table = WkbSeriesTable::full(o.order);
        let l = laplace_borel_sum(o.ell, &x, eta.re, &table, &params)?;
        let q = pearcey_quadrature(&x, eta, l.valleys.0, l.valleys.1, &params)?;
        j["laplace"] = json!({
            "ell": o.ell, "value": cx(l.value), "valleys": [l.valleys.0, l.valleys.1],
            "truncation": l.truncation, "over_kappa": cx(l.value / borel::kappa()),
            "quadrature_on_valleys": cx(q),
        });
    }
    Ok(Output::json("quadrature", j))
}

fn write_outputs(cli: &Cli, out: Output) -> Result<()> {
    let h = header(cli);
    let line = header_line(&h);
    let formats = if cli.opts.format.is_empty() { vec![Format::Json] } else { cli.opts.format.clone() };
    let mut files: Vec<(String, String)> = Vec::new();
    for f in formats {
        match f {
            Format::Json => {
                let j = out
                    .json
                    .as_ref()
                    .ok_or_else(|| Error::Validation(format!("{} has no json output", out.name)))?;
                let body = stringify_floats(json!({"header": h, "data": j}));
                files.push((format!("{}.json", out.name), serde_json::to_string_pretty(&body).unwrap() + "\n"));
            }
            Format::Csv => {
                let c = out
                    .csv
                    .as_ref()
                    .ok_or_else(|| Error::Validation(format!("{} has no csv output", out.name)))?;
                files.push((format!("{}.csv", out.name), format!("# {line}\n{c}")));
            }
            Format::Svg => {
                let s = out
                    .svg
                    .as_ref()
                    .ok_or_else(|| Error::Validation(format!("{} has no svg output", out.name)))?;
                let s = s.replacen("<!--  -->", &format!("<!-- {line} -->"), 1);
                files.push((format!("{}.svg", out.name), s));
            }
        }
    }
    match &cli.opts.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::Validation(format!("{}: {e}", dir.display())))?;
            for (name, body) in files {
                let p = dir.join(name);
                fs::write(&p, body).map_err(|e| Error::Validation(format!("{}: {e}", p.display())))?;
            }
        }
        None => {
            for (_, body) in files {
                print!("{body}");
            }
        }
    }
    Ok(())
}

fn config_args(argv: &[String]) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(Vec::new()) };
    let text = fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", n + 1))?;
        let (k, v) = (k.trim(), v.trim());
        match v {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => out.push(format!("--{k}={v}")),
        }
    }
    Ok(out)
}

fn apply_threads() {
    if let Ok(v) = std::env::var("PEARCEY_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let extra = match config_args(&argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut full = Vec::with_capacity(argv.len() + extra.len());
    full.extend(argv.first().cloned());
    full.extend(extra);
    full.extend(argv.into_iter().skip(1));
    let cli = match Cli::try_parse_from(full) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    apply_threads();
    let mut verify_ok = true;
    let res = match cli.command {
        Command::Series => cmd_series(&cli.opts),
        Command::Geometry => cmd_geometry(&cli.opts),
        Command::Borel => cmd_borel(&cli.opts),
        Command::StokesSection => cmd_section(&cli.opts),
        Command::TrackU => cmd_track(&cli.opts),
        Command::Events => cmd_events(&cli.opts),
        Command::Connect => cmd_connect(&cli.opts),
        Command::Verify => cmd_verify(&cli.opts).map(|(o, ok)| {
            verify_ok = ok;
            o
        }),
        Command::Quadrature => cmd_quadrature(&cli.opts),
    }
    .and_then(|o| write_outputs(&cli, o));
    match res {
        Ok(()) if verify_ok => 0,
        Ok(()) => 3,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}
