//! Plain SVG output for Stokes sections and u-trajectory panels.

use std::fmt::Write;

use crate::geometry::C;
use crate::stokes::RasterSection;

const PAIR_COLORS: [&str; 3] = ["#b03a2e", "#1f618d", "#1e8449"];
const LABEL_COLORS: [&str; 3] = ["#b03a2e", "#1f618d", "#7d3c98"];

struct Frame {
    re: (f64, f64),
    im: (f64, f64),
    size: f64,
    ox: f64,
    oy: f64,
}

impl Frame {
    fn map(&self, z: C) -> (f64, f64) {
        let x = self.ox + (z.re - self.re.0) / (self.re.1 - self.re.0) * self.size;
        let y = self.oy + (self.im.1 - z.im) / (self.im.1 - self.im.0) * self.size;
        (x, y)
    }

    fn polyline(&self, pts: &[C], stroke: &str, extra: &str) -> String {
        let mut d = String::new();
        for (i, &z) in pts.iter().enumerate() {
            let (x, y) = self.map(z);
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "" } else { " " }, x, y);
        }
        format!("<polyline points=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.2\"{extra}/>\n")
    }

    fn axes(&self) -> String {
        let mut s = format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444\"/>\n",
            self.ox, self.oy, self.size, self.size
        );
        if self.re.0 < 0.0 && self.re.1 > 0.0 {
            let (x, _) = self.map(C::new(0.0, 0.0));
            let _ = writeln!(
                s,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ccc\"/>",
                self.oy,
                self.oy + self.size
            );
        }
        if self.im.0 < 0.0 && self.im.1 > 0.0 {
            let (_, y) = self.map(C::new(0.0, 0.0));
            let _ = writeln!(
                s,
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ccc\"/>",
                self.ox,
                self.ox + self.size
            );
        }
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace("--", "- -")
}

/// Zero-crossing polylines of the three indicators over the sextic overlay,
/// with turning points marked T.
pub fn section_svg(r: &RasterSection, header: &str) -> String {
    let f = Frame {
        re: (r.window[0], r.window[1]),
        im: (r.window[2], r.window[3]),
        size: 480.0,
        ox: 20.0,
        oy: 30.0,
    };
    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"520\" height=\"560\">");
    let _ = writeln!(s, "<!-- {} -->", escape(header));
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"20\" font-size=\"13\">Stokes section x2 = {:.4}{:+.4}i</text>",
        r.x2.re, r.x2.im
    );
    s.push_str(&f.axes());
    for line in &r.sextic_polylines {
        s.push_str(&f.polyline(line, "#999", " stroke-dasharray=\"3,3\""));
    }
    for (pi, line) in &r.polylines {
        s.push_str(&f.polyline(line, PAIR_COLORS[*pi], ""));
    }
    for tp in &r.turning_points {
        let (x, y) = f.map(*tp);
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"#000\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">T</text>",
            x + 4.0,
            y - 4.0
        );
    }
    for (pi, name) in ["Im(u1-u2)=0", "Im(u1-u3)=0", "Im(u2-u3)=0"].iter().enumerate() {
        let y = 530.0 + 0.0 * pi as f64;
        let x = 20.0 + 160.0 * pi as f64;
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{}\" stroke-width=\"2\"/><text x=\"{}\" y=\"{}\" font-size=\"11\">{name}</text>",
            x + 20.0,
            PAIR_COLORS[pi],
            x + 24.0,
            y + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One panel of the trajectory figure.
pub struct Panel {
    pub title: String,
    pub tracks: [Vec<C>; 3],
}

/// Panels laid out three per row, each with u₁, u₂, u₃ drawn and labelled
/// at their end points.
pub fn trajectories_svg(panels: &[Panel], header: &str) -> String {
    let cell = 240.0;
    let cols = 3usize;
    let rows = panels.len().div_ceil(cols).max(1);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">",
        cell * cols as f64,
        (cell + 20.0) * rows as f64
    );
    let _ = writeln!(s, "<!-- {} -->", escape(header));
    for (k, p) in panels.iter().enumerate() {
        let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in p.tracks.iter().flatten() {
            lo = C::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = C::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let half = 0.55 * (hi.re - lo.re).max(hi.im - lo.im).max(1e-6);
        let mid = (lo + hi) * 0.5;
        let f = Frame {
            re: (mid.re - half, mid.re + half),
            im: (mid.im - half, mid.im + half),
            size: cell - 30.0,
            ox: (k % cols) as f64 * cell + 15.0,
            oy: (k / cols) as f64 * (cell + 20.0) + 25.0,
        };
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>",
            f.ox,
            f.oy - 8.0,
            escape(&p.title)
        );
        s.push_str(&f.axes());
        for (l, tr) in p.tracks.iter().enumerate() {
            if tr.is_empty() {
                continue;
            }
            s.push_str(&f.polyline(tr, LABEL_COLORS[l], ""));
            let (x0, y0) = f.map(tr[0]);
            let (x1, y1) = f.map(*tr.last().unwrap());
            let _ = writeln!(
                s,
                "<circle cx=\"{x0:.2}\" cy=\"{y0:.2}\" r=\"2\" fill=\"{c}\"/><circle cx=\"{x1:.2}\" cy=\"{y1:.2}\" r=\"3\" fill=\"none\" stroke=\"{c}\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"{c}\">u{}</text>",
                x1 + 4.0,
                y1 - 4.0,
                l + 1,
                c = LABEL_COLORS[l]
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
