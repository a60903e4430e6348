//! Composite Gauss–Legendre quadrature for complex integrands.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

pub const NODES: usize = 16;

/// Nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CELL.get_or_init(|| gauss_legendre(NODES))
}

/// Node positions of `panels` equal panels on [a, b], in increasing order.
pub fn panel_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let (x, w) = rule();
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * NODES);
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let mut local: Vec<(f64, f64)> = x
            .iter()
            .zip(w)
            .map(|(&xi, &wi)| (mid + 0.5 * h * xi, 0.5 * h * wi))
            .collect();
        local.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        out.extend(local);
    }
    out
}

/// ∫_a^b f with fixed panels.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    panel_nodes(a, b, panels)
        .into_iter()
        .map(|(t, w)| f(t) * w)
        .sum()
}
