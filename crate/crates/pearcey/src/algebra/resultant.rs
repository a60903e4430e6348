//! Sylvester resultants and discriminants by fraction-free elimination.

use super::multipoly::{int, MultiPoly};
use crate::error::{Error, Result};

/// Sylvester matrix of `p` and `q` in variable `i`; rows of `p` first.
pub fn sylvester_matrix(p: &MultiPoly, q: &MultiPoly, i: usize) -> Vec<Vec<MultiPoly>> {
    let pc = p.coeffs_in(i);
    let qc = q.coeffs_in(i);
    let m = pc.len() - 1;
    let n = qc.len() - 1;
    let size = m + n;
    let zero = MultiPoly::zero(p.vars());
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in pc.iter().rev().enumerate() {
            row[r + k] = c.clone();
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in qc.iter().rev().enumerate() {
            row[r + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Bareiss elimination with row pivoting.
pub fn bareiss_det(mut a: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = a.len();
    if n == 0 {
        panic!("empty matrix");
    }
    let vars = a[0][0].vars().to_vec();
    let mut prev = MultiPoly::one(&vars);
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    negate = !negate;
                }
                None => return MultiPoly::zero(&vars),
            }
        }
        if k + 1 == n {
            break;
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let num = &(&a[r][c] * &a[k][k]) - &(&a[r][k] * &a[k][c]);
                a[r][c] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            a[r][k] = MultiPoly::zero(&vars);
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Res_var(p, q), returned over the remaining variables.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<MultiPoly> {
    if p.vars() != q.vars() {
        return Err(Error::Validation("resultant operands use different variable lists".into()));
    }
    let i = p
        .index_of(var)
        .ok_or_else(|| Error::MissingVariable(var.to_string()))?;
    let m = p.degree_in(i).unwrap_or(0);
    let n = q.degree_in(i).unwrap_or(0);
    if m == 0 && n == 0 {
        return Err(Error::MissingVariable(var.to_string()));
    }
    if p.is_zero() || q.is_zero() {
        return Ok(MultiPoly::zero(p.vars()).drop_var(i));
    }
    // Res(p, c) = c^deg p and Res(c, q) = c^deg q.
    let r = if n == 0 {
        q.pow(m)
    } else if m == 0 {
        p.pow(n)
    } else {
        bareiss_det(sylvester_matrix(p, q, i))
    };
    Ok(r.drop_var(i))
}

/// (−1)^{n(n−1)/2} Res(p, p′) / lc(p).
pub fn discriminant(p: &MultiPoly, var: &str) -> Result<MultiPoly> {
    let i = p
        .index_of(var)
        .ok_or_else(|| Error::MissingVariable(var.to_string()))?;
    let n = p.degree_in(i).unwrap_or(0);
    if n < 2 {
        return Err(Error::Validation(format!("degree in {var} must be at least 2")));
    }
    let dp = p.deriv(i);
    let res = resultant(p, &dp, var)?;
    let lc = p.coeffs_in(i).pop().expect("nonzero degree").drop_var(i);
    let q = res
        .div_exact(&lc)
        .ok_or_else(|| Error::Numeric("leading coefficient does not divide the resultant".into()))?;
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -int(1) } else { int(1) };
    Ok(q.scale(&sign))
}
