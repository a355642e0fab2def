//! Bracketed root finding for monotone scalar functions.

use crate::error::{ProlateError, Result};

/// Brent's method on a sign-changing bracket `[a, b]`. Stops when the
/// bracket is narrower than `xtol` (absolute plus a few ulps relative) or the
/// residual vanishes.
pub fn brent(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(ProlateError::BracketFailure(format!(
            "f({a}) = {fa:e} and f({b}) = {fb:e} share a sign"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Ok(b)
}

/// Finds `x >= lo` with `f(x) = target` for increasing, unbounded `f`,
/// doubling the upper end of `[lo, lo + 1]` until it brackets the target.
pub fn invert_increasing(
    mut f: impl FnMut(f64) -> f64,
    target: f64,
    lo: f64,
    xtol: f64,
) -> Result<f64> {
    let mut hi = lo + 1.0;
    let mut steps = 0;
    while f(hi) < target {
        hi = lo + 2.0 * (hi - lo);
        steps += 1;
        if steps > 1100 || !hi.is_finite() {
            return Err(ProlateError::BracketFailure(format!(
                "no upper bracket found for target {target}"
            )));
        }
    }
    brent(|x| f(x) - target, lo, hi, xtol)
}
