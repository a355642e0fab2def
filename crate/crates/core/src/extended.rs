//! Double-double re-evaluation of a solved mode and of the integral identity
//! `λ_n ψ_n(x) = ∫ ψ_n(t) e^{icxt} dt`.
//!
//! In plain `f64` the integral carries an absolute error near `1e-16`
//! (Gauss weights, coefficient rounding), so its relative accuracy degrades
//! like `1e-16 / |λ_n|`. Refining `χ_n` and the coefficients against the
//! double-double matrix and integrating in double-double removes that floor.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use twofloat::TwoFloat;

use crate::error::{ProlateError, Result};
use crate::legendre::gauss_legendre;
use crate::logscale::LogScaledReal;
use crate::spectrum::{Parity, ProlateMode};

type Dd = TwoFloat;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

fn to_f64(x: Dd) -> f64 {
    x.hi() + x.lo()
}

// The crate's own quotient and square root are only good to about `1e-16`;
// these add correction steps using its exact products.
fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    Dd::new_add(q1, q2) + q3
}

fn sqrt(a: Dd) -> Dd {
    let s = a.hi().sqrt();
    if s == 0.0 {
        return dd(0.0);
    }
    let r = a - Dd::new_mul(s, s);
    Dd::from(s) + div(r, dd(2.0 * s))
}

/// One parity block in double-double.
struct DdBand {
    diag: Vec<Dd>,
    offdiag: Vec<Dd>,
}

fn dd_band(c: f64, parity: Parity, dim: usize) -> DdBand {
    let c2 = Dd::new_mul(c, c);
    let p = parity.offset();
    let diag = (0..dim)
        .map(|j| {
            let k = (p + 2 * j) as f64;
            let num = 2.0 * k * (k + 1.0) - 1.0;
            let den = (2.0 * k + 3.0) * (2.0 * k - 1.0);
            dd(k * (k + 1.0)) + div(c2 * dd(num), dd(den))
        })
        .collect();
    let offdiag = (0..dim.saturating_sub(1))
        .map(|j| {
            let k = (p + 2 * j) as f64;
            let root = sqrt(dd((2.0 * k + 1.0) * (2.0 * k + 5.0)));
            div(c2 * dd((k + 2.0) * (k + 1.0)), dd(2.0 * k + 3.0) * root)
        })
        .collect();
    DdBand { diag, offdiag }
}

impl DdBand {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, v: &[Dd]) -> Vec<Dd> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * v[j];
                if j > 0 {
                    s += self.offdiag[j - 1] * v[j - 1];
                }
                if j + 1 < n {
                    s += self.offdiag[j] * v[j + 1];
                }
                s
            })
            .collect()
    }

    fn rayleigh(&self, v: &[Dd]) -> Dd {
        let av = self.apply(v);
        div(dot(v, &av), dot(v, v))
    }

    /// Solves `(A - shift I) x = b` in place by tridiagonal LU with partial
    /// pivoting.
    fn shifted_solve(&self, shift: Dd, b: &mut [Dd]) {
        let n = self.dim();
        let mut d: Vec<Dd> = self.diag.iter().map(|&x| x - shift).collect();
        let mut dl = self.offdiag.clone();
        let mut du = self.offdiag.clone();
        let mut du2 = vec![dd(0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = dd(1e-300);
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == dd(0.0) {
                    d[i] = tiny;
                }
                let fact = div(dl[i], d[i]);
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = div(d[i], dl[i]);
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -(fact * du[i + 1]);
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == dd(0.0) {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] = div(b[n - 1], d[n - 1]);
        if n > 1 {
            b[n - 2] = div(b[n - 2] - du[n - 2] * b[n - 1], d[n - 2]);
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = div(b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2], d[i]);
        }
    }
}

fn dot(a: &[Dd], b: &[Dd]) -> Dd {
    a.iter().zip(b).fold(dd(0.0), |s, (x, y)| s + *x * *y)
}

fn normalize(v: &mut [Dd]) {
    let norm = sqrt(dot(v, v));
    v.iter_mut().for_each(|x| *x = div(*x, norm));
}

/// `χ_n` and the coefficient vector refined in double-double.
pub(crate) struct RefinedMode {
    pub parity: Parity,
    #[cfg_attr(not(test), allow(dead_code))]
    pub chi: Dd,
    pub coeffs: Vec<Dd>,
}

pub(crate) fn refine(mode: &ProlateMode) -> RefinedMode {
    let band = dd_band(mode.c, mode.parity, mode.dim);
    let mut v: Vec<Dd> = (0..mode.dim)
        .map(|j| dd(mode.coeffs.get(j).copied().unwrap_or(0.0)))
        .collect();
    for _ in 0..2 {
        let shift = band.rayleigh(&v);
        band.shifted_solve(shift, &mut v);
        normalize(&mut v);
    }
    let chi = band.rayleigh(&v);
    // keep the sign of the double-precision vector
    let (imax, _) = mode
        .coeffs
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
    if (to_f64(v[imax]) > 0.0) != (mode.coeffs[imax] > 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let peak = v.iter().map(|x| to_f64(*x).abs()).fold(0.0, f64::max);
    let keep = v
        .iter()
        .rposition(|x| to_f64(*x).abs() > 1e-40 * peak)
        .map_or(1, |i| i + 1);
    v.truncate(keep);
    RefinedMode {
        parity: mode.parity,
        chi,
        coeffs: v,
    }
}

/// Upward-recurrence factors `(2d+1)/(d+1)` and `d/(d+1)`, plus the
/// normalizations `√(d+1/2)`, for degrees below `len`.
struct Recurrence {
    a: Vec<Dd>,
    b: Vec<Dd>,
    norm: Vec<Dd>,
}

impl Recurrence {
    fn new(len: usize) -> Self {
        let a = (0..len)
            .map(|d| div(dd(2.0 * d as f64 + 1.0), dd(d as f64 + 1.0)))
            .collect();
        let b = (0..len)
            .map(|d| div(dd(d as f64), dd(d as f64 + 1.0)))
            .collect();
        let norm = (0..len).map(|d| sqrt(dd(d as f64 + 0.5))).collect();
        Recurrence { a, b, norm }
    }

    /// `Σ a_j P̄_{p+2j}(t)`.
    fn psi(&self, coeffs: &[Dd], parity: Parity, t: Dd) -> Dd {
        let p = parity.offset();
        let mut prev = dd(0.0);
        let mut cur = dd(1.0);
        let mut deg = 0usize;
        let mut sum = dd(0.0);
        for (j, a) in coeffs.iter().enumerate() {
            let target = p + 2 * j;
            while deg < target {
                let next = self.a[deg] * t * cur - self.b[deg] * prev;
                prev = cur;
                cur = next;
                deg += 1;
            }
            sum += *a * cur * self.norm[target];
        }
        sum
    }

    /// `(P_m(x), P_m'(x))`.
    fn legendre_with_derivative(&self, m: usize, x: Dd) -> (Dd, Dd) {
        let mut prev = dd(1.0);
        let mut cur = x;
        for d in 1..m {
            let next = self.a[d] * x * cur - self.b[d] * prev;
            prev = cur;
            cur = next;
        }
        let dp = div(dd(m as f64) * (x * cur - prev), x * x - dd(1.0));
        (cur, dp)
    }
}

/// Non-negative nodes of the `m`-point Gauss rule with their weights,
/// polished by Newton steps in double-double. A node at zero, if present,
/// comes first.
fn gauss_half_rule(m: usize, rec: &Recurrence) -> Result<Vec<(Dd, Dd)>> {
    let base = gauss_legendre(m)?;
    let mut out = Vec::with_capacity(m / 2 + 1);
    for &t in base.nodes().iter().skip(m / 2) {
        let mut x = dd(t);
        if t != 0.0 {
            for _ in 0..2 {
                let (p, dp) = rec.legendre_with_derivative(m, x);
                x -= div(p, dp);
            }
        }
        let (_, dp) = rec.legendre_with_derivative(m, x);
        let w = div(dd(2.0), (dd(1.0) - x * x) * dp * dp);
        out.push((x, w));
    }
    Ok(out)
}

type HalfRule = Arc<Vec<(Dd, Dd)>>;

/// Rules are reused across modes of one band limit.
fn cached_half_rule(m: usize, rec: &Recurrence) -> Result<HalfRule> {
    static RULES: OnceLock<Mutex<HashMap<usize, HalfRule>>> = OnceLock::new();
    let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = rules.lock().expect("rule cache poisoned").get(&m) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_half_rule(m, rec)?);
    rules
        .lock()
        .expect("rule cache poisoned")
        .insert(m, rule.clone());
    Ok(rule)
}

/// `∫ ψ_n(t) e^{icx*t} dt / ψ_n(x*)` with every step in double-double, using
/// the `m`-point Gauss rule and the given evaluation point `x*`.
pub(crate) fn lambda_integral(mode: &ProlateMode, m: usize, x_star: f64) -> Result<LogScaledReal> {
    let refined = refine(mode);
    let degree = refined.parity.offset() + 2 * refined.coeffs.len();
    let rec = Recurrence::new(degree.max(m) + 1);
    let psi_star = rec.psi(&refined.coeffs, refined.parity, dd(x_star));
    if to_f64(psi_star).abs() < 0.1 {
        return Err(ProlateError::OracleUnreliable(to_f64(psi_star).abs()));
    }
    let w = Dd::new_mul(mode.c, x_star);
    let mut integral = dd(0.0);
    for &(t, wt) in cached_half_rule(m, &rec)?.iter() {
        let arg = w * t;
        let kernel = match refined.parity {
            Parity::Even => arg.cos(),
            Parity::Odd => arg.sin(),
        };
        let term = wt * rec.psi(&refined.coeffs, refined.parity, t) * kernel;
        integral += if t == dd(0.0) { term } else { dd(2.0) * term };
    }
    Ok(LogScaledReal::from_f64(to_f64(div(integral, psi_star))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ProlateContext;

    fn refined_chi(mode: &ProlateMode) -> f64 {
        to_f64(refine(mode).chi)
    }

    #[test]
    fn gauss_half_rule_integrates_polynomials() {
        let m = 21;
        let rule = gauss_half_rule(m, &Recurrence::new(m + 1)).unwrap();
        // ∫ t^{2j} dt = 2/(2j+1), exact up to degree 2m-1
        for j in 0..m {
            let mut s = dd(0.0);
            for (t, w) in &rule {
                let mut pw = dd(1.0);
                for _ in 0..j {
                    pw = pw * *t * *t;
                }
                let term = *w * pw;
                s += if *t == dd(0.0) { term } else { dd(2.0) * term };
            }
            let exact = div(dd(2.0), dd(2.0 * j as f64 + 1.0));
            assert!(to_f64((s - exact).abs()) < 1e-28, "j={j}");
        }
    }

    #[test]
    fn refinement_keeps_double_solution() {
        let ctx = ProlateContext::new(30.0).unwrap();
        for n in [0, 7, 20, 31] {
            let mode = ctx.mode(n).unwrap();
            let r = refine(&mode);
            assert!((refined_chi(&mode) - mode.chi).abs() < 1e-13 * mode.chi);
            for (a, b) in mode.coeffs.iter().zip(&r.coeffs) {
                assert!((a - to_f64(*b)).abs() < 1e-13);
            }
            let band = dd_band(mode.c, mode.parity, r.coeffs.len());
            let res = band.apply(&r.coeffs);
            let worst = res
                .iter()
                .zip(&r.coeffs)
                .map(|(av, v)| to_f64((*av - r.chi * *v).abs()))
                .fold(0.0, f64::max);
            assert!(worst < 1e-25 * mode.chi, "n={n}: {worst:e}");
        }
    }
}

