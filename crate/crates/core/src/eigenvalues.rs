//! Eigenvalues `λ_n` of the band-limited Fourier operator and `μ_n` of the
//! sinc-kernel operator.
//!
//! `λ_n = iⁿ|λ_n|`. Every route here returns the real number `λ_n / i^(n mod 2)`,
//! whose sign is `(-1)^⌊n/2⌋`.
//!
//! * `lambda_direct`: even `n`, from `∫ψ_n = λ_n ψ_n(0)`.
//! * `lambda_odd`: odd `n`, from differentiating the same identity at 0.
//! * `lambda_quadrature`: the integral identity at the extremum of `ψ_n`.
//! * `lambda_log`: coefficient profile built from the three-term recurrence
//!   in log scale, for eigenvalues whose leading coefficient is lost in the
//!   eigenvector's rounding noise.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{ProlateError, Result};
use crate::legendre::{
    gauss_legendre, normalized_even_at_zero, normalized_odd_derivative_at_zero, QuadratureRule,
};
use crate::logscale::LogScaledReal;
use crate::spectrum::{build_matrix, psi_value, MatrixBand, Parity, ProlateContext, ProlateMode};

/// `|λ_n|`, its phase `n mod 4` (`λ_n = i^phase |λ_n|`) and `μ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueRecord {
    pub n: usize,
    pub lambda_abs: LogScaledReal,
    pub phase: u8,
    pub mu: LogScaledReal,
}

/// Relative size of the leading coefficient below which the eigenvector no
/// longer resolves it.
fn resolution_floor() -> f64 {
    1e3 * f64::EPSILON
}

/// Leading coefficients below this relative size are routed to
/// `lambda_log` by `lambda`.
const DIRECT_ROUTE_FLOOR: f64 = 1e-6;

fn leading_ratio(mode: &ProlateMode) -> (f64, f64) {
    let big = mode.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    (mode.coeffs[0], big)
}

fn check_resolution(mode: &ProlateMode) -> Result<f64> {
    let (lead, big) = leading_ratio(mode);
    let floor = resolution_floor() * big;
    if lead.abs() < floor {
        return Err(ProlateError::ResolutionLoss { coeff: lead, floor });
    }
    Ok(lead)
}

/// `λ_n = √2 a_0 / ψ_n(0)` for even `n`.
pub fn lambda_direct(mode: &ProlateMode) -> Result<LogScaledReal> {
    let psi0 = match (mode.parity, mode.psi_at_zero) {
        (Parity::Even, Some(p)) => p,
        _ => {
            return Err(ProlateError::domain(format!(
                "direct route needs even n (got {})",
                mode.n
            )))
        }
    };
    let lead = check_resolution(mode)?;
    if psi0 == 0.0 {
        return Err(ProlateError::domain("psi_n(0) vanishes"));
    }
    Ok(LogScaledReal::from_f64(2f64.sqrt() * lead / psi0))
}

/// `λ_n / i = c √(2/3) b_0 / ψ_n'(0)` for odd `n`.
pub fn lambda_odd(mode: &ProlateMode) -> Result<LogScaledReal> {
    let dpsi0 = match (mode.parity, mode.dpsi_at_zero) {
        (Parity::Odd, Some(p)) => p,
        _ => {
            return Err(ProlateError::domain(format!(
                "odd route needs odd n (got {})",
                mode.n
            )))
        }
    };
    let lead = check_resolution(mode)?;
    if dpsi0 == 0.0 {
        return Err(ProlateError::domain("psi_n'(0) vanishes"));
    }
    Ok(LogScaledReal::from_f64(
        mode.c * (2.0f64 / 3.0).sqrt() * lead / dpsi0,
    ))
}

/// Direct or odd route by parity.
pub fn lambda_from_mode(mode: &ProlateMode) -> Result<LogScaledReal> {
    match mode.parity {
        Parity::Even => lambda_direct(mode),
        Parity::Odd => lambda_odd(mode),
    }
}

/// Gauss rule of `⌈c⌉ + n + 30` points.
pub fn default_quadrature_rule(mode: &ProlateMode) -> Result<QuadratureRule> {
    gauss_legendre(mode.c.ceil() as usize + mode.n + 30)
}

/// Grid maximum `(x*, ψ_n(x*))` of `|ψ_n|` over 257 points.
fn evaluation_point(mode: &ProlateMode) -> Result<(f64, f64)> {
    let mut best = (0.0, 0.0f64);
    for i in 0..=256 {
        let x = -1.0 + i as f64 / 128.0;
        let v = psi_value(mode, x)?;
        if v.abs() > best.1.abs() {
            best = (x, v);
        }
    }
    if best.1.abs() < 0.1 {
        return Err(ProlateError::OracleUnreliable(best.1.abs()));
    }
    Ok(best)
}

/// `∫ ψ_n(t) e^{icx*t} dt / ψ_n(x*)` at the grid maximum `x*` of `|ψ_n|`.
///
/// The absolute error is near `1e-16`; see [`lambda_quadrature_extended`]
/// for small `|λ_n|`.
pub fn lambda_quadrature(mode: &ProlateMode, rule: &QuadratureRule) -> Result<LogScaledReal> {
    let (x_star, psi_star) = evaluation_point(mode)?;
    let w = mode.c * x_star;
    let kernel = |t: f64| match mode.parity {
        Parity::Even => (w * t).cos(),
        Parity::Odd => (w * t).sin(),
    };
    let mut integral = 0.0;
    for (&t, &wt) in rule.nodes().iter().zip(rule.weights()) {
        integral += wt * psi_value(mode, t)? * kernel(t);
    }
    Ok(LogScaledReal::from_f64(integral / psi_star))
}

/// The same identity with the default rule size, evaluated in double-double
/// after refining `χ_n` and the coefficients. Accurate well below
/// `|λ_n| = 1e-10`.
pub fn lambda_quadrature_extended(mode: &ProlateMode) -> Result<LogScaledReal> {
    let (x_star, _) = evaluation_point(mode)?;
    // orders rounded up to a multiple of 64 share cached rules
    let m = (mode.c.ceil() as usize + mode.n + 30).div_ceil(64) * 64;
    crate::extended::lambda_integral(mode, m, x_star)
}

/// Log-domain route: rebuilds the coefficient profile from `χ_n` alone.
pub fn lambda_log(ctx: &ProlateContext, n: usize) -> Result<LogScaledReal> {
    let entry = ctx.chi_entry(n)?;
    let band = build_matrix(ctx.c(), Parity::of(n), entry.dim)?;
    lambda_from_profile(&band, entry.chi, ctx.c())
}

/// Signs and natural logs of an unnormalized eigenvector of `band` for the
/// eigenvalue `chi`, with the first entry positive.
///
/// Forward ratios are run up to where the decaying region starts, backward
/// ratios down from the truncation end, and the two are matched at the
/// forward profile's maximum.
pub fn log_profile(band: &MatrixBand, chi: f64) -> Result<Vec<(i8, f64)>> {
    let dim = band.dim();
    let off = &band.offdiag;
    let d: Vec<f64> = band.diag.iter().map(|x| x - chi).collect();
    let decay_start = (0..dim)
        .find(|&j| {
            let left = if j > 0 { off[j - 1] } else { 0.0 };
            let right = if j + 1 < dim { off[j] } else { 0.0 };
            d[j] > left + right
        })
        .unwrap_or(dim - 1);
    let last_forward = decay_start.min(dim - 2);

    let mut forward = Vec::with_capacity(last_forward + 1);
    for j in 0..=last_forward {
        let mut num = d[j];
        if j > 0 {
            num += off[j - 1] / forward[j - 1];
        }
        let mut r = -num / off[j];
        if r == 0.0 {
            r = f64::MIN_POSITIVE;
        }
        forward.push(r);
    }

    let mut profile = Vec::with_capacity(dim);
    profile.push((1i8, 0.0f64));
    for (j, r) in forward.iter().enumerate() {
        let (s, l) = profile[j];
        profile.push((s * sign_of(*r), l + r.abs().ln()));
    }
    let (peak, _) = profile[..=last_forward]
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, (_, l))| {
            if *l > acc.1 {
                (j, *l)
            } else {
                acc
            }
        });

    // backward[j - peak] = x_{j+1} / x_j for j in peak..dim-1
    let mut backward = vec![0.0; dim - 1 - peak];
    let mut u = 0.0;
    for j in (peak..dim - 1).rev() {
        let coupling = if j + 1 < dim - 1 { off[j + 1] * u } else { 0.0 };
        u = -off[j] / (d[j + 1] + coupling);
        backward[j - peak] = u;
    }

    let r_peak = forward[peak];
    let u_peak = backward[0];
    if (r_peak - u_peak).abs() > 1e-3 * 1f64.max(r_peak.abs()).max(u_peak.abs()) {
        return Err(ProlateError::MatchFailure {
            index: peak,
            forward: r_peak,
            backward: u_peak,
        });
    }

    profile.truncate(peak + 1);
    for u in &backward {
        let (s, l) = profile[profile.len() - 1];
        if *u == 0.0 {
            break;
        }
        profile.push((s * sign_of(*u), l + u.abs().ln()));
    }
    Ok(profile)
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn lambda_from_profile(band: &MatrixBand, chi: f64, c: f64) -> Result<LogScaledReal> {
    let profile = log_profile(band, chi)?;
    let top = profile
        .iter()
        .fold(f64::NEG_INFINITY, |m, (_, l)| m.max(*l));
    let weights = match band.parity {
        Parity::Even => normalized_even_at_zero(profile.len()),
        Parity::Odd => normalized_odd_derivative_at_zero(profile.len()),
    };
    let origin: f64 = profile
        .iter()
        .zip(&weights)
        .map(|((s, l), w)| f64::from(*s) * (l - top).exp() * w)
        .sum();
    if origin == 0.0 {
        return Err(ProlateError::domain("series at the origin vanishes"));
    }
    let (s0, l0) = profile[0];
    let prefactor = match band.parity {
        Parity::Even => 0.5 * LN_2,
        Parity::Odd => c.ln() + 0.5 * (2.0f64 / 3.0).ln(),
    };
    let log_abs = prefactor + l0 - top - origin.abs().ln();
    Ok(LogScaledReal::from_parts(s0 * sign_of(origin), log_abs))
}

/// `λ_n / i^(n mod 2)` by the cheapest route that resolves it: the mode's
/// leading coefficient when it is well above rounding noise, the log-domain
/// profile otherwise.
pub fn lambda(ctx: &ProlateContext, n: usize) -> Result<LogScaledReal> {
    let mode = ctx.mode(n)?;
    let (lead, big) = leading_ratio(&mode);
    if lead.abs() >= DIRECT_ROUTE_FLOOR * big {
        lambda_from_mode(&mode)
    } else {
        lambda_log(ctx, n)
    }
}

/// `μ = (c / 2π) |λ|²`.
pub fn mu(c: f64, lambda_abs: LogScaledReal) -> LogScaledReal {
    if lambda_abs.is_zero() {
        return LogScaledReal::ZERO;
    }
    LogScaledReal::from_log((c / (2.0 * PI)).ln() + 2.0 * lambda_abs.log_abs())
}

pub fn eigenvalue_record(ctx: &ProlateContext, n: usize) -> Result<EigenvalueRecord> {
    let lambda_abs = lambda(ctx, n)?.abs();
    Ok(EigenvalueRecord {
        n,
        lambda_abs,
        phase: (n % 4) as u8,
        mu: mu(ctx.c(), lambda_abs),
    })
}

/// Number of `μ_n` strictly above `alpha`.
pub fn count_above(ctx: &ProlateContext, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ProlateError::domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let threshold = alpha.ln();
    let mut n = 0;
    loop {
        let m = mu(ctx.c(), lambda(ctx, n)?.abs());
        if m.log_abs() <= threshold {
            return Ok(n);
        }
        n += 1;
    }
}
