//! Explicit upper bounds on `|λ_n|`, the auxiliary functions `f`, `H`, `G`,
//! the tail depth `δ(n)`, the turning index `k₀`, and bounds on `χ_n`.
//!
//! All bounds are returned log-scaled; in the deep tail they underflow `f64`.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::eigenvalues::lambda;
use crate::elliptic::{complete_integrals_with_complement, exponent_term};
use crate::error::{ProlateError, Result};
use crate::logscale::LogScaledReal;
use crate::roots::{brent, invert_increasing};
use crate::spectrum::{Parity, ProlateContext, ProlateMode};

/// `√π cⁿ (n!)² / ((2n)! Γ(n + 3/2))`, an upper bound on `|λ_n|` for every `n`.
pub fn nu(n: usize, c: f64) -> LogScaledReal {
    let nf = n as f64;
    let log = 0.5 * PI.ln() + nf * c.ln() + 2.0 * libm::lgamma(nf + 1.0)
        - libm::lgamma(2.0 * nf + 1.0)
        - libm::lgamma(nf + 1.5);
    LogScaledReal::from_log(log)
}

fn require_above_c2(c: f64, chi: f64) -> Result<()> {
    if !(c > 0.0) || !(chi >= c * c) {
        return Err(ProlateError::domain(format!(
            "bound needs chi >= c^2 (c = {c}, chi = {chi})"
        )));
    }
    Ok(())
}

/// The principal bound `ζ(n, c)`; `psi0 = ψ_n(0)`.
pub fn zeta(c: f64, chi: f64, psi0: f64) -> Result<LogScaledReal> {
    require_above_c2(c, chi)?;
    if psi0 == 0.0 {
        return Err(ProlateError::domain("zeta needs psi_n(0) != 0"));
    }
    let x = chi / (c * c);
    let log = (3.5f64).ln() - psi0.abs().ln() + 4.0 * (4.0 * x - 2.0).ln() - (3.0 * x - 1.0).ln()
        + 0.25 * (chi - c * c).ln()
        - exponent_term(c, chi)?;
    Ok(LogScaledReal::from_log(log))
}

/// `ζ` for a solved even mode.
pub fn zeta_for_mode(mode: &ProlateMode) -> Result<LogScaledReal> {
    match mode.psi_at_zero {
        Some(p) => zeta(mode.c, mode.chi, p),
        None => Err(ProlateError::domain(format!("zeta needs even n (got {})", mode.n))),
    }
}

/// `η(n, c) = 18 (n+1) (π(n+1)/c)⁷ exp(-exponent)`.
pub fn eta(n: usize, c: f64, chi: f64) -> Result<LogScaledReal> {
    require_above_c2(c, chi)?;
    let m = n as f64 + 1.0;
    let log = 18f64.ln() + m.ln() + 7.0 * (PI * m / c).ln() - exponent_term(c, chi)?;
    Ok(LogScaledReal::from_log(log))
}

/// `p₀ = √(2π/c) exp(-exponent)`, an asymptotic estimate rather than a bound.
pub fn p0(c: f64, chi: f64) -> Result<LogScaledReal> {
    require_above_c2(c, chi)?;
    Ok(LogScaledReal::from_log(
        0.5 * (2.0 * PI / c).ln() - exponent_term(c, chi)?,
    ))
}

/// `2c/π + (2/π²) δ log(4eπc/δ)`.
pub fn n_threshold(c: f64, delta: f64) -> f64 {
    2.0 * c / PI + 2.0 / (PI * PI) * delta * (4.0 * E * PI * c / delta).ln()
}

/// Which clauses of the `ξ` hypotheses hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct XiHypotheses {
    pub c_above_22: bool,
    pub delta_in_range: bool,
    pub n_above_threshold: bool,
}

impl XiHypotheses {
    pub fn new(n: usize, c: f64, delta: f64) -> Self {
        let threshold = n_threshold(c, delta);
        XiHypotheses {
            c_above_22: c > 22.0,
            delta_in_range: delta > 3.0 && delta < PI * c / 16.0,
            // δ = δ(n) puts n exactly on the threshold; allow rounding.
            n_above_threshold: n as f64 >= threshold * (1.0 - 1e-12),
        }
    }

    pub fn all(&self) -> bool {
        self.c_above_22 && self.delta_in_range && self.n_above_threshold
    }
}

/// `7056 c exp(-δ(1 - δ/(2πc)))` without checking hypotheses.
pub fn xi_value(c: f64, delta: f64) -> LogScaledReal {
    LogScaledReal::from_log(7056f64.ln() + c.ln() - delta * (1.0 - delta / (2.0 * PI * c)))
}

/// `ξ(n, c)`; fails naming the first clause that does not hold.
pub fn xi(n: usize, c: f64, delta: f64) -> Result<LogScaledReal> {
    let h = XiHypotheses::new(n, c, delta);
    if !h.c_above_22 {
        return Err(ProlateError::HypothesisViolated(format!("c = {c} is not above 22")));
    }
    if !h.delta_in_range {
        return Err(ProlateError::HypothesisViolated(format!(
            "delta = {delta} outside (3, pi c / 16)"
        )));
    }
    if !h.n_above_threshold {
        return Err(ProlateError::HypothesisViolated(format!(
            "n = {n} below 2c/pi + (2/pi^2) delta log(4 e pi c / delta) = {}",
            n_threshold(c, delta)
        )));
    }
    Ok(xi_value(c, delta))
}

/// `1195 c x^¾ (x-1)^¼ (x-½)³ exp(-(π/4)(√x - 1/√x) c)` with `x = χ/c²`.
pub fn lambda_chi_bound(c: f64, chi: f64) -> Result<LogScaledReal> {
    require_above_c2(c, chi)?;
    let x = chi / (c * c);
    let log = 1195f64.ln() + c.ln() + 0.75 * x.ln() + 0.25 * (x - 1.0).ln()
        + 3.0 * (x - 0.5).ln()
        - PI / 4.0 * (x.sqrt() - 1.0 / x.sqrt()) * c;
    Ok(LogScaledReal::from_log(log))
}

/// `f(x) = -1 + ∫₀^{π/2} √(x + cos²θ) dθ = √(1+x) E(1/√(1+x)) - 1`.
pub fn aux_f(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(ProlateError::domain(format!("f needs x >= 0 (got {x})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let root = (1.0 + x).sqrt();
    let ints = complete_integrals_with_complement(1.0 / root, (x / (1.0 + x)).sqrt());
    Ok(root * ints.e - 1.0)
}

/// Inverse of `f` on `[0, ∞)`.
pub fn aux_h(y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(ProlateError::domain(format!("H needs y >= 0 (got {y})")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    invert_increasing(|x| aux_f(x).unwrap_or(f64::NAN), y, 0.0, 1e-15)
}

/// `G(x) = ∫₀^{π/2} sin²θ / √(1 + x cos²θ) dθ = (F(κ) - E(κ)) / (κ² √(1+x))`
/// with `κ² = x / (1 + x)`.
pub fn aux_g(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(ProlateError::domain(format!("G needs x >= 0 (got {x})")));
    }
    let root = (1.0 + x).sqrt();
    let ints = complete_integrals_with_complement((x / (1.0 + x)).sqrt(), 1.0 / root);
    Ok(ints.f_minus_e_over_k2 / root)
}

/// The root `X ∈ (0, 4πc)` of `n = 2c/π + (2/π²) X log(4eπc/X)`.
pub fn delta_of_n(n: f64, c: f64) -> Result<f64> {
    if !(c > 0.0) || !(n > 2.0 * c / PI && n < 10.0 * c / PI) {
        return Err(ProlateError::domain(format!(
            "delta(n) needs 2c/pi < n < 10c/pi (n = {n}, c = {c})"
        )));
    }
    let hi = 4.0 * PI * c;
    brent(|x| n_threshold(c, x) - n, hi * 1e-300, hi, 1e-13 * hi)
}

/// `max{k ≥ 1 : 2k(2k+1) < χ - c²}`, or 0 when no `k` qualifies.
pub fn k0(c: f64, chi: f64) -> usize {
    let gap = chi - c * c;
    if !(gap > 6.0) {
        return 0;
    }
    let mut k = ((gap.sqrt() / 2.0).floor() as usize).max(1);
    while k > 1 && 2.0 * k as f64 * (2.0 * k as f64 + 1.0) >= gap {
        k -= 1;
    }
    while 2.0 * (k + 1) as f64 * (2.0 * (k + 1) as f64 + 1.0) < gap {
        k += 1;
    }
    k
}

/// A bound on `χ_n` and whether its hypotheses hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiBound {
    pub value: f64,
    pub hypothesis: bool,
}

/// `χ_n > c² + (4/π) δ c` when `n > n_threshold(c, δ)` and `0 < δ < 5πc/4`.
pub fn chi_lower(n: usize, c: f64, delta: f64) -> ChiBound {
    ChiBound {
        value: c * c + 4.0 / PI * delta * c,
        hypothesis: delta > 0.0 && delta < 1.25 * PI * c && (n as f64) > n_threshold(c, delta),
    }
}

/// `χ_n < c² + (8/π) δ c` when `2c/π ≤ n ≤ n_threshold(c, δ) - 3` and
/// `3 < δ < 5πc/4`.
pub fn chi_upper(n: usize, c: f64, delta: f64) -> ChiBound {
    let nf = n as f64;
    ChiBound {
        value: c * c + 8.0 / PI * delta * c,
        hypothesis: delta > 3.0
            && delta < 1.25 * PI * c
            && nf >= 2.0 * c / PI
            && nf <= n_threshold(c, delta) - 3.0,
    }
}

/// Bracket on `(χ_n - c²)/c²` from `H`: `(H(nπ/2c - 1), H(nπ/2c - 1 + 3π/2c))`.
pub fn chi_bracket_via_h(n: usize, c: f64) -> Result<(f64, f64)> {
    let s = n as f64 * PI / (2.0 * c) - 1.0;
    if !(s > 0.0) {
        return Err(ProlateError::domain("needs n > 2c/pi"));
    }
    Ok((aux_h(s)?, aux_h(s + 3.0 * PI / (2.0 * c))?))
}

/// `c H(s) G(H(s))` with `s = nπ/2c - 1`, a lower bound on the exponent term.
pub fn exponent_lower_via_hg(n: usize, c: f64) -> Result<f64> {
    let s = n as f64 * PI / (2.0 * c) - 1.0;
    if !(s > 0.0) {
        return Err(ProlateError::domain("needs n > 2c/pi"));
    }
    let h = aux_h(s)?;
    Ok(c * h * aux_g(h)?)
}

/// How `δ` is chosen for `ξ` in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DeltaPolicy {
    /// `δ(n)` clamped into `(3, πc/16)`.
    Clamped,
    /// `δ(n)` as is.
    Raw,
    Fixed(f64),
}

/// Hypothesis flags gathered in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundHypotheses {
    pub even: bool,
    /// `n > 2c/π + √42`, the hypothesis of `ζ`, `η` and the `λ`–`χ` bound.
    pub n_above_sqrt42: bool,
    pub chi_above_c2: bool,
    pub chi_above_c2_plus_6: bool,
    pub chi_above_c2_plus_42: bool,
    pub xi: Option<XiHypotheses>,
}

impl BoundHypotheses {
    pub fn zeta_valid(&self) -> bool {
        self.even && self.n_above_sqrt42
    }

    pub fn xi_valid(&self) -> bool {
        self.xi.is_some_and(|h| h.all())
    }
}

/// Every bound for one `(c, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub c: f64,
    pub chi: f64,
    pub lambda_abs: LogScaledReal,
    pub nu: LogScaledReal,
    pub zeta: Option<LogScaledReal>,
    pub eta: Option<LogScaledReal>,
    pub xi: Option<LogScaledReal>,
    pub p0: Option<LogScaledReal>,
    pub lambda_chi: Option<LogScaledReal>,
    pub delta_n: Option<f64>,
    pub delta_used: Option<f64>,
    pub hypotheses: BoundHypotheses,
}

impl BoundReport {
    /// Bounds whose hypotheses hold but which fall below `|λ_n|`.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let lam = self.lambda_abs;
        if self.nu < lam {
            out.push("nu");
        }
        if self.hypotheses.zeta_valid() {
            if self.zeta.is_some_and(|z| z <= lam) {
                out.push("zeta");
            }
            if self.eta.is_some_and(|e| e <= lam) {
                out.push("eta");
            }
            if self.lambda_chi.is_some_and(|b| b <= lam) {
                out.push("lambda_chi");
            }
        }
        if self.hypotheses.xi_valid() && self.xi.is_some_and(|x| x <= lam) {
            out.push("xi");
        }
        out
    }
}

pub fn bound_report(ctx: &ProlateContext, n: usize, policy: DeltaPolicy) -> Result<BoundReport> {
    let c = ctx.c();
    let mode = ctx.mode(n)?;
    let chi = mode.chi;
    let lambda_abs = lambda(ctx, n)?.abs();
    let above = chi > c * c;
    let even = mode.parity == Parity::Even;
    let zeta_v = if even && above { Some(zeta_for_mode(&mode)?) } else { None };
    let eta_v = if above { Some(eta(n, c, chi)?) } else { None };
    let p0_v = if above { Some(p0(c, chi)?) } else { None };
    let lambda_chi = if above { Some(lambda_chi_bound(c, chi)?) } else { None };
    let delta_n = delta_of_n(n as f64, c).ok();
    let delta_used = match policy {
        DeltaPolicy::Fixed(d) => Some(d),
        DeltaPolicy::Raw => delta_n,
        DeltaPolicy::Clamped => {
            let hi = PI * c / 16.0 - 1e-9;
            let lo = 3.0 + 1e-9;
            delta_n.filter(|_| lo < hi).map(|d| d.clamp(lo, hi))
        }
    };
    let xi_h = delta_used.map(|d| XiHypotheses::new(n, c, d));
    let xi_v = delta_used.map(|d| xi_value(c, d));
    Ok(BoundReport {
        n,
        c,
        chi,
        lambda_abs,
        nu: nu(n, c),
        zeta: zeta_v,
        eta: eta_v,
        xi: xi_v,
        p0: p0_v,
        lambda_chi,
        delta_n,
        delta_used,
        hypotheses: BoundHypotheses {
            even,
            n_above_sqrt42: n as f64 > 2.0 * c / PI + 42f64.sqrt(),
            chi_above_c2: above,
            chi_above_c2_plus_6: chi > c * c + 6.0,
            chi_above_c2_plus_42: chi > c * c + 42.0,
            xi: xi_h,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn nu_values() {
        for c in [0.5, 10.0, 1e4] {
            assert!((nu(0, c).to_f64() - 2.0).abs() < 1e-14);
        }
        // √π c⁴ (4!)² / (8! Γ(11/2)), Γ(11/2) = (945/32) √π
        let direct = 1e4 * 576.0 / (40320.0 * 945.0 / 32.0);
        assert!(((nu(4, 10.0).to_f64() - direct) / direct).abs() < 1e-13);
        for n in 318..338 {
            assert!(nu(n, 500.0).to_f64() >= 0.1, "n={n}");
        }
    }

    #[test]
    fn f_closed_form_matches_integral() {
        for x in [1e-6, 1e-3, 0.1, 1.0, 4.0, 30.0] {
            let direct = -1.0 + integrate(|t| (x + t.cos().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15);
            assert!((aux_f(x).unwrap() - direct).abs() < 1e-12, "x={x}");
        }
        assert_eq!(aux_f(0.0).unwrap(), 0.0);
        assert_eq!(aux_h(0.0).unwrap(), 0.0);
        assert!(aux_f(-1.0).is_err());
    }

    #[test]
    fn g_closed_form_matches_integral() {
        assert!((aux_g(0.0).unwrap() - PI / 4.0).abs() < 1e-15);
        for x in [1e-8, 0.01, 0.5, 2.0, 5.0, 100.0] {
            let direct = integrate(
                |t| t.sin().powi(2) / (1.0 + x * t.cos().powi(2)).sqrt(),
                0.0,
                FRAC_PI_2,
                1e-15,
            );
            assert!((aux_g(x).unwrap() - direct).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn h_inverts_f() {
        for x in [1e-5, 0.2, 1.0, 3.3, 12.0] {
            let y = aux_f(x).unwrap();
            assert!((aux_h(y).unwrap() - x).abs() < 1e-12);
        }
    }

    #[test]
    fn h_and_g_inequalities() {
        for i in 1..=200 {
            let s = 5.0 * i as f64 / 200.0;
            let h = aux_h(s / 4.0 * (16.0 * E / s).ln()).unwrap();
            assert!(s <= h && h <= s + s * s / 5.0, "s={s}");
            let g = aux_g(s).unwrap();
            assert!(PI / 4.0 * (1.0 - s / 8.0) <= g && g <= PI / 4.0);
            let hg = h * aux_g(h).unwrap();
            assert!(PI / 4.0 * s * (1.0 - s / 8.0) <= hg && hg <= PI / 4.0 * s);
        }
    }

    #[test]
    fn delta_solves_defining_equation() {
        let c = 1e4;
        let mut prev = 0.0;
        for n in (6380..6500).step_by(2) {
            let d = delta_of_n(n as f64, c).unwrap();
            assert!((n_threshold(c, d) - n as f64).abs() < 1e-10 * n as f64);
            assert!(d > prev);
            prev = d;
        }
        assert!(delta_of_n(6000.0, c).is_err());
        assert!(delta_of_n(40000.0, c).is_err());
    }

    #[test]
    fn turning_index() {
        let brute = |gap: f64| {
            (1..100usize)
                .filter(|&k| ((2 * k * (2 * k + 1)) as f64) < gap)
                .max()
                .unwrap_or(0)
        };
        assert_eq!(k0(0.0, 5.0), 0);
        assert_eq!(k0(10.0, 143.0), 3);
        for i in 0..400 {
            let gap = 0.37 * i as f64;
            assert_eq!(k0(10.0, 100.0 + gap), brute(gap), "gap={gap}");
        }
    }

    #[test]
    fn xi_hypotheses() {
        assert!(matches!(xi(200, 22.0, 3.5), Err(ProlateError::HypothesisViolated(_))));
        assert!(xi(200, 100.0, 2.0).is_err());
        assert!(xi(64, 100.0, 10.0).is_err());
        assert!(xi(200, 100.0, 10.0).is_ok());
        let a = xi_value(100.0, 3.0 + 1e-12).log_abs();
        let b = xi_value(100.0, 3.0).log_abs();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn chi_bounds_at_thousand() {
        let c = 1000.0;
        let ctx = ProlateContext::new(c).unwrap();
        let delta = 10.0;
        let first = n_threshold(c, delta).floor() as usize + 1;
        let lower = chi_lower(first, c, delta);
        assert!(lower.hypothesis);
        assert!(ctx.chi(first).unwrap() > lower.value);
        let lo = (2.0 * c / PI).ceil() as usize;
        let hi = (n_threshold(c, delta) - 3.0).floor() as usize;
        let mid = (lo + hi) / 2;
        let upper = chi_upper(mid, c, delta);
        assert!(upper.hypothesis);
        assert!(ctx.chi(mid).unwrap() < upper.value);
        assert!(2.0 / (PI * PI) * delta * (4.0 * E * PI * c / delta).ln() - 3.0 > 1.3);
    }

    #[test]
    fn report_at_hundred() {
        let ctx = ProlateContext::new(100.0).unwrap();
        let r = bound_report(&ctx, 80, DeltaPolicy::Clamped).unwrap();
        assert!(r.hypotheses.zeta_valid() && r.hypotheses.xi_valid());
        assert!(r.hypotheses.chi_above_c2_plus_42);
        assert!(r.violations().is_empty());
        assert!(r.zeta.unwrap() > r.lambda_abs && r.eta.unwrap() > r.zeta.unwrap());
        assert!(r.p0.unwrap() < r.zeta.unwrap());
        let small = ProlateContext::new(10.0).unwrap();
        let r = bound_report(&small, 2, DeltaPolicy::Clamped).unwrap();
        assert!(!r.hypotheses.zeta_valid());
        let r = bound_report(&ProlateContext::new(20.0).unwrap(), 30, DeltaPolicy::Clamped).unwrap();
        assert!(!r.hypotheses.xi_valid());
    }

    #[test]
    fn p0_tracks_eigenvalue() {
        assert!((p0(100.0, 1e4).unwrap().to_f64() - (2.0 * PI / 100.0).sqrt()).abs() < 1e-15);
        let ctx = ProlateContext::new(100.0).unwrap();
        for n in 100..=120 {
            let chi = ctx.chi(n).unwrap();
            let ratio = lambda(&ctx, n).unwrap().abs().to_f64() / p0(100.0, chi).unwrap().to_f64();
            assert!((ratio - 1.0).abs() < 0.25, "n={n}: {ratio}");
        }
    }
}
