//! The coefficient-ratio sequences behind the principal bound, materialized
//! so that each of their monotonicity and domination properties can be
//! checked numerically.
//!
//! Indices are 1-based as in the recurrences: `alpha(1) = 1`, `beta(1) = √2`.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::bounds::k0;
use crate::elliptic::exponent_term;
use crate::error::{ProlateError, Result};
use crate::logscale::LogScaledReal;
use crate::quadrature::integrate;

/// `Ã_k = k(2k-1)(4k+3) / ((k+1)(2k+1)(4k-1))`.
pub fn a_tilde(k: usize) -> f64 {
    let k = k as f64;
    k * (2.0 * k - 1.0) * (4.0 * k + 3.0) / ((k + 1.0) * (2.0 * k + 1.0) * (4.0 * k - 1.0))
}

/// `A_k = Ã_k √((4k+5)/(4k-3))`, the coefficient of the unscaled ratios.
pub fn a_big(k: usize) -> f64 {
    let kf = k as f64;
    a_tilde(k) * ((4.0 * kf + 5.0) / (4.0 * kf - 3.0)).sqrt()
}

/// `B_k` of the unscaled ratio recurrence.
pub fn b_big(k: usize, c: f64, chi: f64) -> f64 {
    let k = k as f64;
    let root = ((4.0 * k + 1.0) * (4.0 * k + 5.0)).sqrt();
    (chi - 2.0 * k * (2.0 * k + 1.0)) / (c * c) * (4.0 * k + 3.0) * root
        / ((2.0 * k + 1.0) * (2.0 * k + 2.0))
        - (4.0 * k * (2.0 * k + 1.0) - 1.0) * root
            / ((4.0 * k - 1.0) * (2.0 * k + 1.0) * (2.0 * k + 2.0))
}

/// `B^χ_k = (4k+1)(4k+3)/((2k+1)(2k+2)) · (χ - c² - 2k(2k+1))/c²`.
pub fn b_chi(k: usize, c: f64, chi: f64) -> f64 {
    let k = k as f64;
    (4.0 * k + 1.0) * (4.0 * k + 3.0) / ((2.0 * k + 1.0) * (2.0 * k + 2.0))
        * ((chi - c * c - 2.0 * k * (2.0 * k + 1.0)) / (c * c))
}

/// `B̃_k = B^χ_k + 1 + Ã_k`.
pub fn b_tilde(k: usize, c: f64, chi: f64) -> f64 {
    b_chi(k, c, chi) + 1.0 + a_tilde(k)
}

/// `ρ_k = (4k-6)(4k-4)(4k+7) / ((4k-2)(4k)(4k+3))`.
pub fn rho(k: usize) -> f64 {
    let k = k as f64;
    (4.0 * k - 6.0) * (4.0 * k - 4.0) * (4.0 * k + 7.0)
        / ((4.0 * k - 2.0) * (4.0 * k) * (4.0 * k + 3.0))
}

/// `A^new_k = (4k-4)/(4k+4) · (4k-6)/(4k+2) · (4k+7)/(4k-1)`.
pub fn a_new(k: usize) -> f64 {
    let k = k as f64;
    (4.0 * k - 4.0) / (4.0 * k + 4.0) * (4.0 * k - 6.0) / (4.0 * k + 2.0) * (4.0 * k + 7.0)
        / (4.0 * k - 1.0)
}

/// `f_k = (4k-4)(4k-6)/(4k-1)`.
pub fn f_scale(k: usize) -> f64 {
    let k = k as f64;
    (4.0 * k - 4.0) * (4.0 * k - 6.0) / (4.0 * k - 1.0)
}

/// `B^I_k = 4(4k+1)(4k+3)² / (4k(4k-2)(4k+7)) · (χ - c² - 2k(2k+1))/c²`.
pub fn b_one(k: usize, c: f64, chi: f64) -> f64 {
    let k = k as f64;
    4.0 * (4.0 * k + 1.0) * (4.0 * k + 3.0).powi(2) / (4.0 * k * (4.0 * k - 2.0) * (4.0 * k + 7.0))
        * ((chi - c * c - 2.0 * k * (2.0 * k + 1.0)) / (c * c))
}

/// `B^II_k = 2 + 60 / (32k⁴ + 32k³ - 38k² + 7k)`.
pub fn b_two(k: usize) -> f64 {
    let k = k as f64;
    2.0 + 60.0 / (32.0 * k.powi(4) + 32.0 * k.powi(3) - 38.0 * k * k + 7.0 * k)
}

/// Larger root of `x² - (B^I_k + B^II_k) x + 1`, if real.
pub fn sigma(k: usize, c: f64, chi: f64) -> Option<f64> {
    let s = 0.5 * (b_one(k, c, chi) + b_two(k));
    (s >= 1.0).then(|| s + ((s - 1.0) * (s + 1.0)).sqrt())
}

/// `g_n(x) = 1 + 2w + √((1 + 2w)² - 1)` with `w = (χ - c²)/c² - (2x/c)²`.
pub fn g_n_value(c: f64, chi: f64, x: f64) -> Result<f64> {
    Ok(log_g_n(c, chi, x)?.exp())
}

/// `log g_n(x)`, evaluated as `log1p(2w + 2√(w(1+w)))`.
pub fn log_g_n(c: f64, chi: f64, x: f64) -> Result<f64> {
    let gap = chi - c * c;
    if !(gap >= 0.0) || !(4.0 * x * x <= gap * (1.0 + 1e-14)) {
        return Err(ProlateError::domain(format!(
            "g_n needs 4x^2 <= chi - c^2 (x = {x}, chi - c^2 = {gap})"
        )));
    }
    let w = ((gap - 4.0 * x * x) / (c * c)).max(0.0);
    Ok((2.0 * w + 2.0 * (w * (1.0 + w)).sqrt()).ln_1p())
}

/// `∫₀^{√(χ-c²)/2} log g_n(x) dx`, with `x = X(1 - u²)` removing the
/// square-root behaviour at the upper end.
pub fn log_g_integral(c: f64, chi: f64) -> Result<f64> {
    let top = (chi - c * c).sqrt() / 2.0;
    let scale = top * log_g_n(c, chi, 0.0)?;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let value = integrate(
        |u| {
            let x = top * (1.0 - u * u);
            2.0 * top * u * log_g_n(c, chi, x).unwrap_or(0.0)
        },
        0.0,
        1.0,
        1e-15 * scale,
    );
    Ok(value)
}

/// All sequences up to index `k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceTrace {
    pub c: f64,
    pub n: usize,
    pub chi: f64,
    pub k_max: usize,
    pub k0: usize,
    alpha: Vec<LogScaledReal>,
    beta: Vec<LogScaledReal>,
    beta_new: Vec<LogScaledReal>,
    gamma: Vec<LogScaledReal>,
}

fn at(v: &[LogScaledReal], k: usize) -> LogScaledReal {
    assert!(k >= 1 && k <= v.len(), "sequence index {k} outside 1..={}", v.len());
    v[k - 1]
}

impl SequenceTrace {
    pub fn alpha(&self, k: usize) -> LogScaledReal {
        at(&self.alpha, k)
    }

    pub fn beta(&self, k: usize) -> LogScaledReal {
        at(&self.beta, k)
    }

    pub fn beta_new(&self, k: usize) -> LogScaledReal {
        at(&self.beta_new, k)
    }

    pub fn gamma(&self, k: usize) -> LogScaledReal {
        at(&self.gamma, k)
    }

    /// `r_k = γ_{k+1} / γ_k` for `1 ≤ k < k_max`.
    pub fn r(&self, k: usize) -> f64 {
        (self.gamma(k + 1) / self.gamma(k)).to_f64()
    }

    pub fn sigma(&self, k: usize) -> Option<f64> {
        sigma(k, self.c, self.chi)
    }

    /// Largest relative residual of the `β`, `β^new` and `γ` recurrences and
    /// of the unscaled `α` recurrence over the stored range.
    pub fn max_recurrence_residual(&self) -> f64 {
        let (c, chi) = (self.c, self.chi);
        let mut worst = 0.0f64;
        let mut track = |lhs: LogScaledReal, terms: [LogScaledReal; 2]| {
            let scale = terms
                .iter()
                .chain(std::iter::once(&lhs))
                .fold(f64::NEG_INFINITY, |m, t| m.max(t.log_abs()));
            let diff = lhs - (terms[0] + terms[1]);
            if !diff.is_zero() {
                worst = worst.max((diff.log_abs() - scale).exp());
            }
        };
        for k in 1..self.k_max - 1 {
            track(
                self.beta(k + 2),
                [self.beta(k + 1) * b_tilde(k, c, chi), -(self.beta(k) * a_tilde(k))],
            );
            track(
                self.alpha(k + 2),
                [self.alpha(k + 1) * b_big(k, c, chi), -(self.alpha(k) * a_big(k))],
            );
            if k >= 2 {
                let bn1 = self.beta_new(k + 1);
                track(
                    self.beta_new(k + 2),
                    [bn1 * (b_chi(k, c, chi) + 1.0), (bn1 - self.beta_new(k)) * a_new(k)],
                );
                track(
                    self.gamma(k + 2),
                    [self.gamma(k + 1) * (b_one(k, c, chi) + b_two(k)), -self.gamma(k)],
                );
            }
        }
        worst
    }
}

/// Builds every sequence up to `k_max ≥ k₀ + 2`.
pub fn trace(c: f64, n: usize, chi: f64, k_max: usize) -> Result<SequenceTrace> {
    if !(c > 0.0) || !(chi > c * c) {
        return Err(ProlateError::domain(format!(
            "trace needs chi > c^2 (c = {c}, chi = {chi})"
        )));
    }
    let turning = k0(c, chi);
    if k_max < turning + 2 || k_max < 4 {
        return Err(ProlateError::domain(format!(
            "k_max = {k_max} below max(k0 + 2, 4) = {}",
            (turning + 2).max(4)
        )));
    }
    let mut beta = Vec::with_capacity(k_max);
    beta.push(LogScaledReal::from_f64(SQRT_2));
    beta.push(LogScaledReal::from_f64(b_tilde(0, c, chi) * SQRT_2));
    for k in 1..=k_max - 2 {
        let next = beta[k] * b_tilde(k, c, chi) - beta[k - 1] * a_tilde(k);
        beta.push(next);
    }
    let alpha: Vec<LogScaledReal> = beta
        .iter()
        .enumerate()
        .map(|(i, b)| *b / LogScaledReal::from_f64((2.0 / (4.0 * (i + 1) as f64 - 3.0)).sqrt()))
        .collect();
    let mut beta_new: Vec<LogScaledReal> = beta[..3].to_vec();
    for k in 2..=k_max - 2 {
        let (prev, cur) = (beta_new[k - 1], beta_new[k]);
        let next = cur * (b_chi(k, c, chi) + 1.0) + (cur - prev) * a_new(k);
        beta_new.push(next);
    }
    let gamma = beta_new
        .iter()
        .enumerate()
        .map(|(i, b)| if i == 0 { *b } else { *b * f_scale(i + 1) })
        .collect();
    Ok(SequenceTrace {
        c,
        n,
        chi,
        k_max,
        k0: turning,
        alpha,
        beta,
        beta_new,
        gamma,
    })
}

/// `trace` with `k_max = k₀ + 8`.
pub fn trace_default(c: f64, n: usize, chi: f64) -> Result<SequenceTrace> {
    trace(c, n, chi, (k0(c, chi) + 8).max(4))
}

/// Both sides of `σ₂ ⋯ σ_{k₀-1} > g_n(0)⁻⁴ exp ∫ log g_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductBound {
    pub log_product: f64,
    pub log_bound: f64,
    pub integral: f64,
}

impl ProductBound {
    pub fn holds(&self) -> bool {
        self.log_product > self.log_bound
    }
}

pub fn product_lower_bound(trace: &SequenceTrace) -> Result<ProductBound> {
    if trace.k0 <= 2 {
        return Err(ProlateError::domain(format!("product bound needs k0 > 2 (k0 = {})", trace.k0)));
    }
    let mut log_product = 0.0;
    for k in 2..trace.k0 {
        let s = trace.sigma(k).ok_or_else(|| {
            ProlateError::domain(format!("sigma_{k} is not real below the turning index"))
        })?;
        log_product += s.ln();
    }
    let integral = log_g_integral(trace.c, trace.chi)?;
    let log_bound = -4.0 * log_g_n(trace.c, trace.chi, 0.0)? + integral;
    Ok(ProductBound {
        log_product,
        log_bound,
        integral,
    })
}

/// `(2/|ψ_n(0)|) (4k₀-4)(4k₀-6) / ((4k₀-1)√(4k₀-3)) / γ_{k₀}`.
pub fn lambda_gamma_bound(trace: &SequenceTrace, psi0: f64) -> Result<LogScaledReal> {
    if trace.k0 <= 2 {
        return Err(ProlateError::domain(format!("bound needs k0 > 2 (k0 = {})", trace.k0)));
    }
    if psi0 == 0.0 {
        return Err(ProlateError::domain("bound needs psi_n(0) != 0"));
    }
    let k = trace.k0 as f64;
    let log = 2f64.ln() - psi0.abs().ln() + ((4.0 * k - 4.0) * (4.0 * k - 6.0)).ln()
        - (4.0 * k - 1.0).ln()
        - 0.5 * (4.0 * k - 3.0).ln();
    Ok(LogScaledReal::from_log(log) / trace.gamma(trace.k0))
}

/// Outcome of one property check on a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub name: &'static str,
    pub passed: bool,
}

fn increasing(values: impl Iterator<Item = LogScaledReal>) -> bool {
    let v: Vec<_> = values.collect();
    v.windows(2).all(|w| w[0] < w[1])
}

/// Evaluates every sequence property that applies to this trace.
pub fn check_trace(t: &SequenceTrace) -> Vec<TheoremCheck> {
    let (c, chi, k0) = (t.c, t.chi, t.k0);
    let top = k0 + 2;
    let mut out = Vec::new();
    let mut push = |name, passed| out.push(TheoremCheck { name, passed });

    push("recurrence_residual", t.max_recurrence_residual() < 1e-10);
    push("beta_increasing", increasing((1..=top).map(|k| t.beta(k))));
    push("alpha_increasing", increasing((1..=top).map(|k| t.alpha(k))));
    push("beta_new_increasing", increasing((1..=top).map(|k| t.beta_new(k))));
    push(
        "beta_new_below_beta",
        (1..=top).all(|k| t.beta_new(k) <= t.beta(k) * (1.0 + 1e-12)),
    );
    push(
        "a_new_increasing_below_one",
        a_new(1) == 0.0
            && (1..t.k_max).all(|k| a_new(k) < a_new(k + 1))
            && (1..=t.k_max).all(|k| a_new(k) < 1.0),
    );
    push(
        "b_two_decreasing_above_two",
        (b_two(1) - 42.0 / 11.0).abs() < 1e-14
            && (1..t.k_max).all(|k| b_two(k) > b_two(k + 1) && b_two(k + 1) > 2.0),
    );
    push(
        "gamma_closed_forms",
        {
            let v = (chi - c * c) / (c * c);
            let w = (chi - c * c - 6.0) / (c * c);
            let g2 = 8.0 / (7.0 * SQRT_2) * (2.0 + 3.0 * v);
            let g3 = 16.0 * SQRT_2 / 11.0
                * (3.0 + 15.0 * v + 105.0 / 8.0 * v * w - 105.0 / (2.0 * c * c));
            let close = |a: LogScaledReal, b: f64| ((a.to_f64() - b) / b).abs() < 1e-12;
            close(t.gamma(1), SQRT_2) && close(t.gamma(2), g2) && close(t.gamma(3), g3)
        },
    );
    if chi > c * c + 6.0 {
        push(
            "b_one_decreasing_positive",
            ((b_one(1, c, chi) - 245.0 / 22.0 * (chi - c * c - 6.0) / (c * c)).abs()
                <= 1e-12 * b_one(1, c, chi).abs())
                && (1..k0).all(|k| b_one(k, c, chi) > b_one(k + 1, c, chi))
                && (1..=k0).all(|k| b_one(k, c, chi) > 0.0),
        );
    }
    push("r2_above_b_sum", t.r(2) > b_one(2, c, chi) + b_two(2));
    if k0 > 2 {
        let sig: Vec<Option<f64>> = (1..=k0).map(|k| t.sigma(k)).collect();
        push(
            "sigma_decreasing_above_one",
            sig.iter().all(|s| s.is_some_and(|v| v > 1.0))
                && sig.windows(2).all(|w| w[0] > w[1]),
        );
        push(
            "r_decreasing_above_one",
            (2..k0).all(|k| t.r(k) > t.r(k + 1)) && t.r(k0) > 1.0,
        );
        push(
            "r_above_sigma",
            (2..=k0).all(|k| t.sigma(k).is_some_and(|s| t.r(k) > s)),
        );
        push(
            "sigma_product_bound",
            product_lower_bound(t).is_ok_and(|p| p.holds()),
        );
    }
    out
}

/// `exponent_term` against its integral form, as a relative difference.
pub fn exponent_identity_residual(c: f64, chi: f64) -> Result<f64> {
    let closed = exponent_term(c, chi)?;
    let quad = log_g_integral(c, chi)?;
    Ok(((closed - quad) / closed).abs())
}
