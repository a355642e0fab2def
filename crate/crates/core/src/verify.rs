//! Property suites over sampled `(c, n)`: structure of `χ_n`, the bound
//! chain, the auxiliary functions, the coefficient-ratio sequences, the
//! elliptic identity and agreement between the eigenvalue routes.
//!
//! Every suite emits one record per check per sample, applicable or not, so
//! report sizes are predictable.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    aux_f, aux_g, aux_h, bound_report, chi_bracket_via_h, chi_lower, chi_upper, delta_of_n,
    exponent_lower_via_hg, n_threshold, nu, zeta_for_mode, DeltaPolicy,
};
use crate::eigenvalues::{lambda_from_mode, lambda_log, lambda_quadrature_extended};
use crate::elliptic::{complete_e, exponent_term};
use crate::error::{ProlateError, Result};
use crate::spectrum::{build_matrix, Parity, ProlateContext};
use crate::theorem_lab::{check_trace, lambda_gamma_bound, log_g_integral, trace_default};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub check: &'static str,
    pub c: Option<f64>,
    pub n: Option<usize>,
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    fn new(suite: &'static str, check: &'static str, c: Option<f64>, n: Option<usize>) -> Self {
        CheckRecord {
            suite,
            check,
            c,
            n,
            applicable: false,
            passed: true,
            detail: String::new(),
        }
    }

    fn outcome(mut self, passed: bool, detail: impl Into<String>) -> Self {
        self.applicable = true;
        self.passed = passed;
        self.detail = detail.into();
        self
    }

    fn error(mut self, err: &ProlateError) -> Self {
        self.applicable = true;
        self.passed = false;
        self.detail = err.to_string();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub records: Vec<CheckRecord>,
}

impl VerifyReport {
    pub fn extend(&mut self, records: Vec<CheckRecord>) {
        self.records.extend(records);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// `(suite, check, applicable, failed)` counts in first-seen order.
    pub fn summary(&self) -> Vec<(&'static str, &'static str, usize, usize)> {
        let mut out: Vec<(&'static str, &'static str, usize, usize)> = Vec::new();
        for r in &self.records {
            let pos = match out.iter().position(|e| e.0 == r.suite && e.1 == r.check) {
                Some(p) => p,
                None => {
                    out.push((r.suite, r.check, 0, 0));
                    out.len() - 1
                }
            };
            out[pos].2 += r.applicable as usize;
            out[pos].3 += !r.passed as usize;
        }
        out
    }
}

/// `χ_n` monotonicity, the position of `χ_n` relative to `c²`, the elliptic
/// sandwich on `n`, `χ_n < (π(n+1)/2)²`, the bound on `1/|ψ_n(0)|` and the
/// eigenvector residual. `chi_scale` multiplies `χ_n` before the checks
/// (1 for a faithful run).
pub fn chi_structure_suite(ctx: &ProlateContext, n_max: usize, chi_scale: f64) -> Vec<CheckRecord> {
    let c = ctx.c();
    let ns: Vec<usize> = (0..=n_max).collect();
    let per_n: Vec<Vec<CheckRecord>> = ns
        .par_iter()
        .map(|&n| chi_structure_at(ctx, n, chi_scale))
        .collect();
    let mut out: Vec<CheckRecord> = per_n.into_iter().flatten().collect();
    out.iter_mut().for_each(|r| r.c = Some(c));
    out
}

fn chi_structure_at(ctx: &ProlateContext, n: usize, chi_scale: f64) -> Vec<CheckRecord> {
    const SUITE: &str = "chi_structure";
    const CHECKS: [&str; 6] = [
        "chi_increasing",
        "trichotomy",
        "elliptic_sandwich",
        "chi_below_quadratic",
        "reciprocal_psi0",
        "eigen_residual",
    ];
    let c = ctx.c();
    let blank = |k: usize| CheckRecord::new(SUITE, CHECKS[k], Some(c), Some(n));
    let mode = match ctx.mode(n) {
        Ok(m) => m,
        Err(e) => return (0..CHECKS.len()).map(|k| blank(k).error(&e)).collect(),
    };
    let chi = mode.chi * chi_scale;
    let nf = n as f64;
    let c2 = c * c;
    let mut out = Vec::with_capacity(CHECKS.len());

    let mut r = blank(0);
    if n > 0 {
        r = match ctx.chi(n - 1) {
            Ok(prev) => r.outcome(chi > prev * chi_scale, format!("{prev} < {chi}")),
            Err(e) => r.error(&e),
        };
    }
    out.push(r);

    let r = blank(1);
    out.push(if nf <= 2.0 * c / PI - 1.0 {
        r.outcome(chi < c2, format!("chi - c^2 = {}", chi - c2))
    } else if nf >= 2.0 * c / PI {
        r.outcome(chi > c2, format!("chi - c^2 = {}", chi - c2))
    } else {
        r
    });

    let above = chi > c2;
    let r = blank(2);
    out.push(if above {
        match complete_e(c / chi.sqrt()) {
            Ok(e) => {
                let v = 2.0 / PI * chi.sqrt() * e;
                r.outcome(nf < v && v < nf + 3.0, format!("(2/pi) sqrt(chi) E = {v}"))
            }
            Err(e) => r.error(&e),
        }
    } else {
        r
    });

    let r = blank(3);
    out.push(if above {
        let q = (PI * (nf + 1.0) / 2.0).powi(2);
        r.outcome(chi < q, format!("{chi} < {q}"))
    } else {
        r
    });

    let r = blank(4);
    out.push(match (mode.psi_at_zero, above) {
        (Some(p0), true) => {
            let bound = 4.0 * (nf * chi / c2).sqrt();
            r.outcome(1.0 / p0.abs() <= bound, format!("1/|psi(0)| = {} <= {bound}", 1.0 / p0.abs()))
        }
        _ => r,
    });

    let r = blank(5);
    out.push(match build_matrix(c, mode.parity, mode.dim) {
        Ok(band) => {
            let mut v = mode.coeffs.clone();
            v.resize(mode.dim, 0.0);
            let (lo, hi) = band.gershgorin();
            let norm = lo.abs().max(hi.abs());
            let res = band.residual(mode.chi, &v);
            r.outcome(res <= 1e-8 * norm, format!("residual {res:e}, norm {norm:e}"))
        }
        Err(e) => r.error(&e),
    });
    out
}

/// `χ_n → n(n+1)` as `c → 0`: relative agreement `1e-6` at `c = 1e-4`.
pub fn small_band_limit_suite(c: f64, n_max: usize) -> Vec<CheckRecord> {
    let ctx = match ProlateContext::new(c) {
        Ok(ctx) => ctx,
        Err(e) => return vec![CheckRecord::new("chi_structure", "small_c_limit", Some(c), None).error(&e)],
    };
    (0..=n_max)
        .map(|n| {
            let r = CheckRecord::new("chi_structure", "small_c_limit", Some(c), Some(n));
            match ctx.chi(n) {
                Ok(chi) => {
                    let target = (n * (n + 1)) as f64;
                    let err = (chi - target).abs() / target.max(1.0);
                    r.outcome(err < 1e-6, format!("relative deviation {err:e}"))
                }
                Err(e) => r.error(&e),
            }
        })
        .collect()
}

const BOUND_CHECKS: [&str; 10] = [
    "nu",
    "zeta",
    "eta",
    "xi",
    "lambda_chi",
    "exponent_lower_hg",
    "h_bracket",
    "simple_exponent",
    "chi_lower",
    "chi_upper",
];

/// The bound chain and the `χ_n` / exponent bounds at each `n`.
pub fn bound_suite(ctx: &ProlateContext, ns: &[usize]) -> Vec<CheckRecord> {
    ns.par_iter()
        .map(|&n| bound_checks_at(ctx, n))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn bound_checks_at(ctx: &ProlateContext, n: usize) -> Vec<CheckRecord> {
    const SUITE: &str = "bounds";
    let c = ctx.c();
    let blank = |k: usize| CheckRecord::new(SUITE, BOUND_CHECKS[k], Some(c), Some(n));
    let rep = match bound_report(ctx, n, DeltaPolicy::Raw) {
        Ok(r) => r,
        Err(e) => return (0..BOUND_CHECKS.len()).map(|k| blank(k).error(&e)).collect(),
    };
    let lam = rep.lambda_abs;
    let h = rep.hypotheses;
    let ll = lam.log_abs();
    let mut out = Vec::with_capacity(BOUND_CHECKS.len());

    out.push(blank(0).outcome(lam <= rep.nu, format!("log|lambda| {ll}, log nu {}", rep.nu.log_abs())));

    let r = blank(1);
    out.push(match (h.zeta_valid(), rep.zeta) {
        (true, Some(z)) => r.outcome(lam < z, format!("log|lambda| {ll}, log zeta {}", z.log_abs())),
        _ => r,
    });

    let r = blank(2);
    out.push(match (h.zeta_valid(), rep.zeta, rep.eta) {
        (true, Some(z), Some(e)) => {
            r.outcome(lam < e && z < e, format!("log zeta {}, log eta {}", z.log_abs(), e.log_abs()))
        }
        _ => r,
    });

    let r = blank(3);
    out.push(match (h.xi_valid(), rep.xi) {
        (true, Some(x)) => r.outcome(lam < x, format!("log|lambda| {ll}, log xi {}", x.log_abs())),
        _ => r,
    });

    let r = blank(4);
    out.push(match (h.zeta_valid(), rep.lambda_chi) {
        (true, Some(b)) => r.outcome(lam < b, format!("log|lambda| {ll}, log bound {}", b.log_abs())),
        _ => r,
    });

    let chi = rep.chi;
    let beyond = n as f64 > 2.0 * c / PI;
    let r = blank(5);
    out.push(if beyond {
        match (exponent_lower_via_hg(n, c), exponent_term(c, chi)) {
            (Ok(lo), Ok(ex)) => r.outcome(lo < ex, format!("{lo} < {ex}")),
            (Err(e), _) | (_, Err(e)) => r.error(&e),
        }
    } else {
        r
    });

    let r = blank(6);
    out.push(if beyond {
        match chi_bracket_via_h(n, c) {
            Ok((lo, hi)) => {
                let v = (chi - c * c) / (c * c);
                r.outcome(lo < v && v < hi, format!("{lo} < {v} < {hi}"))
            }
            Err(e) => r.error(&e),
        }
    } else {
        r
    });

    // δ slightly below δ(n) puts n strictly above the threshold
    let delta = rep.delta_n.map(|d| 0.99 * d).filter(|d| *d > 0.0 && *d < 1.25 * PI * c);
    let r = blank(7);
    out.push(match delta {
        Some(d) if n as f64 > n_threshold(c, d) => match exponent_term(c, chi) {
            Ok(ex) => {
                let lhs = d * (1.0 - d / (2.0 * PI * c));
                r.outcome(lhs < ex, format!("{lhs} < {ex}"))
            }
            Err(e) => r.error(&e),
        },
        _ => r,
    });

    let r = blank(8);
    out.push(match delta.map(|d| chi_lower(n, c, d)) {
        Some(b) if b.hypothesis => r.outcome(chi > b.value, format!("{chi} > {}", b.value)),
        _ => r,
    });

    // δ(n + 3) puts n exactly three below the threshold
    let upper = delta_of_n(n as f64 + 3.0, c).ok().map(|d| chi_upper(n, c, d * (1.0 + 1e-9)));
    let r = blank(9);
    out.push(match upper {
        Some(b) if b.hypothesis => r.outcome(chi < b.value, format!("{chi} < {}", b.value)),
        _ => r,
    });
    out
}

/// `ν(0, c) = 2` and `ν(n, c) ≥ 1/10` on `[2c/π, (2/π + 1/25)c)`.
pub fn nu_suite(c: f64) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let v = nu(0, c).to_f64();
    out.push(
        CheckRecord::new("nu", "nu_at_zero", Some(c), Some(0))
            .outcome((v - 2.0).abs() < 1e-14, format!("nu(0) = {v}")),
    );
    let lo = (2.0 * c / PI).ceil() as usize;
    let hi = (2.0 / PI + 1.0 / 25.0) * c;
    let mut n = lo;
    while (n as f64) < hi {
        let v = nu(n, c).to_f64();
        out.push(
            CheckRecord::new("nu", "nu_above_tenth", Some(c), Some(n))
                .outcome(v >= 0.1, format!("nu = {v}")),
        );
        n += 1;
    }
    out
}

/// Grid checks of the bounds on `H`, `G` and their composition, and of `H`
/// inverting `f`. One record per check, with the number of failing points.
pub fn aux_suite(points: usize) -> Vec<CheckRecord> {
    let grid: Vec<f64> = (1..=points).map(|i| 5.0 * i as f64 / points as f64).collect();
    type Check = (&'static str, Box<dyn Fn(f64) -> Result<bool> + Sync>);
    let checks: Vec<Check> = vec![
        (
            "h_bounds",
            Box::new(|s| {
                let h = aux_h(s / 4.0 * (16.0 * E / s).ln())?;
                Ok(s <= h && h <= s + s * s / 5.0)
            }),
        ),
        (
            "g_bounds",
            Box::new(|x| {
                let g = aux_g(x)?;
                Ok(PI / 4.0 * (1.0 - x / 8.0) <= g && g <= PI / 4.0)
            }),
        ),
        (
            "hg_bounds",
            Box::new(|s| {
                let h = aux_h(s / 4.0 * (16.0 * E / s).ln())?;
                let hg = h * aux_g(h)?;
                Ok(PI / 4.0 * s * (1.0 - s / 8.0) <= hg && hg <= PI / 4.0 * s)
            }),
        ),
        (
            "hg_increasing",
            Box::new(move |x| {
                let step = 5.0 / points as f64;
                let at = |y: f64| -> Result<f64> {
                    let h = aux_h(y)?;
                    Ok(h * aux_g(h)?)
                };
                Ok(at(x - step)? < at(x)?)
            }),
        ),
        (
            "h_inverts_f",
            Box::new(|x| {
                let back = aux_h(aux_f(x)?)?;
                let fwd = aux_f(aux_h(x)?)?;
                Ok((back - x).abs() < 1e-12 * x.max(1.0) && (fwd - x).abs() < 1e-12 * x.max(1.0))
            }),
        ),
    ];
    checks
        .iter()
        .map(|(name, f)| {
            let results: Vec<(f64, Result<bool>)> = grid.par_iter().map(|&s| (s, f(s))).collect();
            let bad: Vec<String> = results
                .iter()
                .filter(|(_, r)| !matches!(r, Ok(true)))
                .map(|(s, r)| match r {
                    Err(e) => format!("{s}: {e}"),
                    _ => format!("{s}"),
                })
                .collect();
            let detail = if bad.is_empty() {
                format!("{} points", grid.len())
            } else {
                format!("{} of {} points fail, first {}", bad.len(), grid.len(), bad[0])
            };
            CheckRecord::new("aux", name, None, None).outcome(bad.is_empty(), detail)
        })
        .collect()
}

/// Even `n` with `χ_n > c² + 42`, `count` of them spaced by `stride`.
pub fn sequence_sample(ctx: &ProlateContext, count: usize, stride: usize) -> Result<Vec<usize>> {
    let c = ctx.c();
    let mut n = (2.0 * c / PI).floor() as usize;
    n += n % 2;
    while ctx.chi(n)? <= c * c + 42.0 {
        n += 2;
    }
    Ok((0..count).map(|i| n + 2 * stride * i).collect())
}

/// Every sequence property from `check_trace`, plus `|λ_n| < bound ≤ ζ` for
/// the bound through `γ_{k₀}`.
pub fn sequence_suite(ctx: &ProlateContext, n: usize) -> Vec<CheckRecord> {
    const SUITE: &str = "sequences";
    let c = ctx.c();
    let run = || -> Result<Vec<CheckRecord>> {
        let mode = ctx.mode(n)?;
        let t = trace_default(c, n, mode.chi)?;
        let mut out: Vec<CheckRecord> = check_trace(&t)
            .into_iter()
            .map(|chk| {
                CheckRecord::new(SUITE, chk.name, Some(c), Some(n)).outcome(chk.passed, format!("k0 = {}", t.k0))
            })
            .collect();
        let r = CheckRecord::new(SUITE, "lambda_gamma_chain", Some(c), Some(n));
        out.push(match (mode.psi_at_zero, t.k0 > 2) {
            (Some(p), true) => {
                let bound = lambda_gamma_bound(&t, p)?;
                let lam = lambda_from_mode(&mode).or_else(|_| lambda_log(ctx, n))?.abs();
                let z = zeta_for_mode(&mode)?;
                r.outcome(
                    lam < bound && bound <= z,
                    format!("{} < {} <= {}", lam.log_abs(), bound.log_abs(), z.log_abs()),
                )
            }
            _ => r,
        });
        Ok(out)
    };
    run().unwrap_or_else(|e| vec![CheckRecord::new(SUITE, "trace", Some(c), Some(n)).error(&e)])
}

/// `exponent_term(c, χ)` against the quadrature of `∫ log g_n`.
pub fn elliptic_identity_suite(pairs: &[(f64, f64)]) -> Vec<CheckRecord> {
    pairs
        .par_iter()
        .map(|&(c, chi)| {
            let r = CheckRecord::new("elliptic", "exponent_identity", Some(c), None);
            match (exponent_term(c, chi), log_g_integral(c, chi)) {
                (Ok(a), Ok(b)) => {
                    let rel = ((a - b) / a).abs();
                    r.outcome(rel < 1e-10, format!("chi/c^2 = {}, relative {rel:e}", chi / (c * c)))
                }
                (Err(e), _) | (_, Err(e)) => r.error(&e),
            }
        })
        .collect()
}

/// `(c, χ)` pairs with `χ/c² ∈ (1.001, 5)` from a low-discrepancy sequence.
pub fn elliptic_pairs(count: usize) -> Vec<(f64, f64)> {
    const G1: f64 = 0.754_877_666_246_692_7;
    const G2: f64 = 0.569_840_290_998_053_3;
    (1..=count)
        .map(|i| {
            let u = (0.5 + G1 * i as f64).fract();
            let v = (0.5 + G2 * i as f64).fract();
            let c = 10f64.powf(4.0 * u);
            (c, c * c * (1.001 + 3.999 * v))
        })
        .collect()
}

/// Direct or odd route against the double-double quadrature where
/// `|λ_n| > 1e-10`, and against the log-domain route where the direct route
/// resolves `a_0`.
pub fn oracle_suite(ctx: &ProlateContext, ns: &[usize]) -> Vec<CheckRecord> {
    let c = ctx.c();
    ns.par_iter()
        .map(|&n| {
            let q = CheckRecord::new("oracles", "direct_vs_quadrature", Some(c), Some(n));
            let l = CheckRecord::new("oracles", "log_vs_direct", Some(c), Some(n));
            let mode = match ctx.mode(n) {
                Ok(m) => m,
                Err(e) => return vec![q.error(&e), l.error(&e)],
            };
            let direct = match lambda_from_mode(&mode) {
                Ok(d) => d,
                Err(ProlateError::ResolutionLoss { .. }) => return vec![q, l],
                Err(e) => return vec![q.error(&e), l.error(&e)],
            };
            let q = if direct.abs().to_f64() > 1e-10 {
                match lambda_quadrature_extended(&mode) {
                    Ok(v) => {
                        let rel = ((v.to_f64() - direct.to_f64()) / direct.to_f64()).abs();
                        q.outcome(rel < 1e-8, format!("|lambda| {:e}, relative {rel:e}", direct.abs().to_f64()))
                    }
                    Err(e) => q.error(&e),
                }
            } else {
                q
            };
            let l = if mode.parity == Parity::Even {
                match lambda_log(ctx, n) {
                    Ok(v) => {
                        let d = direct.log_abs();
                        let rel = (v.log_abs() - d).abs() / d.abs().max(1.0);
                        l.outcome(rel < 1e-6 && v.sign() == direct.sign(), format!("log {d}, relative {rel:e}"))
                    }
                    Err(e) => l.error(&e),
                }
            } else {
                l
            };
            vec![q, l]
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// The default verification grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyPlan {
    /// Band limits used when the caller supplies none.
    pub c_list: Vec<f64>,
    /// Extra indices past `2c/π` for the `χ_n` structure checks.
    pub chi_extra: usize,
    pub aux_points: usize,
    pub elliptic_pairs: usize,
    pub sequence_samples_per_c: usize,
    pub oracle_stride: usize,
    pub chi_scale: f64,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan {
            c_list: vec![10.0, 100.0, 1000.0],
            chi_extra: 50,
            aux_points: 1000,
            elliptic_pairs: 50,
            sequence_samples_per_c: 4,
            oracle_stride: 7,
            chi_scale: 1.0,
        }
    }
}

/// Even `n` with `2c/π + √42 < n < 2c/π + 20 log c`.
pub fn bound_range(c: f64) -> Vec<usize> {
    let lo = 2.0 * c / PI + 42f64.sqrt();
    let hi = 2.0 * c / PI + 20.0 * c.ln();
    let mut n = lo.floor() as usize + 1;
    n += n % 2;
    let mut out = Vec::new();
    while (n as f64) < hi {
        out.push(n);
        n += 2;
    }
    out
}

pub fn run_plan(plan: &VerifyPlan, contexts: &[ProlateContext]) -> VerifyReport {
    let mut report = VerifyReport::default();
    for ctx in contexts {
        let c = ctx.c();
        let n_max = (2.0 * c / PI).floor() as usize + plan.chi_extra;
        report.extend(chi_structure_suite(ctx, n_max, plan.chi_scale));
        report.extend(bound_suite(ctx, &bound_range(c)));
        report.extend(nu_suite(c));
        match sequence_sample(ctx, plan.sequence_samples_per_c, 3) {
            Ok(ns) => {
                for n in ns {
                    report.extend(sequence_suite(ctx, n));
                }
            }
            Err(e) => report.extend(vec![CheckRecord::new("sequences", "sample", Some(c), None).error(&e)]),
        }
        let oracle_ns: Vec<usize> = (0..n_max).step_by(plan.oracle_stride.max(1)).collect();
        report.extend(oracle_suite(ctx, &oracle_ns));
    }
    report.extend(small_band_limit_suite(1e-4, 20));
    report.extend(aux_suite(plan.aux_points));
    report.extend(elliptic_identity_suite(&elliptic_pairs(plan.elliptic_pairs)));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_structure_and_negative_control() {
        let ctx = ProlateContext::new(10.0).unwrap();
        let recs = chi_structure_suite(&ctx, 20, 1.0);
        assert_eq!(recs.len(), 21 * 6);
        assert!(recs.iter().all(|r| r.passed), "{:?}", recs.iter().find(|r| !r.passed));
        // a 1% shift moves the sandwich by more than its width only once
        // √χ is large near the transition
        let ctx = ProlateContext::new(1000.0).unwrap();
        let perturbed = chi_structure_suite(&ctx, 700, 1.01);
        assert!(perturbed
            .iter()
            .any(|r| r.check == "elliptic_sandwich" && !r.passed));
    }

    #[test]
    fn bounds_at_hundred() {
        let ctx = ProlateContext::new(100.0).unwrap();
        let recs = bound_suite(&ctx, &bound_range(100.0));
        assert!(recs.iter().all(|r| r.passed), "{:?}", recs.iter().find(|r| !r.passed));
        assert!(recs.iter().any(|r| r.check == "zeta" && r.applicable));
        assert_eq!(recs.len(), bound_range(100.0).len() * BOUND_CHECKS.len());
    }

    #[test]
    fn aux_coarse_grid() {
        let recs = aux_suite(50);
        assert_eq!(recs.len(), 5);
        assert!(recs.iter().all(|r| r.passed), "{recs:?}");
    }

    #[test]
    fn sequences_and_identity() {
        let ctx = ProlateContext::new(100.0).unwrap();
        for n in sequence_sample(&ctx, 2, 2).unwrap() {
            let recs = sequence_suite(&ctx, n);
            assert!(recs.iter().all(|r| r.passed), "{:?}", recs.iter().find(|r| !r.passed));
        }
        let recs = elliptic_identity_suite(&elliptic_pairs(10));
        assert!(recs.iter().all(|r| r.passed), "{:?}", recs.iter().find(|r| !r.passed));
    }

    #[test]
    fn summary_counts() {
        let recs = nu_suite(100.0);
        let report = VerifyReport { records: recs };
        let s = report.summary();
        assert_eq!(s[0], ("nu", "nu_at_zero", 1, 0));
        assert!(report.passed());
    }
}
