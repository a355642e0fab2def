//! Drivers for the three numerical experiments: the magnitude table below
//! `2c/π`, the threshold table for `|λ_n|` and `ζ`, and the figure data.
//!
//! Rows are computed concurrently and returned in job order.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{delta_of_n, xi_value, zeta_for_mode};
use crate::eigenvalues::{eigenvalue_record, lambda};
use crate::error::{ProlateError, Result};
use crate::spectrum::{ProlateContext, Truncation};

/// Which indices to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NPolicy {
    /// The rule of the chosen experiment.
    #[default]
    Default,
    List(Vec<usize>),
    /// Half-open range `[start, end)`.
    Range { start: usize, end: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything an experiment run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub c_list: Vec<f64>,
    pub n_policy: NPolicy,
    pub epsilon_list: Vec<f64>,
    pub format: OutputFormat,
    pub out: Option<String>,
    pub truncation_dim: Option<usize>,
    pub parallel: Option<usize>,
    pub large: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            c_list: vec![10.0, 100.0, 1000.0, 1e4],
            n_policy: NPolicy::Default,
            epsilon_list: vec![(-50f64).exp(), (-100f64).exp()],
            format: OutputFormat::Csv,
            out: None,
            truncation_dim: None,
            parallel: None,
            large: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.c_list.is_empty() {
            return Err(ProlateError::domain("c list is empty"));
        }
        if let Some(c) = self.c_list.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
            return Err(ProlateError::domain(format!("band limit {c} must be positive")));
        }
        if let Some(e) = self.epsilon_list.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(ProlateError::domain(format!("epsilon {e} outside (0, 1)")));
        }
        if let NPolicy::Range { start, end } = self.n_policy {
            if start >= end {
                return Err(ProlateError::domain(format!("empty n range {start}..{end}")));
            }
        }
        if self.truncation_dim.is_some_and(|d| d < 2) {
            return Err(ProlateError::domain("truncation dimension must be at least 2"));
        }
        if self.parallel == Some(0) {
            return Err(ProlateError::domain("parallelism must be at least 1"));
        }
        Ok(())
    }

    /// The configured band limits, with `1e5` appended under `large` when the
    /// list is the default one.
    pub fn effective_c_list(&self) -> Vec<f64> {
        let mut list = self.c_list.clone();
        if self.large && list == RunConfig::default().c_list {
            list.push(1e5);
        }
        list
    }

    fn truncation(&self) -> Truncation {
        self.truncation_dim.map_or(Truncation::Auto, Truncation::Fixed)
    }
}

/// One context per band limit, shared by every row of a run.
pub struct Session {
    pub config: RunConfig,
    contexts: Vec<ProlateContext>,
}

impl Session {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let contexts = config
            .effective_c_list()
            .into_iter()
            .map(|c| ProlateContext::with_truncation(c, config.truncation()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Session { config, contexts })
    }

    pub fn contexts(&self) -> &[ProlateContext] {
        &self.contexts
    }

    /// Runs `f` on the configured pool.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.config.parallel {
            Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(f),
                Err(_) => f(),
            },
            None => f(),
        }
    }

    /// Maps `f` over `jobs` on the configured pool; output keeps job order.
    pub fn ordered_map<J: Sync, T: Send>(&self, jobs: &[J], f: impl Fn(&J) -> T + Sync) -> Vec<T> {
        self.install(|| jobs.par_iter().map(&f).collect())
    }

    fn indices(&self, default: impl Fn(f64) -> Vec<usize>, c: f64) -> Vec<usize> {
        match &self.config.n_policy {
            NPolicy::Default => default(c),
            NPolicy::List(v) => v.clone(),
            NPolicy::Range { start, end } => (*start..*end).collect(),
        }
    }
}

/// A row that could not be computed; the rest of the run continues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFailure {
    pub c: f64,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub error: String,
    pub non_convergence: bool,
}

impl RowFailure {
    fn new(c: f64, n: Option<usize>, epsilon: Option<f64>, error: ProlateError) -> Self {
        let non_convergence = matches!(
            error,
            ProlateError::TruncationNotConverged { .. }
                | ProlateError::MatchFailure { .. }
                | ProlateError::BracketFailure(_)
        );
        RowFailure {
            c,
            n,
            epsilon,
            error: error.to_string(),
            non_convergence,
        }
    }
}

/// Rows in deterministic order plus the failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome<T> {
    pub rows: Vec<T>,
    pub failures: Vec<RowFailure>,
}

impl<T> Outcome<T> {
    fn collect(results: Vec<std::result::Result<T, RowFailure>>) -> Self {
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for r in results {
            match r {
                Ok(v) => rows.push(v),
                Err(f) => failures.push(f),
            }
        }
        Outcome { rows, failures }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Row {
    pub c: f64,
    pub n: usize,
    pub pi_n_over_2c: f64,
    pub abs_lambda: f64,
    pub mu: f64,
}

/// `0`, `⌊c/π⌋` and `⌊2c/π⌋`.
pub fn table1_indices(c: f64) -> Vec<usize> {
    vec![0, (c / PI).floor() as usize, (2.0 * c / PI).floor() as usize]
}

/// Every `n` from `0` to `⌊2c/π⌋`.
pub fn sweep_indices(c: f64) -> Vec<usize> {
    (0..=(2.0 * c / PI).floor() as usize).collect()
}

pub fn table1_row(ctx: &ProlateContext, n: usize) -> Result<Table1Row> {
    let c = ctx.c();
    let rec = eigenvalue_record(ctx, n)?;
    Ok(Table1Row {
        c,
        n,
        pi_n_over_2c: PI * n as f64 / (2.0 * c),
        abs_lambda: rec.lambda_abs.to_f64(),
        mu: rec.mu.to_f64(),
    })
}

pub fn experiment1(session: &Session) -> Outcome<Table1Row> {
    let jobs: Vec<(&ProlateContext, usize)> = session
        .contexts()
        .iter()
        .flat_map(|ctx| session.indices(table1_indices, ctx.c()).into_iter().map(move |n| (ctx, n)))
        .collect();
    Outcome::collect(session.ordered_map(&jobs, |(ctx, n)| {
        table1_row(ctx, *n).map_err(|e| RowFailure::new(ctx.c(), Some(*n), None, e))
    }))
}

/// Table 1 columns over every `n ≤ 2c/π`, ignoring the index policy.
pub fn experiment1_sweep(session: &Session) -> Outcome<Table1Row> {
    let jobs: Vec<(&ProlateContext, usize)> = session
        .contexts()
        .iter()
        .flat_map(|ctx| sweep_indices(ctx.c()).into_iter().map(move |n| (ctx, n)))
        .collect();
    Outcome::collect(session.ordered_map(&jobs, |(ctx, n)| {
        table1_row(ctx, *n).map_err(|e| RowFailure::new(ctx.c(), Some(*n), None, e))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub epsilon: f64,
    pub c: f64,
    pub n1: usize,
    pub delta1: f64,
    pub n2: usize,
    pub delta2: f64,
    pub n2_minus_n1: i64,
}

/// `(n - 2c/π) / log c`.
pub fn plunge_offset(n: usize, c: f64) -> f64 {
    (n as f64 - 2.0 * c / PI) / c.ln()
}

const SCAN_CHUNK: usize = 8;

/// Smallest `n` in `candidates` (ascending) with `test(n)` true, evaluated
/// in parallel chunks.
fn first_passing(
    candidates: impl Iterator<Item = usize>,
    test: impl Fn(usize) -> Result<bool> + Sync,
) -> Result<Option<usize>> {
    let all: Vec<usize> = candidates.collect();
    for chunk in all.chunks(SCAN_CHUNK) {
        let results: Vec<Result<bool>> = chunk.par_iter().map(|&n| test(n)).collect();
        for (&n, r) in chunk.iter().zip(results) {
            if r? {
                return Ok(Some(n));
            }
        }
    }
    Ok(None)
}

fn scan_limit(c: f64) -> usize {
    (10.0 * c / PI).floor() as usize + 400
}

/// Smallest `n > 2c/π` with `|λ_n| < ε`.
pub fn first_lambda_below(ctx: &ProlateContext, epsilon: f64) -> Result<usize> {
    let c = ctx.c();
    let start = (2.0 * c / PI).floor() as usize + 1;
    let log_eps = epsilon.ln();
    first_passing(start..=scan_limit(c), |n| Ok(lambda(ctx, n)?.log_abs() < log_eps))?
        .ok_or_else(|| ProlateError::domain(format!("no n below epsilon {epsilon} at c = {c}")))
}

/// Smallest even `n > 2c/π` with `ζ(n, c) < ε`.
pub fn first_zeta_below(ctx: &ProlateContext, epsilon: f64) -> Result<usize> {
    let c = ctx.c();
    let mut start = (2.0 * c / PI).floor() as usize + 1;
    start += start % 2;
    let log_eps = epsilon.ln();
    first_passing((start..=scan_limit(c)).step_by(2), |n| {
        let mode = ctx.mode(n)?;
        Ok(zeta_for_mode(&mode)?.log_abs() < log_eps)
    })?
    .ok_or_else(|| ProlateError::domain(format!("no even n with zeta below {epsilon} at c = {c}")))
}

pub fn threshold_record(ctx: &ProlateContext, epsilon: f64) -> Result<ThresholdRecord> {
    let c = ctx.c();
    let n1 = first_lambda_below(ctx, epsilon)?;
    let n2 = first_zeta_below(ctx, epsilon)?;
    Ok(ThresholdRecord {
        epsilon,
        c,
        n1,
        delta1: plunge_offset(n1, c),
        n2,
        delta2: plunge_offset(n2, c),
        n2_minus_n1: n2 as i64 - n1 as i64,
    })
}

pub fn experiment2(session: &Session) -> Outcome<ThresholdRecord> {
    let jobs: Vec<(f64, &ProlateContext)> = session
        .config
        .epsilon_list
        .iter()
        .flat_map(|&e| session.contexts().iter().map(move |ctx| (e, ctx)))
        .collect();
    Outcome::collect(session.ordered_map(&jobs, |(e, ctx)| {
        threshold_record(ctx, *e).map_err(|err| RowFailure::new(ctx.c(), None, Some(*e), err))
    }))
}

/// Figure data; the last three columns are present for the third experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureRow {
    pub c: f64,
    pub n: usize,
    pub log_abs_lambda: f64,
    pub log_zeta: f64,
    pub neg_delta: Option<f64>,
    pub log_xi: Option<f64>,
    /// `log|λ_n| < -δ(n) < log ζ < log ξ`.
    pub ordering: Option<bool>,
}

/// Even `n` with `2c/π < n < 2c/π + 20 log c`.
pub fn figure_indices(c: f64) -> Vec<usize> {
    let lo = 2.0 * c / PI;
    let hi = lo + 20.0 * c.ln();
    even_between(lo, hi)
}

fn even_between(lo: f64, hi: f64) -> Vec<usize> {
    let mut n = lo.floor() as usize + 1;
    n += n % 2;
    let mut out = Vec::new();
    while (n as f64) < hi {
        out.push(n);
        n += 2;
    }
    out
}

pub fn figure_row(ctx: &ProlateContext, n: usize) -> Result<FigureRow> {
    let mode = ctx.mode(n)?;
    Ok(FigureRow {
        c: ctx.c(),
        n,
        log_abs_lambda: lambda(ctx, n)?.log_abs(),
        log_zeta: zeta_for_mode(&mode)?.log_abs(),
        neg_delta: None,
        log_xi: None,
        ordering: None,
    })
}

pub fn experiment2_figure(session: &Session) -> Outcome<FigureRow> {
    let jobs: Vec<(&ProlateContext, usize)> = session
        .contexts()
        .iter()
        .flat_map(|ctx| session.indices(figure_indices, ctx.c()).into_iter().map(move |n| (ctx, n)))
        .collect();
    Outcome::collect(session.ordered_map(&jobs, |(ctx, n)| {
        figure_row(ctx, *n).map_err(|e| RowFailure::new(ctx.c(), Some(*n), None, e))
    }))
}

/// Minimal even integer above `2c/π + (2/π²)·150·log(4eπc/150)`.
pub fn experiment3_n_max(c: f64) -> usize {
    let bound = 2.0 * c / PI + 2.0 / (PI * PI) * 150.0 * (4.0 * E * PI * c / 150.0).ln();
    let mut n = bound.floor() as usize + 1;
    n += n % 2;
    n
}

/// Even `n` with `2c/π < n < n_max`.
pub fn experiment3_indices(c: f64) -> Vec<usize> {
    even_between(2.0 * c / PI, experiment3_n_max(c) as f64)
}

/// A figure row with `-δ(n)` and `log ξ(n, c)` at `δ = δ(n)`.
pub fn experiment3_row(ctx: &ProlateContext, n: usize) -> Result<FigureRow> {
    let c = ctx.c();
    if !(c > 22.0) {
        return Err(ProlateError::HypothesisViolated(format!("c = {c} is not above 22")));
    }
    let mut row = figure_row(ctx, n)?;
    let delta = delta_of_n(n as f64, c)?;
    let log_xi = xi_value(c, delta).log_abs();
    row.neg_delta = Some(-delta);
    row.log_xi = Some(log_xi);
    row.ordering = Some(
        row.log_abs_lambda < -delta && -delta < row.log_zeta && row.log_zeta < log_xi,
    );
    Ok(row)
}

pub fn experiment3(session: &Session) -> Outcome<FigureRow> {
    let jobs: Vec<(&ProlateContext, usize)> = session
        .contexts()
        .iter()
        .flat_map(|ctx| {
            session.indices(experiment3_indices, ctx.c()).into_iter().map(move |n| (ctx, n))
        })
        .collect();
    Outcome::collect(session.ordered_map(&jobs, |(ctx, n)| {
        experiment3_row(ctx, *n).map_err(|e| RowFailure::new(ctx.c(), Some(*n), None, e))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(c_list: Vec<f64>) -> Session {
        Session::new(RunConfig {
            c_list,
            ..RunConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.c_list = vec![-1.0]));
        assert!(bad(|c| c.c_list.clear()));
        assert!(bad(|c| c.epsilon_list = vec![1.5]));
        assert!(bad(|c| c.n_policy = NPolicy::Range { start: 5, end: 5 }));
        assert!(bad(|c| c.parallel = Some(0)));
        let large = RunConfig {
            large: true,
            ..RunConfig::default()
        };
        assert_eq!(large.effective_c_list().last(), Some(&1e5));
    }

    #[test]
    fn config_json_round_trip() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"c_list":[10.0],"n_policy":{"range":{"start":0,"end":4}},"format":"json"}"#,
        )
        .unwrap();
        assert_eq!(cfg.n_policy, NPolicy::Range { start: 0, end: 4 });
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.epsilon_list.len(), 2);
    }

    #[test]
    fn table_indices() {
        assert_eq!(table1_indices(10.0), vec![0, 3, 6]);
        assert_eq!(table1_indices(100.0), vec![0, 31, 63]);
        assert_eq!(table1_indices(1000.0), vec![0, 318, 636]);
        assert_eq!(table1_indices(1e4), vec![0, 3183, 6366]);
        assert_eq!(table1_indices(1e5), vec![0, 31830, 63661]);
    }

    #[test]
    fn first_table_at_ten() {
        let out = experiment1(&session(vec![10.0]));
        assert!(out.failures.is_empty());
        let r = out.rows[2];
        assert_eq!(r.n, 6);
        assert!((r.abs_lambda - 0.52588).abs() < 1e-5);
        assert!((r.mu - r.c / (2.0 * PI) * r.abs_lambda.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn thresholds_at_ten() {
        let ctx = ProlateContext::new(10.0).unwrap();
        let r = threshold_record(&ctx, (-50f64).exp()).unwrap();
        assert_eq!((r.n1, r.n2), (32, 38));
        assert!((r.delta1 - 11.133).abs() < 1e-3);
        let r = threshold_record(&ctx, (-100f64).exp()).unwrap();
        assert_eq!((r.n1, r.n2), (50, 56));
    }

    #[test]
    fn n_max_formula() {
        let c = 1e4f64;
        let approx = 2.0 * c / PI + 30.4 * (0.23 * c).ln();
        let n = experiment3_n_max(c);
        assert_eq!(n % 2, 0);
        assert!((n as f64 - approx).abs() < 3.0);
        let idx = experiment3_indices(c);
        assert!(idx.iter().all(|&k| k % 2 == 0 && (k as f64) > 2.0 * c / PI && k < n));
    }

    #[test]
    fn errors_stay_per_row() {
        let s = Session::new(RunConfig {
            c_list: vec![10.0],
            n_policy: NPolicy::List(vec![2, 20]),
            ..RunConfig::default()
        })
        .unwrap();
        let out = experiment2_figure(&s);
        // n = 2 is below 2c/π where ζ is undefined
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].n, Some(2));
    }

    #[test]
    fn deterministic_order() {
        let s = Session::new(RunConfig {
            c_list: vec![100.0, 10.0],
            parallel: Some(3),
            ..RunConfig::default()
        })
        .unwrap();
        let a = experiment2_figure(&s);
        let b = experiment2_figure(&s);
        assert_eq!(a, b);
        assert_eq!(a.rows[0].c, 100.0);
        assert!(a.rows.windows(2).all(|w| w[0].c != w[1].c || w[0].n < w[1].n));
    }
}
