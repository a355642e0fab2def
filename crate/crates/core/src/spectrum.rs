//! The prolate operator in the normalized Legendre basis.
//!
//! In that basis the differential operator becomes a symmetric
//! five-diagonal matrix that only couples degrees of equal parity, so each
//! parity block is tridiagonal. `χ_n` is an eigenvalue of one block; the
//! eigenvector holds the Legendre coefficients of `ψ_n`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{ProlateError, Result};
use crate::legendre::{
    normalized_even_at_zero, normalized_legendre_same_parity, normalized_odd_derivative_at_zero,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Lowest Legendre degree in the block.
    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// `A_{k,k}` for Legendre degree `k`.
pub fn diagonal_entry(k: usize, c: f64) -> f64 {
    let k = k as f64;
    k * (k + 1.0) + (2.0 * k * (k + 1.0) - 1.0) / ((2.0 * k + 3.0) * (2.0 * k - 1.0)) * c * c
}

/// `A_{k,k+2} = A_{k+2,k}` for Legendre degree `k`.
pub fn offdiagonal_entry(k: usize, c: f64) -> f64 {
    let k = k as f64;
    (k + 2.0) * (k + 1.0) / ((2.0 * k + 3.0) * ((2.0 * k + 1.0) * (2.0 * k + 5.0)).sqrt()) * c * c
}

/// One parity block of the coefficient matrix. Row `j` corresponds to
/// Legendre degree `parity.offset() + 2j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixBand {
    pub parity: Parity,
    pub diag: Vec<f64>,
    /// `offdiag[j]` couples rows `j` and `j + 1`.
    pub offdiag: Vec<f64>,
}

pub fn build_matrix(c: f64, parity: Parity, dim: usize) -> Result<MatrixBand> {
    if dim < 2 {
        return Err(ProlateError::domain(format!("matrix dimension {dim} < 2")));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(ProlateError::domain(format!("band limit {c} must be finite and >= 0")));
    }
    let p = parity.offset();
    let diag = (0..dim).map(|j| diagonal_entry(p + 2 * j, c)).collect();
    let offdiag = (0..dim - 1).map(|j| offdiagonal_entry(p + 2 * j, c)).collect();
    Ok(MatrixBand {
        parity,
        diag,
        offdiag,
    })
}

impl MatrixBand {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`, from the signs of the
    /// `LDLᵀ` pivots of `A - xI`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * 1e10;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for j in 0..self.dim() {
            if j > 0 {
                let e = self.offdiag[j - 1];
                q = (self.diag[j] - x) - e * e / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let left = if j > 0 { self.offdiag[j - 1].abs() } else { 0.0 };
            let right = if j + 1 < n { self.offdiag[j].abs() } else { 0.0 };
            lo = lo.min(self.diag[j] - left - right);
            hi = hi.max(self.diag[j] + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), by bisection.
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        if index >= self.dim() {
            return Err(ProlateError::domain(format!(
                "eigenvalue index {index} outside block of dimension {}",
                self.dim()
            )));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (lo.abs() + hi.abs()) + f64::MIN_POSITIVE;
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * mid.abs() {
                return Ok(mid);
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Unit eigenvector for the eigenvalue `lambda` by inverse iteration,
    /// with its largest-magnitude entry positive.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let scale = self
            .diag
            .iter()
            .map(|d| d.abs())
            .chain(self.offdiag.iter().map(|e| e.abs()))
            .fold(0.0f64, f64::max)
            .max(1.0);
        let lu = ShiftedLu::factor(self, lambda, f64::EPSILON * scale);
        let mut x: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        normalize(&mut x);
        for _ in 0..3 {
            lu.solve(&mut x);
            normalize(&mut x);
        }
        let (imax, _) = x
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
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

    /// `‖(A - λI) v‖₂`.
    pub fn residual(&self, lambda: f64, v: &[f64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(av, x)| (av - lambda * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

fn normalize(x: &mut [f64]) {
    let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if big == 0.0 {
        return;
    }
    let norm = big * x.iter().map(|v| (v / big).powi(2)).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// LU factorization of `A - σI` with partial pivoting, tridiagonal layout.
struct ShiftedLu {
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    lower: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(band: &MatrixBand, sigma: f64, tiny: f64) -> Self {
        let n = band.dim();
        let mut diag: Vec<f64> = band.diag.iter().map(|d| d - sigma).collect();
        let mut upper = band.offdiag.clone();
        let sub = &band.offdiag;
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut lower = vec![0.0; n - 1];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if diag[i].abs() >= sub[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let m = sub[i] / diag[i];
                lower[i] = m;
                diag[i + 1] -= m * upper[i];
            } else {
                let m = diag[i] / sub[i];
                lower[i] = m;
                swapped[i] = true;
                diag[i] = sub[i];
                let temp = diag[i + 1];
                diag[i + 1] = upper[i] - m * temp;
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] = -m * upper2[i];
                }
                upper[i] = temp;
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        ShiftedLu {
            diag,
            upper,
            upper2,
            lower,
            swapped,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.lower[i] * x[i];
            } else {
                x[i + 1] -= self.lower[i] * x[i];
            }
        }
        x[n - 1] /= self.diag[n - 1];
        x[n - 2] = (x[n - 2] - self.upper[n - 2] * x[n - 1]) / self.diag[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1] - self.upper2[i] * x[i + 2]) / self.diag[i];
        }
    }
}

/// How the infinite coefficient matrix is cut down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Start at `⌈n/2⌉ + ⌈c⌉ + 64` rows per block and double until `χ_n`
    /// and the tail coefficient settle.
    Auto,
    /// Use exactly this many rows per block.
    Fixed(usize),
}

const CHI_RELATIVE_TOL: f64 = 1e-10;
const TAIL_TOL: f64 = 1e-20;
const MAX_DOUBLINGS: usize = 5;

/// A solved prolate mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProlateMode {
    pub n: usize,
    pub c: f64,
    pub chi: f64,
    pub parity: Parity,
    /// Normalized Legendre coefficients on degrees `parity.offset() + 2j`;
    /// negligible trailing entries are dropped.
    pub coeffs: Vec<f64>,
    /// `ψ_n(0)` for even `n`.
    pub psi_at_zero: Option<f64>,
    /// `ψ_n'(0)` for odd `n`.
    pub dpsi_at_zero: Option<f64>,
    /// Block dimension used for the solve.
    pub dim: usize,
    /// Largest of the last three coefficients relative to the largest one.
    pub tail_ratio: f64,
}

impl ProlateMode {
    fn from_vector(n: usize, c: f64, chi: f64, dim: usize, mut v: Vec<f64>) -> Self {
        let parity = Parity::of(n);
        let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tail_ratio = v[v.len().saturating_sub(3)..]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            / big;
        let keep = v
            .iter()
            .rposition(|x| x.abs() > 1e-40 * big)
            .map_or(1, |i| i + 1);
        v.truncate(keep);
        let (psi_at_zero, dpsi_at_zero) = match parity {
            Parity::Even => {
                let p0 = normalized_even_at_zero(v.len());
                (Some(v.iter().zip(&p0).map(|(a, p)| a * p).sum()), None)
            }
            Parity::Odd => {
                let d0 = normalized_odd_derivative_at_zero(v.len());
                (None, Some(v.iter().zip(&d0).map(|(a, p)| a * p).sum()))
            }
        };
        ProlateMode {
            n,
            c,
            chi,
            parity,
            coeffs: v,
            psi_at_zero,
            dpsi_at_zero,
            dim,
            tail_ratio,
        }
    }
}

/// `ψ_n(x)` for `|x| ≤ 1`.
pub fn psi_value(mode: &ProlateMode, x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(ProlateError::domain(format!("psi evaluated at {x} outside [-1, 1]")));
    }
    let mut p = vec![0.0; mode.coeffs.len()];
    normalized_legendre_same_parity(x, mode.parity.offset(), &mut p);
    Ok(mode.coeffs.iter().zip(&p).map(|(a, b)| a * b).sum())
}

/// `χ_n` together with the block dimension it was solved at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEntry {
    pub chi: f64,
    pub dim: usize,
}

/// Band limit, truncation policy and a per-`n` cache of solved modes.
#[derive(Debug)]
pub struct ProlateContext {
    c: f64,
    truncation: Truncation,
    modes: RwLock<HashMap<usize, Arc<ProlateMode>>>,
    chis: RwLock<HashMap<usize, ChiEntry>>,
}

impl ProlateContext {
    pub fn new(c: f64) -> Result<Self> {
        Self::with_truncation(c, Truncation::Auto)
    }

    pub fn with_truncation(c: f64, truncation: Truncation) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(ProlateError::domain(format!("band limit {c} must be positive")));
        }
        if let Truncation::Fixed(d) = truncation {
            if d < 2 {
                return Err(ProlateError::domain("fixed truncation needs at least 2 rows"));
            }
        }
        Ok(ProlateContext {
            c,
            truncation,
            modes: RwLock::new(HashMap::new()),
            chis: RwLock::new(HashMap::new()),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// Initial block dimension of the automatic policy.
    pub fn initial_dim(&self, n: usize) -> usize {
        n.div_ceil(2) + self.c.ceil() as usize + 64
    }

    /// The solved mode `n`, computed on first use.
    pub fn mode(&self, n: usize) -> Result<Arc<ProlateMode>> {
        if let Some(m) = self.modes.read().expect("mode cache poisoned").get(&n) {
            return Ok(Arc::clone(m));
        }
        let mode = Arc::new(self.solve(n)?);
        let mut cache = self.modes.write().expect("mode cache poisoned");
        Ok(Arc::clone(cache.entry(n).or_insert(mode)))
    }

    pub fn chi(&self, n: usize) -> Result<f64> {
        Ok(self.chi_entry(n)?.chi)
    }

    pub fn chi_entry(&self, n: usize) -> Result<ChiEntry> {
        if let Some(e) = self.chis.read().expect("chi cache poisoned").get(&n) {
            return Ok(*e);
        }
        let mode = self.mode(n)?;
        Ok(ChiEntry {
            chi: mode.chi,
            dim: mode.dim,
        })
    }

    /// Pre-loads a previously computed `χ_n`; the eigenvector is then
    /// rebuilt at the stored dimension without a new eigenvalue solve.
    pub fn seed_chi(&self, n: usize, entry: ChiEntry) {
        self.chis
            .write()
            .expect("chi cache poisoned")
            .insert(n, entry);
    }

    /// All known `χ_n`, sorted by `n`.
    pub fn chi_table(&self) -> Vec<(usize, ChiEntry)> {
        let mut out: Vec<_> = self
            .chis
            .read()
            .expect("chi cache poisoned")
            .iter()
            .map(|(n, e)| (*n, *e))
            .collect();
        out.sort_by_key(|(n, _)| *n);
        out
    }

    fn solve(&self, n: usize) -> Result<ProlateMode> {
        let parity = Parity::of(n);
        let index = n / 2;
        let seeded = self.chis.read().expect("chi cache poisoned").get(&n).copied();
        if let Some(entry) = seeded {
            let band = build_matrix(self.c, parity, entry.dim)?;
            let v = band.eigenvector(entry.chi);
            return Ok(ProlateMode::from_vector(n, self.c, entry.chi, entry.dim, v));
        }
        let (chi, dim, v) = match self.truncation {
            Truncation::Fixed(dim) => {
                if dim <= index {
                    return Err(ProlateError::domain(format!(
                        "fixed truncation {dim} too small for n = {n}"
                    )));
                }
                let band = build_matrix(self.c, parity, dim)?;
                let chi = band.eigenvalue(index)?;
                let wider = build_matrix(self.c, parity, 2 * dim)?.eigenvalue(index)?;
                let change = (wider - chi).abs() / wider.abs().max(f64::MIN_POSITIVE);
                if change >= CHI_RELATIVE_TOL {
                    return Err(ProlateError::TruncationNotConverged { n, dim, change });
                }
                (chi, dim, band.eigenvector(chi))
            }
            Truncation::Auto => self.solve_auto(n)?,
        };
        self.seed_chi(n, ChiEntry { chi, dim });
        Ok(ProlateMode::from_vector(n, self.c, chi, dim, v))
    }

    fn solve_auto(&self, n: usize) -> Result<(f64, usize, Vec<f64>)> {
        let parity = Parity::of(n);
        let index = n / 2;
        let mut dim = self.initial_dim(n);
        let mut band = build_matrix(self.c, parity, dim)?;
        let mut chi = band.eigenvalue(index)?;
        let mut change = f64::INFINITY;
        for _ in 0..MAX_DOUBLINGS {
            let v = band.eigenvector(chi);
            let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let tail = v[v.len() - 3..].iter().fold(0.0f64, |m, x| m.max(x.abs())) / big;
            let wider = build_matrix(self.c, parity, 2 * dim)?;
            let chi_wider = wider.eigenvalue(index)?;
            change = (chi_wider - chi).abs() / chi_wider.abs().max(f64::MIN_POSITIVE);
            if change < CHI_RELATIVE_TOL && tail < TAIL_TOL {
                return Ok((chi, dim, v));
            }
            dim *= 2;
            band = wider;
            chi = chi_wider;
        }
        Err(ProlateError::TruncationNotConverged { n, dim, change })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::gauss_legendre;
    use nalgebra::DMatrix;

    #[test]
    fn matrix_entries() {
        let c = 7.0;
        let band = build_matrix(c, Parity::Even, 5).unwrap();
        assert!((band.diag[0] - c * c / 3.0).abs() < 1e-13);
        // k = 2: 6 + (11 / 21) c²
        assert!((band.diag[1] - (6.0 + 11.0 / 21.0 * c * c)).abs() < 1e-12);
        // k = 0 coupling: 2 / (3 sqrt 5) c²
        assert!((band.offdiag[0] - 2.0 / (3.0 * 5f64.sqrt()) * c * c).abs() < 1e-13);
        let odd = build_matrix(c, Parity::Odd, 3).unwrap();
        // k = 1: 2 + (3 / 5) c²
        assert!((odd.diag[0] - (2.0 + 0.6 * c * c)).abs() < 1e-12);
        assert!(band.offdiag.iter().all(|&e| e > 0.0));
        assert!(build_matrix(c, Parity::Even, 1).is_err());
    }

    #[test]
    fn zero_band_limit_is_legendre_operator() {
        let band = build_matrix(0.0, Parity::Odd, 6).unwrap();
        for (j, d) in band.diag.iter().enumerate() {
            let k = (2 * j + 1) as f64;
            assert_eq!(*d, k * (k + 1.0));
        }
        assert!(band.offdiag.iter().all(|&e| e == 0.0));
    }

    fn dense_eigenvalues(band: &MatrixBand) -> Vec<f64> {
        let n = band.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                band.diag[i]
            } else if i + 1 == j {
                band.offdiag[i]
            } else if j + 1 == i {
                band.offdiag[j]
            } else {
                0.0
            }
        });
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn bisection_matches_dense_solver() {
        let band = build_matrix(10.0, Parity::Even, 100).unwrap();
        let dense = dense_eigenvalues(&band);
        for (i, d) in dense.iter().enumerate().take(30) {
            let b = band.eigenvalue(i).unwrap();
            assert!(((b - d) / d).abs() < 1e-12, "index {i}: {b} vs {d}");
        }
        let ctx = ProlateContext::new(10.0).unwrap();
        assert!(((ctx.chi(6).unwrap() - dense[3]) / dense[3]).abs() < 1e-12);
    }

    #[test]
    fn small_band_limit_limit() {
        let ctx = ProlateContext::new(1e-4).unwrap();
        let chi = ctx.chi(2).unwrap();
        assert!((chi - 6.0).abs() < 6e-6);
    }

    #[test]
    fn chi_below_c_squared_early() {
        let ctx = ProlateContext::new(100.0).unwrap();
        assert!(ctx.chi(60).unwrap() < 1e4);
        let mut prev = 0.0;
        for n in 0..40 {
            let chi = ctx.chi(n).unwrap();
            assert!(chi > prev);
            prev = chi;
        }
    }

    #[test]
    fn eigenvector_quality() {
        let ctx = ProlateContext::new(30.0).unwrap();
        for n in [0, 1, 7, 20, 35] {
            let mode = ctx.mode(n).unwrap();
            let band = build_matrix(30.0, mode.parity, mode.dim).unwrap();
            let mut v = mode.coeffs.clone();
            v.resize(mode.dim, 0.0);
            let norm_a = band.diag.last().unwrap().abs();
            assert!(band.residual(mode.chi, &v) < 1e-8 * norm_a);
            let s: f64 = mode.coeffs.iter().map(|a| a * a).sum();
            assert!((s - 1.0).abs() < 1e-12);
            let big = mode.coeffs.iter().cloned().fold(f64::MIN, f64::max);
            let small = mode.coeffs.iter().cloned().fold(f64::MAX, f64::min);
            assert!(big >= -small);
        }
    }

    #[test]
    fn psi_shape() {
        let ctx = ProlateContext::new(10.0).unwrap();
        let m0 = ctx.mode(0).unwrap();
        assert!(m0.psi_at_zero.unwrap() > 0.0);
        let m4 = ctx.mode(4).unwrap();
        let grid: Vec<f64> = (1..4000).map(|i| -1.0 + i as f64 / 2000.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| psi_value(&m4, x).unwrap()).collect();
        let changes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, 4);
        let m3 = ctx.mode(3).unwrap();
        assert!(psi_value(&m3, 0.0).unwrap().abs() < 1e-12);
        assert!(psi_value(&m3, 1.5).is_err());
    }

    #[test]
    fn orthonormal_functions() {
        let ctx = ProlateContext::new(10.0).unwrap();
        let rule = gauss_legendre(80).unwrap();
        let m3 = ctx.mode(3).unwrap();
        let m5 = ctx.mode(5).unwrap();
        let cross = rule.integrate(|t| psi_value(&m3, t).unwrap() * psi_value(&m5, t).unwrap());
        assert!(cross.abs() < 1e-8);
        let norm = rule.integrate(|t| psi_value(&m5, t).unwrap().powi(2));
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn fixed_truncation_and_seeding() {
        let auto = ProlateContext::new(20.0).unwrap();
        let fixed = ProlateContext::with_truncation(20.0, Truncation::Fixed(60)).unwrap();
        assert!((auto.chi(9).unwrap() - fixed.chi(9).unwrap()).abs() < 1e-9);
        assert!(ProlateContext::with_truncation(20.0, Truncation::Fixed(4))
            .unwrap()
            .chi(40)
            .is_err());
        let seeded = ProlateContext::new(20.0).unwrap();
        seeded.seed_chi(9, auto.chi_entry(9).unwrap());
        assert_eq!(seeded.mode(9).unwrap().coeffs, auto.mode(9).unwrap().coeffs);
        assert_eq!(auto.chi_table().len(), 1);
    }

    #[test]
    fn rejects_bad_band_limit() {
        assert!(ProlateContext::new(0.0).is_err());
        assert!(ProlateContext::new(f64::NAN).is_err());
    }
}
