//! Legendre polynomials and Gauss–Legendre quadrature.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{ProlateError, Result};

fn check_interval(t: f64) -> Result<()> {
    if t.abs() <= 1.0 {
        Ok(())
    } else {
        Err(ProlateError::domain(format!(
            "Legendre argument {t} outside [-1, 1]"
        )))
    }
}

/// `P_k(t)` by upward three-term recurrence.
pub fn legendre_value(k: usize, t: f64) -> Result<f64> {
    check_interval(t)?;
    Ok(legendre_pair(k, t).0)
}

/// Returns `(P_k(t), P_{k-1}(t))`, with `P_{-1} = 0`.
fn legendre_pair(k: usize, t: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * t * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `P̄_k(t) = P_k(t) sqrt(k + 1/2)`, orthonormal on `[-1, 1]`.
pub fn normalized_legendre_value(k: usize, t: f64) -> Result<f64> {
    check_interval(t)?;
    Ok(legendre_pair(k, t).0 * (k as f64 + 0.5).sqrt())
}

/// Fills `out[j] = P̄_{parity + 2j}(t)` for `j < out.len()`.
///
/// This is the inner loop of every series evaluation of a prolate function,
/// so it skips the domain check.
pub(crate) fn normalized_legendre_same_parity(t: f64, parity: usize, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut deg = 0usize;
    for (j, slot) in out.iter_mut().enumerate() {
        let target = parity + 2 * j;
        while deg < target {
            let d = deg as f64;
            let next = ((2.0 * d + 1.0) * t * cur - d * prev) / (d + 1.0);
            prev = cur;
            cur = next;
            deg += 1;
        }
        *slot = cur * (target as f64 + 0.5).sqrt();
    }
}

/// `P_{2m}(0) = (-1)^m (2m-1)!!/(2m)!!` as a running product, `m = 0, 1, ...`.
fn even_values_at_zero(count: usize) -> impl Iterator<Item = f64> {
    (0..count).scan(1.0f64, |p, m| {
        if m > 0 {
            let mf = m as f64;
            *p *= -(2.0 * mf - 1.0) / (2.0 * mf);
        }
        Some(*p)
    })
}

/// `P̄_k(0)`; zero for odd `k`.
pub fn normalized_legendre_at_zero(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let p = even_values_at_zero(k / 2 + 1).last().unwrap_or(1.0);
    p * (k as f64 + 0.5).sqrt()
}

/// `P̄_{2j}(0)` for `j = 0..count`.
pub(crate) fn normalized_even_at_zero(count: usize) -> Vec<f64> {
    even_values_at_zero(count)
        .enumerate()
        .map(|(j, p)| p * (2.0 * j as f64 + 0.5).sqrt())
        .collect()
}

/// `P̄'_{2j+1}(0)` for `j = 0..count`, from `P'_{k}(0) = k P_{k-1}(0)`.
pub(crate) fn normalized_odd_derivative_at_zero(count: usize) -> Vec<f64> {
    even_values_at_zero(count)
        .enumerate()
        .map(|(j, p)| {
            let k = (2 * j + 1) as f64;
            k * p * (k + 0.5).sqrt()
        })
        .collect()
}

/// Derivative at zero of the normalized Legendre polynomial; zero for even `k`.
pub fn normalized_legendre_derivative_at_zero(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        return 0.0;
    }
    normalized_odd_derivative_at_zero(k / 2 + 1)[k / 2]
}

/// Nodes and weights of an `m`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f` on `[-1, 1]`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `m`-point Gauss–Legendre rule, nodes by Newton iteration from the
/// asymptotic initial guesses. Nodes come back in increasing order.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(ProlateError::domain("quadrature needs at least one node"));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    let half = m.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for iter in 0..100 {
            let (p, pm1) = legendre_pair(m, x);
            dp = mf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) || iter == 99 {
                let (p, pm1) = legendre_pair(m, x);
                dp = mf * (x * p - pm1) / (x * x - 1.0);
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = x;
        nodes[i] = -x;
        weights[m - 1 - i] = w;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `P̄_0 = sqrt(1/2)`.
pub const NORMALIZED_P0: f64 = FRAC_1_SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Degree-6 closed form: (231 t^6 - 315 t^4 + 105 t^2 - 5) / 16.
    fn p6_closed(t: f64) -> f64 {
        let t2 = t * t;
        (((231.0 * t2 - 315.0) * t2 + 105.0) * t2 - 5.0) / 16.0
    }

    #[test]
    fn low_degree_values() {
        assert_eq!(legendre_value(0, 0.3).unwrap(), 1.0);
        assert_eq!(legendre_value(1, -0.25).unwrap(), -0.25);
        let v = legendre_value(6, 0.7).unwrap();
        assert!((v - p6_closed(0.7)).abs() < 1e-14, "{v}");
    }

    #[test]
    fn domain_error_outside_interval() {
        assert!(matches!(
            legendre_value(3, 1.5),
            Err(ProlateError::Domain(_))
        ));
        assert!(normalized_legendre_value(2, -1.0000001).is_err());
    }

    #[test]
    fn normalized_special_values() {
        for t in [-0.9, 0.0, 0.4] {
            let v = normalized_legendre_value(0, t).unwrap();
            assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let expected = -0.5 * 2.5f64.sqrt();
        assert!((normalized_legendre_value(2, 0.0).unwrap() - expected).abs() < 1e-15);
        assert!((normalized_legendre_at_zero(0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(normalized_legendre_at_zero(1), 0.0);
        assert!((normalized_legendre_at_zero(2) - expected).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_matches_recurrence() {
        for k in 0..60 {
            let rec = normalized_legendre_value(k, 0.0).unwrap();
            assert!((normalized_legendre_at_zero(k) - rec).abs() < 1e-13, "k={k}");
        }
        // no overflow deep in the sequence
        let big = normalized_legendre_at_zero(200_000);
        assert!(big.is_finite() && big.abs() > 0.1);
    }

    #[test]
    fn derivative_at_zero_matches_finite_difference() {
        let h = 1e-6;
        for k in [1usize, 3, 5, 9, 15] {
            let fd = (normalized_legendre_value(k, h).unwrap()
                - normalized_legendre_value(k, -h).unwrap())
                / (2.0 * h);
            let d = normalized_legendre_derivative_at_zero(k);
            assert!((fd - d).abs() < 1e-7 * d.abs().max(1.0), "k={k}: {fd} vs {d}");
        }
        assert_eq!(normalized_legendre_derivative_at_zero(4), 0.0);
    }

    #[test]
    fn gauss_small_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);

        let r2 = gauss_legendre(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[0] + s).abs() < 1e-15 && (r2.nodes()[1] - s).abs() < 1e-15);
        assert!(r2.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
        // degree-3 exactness
        let cubic = r2.integrate(|t| t * t * t + 2.0 * t * t - t + 1.0);
        assert!((cubic - (4.0 / 3.0 + 2.0)).abs() < 1e-14);

        let r5 = gauss_legendre(5).unwrap();
        assert!((r5.integrate(|t| t.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn gauss_rule_invariants() {
        for m in 1..=40 {
            let r = gauss_legendre(m).unwrap();
            let total: f64 = r.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "m={m}");
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights().iter().all(|&w| w > 0.0));
            if m <= 20 {
                for &x in r.nodes() {
                    assert!(legendre_value(m, x).unwrap().abs() < 1e-14, "m={m} x={x}");
                }
            }
            for p in 0..(2 * m) {
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                let got = r.integrate(|t| t.powi(p as i32));
                assert!((got - exact).abs() < 1e-13, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn orthonormality_under_quadrature() {
        for j in 0..25 {
            for k in j..25 {
                let r = gauss_legendre(j.max(k) + 1).unwrap();
                let v = r.integrate(|t| {
                    normalized_legendre_value(j, t).unwrap() * normalized_legendre_value(k, t).unwrap()
                });
                let expected = if j == k { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-12, "j={j} k={k}: {v}");
            }
        }
        let r = gauss_legendre(6).unwrap();
        let v = r.integrate(|t| {
            normalized_legendre_value(3, t).unwrap() * normalized_legendre_value(5, t).unwrap()
        });
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn same_parity_fill_matches_pointwise() {
        let mut buf = vec![0.0; 12];
        normalized_legendre_same_parity(0.37, 1, &mut buf);
        for (j, v) in buf.iter().enumerate() {
            let want = normalized_legendre_value(2 * j + 1, 0.37).unwrap();
            assert!((v - want).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn recurrence_consistency(k in 1usize..200, t in -1.0f64..1.0) {
            let pkm1 = legendre_value(k - 1, t).unwrap();
            let pk = legendre_value(k, t).unwrap();
            let pkp1 = legendre_value(k + 1, t).unwrap();
            let kf = k as f64;
            let r = (kf + 1.0) * pkp1 - (2.0 * kf + 1.0) * t * pk + kf * pkm1;
            prop_assert!(r.abs() < 1e-12);
        }

        #[test]
        fn bounded_by_one(k in 0usize..300, t in -1.0f64..1.0) {
            prop_assert!(legendre_value(k, t).unwrap().abs() <= 1.0 + 1e-13);
        }
    }
}
