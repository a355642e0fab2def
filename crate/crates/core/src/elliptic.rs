//! Complete and incomplete elliptic integrals of the first and second kind,
//! in the modulus convention `F(k) = ∫ dt / sqrt(1 - k² sin² t)`.
//!
//! Complete integrals come from the arithmetic–geometric mean. The AGM also
//! yields `F - E` as a positive series, which is what the decay exponent
//! needs: for `k → 0` both `F` and `E` approach `π/2` and their difference
//! would otherwise lose digits.

use std::f64::consts::FRAC_PI_2;

use crate::error::{ProlateError, Result};
use crate::quadrature::integrate;

/// Elliptic modulus `k ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&k) {
            Ok(EllipticModulus(k))
        } else {
            Err(ProlateError::domain(format!("elliptic modulus {k} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(1 - k²)`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Complete integrals from one AGM run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompleteIntegrals {
    pub f: f64,
    pub e: f64,
    pub f_minus_e: f64,
    /// `(F - E) / k²`, finite at `k = 0` where it equals `π/4`.
    pub f_minus_e_over_k2: f64,
}

const AGM_MAX_ITER: usize = 64;

/// Runs the AGM on modulus `k` with complement `kp = sqrt(1 - k²)`, both
/// supplied so callers can form `kp` without cancellation.
pub fn complete_integrals_with_complement(k: f64, kp: f64) -> CompleteIntegrals {
    if kp == 0.0 {
        return CompleteIntegrals {
            f: f64::INFINITY,
            e: 1.0,
            f_minus_e: f64::INFINITY,
            f_minus_e_over_k2: f64::INFINITY,
        };
    }
    let mut a = 1.0f64;
    let mut b = kp;
    // d_n = c_n / k, with c_0 = k
    let mut d = 1.0f64;
    let mut scaled_sum = 0.5;
    let mut weight = 0.5;
    for _ in 0..AGM_MAX_ITER {
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        d = k * d * d / (4.0 * a);
        weight *= 2.0;
        let term = weight * d * d;
        scaled_sum += term;
        if (a - b).abs() <= 1e-16 * a && term <= 1e-17 * scaled_sum {
            break;
        }
    }
    let f = FRAC_PI_2 / a;
    let f_minus_e_over_k2 = f * scaled_sum;
    let f_minus_e = f_minus_e_over_k2 * k * k;
    CompleteIntegrals {
        f,
        e: f - f_minus_e,
        f_minus_e,
        f_minus_e_over_k2,
    }
}

pub fn complete_integrals(k: EllipticModulus) -> CompleteIntegrals {
    complete_integrals_with_complement(k.value(), k.complement())
}

/// `F(k)`; diverges at `k = 1`.
pub fn complete_f(k: f64) -> Result<f64> {
    let k = EllipticModulus::new(k)?;
    if k.value() == 1.0 {
        return Err(ProlateError::domain("F(k) diverges at k = 1"));
    }
    Ok(complete_integrals(k).f)
}

/// `E(k)`, including `E(1) = 1`.
pub fn complete_e(k: f64) -> Result<f64> {
    Ok(complete_integrals(EllipticModulus::new(k)?).e)
}

/// `F(k) - E(k)` without cancellation.
pub fn complete_f_minus_e(k: f64) -> Result<f64> {
    let k = EllipticModulus::new(k)?;
    if k.value() == 1.0 {
        return Err(ProlateError::domain("F(k) diverges at k = 1"));
    }
    Ok(complete_integrals(k).f_minus_e)
}

fn check_amplitude(y: f64) -> Result<()> {
    if (0.0..=FRAC_PI_2).contains(&y) {
        Ok(())
    } else {
        Err(ProlateError::domain(format!("amplitude {y} outside [0, π/2]")))
    }
}

const INCOMPLETE_TOL: f64 = 1e-14;

/// Incomplete integral of the first kind `F(y, k)`.
pub fn incomplete_f(y: f64, k: f64) -> Result<f64> {
    check_amplitude(y)?;
    let k = EllipticModulus::new(k)?.value();
    if y == FRAC_PI_2 {
        return complete_f(k);
    }
    let k2 = k * k;
    Ok(integrate(
        |t| {
            let s = t.sin();
            1.0 / (1.0 - k2 * s * s).sqrt()
        },
        0.0,
        y,
        INCOMPLETE_TOL,
    ))
}

/// Incomplete integral of the second kind `E(y, k)`.
pub fn incomplete_e(y: f64, k: f64) -> Result<f64> {
    check_amplitude(y)?;
    let k = EllipticModulus::new(k)?.value();
    let k2 = k * k;
    Ok(integrate(
        |t| {
            let s = t.sin();
            (1.0 - k2 * s * s).sqrt()
        },
        0.0,
        y,
        INCOMPLETE_TOL,
    ))
}

/// The decay exponent `sqrt(χ) (F(κ) - E(κ))` with `κ = sqrt((χ - c²)/χ)`.
///
/// The complement `κ' = c / sqrt(χ)` is formed directly from the inputs.
pub fn exponent_term(c: f64, chi: f64) -> Result<f64> {
    if !(c > 0.0) || chi < c * c {
        return Err(ProlateError::domain(format!(
            "exponent term needs chi >= c^2 (c = {c}, chi = {chi})"
        )));
    }
    let root = chi.sqrt();
    let kp = (c / root).min(1.0);
    let kappa = ((chi - c * c) / chi).sqrt();
    Ok(root * complete_integrals_with_complement(kappa, kp).f_minus_e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn quad_f(k: f64) -> f64 {
        integrate(|t| 1.0 / (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15)
    }

    fn quad_e(k: f64) -> f64 {
        integrate(|t| (1.0 - k * k * t.sin().powi(2)).sqrt(), 0.0, FRAC_PI_2, 1e-15)
    }

    #[test]
    fn special_values() {
        assert!((complete_f(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((complete_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(complete_e(1.0).unwrap(), 1.0);
        assert!(complete_f(1.0).is_err());
        assert!(complete_f(1.2).is_err());
        assert!(complete_e(-0.1).is_err());
    }

    #[test]
    fn agm_matches_quadrature() {
        for i in 1..40 {
            let k = i as f64 / 40.0;
            let f = complete_f(k).unwrap();
            let e = complete_e(k).unwrap();
            assert!(((f - quad_f(k)) / f).abs() < 1e-12, "k={k}");
            assert!(((e - quad_e(k)) / e).abs() < 1e-12, "k={k}");
        }
        let f = complete_f(0.5).unwrap();
        assert!((f - quad_f(0.5)).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_modulus() {
        let mut prev_f = 0.0;
        let mut prev_e = f64::INFINITY;
        for i in 0..100 {
            let k = i as f64 / 100.0;
            let f = complete_f(k).unwrap();
            let e = complete_e(k).unwrap();
            assert!(f > prev_f && e < prev_e);
            prev_f = f;
            prev_e = e;
        }
    }

    #[test]
    fn f_minus_e_lower_bound() {
        for i in 1..200 {
            let k = i as f64 / 200.0;
            let d = complete_f_minus_e(k).unwrap();
            assert!(d > PI / 4.0 * k * k, "k={k}");
            let direct = complete_f(k).unwrap() - complete_e(k).unwrap();
            assert!((d - direct).abs() < 1e-13 * d.max(1e-3) + 1e-15);
        }
    }

    #[test]
    fn near_unit_modulus_expansion() {
        // E(sqrt(1 - k²)) = 1 + (-1/4 + ln 2 - ln(k)/2) k² + O(k⁴ ln k)
        for k in [1e-3f64, 1e-4, 1e-5] {
            let kp = k; // the complementary modulus is the small one here
            let modulus = ((1.0 - kp) * (1.0 + kp)).sqrt();
            let e = complete_integrals_with_complement(modulus, kp).e;
            let approx = 1.0 + (-0.25 + LN_2 - k.ln() / 2.0) * k * k;
            assert!((e - approx).abs() < 1e-8, "k={k}: {e} vs {approx}");
        }
    }

    #[test]
    fn incomplete_special_cases() {
        for k in [0.0, 0.3, 0.9] {
            let full = incomplete_f(FRAC_PI_2, k).unwrap();
            assert!((full - complete_f(k).unwrap()).abs() < 1e-14);
            let e_full = incomplete_e(FRAC_PI_2, k).unwrap();
            assert!((e_full - complete_e(k).unwrap()).abs() < 1e-13);
        }
        for y in [0.0, 0.4, 1.2] {
            assert!((incomplete_e(y, 0.0).unwrap() - y).abs() < 1e-15);
        }
        assert!(incomplete_f(2.0, 0.5).is_err());
        assert!(incomplete_e(1.0, 1.5).is_err());
    }

    #[test]
    fn incomplete_sine_substitution_agrees() {
        let (y, k) = (1.0f64, 0.6f64);
        let upper = y.sin();
        let f_alg = integrate(
            |x| 1.0 / ((1.0 - x * x) * (1.0 - k * k * x * x)).sqrt(),
            0.0,
            upper,
            1e-15,
        );
        let e_alg = integrate(
            |x| ((1.0 - k * k * x * x) / (1.0 - x * x)).sqrt(),
            0.0,
            upper,
            1e-15,
        );
        assert!((incomplete_f(y, k).unwrap() - f_alg).abs() < 1e-12);
        assert!((incomplete_e(y, k).unwrap() - e_alg).abs() < 1e-12);
    }

    #[test]
    fn exponent_term_basics() {
        assert_eq!(exponent_term(10.0, 100.0).unwrap(), 0.0);
        assert!(exponent_term(10.0, 99.0).is_err());
        let mut prev = 0.0;
        for i in 1..50 {
            let chi = 1e4 * (1.0 + i as f64 * 0.05);
            let v = exponent_term(100.0, chi).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn exponent_term_theta_form() {
        // (F - E)(κ) = (χ - c²)/(c sqrt χ) ∫ sin²θ / sqrt(1 + ((χ - c²)/c²) cos²θ) dθ
        for (c, ratio) in [(10.0f64, 1.3f64), (100.0, 1.01), (1000.0, 2.5), (50.0, 4.9)] {
            let chi = ratio * c * c;
            let v2 = (chi - c * c) / (c * c);
            let g = integrate(
                |t| t.sin().powi(2) / (1.0 + v2 * t.cos().powi(2)).sqrt(),
                0.0,
                FRAC_PI_2,
                1e-15,
            );
            let rhs = (chi - c * c) / (c * chi.sqrt()) * g;
            let lhs = exponent_term(c, chi).unwrap() / chi.sqrt();
            assert!(((lhs - rhs) / rhs).abs() < 1e-10, "c={c} ratio={ratio}");
        }
    }
}
