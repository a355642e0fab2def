//! Sign plus natural-log magnitude representation.
//!
//! Eigenvalues in the tail of the prolate spectrum fall far below anything a
//! plain `f64` can carry with relative accuracy, and several bound prefactors
//! grow just as fast. `LogScaledReal` keeps the sign separately and stores
//! `ln |x|`, so products are additions and sums use a max-shift.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaledReal {
    sign: i8,
    log_abs: f64,
}

impl LogScaledReal {
    pub const ZERO: LogScaledReal = LogScaledReal {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogScaledReal = LogScaledReal {
        sign: 1,
        log_abs: 0.0,
    };

    /// Builds a value from a sign and `ln |x|`. A sign of zero or a log of
    /// `-inf` both produce zero.
    pub fn from_parts(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogScaledReal {
            sign: sign.signum(),
            log_abs,
        }
    }

    /// Positive number with the given natural log.
    pub fn from_log(log_abs: f64) -> Self {
        Self::from_parts(1, log_abs)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogScaledReal {
                sign: 1,
                log_abs: x.ln(),
            }
        } else {
            LogScaledReal {
                sign: -1,
                log_abs: (-x).ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `ln |x|`; `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogScaledReal {
                sign: 1,
                log_abs: self.log_abs,
            }
        }
    }

    /// Converts back to `f64`; saturates to zero or infinity outside the
    /// representable range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp(),
        }
    }

    pub fn powf(self, p: f64) -> Self {
        match self.sign {
            0 if p > 0.0 => Self::ZERO,
            0 => LogScaledReal::from_log(f64::INFINITY),
            1 => Self::from_log(self.log_abs * p),
            _ => panic!("fractional power of a negative LogScaledReal"),
        }
    }

    pub fn sqrt(self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }
}

impl From<f64> for LogScaledReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Mul for LogScaledReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogScaledReal {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs + rhs.log_abs,
        }
    }
}

impl Mul<f64> for LogScaledReal {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self * Self::from_f64(rhs)
    }
}

impl Div for LogScaledReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(rhs.sign != 0, "division of LogScaledReal by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        LogScaledReal {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs - rhs.log_abs,
        }
    }
}

impl Neg for LogScaledReal {
    type Output = Self;
    fn neg(self) -> Self {
        LogScaledReal {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }
}

impl Add for LogScaledReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= rhs.log_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let t = (small.log_abs - big.log_abs).exp();
        if big.sign == small.sign {
            LogScaledReal {
                sign: big.sign,
                log_abs: big.log_abs + t.ln_1p(),
            }
        } else if t == 1.0 {
            Self::ZERO
        } else {
            LogScaledReal {
                sign: big.sign,
                log_abs: big.log_abs + (-t).ln_1p(),
            }
        }
    }
}

impl Sub for LogScaledReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl PartialOrd for LogScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.log_abs.partial_cmp(&other.log_abs),
                _ => other.log_abs.partial_cmp(&self.log_abs),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Display for LogScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let sign = if s < 0 { "-" } else { "" };
                write!(f, "{sign}exp({})", self.log_abs)
            }
        }
    }
}

impl std::iter::Sum for LogScaledReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl std::iter::Product for LogScaledReal {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |acc, x| acc * x)
    }
}
