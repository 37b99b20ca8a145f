//! Signed log-domain arithmetic.
//!
//! Kernel values in this crate span many hundreds of orders of magnitude:
//! Gaussian factors like exp(-coth(2t)(x^2+y^2)/2) underflow an f64 long
//! before the quantities multiplying them stop mattering. Every kernel value
//! is therefore carried as a sign together with the natural logarithm of its
//! absolute value, and sums are accumulated with log-sum-exp.

use serde::{Deserialize, Serialize};

/// A real number represented as `sign * exp(log_abs)`.
///
/// Invariants: `sign` is -1, 0, or +1, and `sign == 0` holds exactly when
/// `log_abs == f64::NEG_INFINITY`. A `log_abs` of `f64::INFINITY` with
/// nonzero sign encodes a divergent quantity (for instance a potential
/// kernel on the diagonal with sigma <= 1/2). `log_abs` is never NaN.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedLogValue {
    sign: i8,
    log_abs: f64,
}

impl SignedLogValue {
    pub const ZERO: Self = Self {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub const ONE: Self = Self {
        sign: 1,
        log_abs: 0.0,
    };

    /// Normalizing constructor. A `log_abs` of `-inf` forces sign 0 and vice
    /// versa.
    pub fn new(sign: i8, log_abs: f64) -> Self {
        assert!(!log_abs.is_nan(), "log-domain value constructed from NaN");
        assert!((-1..=1).contains(&sign), "sign must be -1, 0, or +1");
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign, log_abs }
        }
    }

    /// A positive value given by its natural log.
    pub fn from_log(log_abs: f64) -> Self {
        Self::new(1, log_abs)
    }

    pub fn from_real(v: f64) -> Self {
        assert!(!v.is_nan(), "log-domain value constructed from NaN");
        if v == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if v > 0.0 { 1 } else { -1 },
                log_abs: v.abs().ln(),
            }
        }
    }

    pub fn positive_infinity() -> Self {
        Self {
            sign: 1,
            log_abs: f64::INFINITY,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// True when the value encodes a divergent (infinite) quantity.
    pub fn is_divergent(&self) -> bool {
        self.log_abs == f64::INFINITY
    }

    /// Converts back to `f64`, saturating to `±inf` on overflow and to zero
    /// on underflow.
    pub fn to_real(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn abs(&self) -> Self {
        Self {
            sign: self.sign.abs(),
            log_abs: self.log_abs,
        }
    }

    /// Multiplication by a plain positive factor given in log form.
    pub fn scale_log(&self, log_factor: f64) -> Self {
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self::new(self.sign, self.log_abs + log_factor)
    }

    /// Raises a nonnegative value to the power `p > 0`.
    pub fn powf(&self, p: f64) -> Self {
        assert!(self.sign >= 0, "powf of a negative log-domain value");
        assert!(p > 0.0, "powf requires a positive exponent");
        if self.sign == 0 {
            return Self::ZERO;
        }
        Self::new(1, p * self.log_abs)
    }

    /// Addition that also reports the achieved relative accuracy.
    ///
    /// The second component is an estimate of the relative error of the
    /// result assuming both operands carry relative error `base_eps`:
    /// additions of like signs preserve accuracy, while subtractions of
    /// nearly equal magnitudes amplify it by (|a|+|b|)/|a+b|.
    pub fn add_with_accuracy(self, rhs: Self, base_eps: f64) -> (Self, f64) {
        if self.sign == 0 {
            return (rhs, base_eps);
        }
        if rhs.sign == 0 {
            return (self, base_eps);
        }
        if self.sign == rhs.sign {
            let log_abs = log_add_exp(self.log_abs, rhs.log_abs);
            return (Self::new(self.sign, log_abs), base_eps);
        }
        // Opposite signs: a true subtraction.
        if self.log_abs == rhs.log_abs {
            if self.log_abs == f64::INFINITY {
                panic!("indeterminate sum of two divergent values of opposite sign");
            }
            return (Self::ZERO, f64::INFINITY);
        }
        let (hi, lo) = if self.log_abs > rhs.log_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if hi.log_abs == f64::INFINITY {
            return (hi, base_eps);
        }
        let d = hi.log_abs - lo.log_abs; // > 0
        let em = (-d).exp();
        let log_abs = hi.log_abs + (-em).ln_1p();
        // (|a| + |b|) / |a| - |b|| = (1 + e^-d) / (1 - e^-d)
        let amplification = (1.0 + em) / (1.0 - em);
        (Self::new(hi.sign, log_abs), base_eps * amplification)
    }

    /// Total order by represented value.
    pub fn cmp_value(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.sign {
            1 => self.log_abs.partial_cmp(&other.log_abs).unwrap(),
            -1 => other.log_abs.partial_cmp(&self.log_abs).unwrap(),
            _ => Ordering::Equal,
        }
    }
}

impl std::ops::Neg for SignedLogValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }
}

impl std::ops::Mul for SignedLogValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // 0 * inf := 0, the measure-theoretic convention used by the
        // quadrature accumulators.
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self::new(self.sign * rhs.sign, self.log_abs + rhs.log_abs)
    }
}

impl std::ops::Add for SignedLogValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_with_accuracy(rhs, 0.0).0
    }
}

impl From<f64> for SignedLogValue {
    fn from(v: f64) -> Self {
        Self::from_real(v)
    }
}

/// log(e^a + e^b), stable for any ordering of the arguments.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == f64::INFINITY || b == f64::INFINITY {
        return f64::INFINITY;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(sinh x) for x > 0 without overflow or small-x cancellation.
pub fn ln_sinh(x: f64) -> f64 {
    assert!(x > 0.0, "ln_sinh requires a positive argument");
    if x < 1e-4 {
        // sinh x = x (1 + x^2/6 + x^4/120 + ...)
        x.ln() + (x * x / 6.0 * (1.0 + x * x / 20.0)).ln_1p()
    } else if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// log(cosh x), stable for large |x|.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
    } else {
        a.cosh().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_normalization() {
        assert_eq!(SignedLogValue::new(1, f64::NEG_INFINITY), SignedLogValue::ZERO);
        assert_eq!(SignedLogValue::new(0, 3.0), SignedLogValue::ZERO);
        assert_eq!(SignedLogValue::from_real(0.0), SignedLogValue::ZERO);
        assert!(SignedLogValue::ZERO.is_zero());
    }

    #[test]
    fn round_trip() {
        for &v in &[1.0, -2.5, 1e-160, -3.7e200, 0.0] {
            assert_relative_eq!(
                SignedLogValue::from_real(v).to_real(),
                v,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn addition_matches_reals() {
        let cases = [(2.0, 3.0), (-2.0, 3.0), (1e-30, -1.0), (5.0, -5.0), (-7.0, -0.1)];
        for (a, b) in cases {
            let got = (SignedLogValue::from_real(a) + SignedLogValue::from_real(b)).to_real();
            assert_relative_eq!(got, a + b, max_relative = 1e-12, epsilon = 1e-300);
        }
    }

    #[test]
    fn exact_cancellation_gives_zero() {
        let a = SignedLogValue::from_real(4.25);
        let (sum, acc) = a.add_with_accuracy(-a, 1e-16);
        assert!(sum.is_zero());
        assert!(acc.is_infinite());
    }

    #[test]
    fn subtraction_reports_amplification() {
        // 1.0 - 0.999 loses about three digits.
        let a = SignedLogValue::from_real(1.0);
        let b = SignedLogValue::from_real(-0.999);
        let (sum, acc) = a.add_with_accuracy(b, 1e-16);
        assert_relative_eq!(sum.to_real(), 0.001, max_relative = 1e-10);
        assert!(acc > 1e-13 && acc < 1e-11, "amplified accuracy {acc}");
    }

    #[test]
    fn multiplication_and_infinity() {
        let inf = SignedLogValue::positive_infinity();
        assert!(inf.is_divergent());
        assert_eq!((SignedLogValue::ZERO * inf), SignedLogValue::ZERO);
        let prod = inf * SignedLogValue::from_real(-2.0);
        assert_eq!(prod.sign(), -1);
        assert!(prod.is_divergent());
        assert_eq!((inf + SignedLogValue::from_real(1.0)).log_abs(), f64::INFINITY);
    }

    #[test]
    fn ln_sinh_regimes() {
        assert_relative_eq!(ln_sinh(1e-6), (1e-6f64).ln(), max_relative = 1e-9);
        assert_relative_eq!(ln_sinh(2.0), 2.0f64.sinh().ln(), max_relative = 1e-14);
        assert_relative_eq!(
            ln_sinh(800.0),
            800.0 - std::f64::consts::LN_2,
            max_relative = 1e-14
        );
        // seam continuity
        for &x in &[1e-4, 20.0] {
            assert_relative_eq!(ln_sinh(x * (1.0 - 1e-13)), ln_sinh(x * (1.0 + 1e-13)), epsilon = 1e-10);
        }
    }

    #[test]
    fn value_ordering() {
        use std::cmp::Ordering::*;
        let v = |x: f64| SignedLogValue::from_real(x);
        assert_eq!(v(-3.0).cmp_value(&v(2.0)), Less);
        assert_eq!(v(-3.0).cmp_value(&v(-2.0)), Less);
        assert_eq!(v(5.0).cmp_value(&v(2.0)), Greater);
        assert_eq!(v(0.0).cmp_value(&v(0.0)), Equal);
    }
}
