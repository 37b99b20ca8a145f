//! Heat kernels of the Laguerre, Hermite, and Dunkl-Laguerre operators.
//!
//! All three kernels are evaluated in the log domain through exponent
//! algebra that never subtracts two large quantities: the combination
//! coth(2t)(x^2+y^2)/2 - xy/sinh(2t) that appears on the diagonal is
//! rewritten as the manifestly positive
//!
//!   Q = ((x-y)^2 + 2 sinh(t)^2 (x^2+y^2)) / (2 sinh 2t),
//!
//! and the modified Bessel factors enter exponentially scaled.

use crate::error::{Error, Result};
use crate::log_domain::{ln_sinh, SignedLogValue};
use crate::special_functions::{
    bessel_i_scaled, bessel_ratio, generalized_hermite_fn, laguerre_fn, log_gamma, phi_alpha,
    psi_alpha_scaled,
};

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

/// The positive diagonal exponent Q described in the module header; `x` and
/// `y` may be any reals (the caller passes |x|, |y| when the product is
/// negative).
fn stable_exponent(t: f64, x: f64, y: f64) -> f64 {
    // Q = (x-y)^2/(2 sinh 2t) + tanh(t)(x^2+y^2)/2, an exact rewrite of
    // [(x-y)^2 + 2 sinh^2(t)(x^2+y^2)]/(2 sinh 2t) that survives sinh
    // overflow at large t.
    let d = x - y;
    let s2 = (2.0 * t).sinh();
    let head = if s2.is_finite() { d * d / (2.0 * s2) } else { 0.0 };
    head + 0.5 * t.tanh() * (x * x + y * y)
}

/// Heat kernel of the Laguerre differential operator on (0, infinity)
/// against the measure x^{2a+1} dx:
///
///   G_t^a(x,y) = (sinh 2t)^{-1} exp(-coth(2t)(x^2+y^2)/2)
///                (xy)^{-a} I_a(xy / sinh 2t),
///
/// extended by continuity to the axes x = 0, y = 0. Always positive.
pub fn laguerre_heat(alpha: f64, t: f64, x: f64, y: f64) -> Result<SignedLogValue> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("type parameter must exceed -1, got {alpha}")));
    }
    check_time(t)?;
    if x < 0.0 || y < 0.0 || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("points must lie in [0, infinity), got ({x}, {y})")));
    }
    let ls2 = ln_sinh(2.0 * t);
    let log_u = (x * y).ln() - ls2;
    if x == 0.0 || y == 0.0 || log_u <= -20.0 {
        // (xy)^{-a} I_a(xy/s) -> (2 sinh 2t)^{-a} / Gamma(a+1); for
        // log u <= -20 the limit agrees with the Bessel series to e^{-40}
        // relative and avoids underflowing u itself. coth(2t) can overflow
        // at subnormal t, where inf * 0 must still read as zero exponent.
        let ssq = x * x + y * y;
        let e = if ssq == 0.0 { 0.0 } else { 0.5 / (2.0 * t).tanh() * ssq };
        let log = -ls2 - e - alpha * (std::f64::consts::LN_2 + ls2) - log_gamma(alpha + 1.0);
        return Ok(SignedLogValue::from_log(log));
    }
    let q = stable_exponent(t, x, y);
    if log_u >= 500.0 {
        // u is past f64 range; the scaled Bessel factor is (2 pi u)^{-1/2}
        // to e^{-500} relative.
        let log = -ls2 - q - alpha * (x * y).ln()
            - 0.5 * ((2.0 * std::f64::consts::PI).ln() + log_u);
        return Ok(SignedLogValue::from_log(log));
    }
    let u = log_u.exp();
    let log = -ls2 - q - alpha * (x * y).ln() + bessel_i_scaled(alpha, u).log_abs();
    Ok(SignedLogValue::from_log(log))
}

/// Hermite (harmonic oscillator) heat kernel on the real line:
///
///   G_t(x,y) = (2 pi sinh 2t)^{-1/2}
///              exp(-(tanh(t)(x+y)^2 + coth(t)(x-y)^2) / 4).
pub fn hermite_heat(t: f64, x: f64, y: f64) -> Result<SignedLogValue> {
    check_time(t)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("points must be finite, got ({x}, {y})")));
    }
    let s = x + y;
    let d = x - y;
    let log = -0.5 * ((2.0 * std::f64::consts::PI).ln() + ln_sinh(2.0 * t))
        - 0.25 * (t.tanh() * s * s + d * d / t.tanh());
    Ok(SignedLogValue::from_log(log))
}

/// Heat kernel of the Dunkl harmonic oscillator on the real line against
/// |x|^{2a+1} dx:
///
///   G_t^{a,D}(x,y) = (1/2) (sinh 2t)^{-a-1}
///                    exp(-coth(2t)(x^2+y^2)/2) Phi_a(xy / sinh 2t),
///
/// where Phi_a(u) = |u|^{-a} (I_a(|u|) + sgn(u) I_{a+1}(|u|)). Positive for
/// a >= -1/2; for -1 < a < -1/2 it takes negative values at some points
/// with xy < 0. At a = -1/2 it coincides with the Hermite kernel.
pub fn dunkl_heat(alpha: f64, t: f64, x: f64, y: f64) -> Result<SignedLogValue> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("type parameter must exceed -1, got {alpha}")));
    }
    check_time(t)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("points must be finite, got ({x}, {y})")));
    }
    let ls2 = ln_sinh(2.0 * t);
    let pref = -std::f64::consts::LN_2 - (alpha + 1.0) * ls2;
    let p = x * y;
    let log_u = p.abs().ln() - ls2;
    if p == 0.0 || log_u <= -20.0 {
        let ssq = x * x + y * y;
        let e = if ssq == 0.0 { 0.0 } else { 0.5 / (2.0 * t).tanh() * ssq };
        let log = pref - e + phi_alpha(alpha, 0.0).log_abs();
        return Ok(SignedLogValue::from_log(log));
    }
    let q = stable_exponent(t, x.abs(), y.abs());
    if p > 0.0 {
        if log_u >= 500.0 {
            // Both Bessel orders carry the same (2 pi u)^{-1/2} weight at
            // this size, hence the extra log 2.
            let log = pref - q - alpha * log_u + std::f64::consts::LN_2
                - 0.5 * ((2.0 * std::f64::consts::PI).ln() + log_u);
            return Ok(SignedLogValue::from_log(log));
        }
        // Phi contributes |u|^{-a} I_a (1 + r) with r = I_{a+1}/I_a; the
        // e^{u} of the unscaled Bessel cancels into Q.
        let u = log_u.exp();
        let r = bessel_ratio(alpha, u);
        let log = pref - q - alpha * u.ln() + bessel_i_scaled(alpha, u).log_abs() + r.ln_1p();
        Ok(SignedLogValue::from_log(log))
    } else if log_u >= 200.0 {
        // I_a - I_{a+1} ~ ((a+1/2)/u) I_a to e^{-200} relative; at a = -1/2
        // the difference is O(e^{-2u}), an exact zero at this size.
        let nu = alpha + 0.5;
        if nu == 0.0 {
            return Ok(SignedLogValue::ZERO);
        }
        let log = pref - q - alpha * log_u + nu.abs().ln() - log_u
            - 0.5 * ((2.0 * std::f64::consts::PI).ln() + log_u);
        Ok(SignedLogValue::new(if nu > 0.0 { 1 } else { -1 }, log))
    } else {
        // xy < 0: Phi(u) = |u|^{-a} Psi_a(|u|), which changes sign for
        // a < -1/2; the scaled e^{-u} Psi_a folds the unscaled Bessel
        // growth into Q, so the remaining exponential factor is e^{-Q}.
        let u = log_u.exp();
        let psi = psi_alpha_scaled(alpha, u);
        if psi.is_zero() {
            return Ok(SignedLogValue::ZERO);
        }
        let log = pref - q - alpha * u.ln() + psi.log_abs();
        Ok(SignedLogValue::new(psi.sign(), log))
    }
}

/// Truncated spectral expansion of the Laguerre heat kernel,
/// sum_n e^{-(4n+2a+2) t} l_n^a(x) l_n^a(y); converges rapidly for t
/// bounded away from zero and serves as an independent cross-check of the
/// closed form.
pub fn laguerre_heat_series(alpha: f64, t: f64, x: f64, y: f64, n_terms: usize) -> f64 {
    (0..n_terms)
        .map(|n| {
            let lambda = 4.0 * n as f64 + 2.0 * alpha + 2.0;
            (-lambda * t).exp() * laguerre_fn(n, alpha, x) * laguerre_fn(n, alpha, y)
        })
        .sum()
}

/// Truncated spectral expansion of the Dunkl heat kernel,
/// sum_n e^{-(2n+2a+2) t} h_n^a(x) h_n^a(y).
pub fn dunkl_heat_series(alpha: f64, t: f64, x: f64, y: f64, n_terms: usize) -> f64 {
    (0..n_terms)
        .map(|n| {
            let lambda = 2.0 * n as f64 + 2.0 * alpha + 2.0;
            (-lambda * t).exp()
                * generalized_hermite_fn(n, alpha, x)
                * generalized_hermite_fn(n, alpha, y)
        })
        .sum()
}
