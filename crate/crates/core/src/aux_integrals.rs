//! The auxiliary integrals J_A(T, S) = ∫_T^S t^A e^{−t} dt and
//! E_A(T, S) = ∫_0^1 t^A e^{−T/t − S t} dt that carry every subordination
//! estimate in this crate, together with their closed-form two-sided
//! envelopes and a routine that calibrates envelope constants from samples.
//!
//! Both integrals are evaluated in the log domain so deep tails keep full
//! relative accuracy. J splits at the interior maximum t = A of its
//! integrand and reaches S = ∞ by window doubling; E is computed after the
//! substitution t = e^{−u}, which turns the endpoint t = 0 into a smooth
//! exponential tail, truncated once the integrand has fallen eighteen
//! orders of magnitude below its peak.
//!
//! The envelopes distinguish four parameter regimes for J (a narrow band,
//! a decaying tail, and two low-start forms) and a power / log / constant
//! trichotomy in A for both families. Lower and upper bounds share a ratio
//! constant C and carry separate exponential rates c_lower ≥ c_upper
//! wherever the two-sided comparison is of the weaker kind that allows a
//! different rate on each side.

use crate::error::{Error, Result};
use crate::log_domain::SignedLogValue;
use serde::{Deserialize, Serialize};
use crate::quadrature::{
    integrate_log, integrate_panels_log, integrate_to_infinity_log, Node, QuadConfig,
};

/// Thresholds of the J-envelope case split: the narrow-band case applies
/// when S ≤ beta·T, the low-start cases when T < gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    /// Band-width threshold, must exceed 1.
    pub beta: f64,
    /// Start-size threshold, must be positive.
    pub gamma: f64,
}

impl AuxParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta <= 1.0 {
            return Err(Error::Constraint(format!(
                "beta must be finite and exceed 1, got {}",
                self.beta
            )));
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return Err(Error::Constraint(format!(
                "gamma must be finite and positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

impl Default for AuxParams {
    fn default() -> Self {
        Self { beta: 2.0, gamma: 1.0 }
    }
}

/// Constants of a two-sided envelope: the certified bound reads
/// base·e^{−c_lower·d}/C ≤ value ≤ C·base·e^{−c_upper·d}, where d is the
/// decay scale of the active regime (zero where no exponential applies).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstants {
    /// Multiplicative ratio C ≥ 1 shared by both sides.
    pub c_ratio: f64,
    /// Exponential rate of the lower bound.
    pub c_lower: f64,
    /// Exponential rate of the upper bound, 0 < c_upper ≤ c_lower.
    pub c_upper: f64,
}

impl EnvelopeConstants {
    pub fn new(c_ratio: f64, c_lower: f64, c_upper: f64) -> Result<Self> {
        let c = Self { c_ratio, c_lower, c_upper };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c_ratio.is_finite() || self.c_ratio < 1.0 {
            return Err(Error::Constraint(format!(
                "ratio constant must be finite and at least 1, got {}",
                self.c_ratio
            )));
        }
        if !self.c_lower.is_finite() || !(self.c_upper > 0.0) || self.c_lower < self.c_upper {
            return Err(Error::Constraint(format!(
                "rates must satisfy c_lower >= c_upper > 0, got c_lower={}, c_upper={}",
                self.c_lower, self.c_upper
            )));
        }
        Ok(())
    }
}

/// The four mutually exclusive envelope regimes of J_A(T, S).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JRegime {
    /// S ≤ beta·T: the range is a band comparable to its left endpoint.
    NarrowBand,
    /// S > beta·T and T ≥ gamma: a genuine exponential tail.
    LargeStart,
    /// T < gamma and S ≥ beta·gamma: the range reaches well past gamma.
    SmallStartFar,
    /// T < gamma and S < beta·gamma: the whole range sits near zero.
    SmallStartNear,
}

/// Classify (T, S) into the unique J-envelope regime.
pub fn j_regime(t: f64, s: f64, aux: &AuxParams) -> JRegime {
    if s <= aux.beta * t {
        JRegime::NarrowBand
    } else if t >= aux.gamma {
        JRegime::LargeStart
    } else if s >= aux.beta * aux.gamma {
        JRegime::SmallStartFar
    } else {
        JRegime::SmallStartNear
    }
}

fn check_power(a: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("power A must be finite, got {a}")));
    }
    Ok(())
}

fn check_j_limits(t: f64, s: f64) -> Result<()> {
    if t.is_nan() || s.is_nan() {
        return Err(Error::Domain("integration limits must not be NaN".into()));
    }
    if !(0.0..f64::INFINITY).contains(&t) {
        return Err(Error::Domain(format!(
            "lower limit must be finite and nonnegative, got {t}"
        )));
    }
    if s < t {
        return Err(Error::Domain(format!(
            "upper limit {s} lies below the lower limit {t}"
        )));
    }
    Ok(())
}

fn check_e_args(t: f64, s: f64) -> Result<()> {
    for (name, v) in [("T", t), ("S", s)] {
        if !(0.0..f64::INFINITY).contains(&v) {
            return Err(Error::Domain(format!(
                "{name} must be finite and nonnegative, got {v}"
            )));
        }
    }
    Ok(())
}

/// J_A(T, S) = ∫_T^S t^A e^{−t} dt in the log domain, to relative 1e−10.
///
/// S may be +∞. Divergence happens exactly when T = 0 and A ≤ −1 (with
/// S > 0), and is reported as a +∞ value, not an error.
pub fn j_integral(a: f64, t: f64, s: f64) -> Result<SignedLogValue> {
    check_power(a)?;
    check_j_limits(t, s)?;
    if s == t {
        return Ok(SignedLogValue::ZERO);
    }
    if t == 0.0 && a <= -1.0 {
        return Ok(SignedLogValue::positive_infinity());
    }

    let cfg = QuadConfig { rel_tol: 1e-11, max_level: 9 };
    let peak = a.max(0.0);
    // Finite head [t, cut] split at the interior maximum; for S = ∞ the
    // cut is placed past the maximum so the window-doubled tail decays.
    let cut = if s.is_finite() { s } else { (peak + 2.0).max(t + 1.0) };
    let mut coarse = vec![t];
    if peak > t && peak < cut {
        coarse.push(peak);
    }
    coarse.push(cut);
    // Subdivide geometrically so no panel spans more than two decades;
    // power-law ramps across many decades otherwise cost a digit.
    let mut bps = vec![coarse[0]];
    for w in coarse.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x0 > 0.0 && x1 / x0 > 100.0 {
            let extra = ((x1 / x0).ln() / 100f64.ln()).ceil() as usize;
            let ratio = (x1 / x0).powf(1.0 / extra as f64);
            for k in 1..extra {
                bps.push(x0 * ratio.powi(k as i32));
            }
        }
        bps.push(x1);
    }
    let head = integrate_panels_log(
        &|idx: usize, n: &Node| {
            let log_t = if t == 0.0 && idx == 0 { n.log_from_left } else { n.x.ln() };
            SignedLogValue::from_log(a * log_t - n.x)
        },
        &bps,
        &cfg,
    );
    let head_value = if head.diverged {
        if t == 0.0 && a > -1.0 {
            // A borderline integrable power at 0 can trip the endpoint
            // heuristic; redo the head in the logarithmic variable.
            log_substituted_head(a, cut, &cfg)
        } else {
            // The integrand is nonnegative, so divergence means +∞.
            return Ok(SignedLogValue::positive_infinity());
        }
    } else {
        head.value
    };
    if s.is_finite() {
        return Ok(head_value);
    }
    let tail = integrate_to_infinity_log(
        &|n: &Node| SignedLogValue::from_log(a * n.x.ln() - n.x),
        cut,
         8.0,
        &cfg,
    );
    if tail.diverged {
        return Ok(SignedLogValue::positive_infinity());
    }
    Ok(head_value + tail.value)
}

/// ∫_0^cut t^A e^{−t} dt for A just above −1, via t = e^{−u}. In u the
/// integrand is t^{A+1} e^{−t}, a smooth bump peaking at t = A+1 and
/// decaying like e^{−(A+1)u}, which window doubling resolves even when
/// A + 1 is tiny.
fn log_substituted_head(a: f64, cut: f64, cfg: &QuadConfig) -> SignedLogValue {
    let g = |n: &Node| {
        let u = n.x;
        SignedLogValue::from_log(-(a + 1.0) * u - (-u).exp())
    };
    let u_lo = -cut.ln();
    let u_pk = -(a + 1.0).min(cut).ln().min(f64::INFINITY);
    let start = u_pk.max(u_lo);
    let mut total = SignedLogValue::ZERO;
    if start > u_lo {
        total = total + integrate_log(g, u_lo, start, cfg).value;
    }
    let width = (4.0 / (a + 1.0)).max(8.0);
    total + integrate_to_infinity_log(&g, start, width, cfg).value
}

/// E_A(T, S) = ∫_0^1 t^A e^{−T/t − S t} dt in the log domain, computed in
/// the variable u = log(1/t) on [0, U] with U chosen so the integrand has
/// dropped below 1e−18 of its peak.
///
/// Divergence happens exactly when T = 0 and A ≤ −1 and is reported as a
/// +∞ value, not an error.
pub fn e_integral(a: f64, t: f64, s: f64) -> Result<SignedLogValue> {
    check_power(a)?;
    check_e_args(t, s)?;
    if t == 0.0 && a <= -1.0 {
        return Ok(SignedLogValue::positive_infinity());
    }
    // t = e^{−u} gives E = ∫_0^∞ e^{−phi(u)} du with a convex exponent.
    let phi = |u: f64| (a + 1.0) * u + t * u.exp() + s * (-u).exp();
    let dphi = |u: f64| (a + 1.0) + t * u.exp() - s * (-u).exp();
    let ustar = if dphi(0.0) >= 0.0 {
        0.0
    } else {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while dphi(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        bisect_increasing(lo, hi, dphi)
    };
    let target = phi(ustar) + 42.0;
    let mut hi = ustar + 1.0;
    while phi(hi) < target {
        hi = ustar + 2.0 * (hi - ustar);
    }
    let u_max = bisect_increasing(ustar, hi, |u| phi(u) - target);

    let mut bps = vec![0.0];
    if ustar > 1e-9 && ustar < u_max - 1e-9 {
        bps.push(ustar);
    }
    bps.push(u_max);
    let cfg = QuadConfig { rel_tol: 1e-11, max_level: 9 };
    let out = integrate_panels_log(
        &|_, n: &Node| SignedLogValue::from_log(-phi(n.x)),
        &bps,
        &cfg,
    );
    Ok(out.value)
}

/// Bisection for the root of an increasing function with f(lo) < 0 ≤ f(hi).
fn bisect_increasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Log of the envelope base and the decay scale for J_A(T, S).
///
/// The base captures the regime's closed form: T^A(S−T) in the narrow
/// band (decay scale T), T^A e^{−T} for a large start (unit rate folded
/// into the base), and the A-trichotomy {T^{A+1}, 1+log⁺(1/T) or
/// log(S/T), 1 or S^{A+1}} in the two low-start regimes. An infinite base
/// encodes divergence of J itself.
pub fn j_envelope_shape(a: f64, t: f64, s: f64, aux: &AuxParams) -> Result<(f64, f64)> {
    check_power(a)?;
    check_j_limits(t, s)?;
    aux.validate()?;
    if s == t {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    let shape = match j_regime(t, s, aux) {
        JRegime::NarrowBand => (a * t.ln() + (s - t).ln(), t),
        JRegime::LargeStart => (a * t.ln() - t, 0.0),
        JRegime::SmallStartFar => {
            let base = if a < -1.0 {
                (a + 1.0) * t.ln()
            } else if a == -1.0 {
                (1.0 + (-t.ln()).max(0.0)).ln()
            } else {
                0.0
            };
            (base, 0.0)
        }
        JRegime::SmallStartNear => {
            let base = if a < -1.0 {
                (a + 1.0) * t.ln()
            } else if a == -1.0 {
                (s / t).ln().ln()
            } else {
                (a + 1.0) * s.ln()
            };
            (base, 0.0)
        }
    };
    Ok(shape)
}

/// Two-sided envelope for J_A(T, S): lower = base·e^{−c_lower·d}/C and
/// upper = C·base·e^{−c_upper·d} with (base, d) from [`j_envelope_shape`].
pub fn j_envelope(
    a: f64,
    t: f64,
    s: f64,
    aux: &AuxParams,
    consts: &EnvelopeConstants,
) -> Result<(SignedLogValue, SignedLogValue)> {
    consts.validate()?;
    let (base, decay) = j_envelope_shape(a, t, s, aux)?;
    let lc = consts.c_ratio.ln();
    Ok((
        SignedLogValue::from_log(base - lc - consts.c_lower * decay),
        SignedLogValue::from_log(base + lc - consts.c_upper * decay),
    ))
}

/// Log of the envelope base and the decay scale for E_A(T, S).
///
/// The decay scale is sqrt(T·(T∨S)); the base follows the A-trichotomy
/// T^{A+1} / 1+log⁺(1/(T(T∨S))) / (S∨gamma)^{−A−1}. An infinite base
/// encodes divergence of E itself.
pub fn e_envelope_shape(a: f64, t: f64, s: f64, gamma: f64) -> Result<(f64, f64)> {
    check_power(a)?;
    check_e_args(t, s)?;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Constraint(format!(
            "gamma must be finite and positive, got {gamma}"
        )));
    }
    let scale = (t * t.max(s)).sqrt();
    let base = if a < -1.0 {
        (a + 1.0) * t.ln()
    } else if a == -1.0 {
        (1.0 + (-(t * t.max(s)).ln()).max(0.0)).ln()
    } else {
        -(a + 1.0) * s.max(gamma).ln()
    };
    Ok((base, scale))
}

/// Two-sided envelope for E_A(T, S): lower = base·e^{−c_lower·d}/C and
/// upper = C·base·e^{−c_upper·d} with (base, d) from [`e_envelope_shape`].
pub fn e_envelope(
    a: f64,
    t: f64,
    s: f64,
    gamma: f64,
    consts: &EnvelopeConstants,
) -> Result<(SignedLogValue, SignedLogValue)> {
    consts.validate()?;
    let (base, scale) = e_envelope_shape(a, t, s, gamma)?;
    let lc = consts.c_ratio.ln();
    Ok((
        SignedLogValue::from_log(base - lc - consts.c_lower * scale),
        SignedLogValue::from_log(base + lc - consts.c_upper * scale),
    ))
}

/// Twenty-five candidate exponential rates, log-spaced over [1e−3, 10].
pub fn default_rate_grid() -> Vec<f64> {
    (0..25).map(|k| 10f64.powf(-3.0 + f64::from(k) / 6.0)).collect()
}

/// Outcome of [`calibrate_from_samples`]: fitted constants, the achieved
/// log ratio, and the indices of the samples that pin each side.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationFit {
    pub consts: EnvelopeConstants,
    /// log C actually required by the samples at the fitted rates.
    pub log_c: f64,
    /// Sample index binding the upper bound (largest log ratio after the
    /// upper rate is applied).
    pub argmax: usize,
    /// Sample index binding the lower bound.
    pub argmin: usize,
}

/// Fit envelope constants to samples of (log value − log base, decay
/// scale): choose rates c_lower ≥ c_upper from the grid and the smallest
/// C with base·e^{−c_lower·d}/C ≤ value ≤ C·base·e^{−c_upper·d} at every
/// sample. Among grids achieving the optimal C (within 1e−9 in log), the
/// largest c_upper and then the smallest c_lower are preferred, which
/// makes the two-sided statement strongest. Deterministic.
pub fn calibrate_from_samples(samples: &[(f64, f64)], rates: &[f64]) -> Result<CalibrationFit> {
    if samples.is_empty() {
        return Err(Error::Constraint("no samples to calibrate against".into()));
    }
    if rates.is_empty() || rates[0] <= 0.0 || rates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Constraint(
            "rate grid must be positive and strictly increasing".into(),
        ));
    }
    for &(r, d) in samples {
        if !r.is_finite() || !d.is_finite() || d < 0.0 {
            return Err(Error::Singular(format!(
                "sample (log ratio {r}, decay scale {d}) is not finite"
            )));
        }
    }
    // Requirement on log C per candidate rate, for each side separately.
    let m = rates.len();
    let mut upper_need = vec![(f64::NEG_INFINITY, 0usize); m];
    let mut lower_need = vec![(f64::NEG_INFINITY, 0usize); m];
    for (j, &c) in rates.iter().enumerate() {
        for (i, &(r, d)) in samples.iter().enumerate() {
            let u = r + c * d;
            if u > upper_need[j].0 {
                upper_need[j] = (u, i);
            }
            let l = -r - c * d;
            if l > lower_need[j].0 {
                lower_need[j] = (l, i);
            }
        }
    }
    let mut best = f64::INFINITY;
    for ju in 0..m {
        for jl in ju..m {
            best = best.min(upper_need[ju].0.max(lower_need[jl].0));
        }
    }
    let slack = best + 1e-9;
    let mut pick = None;
    'outer: for ju in (0..m).rev() {
        if upper_need[ju].0 > slack {
            continue;
        }
        for jl in ju..m {
            if lower_need[jl].0 <= slack {
                pick = Some((ju, jl));
                break 'outer;
            }
        }
    }
    let (ju, jl) = pick.expect("a minimizing rate pair exists");
    let log_c = upper_need[ju].0.max(lower_need[jl].0).max(0.0);
    if !log_c.exp().is_finite() {
        return Err(Error::Singular(format!(
            "calibration requires a non-representable ratio, log C = {log_c}"
        )));
    }
    Ok(CalibrationFit {
        consts: EnvelopeConstants::new(log_c.exp(), rates[jl], rates[ju])?,
        log_c,
        argmax: upper_need[ju].1,
        argmin: lower_need[jl].1,
    })
}
