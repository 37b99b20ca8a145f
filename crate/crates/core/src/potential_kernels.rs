//! Potential kernels obtained by subordinating the heat kernels in time,
//! together with their sharp two-sided envelopes and envelope calibration.
//!
//! For a heat kernel `G_t` the potential kernel of order `sigma > 0` is
//!
//! ```text
//!     K(x, y) = Gamma(sigma)^{-1} * int_0^inf G_t(x, y) t^{sigma - 1} dt.
//! ```
//!
//! Four kernels are exposed through [`KernelKind`]: the convolution-type
//! Laguerre kernel, its Hermite-type variant `(xy)^{alpha + 1/2} K`, the
//! Dunkl kernel on the whole real line, and an auxiliary kernel built from
//! the Gaussian oscillator kernel with a matching weight (this last one is
//! kept unnormalised, without the `Gamma(sigma)` factor).
//!
//! The time integral is evaluated in the variable `s = log t`.  The
//! integrand is unimodal up to at most one sign change, so the support is
//! bracketed by expanding outwards from a small set of analytic anchors
//! (the product scale where `sinh 2t ~ xy`, the unit time scale, the ridge
//! created by the cross term when `|x - y| (x + y)` is large, and the
//! power-law tail scale `sigma / (2 alpha + 2)`) until the samples drop
//! sixty e-folds below the running peak.
//!
//! Envelope functions return `(lower, upper)` pairs in the signed-log
//! domain; they take their multiplicative constant and exponential decay
//! rates from an [`EnvelopeConstants`] value, which [`calibrate_envelope`]
//! fits from kernel samples on a grid.

use crate::aux_integrals::{calibrate_from_samples, default_rate_grid, e_integral, j_integral};
pub use crate::aux_integrals::EnvelopeConstants;
use crate::error::{Error, Result};
use crate::heat_kernels::{dunkl_heat, hermite_heat, laguerre_heat};
use crate::log_domain::{log_add_exp, SignedLogValue};
use crate::params::{GridSpec, Params};
use crate::quadrature::{integrate_panels_log, QuadConfig};
use crate::special_functions::{log_gamma, p_of};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which subordinated kernel to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Laguerre kernel against the measure `x^{2 alpha + 1} dx`; needs
    /// `x, y > 0`.
    Convolution,
    /// Hermite-type kernel `(xy)^{alpha + 1/2}` times the convolution one;
    /// needs `x, y > 0`.
    HermiteType,
    /// Dunkl kernel on the real line; `x`, `y` may have either sign and the
    /// kernel itself may be negative when `alpha < -1/2` and `xy < 0`.
    Dunkl,
    /// Auxiliary kernel: the Gaussian oscillator kernel times the weight
    /// `(sinh 2t / xy  min  1) (xy  max  sinh 2t)^{-alpha - 1/2}`, without
    /// the `Gamma(sigma)` normalisation; needs `x, y > 0`.
    DunklAux,
}

/// Envelope family accepted by [`calibrate_envelope`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeFamily {
    /// Two-region envelope of the convolution-type kernel.
    Conv,
    /// Four-case envelope of the Dunkl kernel (requires `alpha > -1/2`).
    Dunkl,
    /// Oscillator-side envelope of the Dunkl kernel at `alpha = -1/2`.
    HermiteOsc,
    /// Sandwich by an exponential term plus incomplete-Gamma-type and
    /// Gaussian-tail integrals; applies to `Convolution` and `DunklAux`.
    JeSplit,
}

/// Outcome of calibrating an envelope over a grid.
///
/// `min_ratio` and `max_ratio` are the extreme values of
/// `log K - log shape` before any exponential decay is compensated, so
/// `min_ratio <= max_ratio` always holds; `fitted` carries the constants
/// after the decay rates have been chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Grid point attaining `min_ratio`.
    pub argmin: (f64, f64),
    /// Grid point attaining `max_ratio`.
    pub argmax: (f64, f64),
    pub fitted: EnvelopeConstants,
    pub grid: GridSpec,
}

fn check_point(kind: KernelKind, x: f64, y: f64) -> Result<()> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!(
            "kernel arguments must be finite, got ({x}, {y})"
        )));
    }
    match kind {
        KernelKind::Dunkl => Ok(()),
        _ => {
            if x > 0.0 && y > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{kind:?} kernel requires x, y > 0, got ({x}, {y})"
                )))
            }
        }
    }
}

/// Points where the time integral diverges and the kernel is `+inf` by
/// convention: the diagonal when `sigma <= 1/2` (for the Dunkl kernel only
/// its positive-product part) and the Dunkl origin when `sigma <= alpha + 1`.
fn diagonal_divergent(kind: KernelKind, params: &Params, x: f64, y: f64) -> bool {
    match kind {
        KernelKind::Dunkl => {
            if x == 0.0 && y == 0.0 {
                params.sigma <= params.alpha + 1.0
            } else {
                x == y && x != 0.0 && params.sigma <= 0.5
            }
        }
        _ => x == y && params.sigma <= 0.5,
    }
}

/// Heat kernel factor of the subordination integrand at time `t`.
fn heat_factor(kind: KernelKind, alpha: f64, t: f64, x: f64, y: f64) -> Result<SignedLogValue> {
    match kind {
        KernelKind::Convolution => laguerre_heat(alpha, t, x, y),
        KernelKind::HermiteType => {
            let g = laguerre_heat(alpha, t, x, y)?;
            Ok(g.scale_log((alpha + 0.5) * (x * y).ln()))
        }
        KernelKind::Dunkl => dunkl_heat(alpha, t, x, y),
        KernelKind::DunklAux => {
            let g = hermite_heat(t, x, y)?;
            let ln_xy = (x * y).ln();
            let ls2 = crate::log_domain::ln_sinh(2.0 * t);
            // (sinh 2t / xy min 1)(xy max sinh 2t)^{-alpha - 1/2} in log form.
            let lw = if ls2 <= ln_xy {
                ls2 - ln_xy - (alpha + 0.5) * ln_xy
            } else {
                -(alpha + 0.5) * ls2
            };
            Ok(g.scale_log(lw))
        }
    }
}

/// Expands outwards from the anchor window until the integrand has dropped
/// sixty e-folds below its peak on both sides, then trims to the samples
/// within fifty e-folds.  Returns `(s_lo, s_hi)` in the `s = log t`
/// variable.
fn bracket_support<F: Fn(f64) -> f64>(f: &F, anchors: &[f64]) -> Result<(f64, f64)> {
    const STEP: f64 = 0.25;
    const KEEP: f64 = 50.0;
    const STOP: f64 = 60.0;
    let mut lo0 = f64::INFINITY;
    let mut hi0 = f64::NEG_INFINITY;
    for &a in anchors {
        lo0 = lo0.min(a);
        hi0 = hi0.max(a);
    }
    lo0 -= 3.0;
    hi0 += 3.0;
    let n = ((hi0 - lo0) / STEP).ceil() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let mut peak = f64::NEG_INFINITY;
    for i in 0..=n {
        let s = lo0 + (hi0 - lo0) * i as f64 / n as f64;
        let v = f(s);
        peak = peak.max(v);
        samples.push((s, v));
    }
    for dir in [-1.0, 1.0] {
        let mut edge = if dir < 0.0 { lo0 } else { hi0 };
        let mut width = 2.0f64;
        let mut settled = false;
        for _ in 0..400 {
            let mut batch_max = f64::NEG_INFINITY;
            for k in 1..=8 {
                let s = edge + dir * width * k as f64 / 8.0;
                let v = f(s);
                peak = peak.max(v);
                batch_max = batch_max.max(v);
                samples.push((s, v));
            }
            edge += dir * width;
            if batch_max < peak - STOP {
                settled = true;
                break;
            }
            width = (width * 1.6).min(512.0);
        }
        if !settled {
            return Err(Error::Singular(
                "subordination integrand does not decay within the scanned range".into(),
            ));
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(s, v) in &samples {
        if v >= peak - KEEP {
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    Ok((lo - 0.5, hi + 0.5))
}

/// Locates sign changes of the integrand by a coarse scan plus bisection.
/// Only the Dunkl kernel with `xy < 0` and `alpha < -1/2` can produce one.
fn sign_crossings<F: Fn(f64) -> SignedLogValue>(f: &F, lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / 0.25).ceil().max(4.0) as usize;
    let mut out = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for i in 0..=n {
        let s = lo + (hi - lo) * i as f64 / n as f64;
        let sg = f(s).sign();
        if sg == 0 {
            continue;
        }
        if let Some((ps, psg)) = prev {
            if psg != sg {
                let (mut a, mut b) = (ps, s);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    let ms = f(m).sign();
                    if ms == 0 {
                        a = m;
                        b = m;
                        break;
                    } else if ms == psg {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
        prev = Some((s, sg));
    }
    out
}

/// Evaluates the potential kernel of order `params.sigma` at `(x, y)`.
///
/// On the divergent set described in [`diagonal_divergent`] the returned
/// value is `+inf` by convention.  Everywhere else the time integral is
/// computed in `s = log t` over panels separated at the analytic anchors
/// and at any sign change of the integrand, to the relative accuracy
/// requested in `quad`.
pub fn potential_kernel(
    kind: KernelKind,
    params: &Params,
    x: f64,
    y: f64,
    quad: &QuadConfig,
) -> Result<SignedLogValue> {
    check_point(kind, x, y)?;
    if diagonal_divergent(kind, params, x, y) {
        return Ok(SignedLogValue::positive_infinity());
    }
    let alpha = params.alpha;
    let sigma = params.sigma;
    let integrand = move |s: f64| -> SignedLogValue {
        let t = s.exp();
        if t == 0.0 || !t.is_finite() {
            return SignedLogValue::ZERO;
        }
        match heat_factor(kind, alpha, t, x, y) {
            Ok(g) => g.scale_log(sigma * s),
            Err(_) => SignedLogValue::ZERO,
        }
    };

    let mut anchors = vec![0.0];
    let prod = x * y;
    if prod != 0.0 {
        anchors.push(p_of(prod.abs()).ln());
    }
    let d = (x - y).abs();
    let ssq = x * x + y * y;
    if d > 0.0 && ssq > 0.0 {
        // Cross-term ridge: when |x - y| (x + y) is large the integrand
        // has a spike of width ~ (2 ssq)^{-1/4} d^{-1/2} in log time near
        // the saddle of (x-y)^2/(2 sinh 2t) + tanh(t)(x^2+y^2)/2.  The
        // saddle gets its own anchor and, when the spike is narrow, a
        // graded ladder of cuts at multiples of its width, so no panel
        // hides the spike in its interior.
        let u = d * (2.0 / ssq).sqrt();
        let s_star = (0.5 * u.asinh()).ln();
        anchors.push(s_star);
        let width = 2.0 / ((2.0 * ssq).powf(0.25) * d.sqrt());
        if width < 0.1 {
            let mut c = width;
            while c < 1.0 {
                anchors.push(s_star - c);
                anchors.push(s_star + c);
                c *= 2.0;
            }
        }
    }
    // Tail scale of t^{sigma - 1} e^{-(2 alpha + 2) t}.
    anchors.push((sigma / (2.0 * alpha + 2.0)).ln());

    let (s_lo, s_hi) = bracket_support(&|s| integrand(s).log_abs(), &anchors)?;

    let mut cuts = vec![s_lo, s_hi];
    for &a in &anchors {
        if a > s_lo + 1e-6 && a < s_hi - 1e-6 {
            cuts.push(a);
        }
    }
    if kind == KernelKind::Dunkl && prod < 0.0 && alpha < -0.5 {
        for c in sign_crossings(&integrand, s_lo, s_hi) {
            if c > s_lo + 1e-6 && c < s_hi - 1e-6 {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut breakpoints = vec![cuts[0]];
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let parts = ((b - a) / 8.0).ceil().max(1.0) as usize;
        for k in 1..=parts {
            breakpoints.push(a + (b - a) * k as f64 / parts as f64);
        }
    }

    let out = integrate_panels_log(&|_panel, node| integrand(node.x), &breakpoints, quad);
    if out.diverged {
        return Err(Error::Singular(format!(
            "time integral for {kind:?} did not converge at ({x}, {y})"
        )));
    }
    let v = match kind {
        KernelKind::DunklAux => out.value,
        _ => out.value.scale_log(-log_gamma(sigma)),
    };
    Ok(v)
}

/// Log of `chi_{sigma > alpha + 1} + chi_{sigma = alpha + 1} log(1/size)`.
fn threshold_terms_log(alpha: f64, sigma: f64, size: f64) -> f64 {
    if sigma > alpha + 1.0 {
        0.0
    } else if sigma == alpha + 1.0 {
        let l = (1.0 / size).ln();
        if l > 0.0 {
            l.ln()
        } else {
            f64::NEG_INFINITY
        }
    } else {
        f64::NEG_INFINITY
    }
}

/// Near-origin branch together with the `size^{-2 alpha - 1}` prefactor:
/// log of `size^{-2a-1} * { d^{2s-1} | 1 + log(size/d) | size^{2s-1} }`.
fn near_body_log(alpha: f64, sigma: f64, d: f64, size: f64) -> f64 {
    if sigma < 0.5 {
        -(2.0 * alpha + 1.0) * size.ln() + (2.0 * sigma - 1.0) * d.ln()
    } else if sigma == 0.5 {
        -(2.0 * alpha + 1.0) * size.ln() + (1.0 + (size / d).ln()).ln()
    } else {
        (2.0 * sigma - 2.0 * alpha - 2.0) * size.ln()
    }
}

/// Far-region branch with its prefactor, before the exponential factor:
/// log of `size^{-2a-1} * { d^{2s-1} | 1 + log^+(1/(d z)) | size^{1-2s} }`,
/// where `z` is the decay mate (`x + y`, or `|x + y|` for the Dunkl cases).
fn far_body_log(alpha: f64, sigma: f64, d: f64, z: f64, size: f64) -> f64 {
    if sigma < 0.5 {
        -(2.0 * alpha + 1.0) * size.ln() + (2.0 * sigma - 1.0) * d.ln()
    } else if sigma == 0.5 {
        -(2.0 * alpha + 1.0) * size.ln() + (1.0 + (-(d * z).ln()).max(0.0)).ln()
    } else {
        (-2.0 * alpha - 2.0 * sigma) * size.ln()
    }
}

/// Envelope shape and decay scale for the convolution-type kernel.
/// Returns `(log shape, decay)`; the envelope is
/// `C^{+-1} exp(-c * decay) * shape`.
fn conv_shape(params: &Params, x: f64, y: f64) -> (f64, f64) {
    let size = x + y;
    let d = (x - y).abs();
    if size <= 1.0 {
        let body = near_body_log(params.alpha, params.sigma, d, size);
        (
            log_add_exp(threshold_terms_log(params.alpha, params.sigma, size), body),
            0.0,
        )
    } else {
        (
            far_body_log(params.alpha, params.sigma, d, size, size),
            d * size,
        )
    }
}

/// Envelope shape and decay scale for the Dunkl kernel (meaningful for
/// `alpha > -1/2`; also evaluated at `alpha = -1/2` for cross-checks).
fn dunkl_shape(params: &Params, x: f64, y: f64) -> (f64, f64) {
    let alpha = params.alpha;
    let sigma = params.sigma;
    let size = x.abs() + y.abs();
    let d = (x - y).abs();
    let z = (x + y).abs();
    if size == 0.0 {
        return if sigma > alpha + 1.0 {
            (0.0, 0.0)
        } else {
            (f64::INFINITY, 0.0)
        };
    }
    if x * y >= 0.0 {
        if size <= 1.0 {
            let body = near_body_log(alpha, sigma, d, size);
            (log_add_exp(threshold_terms_log(alpha, sigma, size), body), 0.0)
        } else {
            (far_body_log(alpha, sigma, d, z, size), d * z)
        }
    } else if size <= 1.0 {
        // Opposite signs near the origin: single power branch for every
        // sigma, no distance singularity.
        let body = (2.0 * sigma - 2.0 * alpha - 2.0) * size.ln();
        (log_add_exp(threshold_terms_log(alpha, sigma, size), body), 0.0)
    } else {
        // Opposite signs far out: fixed power with an extra size^{-4} drop;
        // the exponential factor degenerates on the anti-diagonal because
        // there d z = |x - y| |x + y| stays bounded.
        ((-2.0 * alpha - 2.0 * sigma - 4.0) * size.ln(), d * z)
    }
}

/// Envelope shape and decay for the Dunkl kernel at `alpha = -1/2`, written
/// through the oscillator kernel; valid for all real `x`, `y` and notable
/// for its exponential decay along `y = -x` when `sigma > 1/2`.
fn hermite_osc_shape(sigma: f64, x: f64, y: f64) -> (f64, f64) {
    let size = x.abs() + y.abs();
    let d = (x - y).abs();
    let branch = if sigma < 0.5 {
        (2.0 * sigma - 1.0) * d.ln()
    } else if sigma == 0.5 {
        (1.0 + (-(d * size).ln()).max(0.0)).ln()
    } else {
        (1.0 - 2.0 * sigma) * (1.0 + (x + y).abs()).ln()
    };
    (branch, d * size)
}

fn assemble(shape: f64, decay: f64, consts: &EnvelopeConstants) -> (SignedLogValue, SignedLogValue) {
    if shape == f64::INFINITY {
        return (
            SignedLogValue::positive_infinity(),
            SignedLogValue::positive_infinity(),
        );
    }
    let lc = consts.c_ratio.ln();
    (
        SignedLogValue::from_log(shape - lc - consts.c_lower * decay),
        SignedLogValue::from_log(shape + lc - consts.c_upper * decay),
    )
}

/// Two-sided envelope `(lower, upper)` of the convolution-type kernel.
///
/// In the near region `x + y <= 1` there is no exponential factor and the
/// bounds differ only by `c_ratio`; in the far region they carry
/// `exp(-c_lower |x-y|(x+y))` and `exp(-c_upper |x-y|(x+y))` respectively.
pub fn envelope_conv(
    params: &Params,
    x: f64,
    y: f64,
    consts: &EnvelopeConstants,
) -> Result<(SignedLogValue, SignedLogValue)> {
    check_point(KernelKind::Convolution, x, y)?;
    consts.validate()?;
    let (shape, decay) = conv_shape(params, x, y);
    Ok(assemble(shape, decay, consts))
}

/// Two-sided envelope `(lower, upper)` of the Dunkl kernel, split by the
/// sign of `xy` and by `|x| + |y|` against 1.  Requires `alpha > -1/2`;
/// below that threshold the kernel is not comparable to a positive shape.
pub fn envelope_dunkl(
    params: &Params,
    x: f64,
    y: f64,
    consts: &EnvelopeConstants,
) -> Result<(SignedLogValue, SignedLogValue)> {
    check_point(KernelKind::Dunkl, x, y)?;
    if params.alpha <= -0.5 {
        return Err(Error::Domain(format!(
            "the Dunkl envelope requires alpha > -1/2, got {}",
            params.alpha
        )));
    }
    consts.validate()?;
    let (shape, decay) = dunkl_shape(params, x, y);
    Ok(assemble(shape, decay, consts))
}

/// Two-sided envelope of the Dunkl kernel at `alpha = -1/2` in oscillator
/// form, valid for all real `x`, `y`.
pub fn envelope_hermite_osc(
    sigma: f64,
    x: f64,
    y: f64,
    consts: &EnvelopeConstants,
) -> Result<(SignedLogValue, SignedLogValue)> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!(
            "envelope arguments must be finite, got ({x}, {y})"
        )));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    consts.validate()?;
    let (shape, decay) = hermite_osc_shape(sigma, x, y);
    Ok(assemble(shape, decay, consts))
}

/// Sandwiches the kernel between sums of an exponential term, a truncated
/// Gamma-type integral over the early-time window, and a Gaussian-tail
/// integral over late times.  Applies to `Convolution` and `DunklAux`;
/// returns `(lower, upper)`, each a genuine pointwise bound with fixed
/// internal rate constants.
pub fn exp_je_decomposition(
    kind: KernelKind,
    params: &Params,
    x: f64,
    y: f64,
) -> Result<(SignedLogValue, SignedLogValue)> {
    match kind {
        KernelKind::Convolution | KernelKind::DunklAux => {}
        _ => {
            return Err(Error::Domain(format!(
                "the J/E split applies to Convolution and DunklAux, not {kind:?}"
            )))
        }
    }
    check_point(kind, x, y)?;
    let alpha = params.alpha;
    let sigma = params.sigma;
    let e_order = match kind {
        KernelKind::Convolution => sigma - 1.5,
        _ => sigma - 0.5,
    };
    let s2 = (x + y) * (x + y);
    let d2 = (x - y) * (x - y);
    let prod = x * y;
    let exp_term = |rate: f64| SignedLogValue::from_log(-rate * s2);
    if prod <= 1.0 {
        let j_order = alpha - sigma;
        let j_pref = (2.0 * sigma - 2.0 * alpha - 2.0) * (x + y).ln();
        let e_pref = (sigma - alpha - 1.0) * prod.ln();
        let lower = exp_term(1.0)
            + j_integral(j_order, 0.75 * s2, 1.5 * s2 / prod)?.scale_log(j_pref)
            + e_integral(e_order, 0.5 * d2 / prod, 0.5 * prod * s2)?.scale_log(e_pref);
        let upper = exp_term(0.125)
            + j_integral(j_order, 0.125 * s2, 0.5 * s2 / prod)?.scale_log(j_pref)
            + e_integral(e_order, 0.0625 * d2 / prod, 0.0625 * prod * s2)?.scale_log(e_pref);
        Ok((lower, upper))
    } else {
        let pref = match kind {
            KernelKind::Convolution => -(alpha + 0.5) * prod.ln(),
            _ => -(alpha + 1.5) * prod.ln(),
        };
        let lower = exp_term(1.0) + e_integral(e_order, 0.5 * d2, 0.5 * s2)?.scale_log(pref);
        let upper =
            exp_term(0.125) + e_integral(e_order, 0.0625 * d2, 0.0625 * s2)?.scale_log(pref);
        Ok((lower, upper))
    }
}

fn family_compatible(kind: KernelKind, family: EnvelopeFamily, params: &Params) -> Result<()> {
    let ok = match family {
        EnvelopeFamily::Conv => kind == KernelKind::Convolution,
        EnvelopeFamily::Dunkl => kind == KernelKind::Dunkl,
        EnvelopeFamily::HermiteOsc => kind == KernelKind::Dunkl,
        EnvelopeFamily::JeSplit => {
            matches!(kind, KernelKind::Convolution | KernelKind::DunklAux)
        }
    };
    if !ok {
        return Err(Error::Domain(format!(
            "envelope family {family:?} does not describe kernel {kind:?}"
        )));
    }
    if family == EnvelopeFamily::Dunkl && params.alpha <= -0.5 {
        return Err(Error::Domain(format!(
            "the Dunkl envelope requires alpha > -1/2, got {}",
            params.alpha
        )));
    }
    if family == EnvelopeFamily::HermiteOsc && params.alpha != -0.5 {
        return Err(Error::Domain(format!(
            "the oscillator envelope describes the Dunkl kernel at alpha = -1/2, got {}",
            params.alpha
        )));
    }
    Ok(())
}

fn family_shape(family: EnvelopeFamily, params: &Params, x: f64, y: f64) -> (f64, f64) {
    match family {
        EnvelopeFamily::Conv => conv_shape(params, x, y),
        EnvelopeFamily::Dunkl => dunkl_shape(params, x, y),
        EnvelopeFamily::HermiteOsc => hermite_osc_shape(params.sigma, x, y),
        EnvelopeFamily::JeSplit => unreachable!("handled separately"),
    }
}

/// Fits envelope constants for `family` against kernel samples on `grid`.
///
/// The grid must avoid the divergent set of the kernel (the exact diagonal
/// when `sigma <= 1/2`, the Dunkl origin when `sigma <= alpha + 1`), and
/// for the shape families every sampled kernel value must be positive.
/// The decay rates are scanned over [`default_rate_grid`] and the report is
/// deterministic for a fixed grid.
pub fn calibrate_envelope(
    kind: KernelKind,
    params: &Params,
    grid: &GridSpec,
    family: EnvelopeFamily,
) -> Result<RatioReport> {
    family_compatible(kind, family, params)?;
    let pts = grid.points();
    if pts.is_empty() {
        return Err(Error::Domain("calibration grid is empty".into()));
    }
    for &(x, y) in &pts {
        check_point(kind, x, y)?;
        if diagonal_divergent(kind, params, x, y) {
            return Err(Error::Singular(format!(
                "calibration grid touches a divergent point at ({x}, {y})"
            )));
        }
    }
    let quad = QuadConfig {
        rel_tol: 1e-10,
        ..QuadConfig::default()
    };
    if family == EnvelopeFamily::JeSplit {
        // The split is itself the envelope; fit only the ratio constant.
        let rows: Result<Vec<(f64, f64)>> = pts
            .par_iter()
            .map(|&(x, y)| {
                let k = potential_kernel(kind, params, x, y, &quad)?;
                let (lo, up) = exp_je_decomposition(kind, params, x, y)?;
                if k.sign() != 1 || k.is_divergent() {
                    return Err(Error::Singular(format!(
                        "kernel is not positive and finite at ({x}, {y})"
                    )));
                }
                let mid = 0.5 * (lo.log_abs() + up.log_abs());
                let need = (k.log_abs() - up.log_abs())
                    .max(lo.log_abs() - k.log_abs())
                    .max(0.0);
                Ok((k.log_abs() - mid, need))
            })
            .collect();
        let rows = rows?;
        let (mut min_r, mut max_r) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut argmin, mut argmax) = (pts[0], pts[0]);
        let mut log_c = 0.0f64;
        for (i, &(r, need)) in rows.iter().enumerate() {
            if r < min_r {
                min_r = r;
                argmin = pts[i];
            }
            if r > max_r {
                max_r = r;
                argmax = pts[i];
            }
            log_c = log_c.max(need);
        }
        return Ok(RatioReport {
            min_ratio: min_r,
            max_ratio: max_r,
            argmin,
            argmax,
            fitted: EnvelopeConstants::new(log_c.exp(), 1.0, 1.0)?,
            grid: *grid,
        });
    }
    let rows: Result<Vec<(f64, f64)>> = pts
        .par_iter()
        .map(|&(x, y)| {
            let k = potential_kernel(kind, params, x, y, &quad)?;
            if k.sign() != 1 || k.is_divergent() {
                return Err(Error::Singular(format!(
                    "kernel is not positive and finite at ({x}, {y})"
                )));
            }
            let (shape, decay) = family_shape(family, params, x, y);
            if !shape.is_finite() {
                return Err(Error::Singular(format!(
                    "envelope shape is singular at ({x}, {y})"
                )));
            }
            Ok((k.log_abs() - shape, decay))
        })
        .collect();
    let rows = rows?;
    let (mut min_r, mut max_r) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = (pts[0], pts[0]);
    for (i, &(r, _)) in rows.iter().enumerate() {
        if r < min_r {
            min_r = r;
            argmin = pts[i];
        }
        if r > max_r {
            max_r = r;
            argmax = pts[i];
        }
    }
    let fit = calibrate_from_samples(&rows, &default_rate_grid())?;
    Ok(RatioReport {
        min_ratio: min_r,
        max_ratio: max_r,
        argmin,
        argmax,
        fitted: fit.consts,
        grid: *grid,
    })
}
