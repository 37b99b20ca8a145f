//! Row norms, operator application, and counterexample families for the
//! subordinated kernels.
//!
//! Every kernel splits into a local part supported on the closed square
//! `(0, 2]^2` and a global part supported on the open complement
//! `x v y > 2`; on the full line the split reads through `|x|`, `|y|`.
//! On top of the split the module provides the quadrature experiments that
//! probe mapping properties quantitatively:
//!
//! * [`row_norm`] computes `L^p` norms of kernel rows `y -> K(x, y)`
//!   against the natural measure of the kind, reporting `+inf` when the
//!   partial integrals keep growing instead of settling,
//! * [`apply_operator`] evaluates `f -> int K(x, y) f(y)` pointwise on a
//!   grid, with divergence flagged per point,
//! * [`counterexample_family`] builds the test functions that witness
//!   sharpness of the boundedness regions: a logarithmic edge profile with
//!   an exactly known norm, a travelling bump, and two power edges,
//! * [`hardy_operator`] evaluates the one-sided operator with kernel
//!   `(x+y)^{-2 alpha - 1} |x - y|^{2 sigma - 1}` on `(1, inf)`,
//! * [`negativity_scan`] searches a box for negative values of the line
//!   kernel at orders below `-1/2` and re-verifies every hit at tightened
//!   quadrature accuracy.
//!
//! All values travel in signed log form.  A divergent integral is a value,
//! not an error: a row norm of `+inf` is a meaningful outcome that the
//! boundedness theory predicts for specific parameter ranges.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log_domain::SignedLogValue;
use crate::params::Params;
use crate::potential_kernels::{potential_kernel, KernelKind};
use crate::quadrature::{
    integrate_panels_log, integrate_to_infinity_log, Node, QuadConfig, QuadOutcome,
};

/// Which side of the two-by-two square split a kernel keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitPart {
    /// Indicator of the closed square `|x| <= 2`, `|y| <= 2`.
    Local,
    /// Indicator of the open complement `|x| v |y| > 2`.
    Global,
    /// No restriction.
    Full,
}

/// A subordinated kernel restricted to one part of the local/global split.
#[derive(Clone, Debug)]
pub struct SplitKernel {
    pub kind: KernelKind,
    pub params: Params,
    pub part: SplitPart,
}

impl SplitKernel {
    pub fn new(kind: KernelKind, params: Params, part: SplitPart) -> Self {
        Self { kind, params, part }
    }

    /// Indicator of the split support at `(x, y)`.  The local square is
    /// closed and the global region open, so the two parts tile the domain
    /// and their kernel values add up to the full kernel exactly.
    pub fn covers(&self, x: f64, y: f64) -> bool {
        let local = x.abs() <= 2.0 && y.abs() <= 2.0;
        match self.part {
            SplitPart::Local => local,
            SplitPart::Global => !local,
            SplitPart::Full => true,
        }
    }

    /// Kernel value with the split indicator applied.
    pub fn evaluate(&self, x: f64, y: f64, quad: &QuadConfig) -> Result<SignedLogValue> {
        if !self.covers(x, y) {
            return Ok(SignedLogValue::ZERO);
        }
        potential_kernel(self.kind, &self.params, x, y, quad)
    }
}

/// Reference measure an operator pairs test functions against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// `y^{2 alpha + 1} dy` on the half line.
    MuAlpha,
    /// `|y|^{2 alpha + 1} dy` on the whole line.
    WAlpha,
    /// Plain Lebesgue measure.
    Lebesgue,
}

impl Measure {
    /// The measure each kernel kind integrates against.
    pub fn canonical(kind: KernelKind) -> Self {
        match kind {
            KernelKind::Convolution | KernelKind::DunklAux => Measure::MuAlpha,
            KernelKind::HermiteType => Measure::Lebesgue,
            KernelKind::Dunkl => Measure::WAlpha,
        }
    }

    fn weight_exponent(self, alpha: f64) -> f64 {
        match self {
            Measure::MuAlpha | Measure::WAlpha => 2.0 * alpha + 1.0,
            Measure::Lebesgue => 0.0,
        }
    }
}

/// A test function in signed log form together with its support and any
/// exactly known `L^p` norms.
#[derive(Clone)]
pub struct TestFunction {
    pub description: String,
    /// Open interval outside of which the function vanishes; the upper end
    /// may be `+inf`.
    pub support: (f64, f64),
    shape: Shape,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("description", &self.description)
            .field("support", &self.support)
            .finish()
    }
}

#[derive(Clone)]
enum Shape {
    Zero,
    Indicator,
    LogEdge { alpha: f64, sigma: f64, p: f64 },
    Bump { alpha: f64, n: u32 },
    PowerEdge { exponent: f64 },
    LogLogEdge { sigma: f64 },
    Custom(Arc<dyn Fn(f64) -> SignedLogValue + Send + Sync>),
}

impl TestFunction {
    /// The zero function.
    pub fn zero() -> Self {
        Self {
            description: "zero".into(),
            support: (0.0, 0.0),
            shape: Shape::Zero,
        }
    }

    /// Indicator of the open interval `(a, b)`.
    pub fn indicator(a: f64, b: f64) -> Self {
        assert!(a < b, "indicator needs a nonempty interval");
        Self {
            description: format!("indicator of ({a}, {b})"),
            support: (a, b),
            shape: Shape::Indicator,
        }
    }

    /// Wraps an arbitrary closure returning signed log values.
    pub fn from_log_fn(
        description: impl Into<String>,
        support: (f64, f64),
        f: Arc<dyn Fn(f64) -> SignedLogValue + Send + Sync>,
    ) -> Self {
        Self {
            description: description.into(),
            support,
            shape: Shape::Custom(f),
        }
    }

    /// Value at `y` in signed log form; zero outside the support.
    pub fn eval_log(&self, y: f64) -> SignedLogValue {
        if !(y > self.support.0 && y < self.support.1) {
            return SignedLogValue::ZERO;
        }
        match &self.shape {
            Shape::Zero => SignedLogValue::ZERO,
            Shape::Indicator => SignedLogValue::ONE,
            Shape::LogEdge { alpha, sigma, p } => {
                let ly = y.ln();
                let log = -2.0 * (alpha + 1.0) / p * ly
                    - (1.0 / p + sigma / (alpha + 1.0)) * ly.ln();
                SignedLogValue::new(1, log)
            }
            Shape::Bump { .. } => SignedLogValue::ONE,
            Shape::PowerEdge { exponent } => SignedLogValue::new(1, exponent * (3.0 - y).ln()),
            Shape::LogLogEdge { sigma } => {
                let d = 3.0 - y;
                SignedLogValue::new(1, -2.0 * sigma * d.ln() - (2.0 / d).ln().ln())
            }
            Shape::Custom(f) => f(y),
        }
    }

    /// Log of the `L^p` norm against the family's own measure, where an
    /// exact formula is known; `None` otherwise.  The logarithmic edge
    /// profile knows its norm only for the exponent it was built with.
    pub fn norm_log(&self, p: f64) -> Option<f64> {
        match &self.shape {
            Shape::Zero => Some(f64::NEG_INFINITY),
            Shape::LogEdge { alpha, sigma, p: fp } => {
                if p == *fp {
                    Some(((alpha + 1.0) / (sigma * p)).ln() / p)
                } else {
                    None
                }
            }
            Shape::Bump { alpha, n } => {
                if p == f64::INFINITY {
                    return Some(0.0);
                }
                let nf = f64::from(*n);
                let lo = nf;
                let hi = nf + 1.0 / nf;
                Some(log_power_interval(2.0 * alpha + 2.0, lo, hi) / p)
            }
            _ => None,
        }
    }
}

/// Parameter block selecting one of the counterexample families.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum Family {
    /// `chi_{y > e} y^{-2(alpha+1)/p} (log y)^{-1/p - sigma/(alpha+1)}`:
    /// finite `L^p` norm, image growing without bound.
    LogEdge { p: f64 },
    /// `chi_{(n, n+1/n)}`, the travelling bump.
    BumpAtN { n: u32 },
    /// `chi_{(2,3)} (3-y)^A` with `A = -1/p + eps`.
    EdgePower { p: f64, q: f64, eps: f64 },
    /// `chi_{(2,3)} (3-y)^{-2 sigma} / log(2/(3-y))`, the endpoint witness
    /// at the smallest integrability exponent.
    LogLogEdge,
}

/// Builds a member of one of the sharpness-witness families, validating
/// the family's parameter constraints.
pub fn counterexample_family(family: Family, params: &Params) -> Result<TestFunction> {
    let alpha = params.alpha;
    let sigma = params.sigma;
    match family {
        Family::LogEdge { p } => {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::Constraint(format!(
                    "the log edge profile needs a finite exponent p >= 1, got {p}"
                )));
            }
            Ok(TestFunction {
                description: format!("log edge profile at p = {p}"),
                support: (std::f64::consts::E, f64::INFINITY),
                shape: Shape::LogEdge { alpha, sigma, p },
            })
        }
        Family::BumpAtN { n } => {
            if n == 0 {
                return Err(Error::Constraint(
                    "the travelling bump needs n >= 1".into(),
                ));
            }
            let nf = f64::from(n);
            Ok(TestFunction {
                description: format!("bump on ({n}, {n} + 1/{n})"),
                support: (nf, nf + 1.0 / nf),
                shape: Shape::Bump { alpha, n },
            })
        }
        Family::EdgePower { p, q, eps } => {
            if !(p >= 1.0 && q >= 1.0) {
                return Err(Error::Constraint(format!(
                    "the edge power family needs p, q >= 1, got p = {p}, q = {q}"
                )));
            }
            let room = 1.0 / p - 2.0 * sigma - 1.0 / q;
            if !(room > 0.0) {
                return Err(Error::Constraint(format!(
                    "the edge power family needs 1/p - 2 sigma - 1/q > 0, got {room}"
                )));
            }
            if !(eps > 0.0 && eps < room) {
                return Err(Error::Constraint(format!(
                    "the edge power exponent needs 0 < eps < 1/p - 2 sigma - 1/q = {room}, got {eps}"
                )));
            }
            Ok(TestFunction {
                description: format!("edge power (3 - y)^A with A = -1/{p} + {eps}"),
                support: (2.0, 3.0),
                shape: Shape::PowerEdge {
                    exponent: -1.0 / p + eps,
                },
            })
        }
        Family::LogLogEdge => {
            if !(sigma < 0.5) {
                return Err(Error::Constraint(format!(
                    "the log-log edge witness needs sigma < 1/2, got {sigma}"
                )));
            }
            Ok(TestFunction {
                description: "log-log edge at the integrability endpoint".into(),
                support: (2.0, 3.0),
                shape: Shape::LogLogEdge { sigma },
            })
        }
    }
}

/// Log of `(hi^e - lo^e) / e` for `hi > lo > 0`, `e > 0`, computed without
/// overflow or cancellation.
fn log_power_interval(e: f64, lo: f64, hi: f64) -> f64 {
    let lr = e * (hi / lo).ln();
    if lr > 700.0 {
        e * hi.ln() - e.ln()
    } else {
        e * lo.ln() + lr.exp_m1().ln() - e.ln()
    }
}

/// Quadrature accuracy used for the kernel evaluations nested inside an
/// outer row integral: two digits tighter than the outer request so the
/// outer tolerance stays meaningful.
fn inner_cfg(outer: &QuadConfig) -> QuadConfig {
    QuadConfig {
        rel_tol: (outer.rel_tol * 1e-2).max(1e-12),
        max_level: outer.max_level.max(8),
    }
}

/// One maximal interval of a kernel row's support, with the interior
/// points that quadrature panels must not straddle: the diagonal, the
/// reflected diagonal on the line, and the origin weight singularity.
struct RowInterval {
    lo: f64,
    /// `None` marks an interval reaching `+inf` (or `-inf` when mirrored).
    hi: Option<f64>,
    /// Interval is a mirror image: integrate `y in (-hi, -lo)` via `y -> -y`.
    mirrored: bool,
}

/// A quadrature node of a row integral in stabilized form.  Deep tanh-sinh
/// nodes collide in floating point with singular panel endpoints (the
/// diagonal, the origin); the collided evaluations are replaced by the
/// nearest representable point together with the log correction the known
/// edge power law prescribes, so endpoint divergence detection keeps
/// seeing the true growth rate.
struct RowNode {
    /// Representable evaluation point (signed coordinate on the line).
    y: f64,
    /// Stable log of `|y|`, valid even when the node collided with zero.
    log_abs_y: f64,
    /// Correction to add to the log of the kernel value: the edge exponent
    /// times the gap between the true and the evaluated edge distance.
    kernel_shift: f64,
}

impl RowInterval {
    fn cuts(&self, split: &SplitKernel, x: f64) -> Vec<f64> {
        let mut cs = Vec::new();
        let candidates: &[f64] = match split.kind {
            KernelKind::Dunkl => &[x.abs(), 2.0],
            _ => &[x, 2.0],
        };
        let hi = self.hi.unwrap_or(f64::INFINITY);
        for &c in candidates {
            if c > self.lo && c < hi {
                cs.push(c);
            }
        }
        cs.sort_by(f64::total_cmp);
        cs.dedup();
        cs
    }
}

/// Support intervals of the row `y -> K_part(x, y)` in the kind's domain,
/// expressed on the positive axis (negative rays are mirrored).
fn row_intervals(split: &SplitKernel, x: f64) -> Vec<RowInterval> {
    let line = matches!(split.kind, KernelKind::Dunkl);
    let inside = x.abs() <= 2.0;
    let mut out = Vec::new();
    let mut push = |lo: f64, hi: Option<f64>| {
        out.push(RowInterval {
            lo,
            hi,
            mirrored: false,
        });
        if line {
            out.push(RowInterval {
                lo,
                hi,
                mirrored: true,
            });
        }
    };
    match split.part {
        SplitPart::Full => push(0.0, None),
        SplitPart::Local => {
            if inside {
                push(0.0, Some(2.0));
            }
        }
        SplitPart::Global => {
            if inside {
                push(2.0, None);
            } else {
                push(0.0, None);
            }
        }
    }
    out
}

/// Integrates `g` over one row interval, splitting panels at the interior
/// cuts and handing unbounded tails to the windowed integrator.  The head
/// of an unbounded interval always reaches past the diagonal so the tail
/// windows only ever see the decaying far field.  Nodes are stabilized
/// against floating-point collisions with the diagonal and the origin,
/// using the diagonal exponent `2 sigma - 1` and, for the oscillator-type
/// kernel, the origin exponent `alpha + 1/2`.
fn integrate_row_interval<G>(
    g: &G,
    iv: &RowInterval,
    split: &SplitKernel,
    x: f64,
    cfg: &QuadConfig,
) -> QuadOutcome
where
    G: Fn(&RowNode) -> SignedLogValue,
{
    let diag_exp = 2.0 * split.params.sigma - 1.0;
    let zero_exp = match split.kind {
        KernelKind::HermiteType => split.params.alpha + 0.5,
        _ => 0.0,
    };
    // The diagonal in panel coordinates: the endpoint whose signed image
    // equals x.  Reflected endpoints (y = -x on the line) are finite kinks
    // and need no stabilization.
    let is_diag = |v: f64| {
        let real = if iv.mirrored { -v } else { v };
        real == x && v > 0.0
    };
    let stabilize = |a: f64, b: f64, node: &Node| -> RowNode {
        let y0 = node.x;
        let mut y_eval = y0;
        let mut log_abs = y0.abs().ln();
        let mut shift = 0.0;
        if y0 == a {
            if a == 0.0 {
                y_eval = node.log_from_left.exp().max(1e-280);
                log_abs = node.log_from_left;
                shift = zero_exp * (node.log_from_left - y_eval.ln());
            } else if is_diag(a) {
                let yf = a.next_up();
                if yf < b {
                    y_eval = yf;
                    log_abs = yf.abs().ln();
                    shift = diag_exp * (node.log_from_left - (yf - a).ln());
                }
            }
        } else if y0 == b && is_diag(b) {
            let yf = b.next_down();
            if yf > a {
                y_eval = yf;
                log_abs = yf.abs().ln();
                shift = diag_exp * (node.log_from_right - (b - yf).ln());
            }
        }
        RowNode {
            y: if iv.mirrored { -y_eval } else { y_eval },
            log_abs_y: log_abs,
            kernel_shift: shift,
        }
    };
    match iv.hi {
        Some(hi) => {
            let mut breaks = vec![iv.lo];
            breaks.extend(iv.cuts(split, x));
            breaks.push(hi);
            breaks.retain(|b| b.is_finite());
            breaks.dedup();
            let bk = breaks.clone();
            integrate_panels_log(
                &|panel, node: &Node| g(&stabilize(bk[panel], bk[panel + 1], node)),
                &breaks,
                cfg,
            )
        }
        None => {
            let head_end = (2.0 * x.abs() + 8.0).max(iv.lo + 4.0);
            let mut breaks = vec![iv.lo];
            breaks.extend(iv.cuts(split, x).into_iter().filter(|&c| c < head_end));
            breaks.push(head_end);
            breaks.dedup();
            let bk = breaks.clone();
            let head = integrate_panels_log(
                &|panel, node: &Node| g(&stabilize(bk[panel], bk[panel + 1], node)),
                &breaks,
                cfg,
            );
            if head.diverged {
                return head;
            }
            let tail = integrate_to_infinity_log(
                &|node: &Node| g(&stabilize(head_end, f64::INFINITY, node)),
                head_end,
                1.0,
                cfg,
            );
            if tail.diverged {
                return tail;
            }
            QuadOutcome {
                value: head.value + tail.value,
                rel_err: head.rel_err.max(tail.rel_err),
                cancellation: head.cancellation.max(tail.cancellation),
                diverged: false,
                levels: head.levels.max(tail.levels),
            }
        }
    }
}

fn check_row_point(kind: KernelKind, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("row location must be finite, got {x}")));
    }
    match kind {
        KernelKind::Dunkl => Ok(()),
        _ => {
            if x > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!(
                    "{kind:?} rows live on the positive half line, got x = {x}"
                )))
            }
        }
    }
}

/// `L^p` norm of the kernel row `y -> K_part(x, y)` against the kind's
/// canonical measure, in log form.  Accepts any `p in [1, inf]`; the
/// supremum case is handled by grid maxima on refinement-stable grids.
///
/// Divergence is a value: when the quadrature's partial integrals keep
/// growing (three consecutive window or refinement gains above ten
/// percent) the norm is reported as `+inf` rather than as an error.
pub fn row_norm(split: &SplitKernel, x: f64, p: f64, tail: &QuadConfig) -> Result<SignedLogValue> {
    check_row_point(split.kind, x)?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("row norms need p in [1, inf], got {p}")));
    }
    if p == f64::INFINITY {
        return Ok(row_sup(split, x, tail));
    }
    let inner = inner_cfg(tail);
    let w = Measure::canonical(split.kind).weight_exponent(split.params.alpha);
    let g = |node: &RowNode| -> SignedLogValue {
        let k = match split.evaluate(x, node.y, &inner) {
            Ok(v) => v,
            Err(_) => return SignedLogValue::ZERO,
        };
        if k.is_zero() {
            return SignedLogValue::ZERO;
        }
        let weight = if w == 0.0 { 0.0 } else { w * node.log_abs_y };
        k.abs().powf(p).scale_log(weight + p * node.kernel_shift)
    };
    let mut total = SignedLogValue::ZERO;
    for iv in row_intervals(split, x) {
        let out = integrate_row_interval(&g, &iv, split, x, tail);
        if out.diverged || out.value.is_divergent() {
            return Ok(SignedLogValue::positive_infinity());
        }
        total = total + out.value;
    }
    Ok(total.powf(1.0 / p))
}

/// Supremum of `|K_part(x, .)|` by midpoint grids refined until the
/// maximum moves by less than one percent twice in a row; three
/// consecutive gains above ten percent flag an unbounded row instead.
fn row_sup(split: &SplitKernel, x: f64, quad: &QuadConfig) -> SignedLogValue {
    let inner = inner_cfg(quad);
    let stable_log = 0.01f64.ln_1p();
    let grow_log = 0.1f64.ln_1p();
    let intervals = row_intervals(split, x);
    if intervals.is_empty() {
        return SignedLogValue::ZERO;
    }
    let mut m = 48usize;
    let mut prev = f64::NEG_INFINITY;
    let mut stable = 0u32;
    let mut growing = 0u32;
    for level in 0..9 {
        let mut best = f64::NEG_INFINITY;
        for iv in &intervals {
            let hi = iv.hi.unwrap_or((2.0 * x.abs() + 8.0).max(iv.lo + 4.0));
            for i in 0..m {
                let t = (i as f64 + 0.5) / m as f64;
                let y0 = iv.lo + (hi - iv.lo) * t;
                let y = if iv.mirrored { -y0 } else { y0 };
                if let Ok(v) = split.evaluate(x, y, &inner) {
                    if !v.is_zero() {
                        best = best.max(v.log_abs());
                    }
                }
            }
        }
        if best == f64::NEG_INFINITY {
            return SignedLogValue::ZERO;
        }
        if level > 0 {
            let d = best - prev;
            if d.abs() < stable_log {
                stable += 1;
                growing = 0;
            } else if d > grow_log {
                growing += 1;
                stable = 0;
            } else {
                stable = 0;
                growing = 0;
            }
            if stable >= 2 {
                return SignedLogValue::new(1, best);
            }
            if growing >= 3 {
                return SignedLogValue::positive_infinity();
            }
        }
        prev = best;
        m *= 2;
    }
    SignedLogValue::new(1, prev)
}

/// Applies the operator `f -> int K_part(x, y) f(y) dm(y)` at every grid
/// point.  The measure must be the canonical one for the kernel kind.
/// Non-integrable pairings surface as `+inf` entries, never as errors.
pub fn apply_operator(
    split: &SplitKernel,
    f: &TestFunction,
    x_grid: &[f64],
    measure: Measure,
    quad: &QuadConfig,
) -> Result<Vec<SignedLogValue>> {
    let canonical = Measure::canonical(split.kind);
    if measure != canonical {
        return Err(Error::Constraint(format!(
            "{:?} kernels pair with {canonical:?}, not {measure:?}",
            split.kind
        )));
    }
    for &x in x_grid {
        check_row_point(split.kind, x)?;
    }
    let results: Vec<SignedLogValue> = x_grid
        .par_iter()
        .map(|&x| apply_at_point(split, f, x, measure, quad))
        .collect();
    Ok(results)
}

fn apply_at_point(
    split: &SplitKernel,
    f: &TestFunction,
    x: f64,
    measure: Measure,
    quad: &QuadConfig,
) -> SignedLogValue {
    let inner = inner_cfg(quad);
    let w = measure.weight_exponent(split.params.alpha);
    let g = |node: &RowNode| -> SignedLogValue {
        let fv = f.eval_log(node.y);
        if fv.is_zero() {
            return SignedLogValue::ZERO;
        }
        let k = match split.evaluate(x, node.y, &inner) {
            Ok(v) => v,
            Err(_) => return SignedLogValue::ZERO,
        };
        let weight = if w == 0.0 { 0.0 } else { w * node.log_abs_y };
        (k * fv).scale_log(weight + node.kernel_shift)
    };
    let (slo, shi) = f.support;
    let mut total = SignedLogValue::ZERO;
    for iv in row_intervals(split, x) {
        // Clamp the row interval to the support of f; mirrored intervals
        // represent (-hi, -lo), so the support bounds flip sign.
        let (flo, fhi) = if iv.mirrored { (-shi, -slo) } else { (slo, shi) };
        let lo = iv.lo.max(flo);
        let hi = match iv.hi {
            Some(h) => Some(h.min(fhi)),
            None if fhi.is_finite() => Some(fhi),
            None => None,
        };
        if let Some(h) = hi {
            if h <= lo {
                continue;
            }
        }
        let clipped = RowInterval {
            lo,
            hi,
            mirrored: iv.mirrored,
        };
        let out = integrate_row_interval(&g, &clipped, split, x, quad);
        if out.diverged || out.value.is_divergent() {
            return out.value;
        }
        total = total + out.value;
    }
    total
}

/// Log of `||I K_global f_n||_{L^q(window)} / ||f_n||_p` for the
/// travelling bump `f_n = chi_(n, n+1/n)`, where the window
/// `(n - 3/n, n + 1/n + 3/n)` holds all but exponentially small tails of
/// the image mass: the kernel row at height `n` decays on the scale `1/n`.
///
/// `outer` controls the window integral, `point` the operator application
/// at each window node.  The ratio grows like a power of `n` whose
/// exponent separates bounded from unbounded `(p, q)` pairs, so callers
/// fit a log-log slope across several `n`.
pub fn bump_image_ratio_log(
    kind: KernelKind,
    params: &Params,
    n: u32,
    p: f64,
    q: f64,
    outer: &QuadConfig,
    point: &QuadConfig,
) -> Result<f64> {
    for (name, e) in [("p", p), ("q", q)] {
        if !e.is_finite() || e < 1.0 {
            return Err(Error::Domain(format!(
                "bump image ratios need finite {name} >= 1, got {e}"
            )));
        }
    }
    let f = counterexample_family(Family::BumpAtN { n }, params)?;
    let split = SplitKernel::new(kind, *params, SplitPart::Global);
    let measure = Measure::canonical(kind);
    let w = measure.weight_exponent(params.alpha);
    let nf = f64::from(n);
    let (lo, hi) = (nf - 3.0 / nf, nf + 1.0 / nf + 3.0 / nf);
    let image_q = integrate_panels_log(
        &|_, node: &Node| {
            let x = node.x;
            let v = apply_at_point(&split, &f, x, measure, point);
            v.abs().powf(q).scale_log(w * x.ln())
        },
        &[lo, nf, nf + 1.0 / nf, hi],
        outer,
    );
    if image_q.diverged || image_q.value.is_divergent() {
        return Err(Error::Singular(format!(
            "the window norm of the image of the bump at {n} did not converge"
        )));
    }
    Ok(image_q.value.log_abs() / q - f.norm_log(p).expect("bump norms are exact"))
}

/// Log of the measure `y^{2 alpha + 1} dy` of the ball `B(x, r)` in the
/// metric measure space `((1, inf), |.|, mu_alpha)`: the interval from
/// `max(1, x - r)` to `x + r`, integrated in closed form.
pub fn ball_measure_log(alpha: f64, x: f64, r: f64) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("order must satisfy alpha > -1, got {alpha}")));
    }
    if !(x > 1.0) || !(r > 0.0) {
        return Err(Error::Domain(format!(
            "ball measure needs a centre x > 1 and radius r > 0, got ({x}, {r})"
        )));
    }
    Ok(log_power_interval(2.0 * alpha + 2.0, (x - r).max(1.0), x + r))
}

/// One-sided Hardy-type operator on `(1, inf)`: integrates
/// `(x+y)^{-2 alpha - 1} |x-y|^{2 sigma - 1} f(y)` against `dmu_alpha`.
/// Requires `alpha >= -1/2`, `0 < sigma < 1/2`, and a grid in `(1, inf)`.
pub fn hardy_operator(
    alpha: f64,
    sigma: f64,
    f: &TestFunction,
    x_grid: &[f64],
    quad: &QuadConfig,
) -> Result<Vec<SignedLogValue>> {
    if !(alpha >= -0.5) {
        return Err(Error::Domain(format!(
            "the Hardy-type operator is used at orders alpha >= -1/2, got {alpha}"
        )));
    }
    if !(sigma > 0.0 && sigma < 0.5) {
        return Err(Error::Domain(format!(
            "the Hardy-type operator needs 0 < sigma < 1/2, got {sigma}"
        )));
    }
    for &x in x_grid {
        if !(x > 1.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "the Hardy-type operator lives on (1, inf), got x = {x}"
            )));
        }
    }
    let w = 2.0 * alpha + 1.0;
    let results: Vec<SignedLogValue> = x_grid
        .par_iter()
        .map(|&x| {
            // The distance to x is taken from the node's stable log
            // coordinates whenever the panel abuts the singularity.
            let g = |bounds: (f64, f64), node: &Node| -> SignedLogValue {
                let y = node.x;
                let fv = f.eval_log(y);
                if fv.is_zero() {
                    return SignedLogValue::ZERO;
                }
                let log_d = if bounds.1 == x {
                    node.log_from_right
                } else if bounds.0 == x {
                    node.log_from_left
                } else {
                    (x - y).abs().ln()
                };
                let log_kernel = -(2.0 * alpha + 1.0) * (x + y).ln() + (2.0 * sigma - 1.0) * log_d;
                fv.scale_log(log_kernel + w * y.ln())
            };
            let lo = f.support.0.max(1.0);
            let fhi = f.support.1;
            let mut breaks = vec![lo];
            if x > lo && (fhi.is_infinite() || x < fhi) {
                breaks.push(x);
            }
            let out = if fhi.is_finite() {
                if fhi <= lo {
                    return SignedLogValue::ZERO;
                }
                breaks.push(fhi);
                breaks.dedup();
                let bk = breaks.clone();
                integrate_panels_log(
                    &|i, node: &Node| g((bk[i], bk[i + 1]), node),
                    &breaks,
                    quad,
                )
            } else {
                let head_end = (2.0 * x + 8.0).max(lo + 4.0);
                breaks.retain(|&b| b < head_end);
                breaks.push(head_end);
                breaks.dedup();
                let bk = breaks.clone();
                let head = integrate_panels_log(
                    &|i, node: &Node| g((bk[i], bk[i + 1]), node),
                    &breaks,
                    quad,
                );
                if head.diverged {
                    return head.value;
                }
                let tail = integrate_to_infinity_log(
                    &|node: &Node| g((head_end, f64::INFINITY), node),
                    head_end,
                    1.0,
                    quad,
                );
                QuadOutcome {
                    value: head.value + tail.value,
                    rel_err: head.rel_err.max(tail.rel_err),
                    cancellation: head.cancellation.max(tail.cancellation),
                    diverged: tail.diverged,
                    levels: head.levels.max(tail.levels),
                }
            };
            out.value
        })
        .collect();
    Ok(results)
}

/// Outcome of a negativity scan over a symmetric box.
#[derive(Clone, Debug, Serialize)]
pub struct NegativityReport {
    /// Grid points where the kernel is negative, each re-verified at
    /// tightened quadrature accuracy.
    pub hits: Vec<(f64, f64)>,
    /// Smallest `|x|` among hits lying exactly on the anti-diagonal
    /// `y = -x`, if any.
    pub min_antidiagonal_abs: Option<f64>,
    /// Largest max-norm radius among the hits; `0` when there are none.
    pub max_hit_radius: f64,
    /// Number of grid points examined.
    pub points_scanned: usize,
}

/// Scans the box `[-half_width, half_width]^2` for negative values of the
/// line kernel.  Only orders below `-1/2` can produce them, so other
/// orders are rejected; see [`negativity_scan_unchecked`] for control
/// runs on parameters where no negativity is expected.
pub fn negativity_scan(
    params: &Params,
    half_width: f64,
    density: usize,
    quad: &QuadConfig,
) -> Result<NegativityReport> {
    if !(params.alpha < -0.5) {
        return Err(Error::Domain(format!(
            "negative kernel values require alpha < -1/2, got {}",
            params.alpha
        )));
    }
    Ok(negativity_scan_unchecked(params, half_width, density, quad))
}

/// The scan behind [`negativity_scan`] without the small-order
/// precondition, for control runs that should come back empty.
pub fn negativity_scan_unchecked(
    params: &Params,
    half_width: f64,
    density: usize,
    quad: &QuadConfig,
) -> NegativityReport {
    assert!(half_width > 0.0 && density >= 1, "degenerate scan box");
    let mut axis = Vec::with_capacity(2 * density);
    for k in 1..=density {
        let v = half_width * k as f64 / density as f64;
        axis.push(-v);
        axis.push(v);
    }
    let verify = QuadConfig {
        rel_tol: (quad.rel_tol * quad.rel_tol).max(5e-14),
        max_level: quad.max_level + 2,
    };
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&y| (x, y)))
        .collect();
    let hits: Vec<(f64, f64)> = pairs
        .par_iter()
        .filter(|&&(x, y)| {
            let coarse = match potential_kernel(KernelKind::Dunkl, params, x, y, quad) {
                Ok(v) => v.sign() < 0,
                Err(_) => false,
            };
            if !coarse {
                return false;
            }
            matches!(
                potential_kernel(KernelKind::Dunkl, params, x, y, &verify),
                Ok(v) if v.sign() < 0
            )
        })
        .copied()
        .collect();
    let min_antidiagonal_abs = hits
        .iter()
        .filter(|&&(x, y)| x + y == 0.0)
        .map(|&(x, _)| x.abs())
        .min_by(f64::total_cmp);
    let max_hit_radius = hits
        .iter()
        .map(|&(x, y)| x.abs().max(y.abs()))
        .max_by(f64::total_cmp)
        .unwrap_or(0.0);
    NegativityReport {
        hits,
        min_antidiagonal_abs,
        max_hit_radius,
        points_scanned: pairs.len(),
    }
}

/// Least-squares slope of `values_log` against `ln x`.
pub fn fit_log_slope(xs: &[f64], values_log: &[f64]) -> f64 {
    assert!(
        xs.len() == values_log.len() && xs.len() >= 2,
        "slope fit needs at least two matched samples"
    );
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = values_log.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (u, v) in lx.iter().zip(values_log) {
        num += (u - mx) * (v - my);
        den += (u - mx) * (u - mx);
    }
    num / den
}

/// One experiment record, ready for CSV or JSON emission: a named scalar
/// outcome in signed log form plus the accuracy the quadrature reported.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment_id: String,
    pub params: Vec<(String, f64)>,
    pub value_log: f64,
    pub sign: i8,
    pub achieved_tol: f64,
}

impl ExperimentRow {
    pub fn new(
        experiment_id: impl Into<String>,
        params: Vec<(String, f64)>,
        value: SignedLogValue,
        achieved_tol: f64,
    ) -> Self {
        Self {
            experiment_id: experiment_id.into(),
            params,
            value_log: value.log_abs(),
            sign: value.sign(),
            achieved_tol,
        }
    }

    /// Flat cells in the order `id, name=value.., value_log, sign, tol`.
    pub fn csv_record(&self) -> Vec<String> {
        let mut cells = vec![self.experiment_id.clone()];
        let joined = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        cells.push(joined);
        cells.push(format!("{}", self.value_log));
        cells.push(format!("{}", self.sign));
        cells.push(format!("{}", self.achieved_tol));
        cells
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quick() -> QuadConfig {
        QuadConfig {
            rel_tol: 1e-6,
            max_level: 7,
        }
    }

    #[test]
    fn split_parts_tile_the_domain() {
        let params = Params::new(0.4, 0.7).unwrap();
        for kind in [KernelKind::Convolution, KernelKind::Dunkl] {
            let local = SplitKernel::new(kind, params.clone(), SplitPart::Local);
            let global = SplitKernel::new(kind, params.clone(), SplitPart::Global);
            let full = SplitKernel::new(kind, params.clone(), SplitPart::Full);
            let pts: &[(f64, f64)] = &[(0.5, 0.5), (2.0, 2.0), (0.5, 3.0), (3.0, 1.0), (2.0, 2.25)];
            for &(x, y) in pts {
                assert!(local.covers(x, y) ^ global.covers(x, y));
                let quad = quick();
                let l = local.evaluate(x, y, &quad).unwrap();
                let g = global.evaluate(x, y, &quad).unwrap();
                let f = full.evaluate(x, y, &quad).unwrap();
                let sum = l + g;
                assert_eq!(sum.sign(), f.sign());
                assert_eq!(sum.log_abs().to_bits(), f.log_abs().to_bits());
            }
        }
    }

    #[test]
    fn global_row_norms_decay_at_the_predicted_rate() {
        // Order 1/2, subordination 0.3, p = 1.2: the global row norm falls
        // off like x^(-2 sigma + 2 alpha (1/p - 1)).
        let params = Params::new(0.5, 0.3).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Global);
        let quad = quick();
        let xs = [8.0, 16.0, 32.0, 64.0];
        let logs: Vec<f64> = xs
            .iter()
            .map(|&x| {
                let v = row_norm(&split, x, 1.2, &quad).unwrap();
                assert!(!v.is_divergent());
                v.log_abs()
            })
            .collect();
        let slope = fit_log_slope(&xs, &logs);
        let expected = -0.6 + 2.0 * 0.5 * (1.0 / 1.2 - 1.0);
        assert!(
            (slope - expected).abs() < 0.05,
            "slope {slope} vs {expected}; logs {logs:?}"
        );
    }

    #[test]
    fn row_norm_reports_divergence_past_the_integrability_edge() {
        // With sigma = 0.2 the diagonal singularity has exponent -0.6, so
        // the p = 2 power is not integrable and the norm is infinite.
        let params = Params::new(0.5, 0.2).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Global);
        let v = row_norm(&split, 5.0, 2.0, &quick()).unwrap();
        assert!(v.is_divergent());

        // The supremum over the same row is infinite too.
        let v = row_norm(&split, 5.0, f64::INFINITY, &quick()).unwrap();
        assert!(v.is_divergent());

        // At sigma > 1/2 the diagonal is tame and the supremum finite.
        let params = Params::new(1.0, 0.8).unwrap();
        let split = SplitKernel::new(KernelKind::HermiteType, params, SplitPart::Local);
        let v = row_norm(&split, 1.0, f64::INFINITY, &quick()).unwrap();
        assert!(!v.is_divergent() && !v.is_zero());
    }

    #[test]
    fn oscillator_row_norms_follow_both_power_laws() {
        let params = Params::new(1.0, 0.3).unwrap();
        let split = SplitKernel::new(KernelKind::HermiteType, params, SplitPart::Global);
        let quad = quick();

        let small = [0.05, 0.1, 0.2, 0.4];
        let logs: Vec<f64> = small
            .iter()
            .map(|&x| row_norm(&split, x, 2.0, &quad).unwrap().log_abs())
            .collect();
        let slope = fit_log_slope(&small, &logs);
        assert!(
            (slope - 1.5).abs() < 0.05,
            "small-x slope {slope}; logs {logs:?}"
        );

        let large = [8.0, 16.0, 32.0, 64.0];
        let logs: Vec<f64> = large
            .iter()
            .map(|&x| row_norm(&split, x, 2.0, &quad).unwrap().log_abs())
            .collect();
        let slope = fit_log_slope(&large, &logs);
        let expected = -2.0 * 0.3 + 1.0 - 0.5;
        assert!(
            (slope - expected).abs() < 0.05,
            "large-x slope {slope} vs {expected}; logs {logs:?}"
        );
    }

    #[test]
    fn operator_reproduces_the_spectral_projection() {
        // The Gaussian ground profile is an eigenfunction: applying the
        // kernel multiplies it by (2 alpha + 2)^(-sigma).
        let alpha = 0.3;
        let sigma = 0.8;
        let params = Params::new(alpha, sigma).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Full);
        let f = TestFunction::from_log_fn(
            "Gaussian ground profile",
            (0.0, f64::INFINITY),
            Arc::new(|y: f64| SignedLogValue::new(1, -0.5 * y * y)),
        );
        let quad = QuadConfig {
            rel_tol: 1e-8,
            max_level: 9,
        };
        let xs = [0.5, 1.0, 2.0];
        let got = apply_operator(&split, &f, &xs, Measure::MuAlpha, &quad).unwrap();
        for (&x, v) in xs.iter().zip(&got) {
            let expected = -sigma * (2.0 * alpha + 2.0).ln() - 0.5 * x * x;
            assert_eq!(v.sign(), 1);
            assert_relative_eq!(v.log_abs(), expected, epsilon = 2e-6);
        }
    }

    #[test]
    fn edge_indicator_image_dominates_the_edge_power() {
        // Applying the global kernel to the indicator of (2, 3) produces a
        // function bounded below by a multiple of (x - 3)^(2 sigma) just
        // past the edge: the ratio stays bounded away from zero.
        let sigma = 0.2;
        let params = Params::new(0.0, sigma).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Global);
        let f = TestFunction::indicator(2.0, 3.0);
        let xs: Vec<f64> = [0.75, 0.5, 0.25, 0.125, 0.0625]
            .iter()
            .map(|d| 3.0 + d)
            .collect();
        let got = apply_operator(&split, &f, &xs, Measure::MuAlpha, &quick()).unwrap();
        let ratios: Vec<f64> = xs
            .iter()
            .zip(&got)
            .map(|(&x, v)| {
                assert!(v.sign() == 1 && !v.is_divergent());
                v.log_abs() - 2.0 * sigma * (x - 3.0).ln()
            })
            .collect();
        let first = ratios[0];
        for r in ratios {
            assert!(r > first - f64::ln(4.0), "ratio collapsed: {r} vs {first}");
        }
    }

    #[test]
    fn edge_power_witness_blows_up_at_the_predicted_rate() {
        // f = (3 - y)^A with A = -1/p + eps maps to a function of order
        // (x - 3)^(2 sigma + A) near the edge; that exponent is negative,
        // so the image blows up while f itself stays p-integrable.
        let sigma = 0.1;
        let params = Params::new(0.0, sigma).unwrap();
        let p = 1.25;
        let q = 10.0;
        let eps = 0.2;
        let f = counterexample_family(Family::EdgePower { p, q, eps }, &params).unwrap();
        let a = -1.0 / p + eps;
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Global);
        let ds = [0.1, 0.05, 0.025, 0.0125, 0.00625];
        let xs: Vec<f64> = ds.iter().map(|d| 3.0 + d).collect();
        let got = apply_operator(&split, &f, &xs, Measure::MuAlpha, &quick()).unwrap();
        let target = 2.0 * sigma + a;
        assert!(target < 0.0);
        let ratios: Vec<f64> = ds
            .iter()
            .zip(&got)
            .map(|(d, v)| v.log_abs() - target * d.ln())
            .collect();
        // The image blows up toward the edge and stays above a fixed
        // multiple of d^(2 sigma + A): ratios must not collapse.
        for w in got.windows(2) {
            assert!(w[1].log_abs() > w[0].log_abs(), "image failed to grow");
        }
        let first = ratios[0];
        for r in ratios {
            assert!(r > first - f64::ln(4.0), "ratio collapsed: {r} vs {first}");
        }
    }

    #[test]
    fn zero_function_maps_to_zero() {
        let params = Params::new(0.25, 0.6).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Full);
        let got = apply_operator(
            &split,
            &TestFunction::zero(),
            &[0.5, 1.0, 4.0],
            Measure::MuAlpha,
            &quick(),
        )
        .unwrap();
        assert!(got.iter().all(SignedLogValue::is_zero));
    }

    #[test]
    fn constraint_violations_name_their_conditions() {
        let params = Params::new(0.0, 0.4).unwrap();
        let err = apply_operator(
            &SplitKernel::new(KernelKind::Convolution, params.clone(), SplitPart::Full),
            &TestFunction::zero(),
            &[1.0],
            Measure::Lebesgue,
            &quick(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("MuAlpha"));

        let roomy = Params::new(0.0, 0.1).unwrap();
        let err = counterexample_family(
            Family::EdgePower {
                p: 1.25,
                q: 10.0,
                eps: 0.75,
            },
            &roomy,
        )
        .unwrap_err();
        assert!(err.to_string().contains("eps"));
        let err = counterexample_family(
            Family::EdgePower {
                p: 1.25,
                q: 10.0,
                eps: 0.1,
            },
            &params,
        )
        .unwrap_err();
        assert!(err.to_string().contains("1/p - 2 sigma - 1/q"));

        let high = Params::new(0.0, 0.7).unwrap();
        let err = counterexample_family(Family::LogLogEdge, &high).unwrap_err();
        assert!(err.to_string().contains("sigma < 1/2"));

        let err = counterexample_family(Family::BumpAtN { n: 0 }, &params).unwrap_err();
        assert!(err.to_string().contains("n >= 1"));

        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Full);
        assert!(row_norm(&split, 1.0, 0.5, &quick()).is_err());
        assert!(row_norm(&split, -1.0, 2.0, &quick()).is_err());
    }

    #[test]
    fn log_edge_norm_certificate_matches_quadrature() {
        // With alpha = 0, sigma = 2, p = 2 the profile integrates to
        // (alpha + 1)/(sigma p) = 1/4 in closed form; panel quadrature
        // over (e, e^50) reproduces it, the remainder being ~ 50^-4.
        let params = Params::new(0.0, 2.0).unwrap();
        let p = 2.0;
        let f = counterexample_family(Family::LogEdge { p }, &params).unwrap();
        let cert = f.norm_log(p).unwrap();
        assert_relative_eq!(cert, (1.0 / (2.0 * p)).ln() / p, epsilon = 1e-15);

        let breaks: Vec<f64> = (1..=50).map(|k| f64::exp(k as f64)).collect();
        let quad = QuadConfig {
            rel_tol: 1e-9,
            max_level: 9,
        };
        let out = integrate_panels_log(
            &|_, node: &Node| {
                let y = node.x;
                f.eval_log(y).powf(p).scale_log(y.ln())
            },
            &breaks,
            &quad,
        );
        assert!(!out.diverged);
        assert_relative_eq!(out.value.log_abs() / p, cert, epsilon = 1e-6);
    }

    #[test]
    fn bump_norms_are_exact_and_follow_the_power_law() {
        let params = Params::new(-0.3, 0.5).unwrap();
        let p = 1.7;
        let f = counterexample_family(Family::BumpAtN { n: 16 }, &params).unwrap();
        let quad = QuadConfig {
            rel_tol: 1e-11,
            max_level: 10,
        };
        let out = integrate_panels_log(
            &|_, node: &Node| {
                let y = node.x;
                f.eval_log(y).powf(p).scale_log((2.0 * -0.3 + 1.0) * y.ln())
            },
            &[16.0, 16.0 + 1.0 / 16.0],
            &quad,
        );
        assert_relative_eq!(out.value.log_abs() / p, f.norm_log(p).unwrap(), epsilon = 1e-9);

        // Across n the norm follows n^(2 alpha / p) up to O(1/n^2).
        let params = Params::new(-0.75, 0.1).unwrap();
        let p = 10.0 / 9.0;
        let ns = [8u32, 16, 32, 64];
        let xs: Vec<f64> = ns.iter().map(|&n| f64::from(n)).collect();
        let logs: Vec<f64> = ns
            .iter()
            .map(|&n| {
                counterexample_family(Family::BumpAtN { n }, &params)
                    .unwrap()
                    .norm_log(p)
                    .unwrap()
            })
            .collect();
        let slope = fit_log_slope(&xs, &logs);
        assert!((slope - 2.0 * -0.75 / p).abs() < 0.01, "slope {slope}");
    }

    #[test]
    fn travelling_bump_image_grows_at_the_predicted_rate() {
        // The q-norm of the image of the bump at n, divided by the p-norm
        // of the bump, grows like n^(-2 sigma - 2 alpha (1/p - 1/q)).
        let alpha = -0.75;
        let sigma = 0.1;
        let inv_p = 0.9;
        let inv_q = 0.2;
        let p = 1.0 / inv_p;
        let q = 1.0 / inv_q;
        let params = Params::new(alpha, sigma).unwrap();
        let outer = QuadConfig {
            rel_tol: 1e-4,
            max_level: 5,
        };
        let point = QuadConfig {
            rel_tol: 1e-5,
            max_level: 5,
        };
        let ns = [8u32, 16, 32, 64];
        let ratios: Vec<f64> = ns
            .par_iter()
            .map(|&n| {
                bump_image_ratio_log(KernelKind::Convolution, &params, n, p, q, &outer, &point)
                    .unwrap()
            })
            .collect();
        let xs: Vec<f64> = ns.iter().map(|&n| f64::from(n)).collect();
        let slope = fit_log_slope(&xs, &ratios);
        let expected = -2.0 * sigma - 2.0 * alpha * (inv_p - inv_q);
        assert!(
            (slope - expected).abs() < 0.05,
            "growth exponent {slope} vs {expected}; ratios {ratios:?}"
        );
    }

    #[test]
    fn ball_measure_is_comparable_to_its_model() {
        for &alpha in &[-0.5, 0.3, 1.5] {
            for &x in &[1.1, 2.0, 5.0, 20.0] {
                for &r in &[0.01, 0.5, 3.0, 50.0] {
                    let exact = ball_measure_log(alpha, x, r).unwrap();
                    let model = r.ln() + (2.0 * alpha + 1.0) * (x + r).ln();
                    assert!(
                        (exact - model).abs() < f64::ln(50.0),
                        "alpha {alpha} x {x} r {r}: {exact} vs {model}"
                    );
                }
            }
        }
        assert!(ball_measure_log(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn hardy_kernel_matches_the_ball_measure_form() {
        // (x+y)^(-2a-1) |x-y|^(2s-1) agrees with |x-y|^(2s) over the
        // measure of the ball of radius |x-y| up to bounded ratios.
        let alpha = 0.5;
        let sigma = 0.3;
        let pairs: [(f64, f64); 4] = [(1.5, 3.0), (2.0, 10.0), (7.0, 7.5), (20.0, 4.0)];
        for (x, y) in pairs {
            let d = (x - y).abs();
            let lhs = -(2.0 * alpha + 1.0) * (x + y).ln() + (2.0 * sigma - 1.0) * d.ln();
            let rhs = 2.0 * sigma * d.ln() - ball_measure_log(alpha, x, d).unwrap();
            assert!((lhs - rhs).abs() < f64::ln(20.0), "({x},{y}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn hardy_operator_decays_like_its_kernel() {
        let alpha = 0.5;
        let sigma = 0.3;
        let f = TestFunction::indicator(1.0, 2.0);
        let xs = [32.0, 64.0, 128.0, 256.0];
        let got = hardy_operator(alpha, sigma, &f, &xs, &quick()).unwrap();
        let logs: Vec<f64> = got.iter().map(|v| v.log_abs()).collect();
        let slope = fit_log_slope(&xs, &logs);
        let expected = 2.0 * sigma - 2.0 * alpha - 2.0;
        assert!(
            (slope - expected).abs() < 0.05,
            "Hardy slope {slope} vs {expected}"
        );

        assert!(hardy_operator(-0.75, 0.3, &f, &[2.0], &quick()).is_err());
        assert!(hardy_operator(0.5, 0.7, &f, &[2.0], &quick()).is_err());
        assert!(hardy_operator(0.5, 0.3, &f, &[0.5], &quick()).is_err());
    }

    #[test]
    fn negativity_scan_finds_the_negative_wedge() {
        let quad = quick();
        let report = negativity_scan(&Params::new(-0.75, 1.0).unwrap(), 20.0, 12, &quad).unwrap();
        assert!(!report.hits.is_empty());
        assert!(report.hits.iter().all(|&(x, y)| x * y < 0.0));
        assert!(report.min_antidiagonal_abs.is_some());
        assert!(
            report.max_hit_radius >= 0.75 * 20.0,
            "hits stop at radius {}",
            report.max_hit_radius
        );

        let report = negativity_scan(&Params::new(-0.9, 0.5).unwrap(), 10.0, 8, &quad).unwrap();
        assert!(!report.hits.is_empty());
        assert!(report.hits.iter().all(|&(x, y)| x * y < 0.0));
    }

    #[test]
    fn positive_orders_show_no_negativity() {
        let params = Params::new(-0.4, 1.0).unwrap();
        assert!(negativity_scan(&params, 10.0, 8, &quick()).is_err());
        let report = negativity_scan_unchecked(&params, 10.0, 8, &quick());
        assert!(report.hits.is_empty());
        assert_eq!(report.max_hit_radius, 0.0);
        assert_eq!(report.points_scanned, 256);
    }

    #[test]
    fn line_operator_folds_into_half_line_parts() {
        // For the line kernel, evaluation at +-x against f splits into the
        // half-line operators applied to the even and odd pieces
        // f_+(y) = f(y), f_-(y) = f(-y) on (0, inf).
        let params = Params::new(-0.6, 0.8).unwrap();
        let split = SplitKernel::new(KernelKind::Dunkl, params.clone(), SplitPart::Full);
        let plateau = |y: f64, c: f64, w: f64| -> f64 {
            let u = (y - c) / w;
            if u.abs() >= 1.0 {
                f64::NEG_INFINITY
            } else {
                -1.0 / (1.0 - u * u)
            }
        };
        let f = TestFunction::from_log_fn(
            "two smooth bumps astride the origin",
            (-1.5, 1.5),
            Arc::new(move |y: f64| {
                let a = plateau(y, 0.6, 0.4);
                let b = plateau(y, -0.7, 0.3) + 0.5f64.ln();
                SignedLogValue::new(1, crate::log_domain::log_add_exp(a, b))
            }),
        );
        let quad = QuadConfig {
            rel_tol: 2e-6,
            max_level: 8,
        };
        let xs = [0.4, 1.7];
        let at = |x: f64| apply_at_point(&split, &f, x, Measure::WAlpha, &quad);
        let half = |x: f64, reflect: bool, flip: bool| -> SignedLogValue {
            let g = |node: &Node| {
                let y = node.x;
                let arg = if flip { -y } else { y };
                let fv = f.eval_log(arg);
                if fv.is_zero() {
                    return SignedLogValue::ZERO;
                }
                let yy = if reflect { -y } else { y };
                let k = match potential_kernel(KernelKind::Dunkl, &params, x, yy, &quad) {
                    Ok(v) => v,
                    Err(_) => return SignedLogValue::ZERO,
                };
                (k * fv).scale_log((2.0 * -0.6 + 1.0) * y.ln())
            };
            let mut breaks = vec![0.0, 1.5];
            if x < 1.5 {
                breaks.insert(1, x);
            }
            let out = integrate_panels_log(&|_, node: &Node| g(node), &breaks, &quad);
            out.value
        };
        for &x in &xs {
            let lhs_plus = at(x);
            let rhs_plus = half(x, false, false) + half(x, true, true);
            assert_relative_eq!(
                lhs_plus.to_real(),
                rhs_plus.to_real(),
                max_relative = 2e-4
            );
            let lhs_minus = at(-x);
            let rhs_minus = half(x, true, false) + half(x, false, true);
            assert_relative_eq!(
                lhs_minus.to_real(),
                rhs_minus.to_real(),
                max_relative = 2e-4
            );
        }
    }

    #[test]
    fn row_norms_vary_continuously_along_the_grid() {
        // The split boundary x = 2 is the one genuine discontinuity of the
        // global row norm (rows on the far side pick up the local square),
        // so each side is checked on its own geometric grid.
        let params = Params::new(0.0, 0.7).unwrap();
        let split = SplitKernel::new(KernelKind::Convolution, params, SplitPart::Global);
        let quad = quick();
        for start in [0.4, 2.2] {
            let xs: Vec<f64> = (0..8).map(|k| start * 1.2f64.powi(k)).collect();
            let logs: Vec<f64> = xs
                .iter()
                .map(|&x| {
                    let v = row_norm(&split, x, 3.0, &quad).unwrap();
                    assert!(!v.is_divergent(), "norm blew up at x = {x}");
                    v.log_abs()
                })
                .collect();
            for pair in logs.windows(2) {
                assert!(
                    (pair[1] - pair[0]).abs() < 0.6,
                    "jump between consecutive grid points: {pair:?} (grid from {start})"
                );
            }
        }
    }

    #[test]
    fn slope_fit_recovers_exact_power_laws() {
        let xs: [f64; 5] = [2.0, 3.0, 5.0, 8.0, 13.0];
        let logs: Vec<f64> = xs.iter().map(|x| 3.7f64.ln() - 1.25 * x.ln()).collect();
        assert_relative_eq!(fit_log_slope(&xs, &logs), -1.25, epsilon = 1e-12);
    }

    #[test]
    fn experiment_rows_flatten_to_csv_cells() {
        let row = ExperimentRow::new(
            "row_norm",
            vec![("alpha".into(), 0.5), ("x".into(), 8.0)],
            SignedLogValue::new(-1, 2.5),
            1e-6,
        );
        let cells = row.csv_record();
        assert_eq!(cells[0], "row_norm");
        assert_eq!(cells[1], "alpha=0.5;x=8");
        assert_eq!(cells[2], "2.5");
        assert_eq!(cells[3], "-1");
    }
}
