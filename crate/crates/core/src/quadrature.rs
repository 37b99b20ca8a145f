//! Log-domain quadrature: tanh-sinh panels with endpoint-singularity
//! support, a window-doubling driver for infinite tails, and cached
//! Gauss-Legendre rules.
//!
//! Integrands are supplied in the log domain as `SignedLogValue`s, so
//! integrals whose scale is e^{-1000} are handled with full relative
//! accuracy. Nodes carry stable log-distances to both panel endpoints,
//! which is what power-law endpoint factors need; the raw coordinate of a
//! node near an endpoint is only accurate to absolute rounding.

use crate::log_domain::{log_add_exp, SignedLogValue};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Tolerances and effort limits for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Target relative error of the returned value.
    pub rel_tol: f64,
    /// Maximum tanh-sinh refinement level (level L uses step 0.5 / 2^L).
    pub max_level: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, max_level: 9 }
    }
}

/// A tanh-sinh node. `x` is the coordinate; the two log-distances are
/// computed without cancellation and remain finite (as logs) even when the
/// distance itself underflows f64.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    pub log_from_left: f64,
    pub log_from_right: f64,
}

/// Result of a quadrature run.
#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome {
    pub value: SignedLogValue,
    /// Estimated relative error of `value` (difference of the last two
    /// refinement levels plus rounding amplified by cancellation).
    pub rel_err: f64,
    /// Ratio of the total positive-plus-negative mass to |value|; large
    /// values mean the result came from heavy cancellation.
    pub cancellation: f64,
    /// The integral was detected to diverge (level sums or window partial
    /// sums kept growing).
    pub diverged: bool,
    pub levels: u32,
}

impl QuadOutcome {
    fn divergent(sign: i8) -> Self {
        QuadOutcome {
            value: SignedLogValue::new(if sign == 0 { 1 } else { sign }, f64::INFINITY),
            rel_err: f64::INFINITY,
            cancellation: f64::INFINITY,
            diverged: true,
            levels: 0,
        }
    }
}

const TAU_MAX: f64 = 9.5;
const H0: f64 = 0.5;
/// Three consecutive >10% level (or window) growths flag divergence.
const GROWTH_LOG: f64 = 0.09531017980432486; // ln(1.1)
const GROWTH_STREAK: u32 = 3;

/// Tanh-sinh integration of `f` over the finite interval (a, b) in the log
/// domain. Integrable endpoint singularities are fine. A non-integrable
/// endpoint shows up as node contributions that are still growing at the
/// truncation of the node range and is reported as divergence; power
/// singularities within about 1e-4 of the integrability threshold are
/// classified as divergent as well, callers must not straddle that margin.
pub fn integrate_log<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadOutcome
where
    F: Fn(&Node) -> SignedLogValue,
{
    assert!(a < b && a.is_finite() && b.is_finite(), "need finite a < b, got [{a}, {b}]");
    let r = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let log_r = r.ln();

    // Running positive / negative log-mass over all nodes seen so far.
    let mut pos = f64::NEG_INFINITY;
    let mut neg = f64::NEG_INFINITY;

    // Per-node evaluation: contribution (log of |f| times weight, sign), a
    // divergent hit, or an underflowed/zero value.
    enum NodeEval {
        Divergent(i8),
        Contribution(f64, i8),
        Negligible,
    }
    let eval = |tau: f64| -> NodeEval {
        let v = std::f64::consts::FRAC_PI_2 * tau.sinh();
        // Stable distances: 1 -+ tanh(v) = 2 e^{-+2v} / (1 + e^{-+2v}).
        let (log_dl, log_dr);
        if v >= 0.0 {
            log_dr = log_r + std::f64::consts::LN_2 - 2.0 * v - (-2.0 * v).exp().ln_1p();
            log_dl = log_r + std::f64::consts::LN_2 - (-2.0 * v).exp().ln_1p();
        } else {
            log_dl = log_r + std::f64::consts::LN_2 + 2.0 * v - (2.0 * v).exp().ln_1p();
            log_dr = log_r + std::f64::consts::LN_2 - (2.0 * v).exp().ln_1p();
        }
        let node = Node { x: c + r * v.tanh(), log_from_left: log_dl, log_from_right: log_dr };
        let fv = f(&node);
        if fv.is_divergent() {
            return NodeEval::Divergent(fv.sign());
        }
        if fv.sign() == 0 {
            return NodeEval::Negligible;
        }
        // log weight: ln r + ln(pi/2) + ln cosh(tau) - 2 ln cosh(v)
        let log_w = log_r + std::f64::consts::FRAC_PI_2.ln()
            + crate::log_domain::ln_cosh(tau)
            - 2.0 * crate::log_domain::ln_cosh(v);
        NodeEval::Contribution(fv.log_abs() + log_w, fv.sign())
    };

    let mut prev: Option<SignedLogValue> = None;
    let mut growth_streak = 0u32;
    let mut rel_err = f64::INFINITY;
    let mut last_value = SignedLogValue::ZERO;
    let mut last_cancel = 1.0f64;
    let mut levels_used = 0;

    for level in 0..=cfg.max_level {
        let h = H0 / (1u64 << level) as f64;
        if level == 0 {
            // Per-side statistics over the base level: the largest node
            // contribution and the contribution of the outermost node. A
            // tail that has not started to decay by the outermost node
            // means a non-integrable endpoint.
            let mut side_max = [f64::NEG_INFINITY; 2];
            let mut side_out = [f64::NEG_INFINITY; 2];
            let mut side_out_sign = [0i8; 2];
            let n0 = (TAU_MAX / h).floor() as i64;
            for k in -n0..=n0 {
                match eval(k as f64 * h) {
                    NodeEval::Divergent(s) => return QuadOutcome::divergent(s),
                    NodeEval::Negligible => {}
                    NodeEval::Contribution(contrib, sign) => {
                        if sign > 0 {
                            pos = log_add_exp(pos, contrib);
                        } else {
                            neg = log_add_exp(neg, contrib);
                        }
                        if k != 0 {
                            let side = if k < 0 { 0 } else { 1 };
                            side_max[side] = side_max[side].max(contrib);
                            if k.unsigned_abs() == n0 as u64 {
                                side_out[side] = contrib;
                                side_out_sign[side] = sign;
                            }
                        }
                    }
                }
            }
            for side in 0..2 {
                if side_out[side].is_finite()
                    && side_out[side] > side_max[side] - std::f64::consts::LN_10
                {
                    return QuadOutcome::divergent(side_out_sign[side]);
                }
            }
        } else {
            let kmax = (TAU_MAX / h).floor() as i64;
            let mut k = 1i64;
            while k <= kmax {
                for tau in [k as f64 * h, -(k as f64) * h] {
                    match eval(tau) {
                        NodeEval::Divergent(s) => return QuadOutcome::divergent(s),
                        NodeEval::Negligible => {}
                        NodeEval::Contribution(contrib, sign) => {
                            if sign > 0 {
                                pos = log_add_exp(pos, contrib);
                            } else {
                                neg = log_add_exp(neg, contrib);
                            }
                        }
                    }
                }
                k += 2;
            }
        }
        let log_h = h.ln();
        let p = SignedLogValue::from_log(log_h + pos);
        let n = SignedLogValue::from_log(log_h + neg);
        let (value, amp) = p.add_with_accuracy(-n, 2.2e-16);
        let total_mass = log_add_exp(log_h + pos, log_h + neg);
        last_cancel = if value.is_zero() {
            if total_mass == f64::NEG_INFINITY { 1.0 } else { f64::INFINITY }
        } else {
            (total_mass - value.log_abs()).exp().max(1.0)
        };
        levels_used = level;

        if let Some(pv) = prev {
            // Divergence heuristic: sums that keep growing level over level.
            if !pv.is_zero()
                && !value.is_zero()
                && value.sign() == pv.sign()
                && value.log_abs() - pv.log_abs() > GROWTH_LOG
            {
                growth_streak += 1;
                if growth_streak >= GROWTH_STREAK {
                    return QuadOutcome::divergent(value.sign());
                }
            } else {
                growth_streak = 0;
            }
            let diff = value + (-pv);
            rel_err = if value.is_zero() {
                if diff.is_zero() { 0.0 } else { f64::INFINITY }
            } else {
                (diff.log_abs() - value.log_abs()).exp()
            };
            let floor = amp.max(last_cancel) * 2.2e-16;
            if rel_err.max(floor) <= cfg.rel_tol && level >= 2 {
                return QuadOutcome {
                    value,
                    rel_err: rel_err.max(floor),
                    cancellation: last_cancel,
                    diverged: false,
                    levels: level,
                };
            }
        }
        prev = Some(value);
        last_value = value;
    }

    QuadOutcome {
        value: last_value,
        rel_err: rel_err.max(last_cancel * 2.2e-16),
        cancellation: last_cancel,
        diverged: false,
        levels: levels_used,
    }
}

/// Integrate over a chain of panels split at the given breakpoints. Place a
/// breakpoint at every interior singularity or kink; the tanh-sinh rule then
/// sees each of them as an endpoint, and the integrand receives the index
/// of the current panel so it can tell which log-distance points at the
/// singularity. The breakpoints must be strictly increasing. Errors add;
/// divergence of any panel is divergence of the sum.
pub fn integrate_panels_log<F>(f: &F, breakpoints: &[f64], cfg: &QuadConfig) -> QuadOutcome
where
    F: Fn(usize, &Node) -> SignedLogValue,
{
    assert!(breakpoints.len() >= 2, "need at least two breakpoints");
    assert!(
        breakpoints.windows(2).all(|w| w[0] < w[1]),
        "breakpoints must be strictly increasing: {breakpoints:?}"
    );
    let mut total = SignedLogValue::ZERO;
    let mut abs_err_log = f64::NEG_INFINITY;
    let mut cancellation = 1.0f64;
    let mut levels = 0;
    for (idx, w) in breakpoints.windows(2).enumerate() {
        let out = integrate_log(|n: &Node| f(idx, n), w[0], w[1], cfg);
        if out.diverged {
            return out;
        }
        if !out.value.is_zero() {
            abs_err_log = log_add_exp(abs_err_log, out.value.log_abs() + out.rel_err.ln());
        }
        total = total + out.value;
        cancellation = cancellation.max(out.cancellation);
        levels = levels.max(out.levels);
    }
    let rel_err = if total.is_zero() {
        if abs_err_log == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY }
    } else {
        (abs_err_log - total.log_abs()).exp()
    };
    QuadOutcome { value: total, rel_err, cancellation, diverged: false, levels }
}

/// Integrate `f` over [a, infinity) by doubling windows: panels
/// [a, a+w], [a+w, a+3w], ... with widths w, 2w, 4w, ...
///
/// The first window must already contain the last local maximum of the
/// integrand; only the decaying tail may extend into later windows,
/// otherwise the growth heuristic can misread a rising flank as divergence.
/// Divergence is declared when the running total grows by more than 10%
/// for three consecutive windows, or when the tail never decays.
pub fn integrate_to_infinity_log<F>(
    f: &F,
    a: f64,
    first_width: f64,
    cfg: &QuadConfig,
) -> QuadOutcome
where
    F: Fn(&Node) -> SignedLogValue,
{
    assert!(first_width > 0.0, "window width must be positive");
    let mut total = SignedLogValue::ZERO;
    let mut lo = a;
    let mut w = first_width;
    let mut growth_streak = 0u32;
    let mut quiet_tails = 0u32;
    let mut abs_err_log = f64::NEG_INFINITY;
    let mut cancellation = 1.0f64;
    let mut levels = 0;

    for _ in 0..60 {
        let out = integrate_log(&f, lo, lo + w, cfg);
        if out.diverged {
            return out;
        }
        if !out.value.is_zero() {
            abs_err_log = log_add_exp(abs_err_log, out.value.log_abs() + out.rel_err.ln());
        }
        let new_total = total + out.value;
        cancellation = cancellation.max(out.cancellation);
        levels = levels.max(out.levels);

        if !total.is_zero()
            && !new_total.is_zero()
            && new_total.sign() == total.sign()
            && new_total.log_abs() - total.log_abs() > GROWTH_LOG
        {
            growth_streak += 1;
            if growth_streak >= GROWTH_STREAK {
                return QuadOutcome::divergent(new_total.sign());
            }
        } else {
            growth_streak = 0;
        }

        let tail_small = match (out.value.is_zero(), new_total.is_zero()) {
            (true, _) => true,
            (false, true) => false,
            (false, false) => out.value.log_abs() - new_total.log_abs() < cfg.rel_tol.ln(),
        };
        total = new_total;
        if tail_small {
            quiet_tails += 1;
            if quiet_tails >= 2 {
                let rel_err = if total.is_zero() {
                    0.0
                } else {
                    (abs_err_log - total.log_abs()).exp().max(cfg.rel_tol)
                };
                return QuadOutcome { value: total, rel_err, cancellation, diverged: false, levels };
            }
        } else {
            quiet_tails = 0;
        }
        lo += w;
        w *= 2.0;
    }
    // The tail never settled within the window budget; treat as divergent
    // rather than silently returning a truncated value.
    QuadOutcome::divergent(total.sign())
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed once per n by Newton iteration on the Legendre recurrence and
/// cached for the life of the process.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(&r) = guard.get(&n) {
        return r;
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pd = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            pd = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / pd;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * pd * pd);
    }
    let leaked: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new((nodes, weights)));
    guard.insert(n, leaked);
    leaked
}
