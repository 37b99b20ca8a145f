//! Exact classification of the (1/p, 1/q) pairs for which the potential
//! operators map L^p boundedly into L^q, and exact polygon geometry of the
//! bounded regions for plotting.
//!
//! All decisions are made in arbitrary-precision rational arithmetic because
//! the content of the classification lives on boundary lines: whether a point
//! on a strip edge or at a corner belongs to the bounded region is decided by
//! strict versus non-strict inequalities that float rounding would blur.
//! Floats appear only on export.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;

fn rat_i(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational value of a finite float; every finite f64 is rational.
fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Parses an exact rational from "3/4", "-2", or a finite decimal "0.25".
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Domain("empty rational literal".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = BigInt::from_str(n.trim())
            .map_err(|e| Error::Domain(format!("bad numerator in {t:?}: {e}")))?;
        let den = BigInt::from_str(d.trim())
            .map_err(|e| Error::Domain(format!("bad denominator in {t:?}: {e}")))?;
        if den.is_zero() {
            return Err(Error::Domain(format!("zero denominator in {t:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if t.contains('.') {
        return parse_decimal(t);
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|e| Error::Domain(format!("bad rational literal {t:?}: {e}")))
}

fn parse_decimal(t: &str) -> Result<BigRational> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (ip, fp) = body.split_once('.').expect("caller checked for a dot");
    if ip.is_empty() && fp.is_empty() {
        return Err(Error::Domain(format!("no digits in {t:?}")));
    }
    if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Domain(format!("bad decimal literal {t:?}")));
    }
    let scale = BigInt::from(10u32).pow(fp.len() as u32);
    let int: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().expect("digits") };
    let frac: BigInt = if fp.is_empty() { BigInt::zero() } else { fp.parse().expect("digits") };
    let mut v = BigRational::new(int * &scale + frac, scale);
    if neg {
        v = -v;
    }
    Ok(v)
}

/// A point (1/p, 1/q) in the unit square of reciprocal Lebesgue exponents.
///
/// p = infinity is encoded as `inv_p = 0`, and likewise for q. Coordinates
/// are exact rationals so that membership of boundary points is decided
/// without rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPoint {
    pub inv_p: BigRational,
    pub inv_q: BigRational,
}

impl RegionPoint {
    pub fn new(inv_p: BigRational, inv_q: BigRational) -> Result<Self> {
        for (name, c) in [("1/p", &inv_p), ("1/q", &inv_q)] {
            if *c < BigRational::zero() || *c > BigRational::one() {
                return Err(Error::Domain(format!("{name} = {c} lies outside [0, 1]")));
            }
        }
        Ok(Self { inv_p, inv_q })
    }

    /// Exact construction from floats. The binary values of the floats are
    /// used verbatim, so 0.5 means 1/2 but 0.3 means the f64 nearest 3/10;
    /// use [`RegionPoint::parse`] when a decimal fraction is intended.
    pub fn from_f64(inv_p: f64, inv_q: f64) -> Result<Self> {
        if !inv_p.is_finite() || !inv_q.is_finite() {
            return Err(Error::Domain(format!(
                "region point coordinates must be finite, got ({inv_p}, {inv_q})"
            )));
        }
        Self::new(rat(inv_p), rat(inv_q))
    }

    /// Parses a pair of rational literals such as ("2/3", "0.5").
    pub fn parse(inv_p: &str, inv_q: &str) -> Result<Self> {
        Self::new(parse_rational(inv_p)?, parse_rational(inv_q)?)
    }

    /// The dual point (1 - 1/q, 1 - 1/p), i.e. (1/q', 1/p').
    pub fn dual(&self) -> Self {
        let one = BigRational::one();
        Self { inv_p: &one - &self.inv_q, inv_q: &one - &self.inv_p }
    }

    pub fn as_f64s(&self) -> (f64, f64) {
        (self.inv_p.to_f64().expect("in [0,1]"), self.inv_q.to_f64().expect("in [0,1]"))
    }
}

impl fmt::Display for RegionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.inv_p, self.inv_q)
    }
}

/// The outcome of a boundedness test together with the clause that decided.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub bounded: bool,
    /// Name of the single clause that decided the verdict.
    pub rule: String,
    /// The decisive (in)equality with the actual numbers substituted.
    pub binding_constraint: String,
}

impl Verdict {
    fn ok(rule: &str, binding: String) -> Self {
        Self { bounded: true, rule: rule.into(), binding_constraint: binding }
    }

    fn no(rule: &str, binding: String) -> Self {
        Self { bounded: false, rule: rule.into(), binding_constraint: binding }
    }
}

/// The auxiliary exponents entering the local and global characterizations:
/// `delta = max(-1/2, alpha) + 1` governs behavior near the origin and
/// `eta = max(1/2, -alpha)` governs behavior at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedExponents {
    pub delta: f64,
    pub eta: f64,
}

impl DerivedExponents {
    pub fn new(alpha: f64) -> Result<Self> {
        Params::new(alpha, 1.0)?;
        Ok(Self { delta: alpha.max(-0.5) + 1.0, eta: 0.5f64.max(-alpha) })
    }
}

fn neg_half() -> BigRational {
    rat_i(-1, 2)
}

/// Shared core for the convolution-type and reflection-symmetric settings,
/// whose characterizations coincide clause for clause.
fn conv_verdict(a: &BigRational, s: &BigRational, pt: &RegionPoint) -> Verdict {
    let one = BigRational::one();
    let u = &pt.inv_p;
    let v = &pt.inv_q;
    let width = s / &(a + &one);
    let hi = u + &width;
    if *a >= neg_half() {
        let lo = u - &width;
        if *v < lo {
            return Verdict::no(
                "lower strip inequality",
                format!("1/q = {v} < 1/p - sigma/(alpha+1) = {lo}"),
            );
        }
        if *v >= hi {
            return Verdict::no(
                "upper strip inequality",
                format!("1/q = {v} >= 1/p + sigma/(alpha+1) = {hi}"),
            );
        }
        if *u == width && v.is_zero() {
            return Verdict::no(
                "excluded corner (sigma/(alpha+1), 0)",
                format!("(1/p, 1/q) = ({u}, 0)"),
            );
        }
        if u.is_one() && *v == &one - &width {
            return Verdict::no(
                "excluded corner (1, 1 - sigma/(alpha+1))",
                format!("(1/p, 1/q) = (1, {v})"),
            );
        }
        Verdict::ok(
            "two-sided strip, order >= -1/2",
            format!("{lo} <= 1/q = {v} < {hi} and corners avoided"),
        )
    } else {
        let lo = u + &(s / a);
        if *v < lo {
            return Verdict::no(
                "lower strip inequality",
                format!("1/q = {v} < 1/p + sigma/alpha = {lo}"),
            );
        }
        if *v >= hi {
            return Verdict::no(
                "upper strip inequality",
                format!("1/q = {v} >= 1/p + sigma/(alpha+1) = {hi}"),
            );
        }
        Verdict::ok("asymmetric strip, order < -1/2", format!("{lo} <= 1/q = {v} < {hi}"))
    }
}

/// Decides L^p -> L^q boundedness of the convolution-type potential operator
/// on the half-line with the power weight x^(2 alpha + 1) dx.
pub fn bounded_conv(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    Ok(conv_verdict(&rat(pr.alpha), &rat(pr.sigma), pt))
}

/// Decides L^p -> L^q boundedness of the reflection-symmetric potential
/// operator on the line with the weight |x|^(2 alpha + 1) dx. The bounded
/// region coincides clause for clause with the convolution-type one.
pub fn bounded_dunkl(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    Ok(conv_verdict(&rat(pr.alpha), &rat(pr.sigma), pt))
}

/// Decides L^p(dx) -> L^q(dx) boundedness of the Hermite-type potential
/// operator. For alpha < -1/2 the operator is only defined on L^p with
/// 1/p < alpha + 3/2, and the target exponent must satisfy
/// 1/q > -alpha - 1/2.
pub fn bounded_hermite_type(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let one = BigRational::one();
    let u = &pt.inv_p;
    let v = &pt.inv_q;
    let two_s = rat_i(2, 1) * &s;
    let small_order = a < neg_half();
    if small_order {
        let dom = &a + rat_i(3, 2);
        if *u >= dom {
            return Ok(Verdict::no(
                "Dom restriction",
                format!("1/p = {u} >= alpha + 3/2 = {dom}, so L^p does not embed in the domain of definition"),
            ));
        }
    }
    let lo = u - &two_s;
    let hi = u + &two_s;
    if *v < lo {
        return Ok(Verdict::no(
            "lower strip inequality",
            format!("1/q = {v} < 1/p - 2 sigma = {lo}"),
        ));
    }
    if *v >= hi {
        return Ok(Verdict::no(
            "upper strip inequality",
            format!("1/q = {v} >= 1/p + 2 sigma = {hi}"),
        ));
    }
    if small_order {
        let floor_q = -(&a) - rat_i(1, 2);
        if *v <= floor_q {
            return Ok(Verdict::no(
                "target exponent restriction",
                format!("1/q = {v} <= -alpha - 1/2 = {floor_q}"),
            ));
        }
        return Ok(Verdict::ok(
            "restricted strip, order < -1/2",
            format!("{lo} <= 1/q = {v} < {hi} with 1/q > {floor_q} and 1/p inside Dom"),
        ));
    }
    if *u == two_s && v.is_zero() {
        return Ok(Verdict::no("excluded corner (2 sigma, 0)", format!("(1/p, 1/q) = ({u}, 0)")));
    }
    if u.is_one() && *v == &one - &two_s {
        return Ok(Verdict::no(
            "excluded corner (1, 1 - 2 sigma)",
            format!("(1/p, 1/q) = (1, {v})"),
        ));
    }
    Ok(Verdict::ok(
        "two-sided strip, order >= -1/2",
        format!("{lo} <= 1/q = {v} < {hi} and corners avoided"),
    ))
}

/// Decides boundedness of the potential operator restricted to the near
/// region x, y <= 2 in the convolution-type setting. Only the lower strip
/// inequality and its two corner exclusions survive localization.
pub fn bounded_local_conv(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let one = BigRational::one();
    let delta = std::cmp::max(a, neg_half()) + &one;
    let width = &s / &delta;
    let u = &pt.inv_p;
    let v = &pt.inv_q;
    let lo = u - &width;
    if *v < lo {
        return Ok(Verdict::no(
            "local lower inequality",
            format!("1/q = {v} < 1/p - sigma/delta = {lo}"),
        ));
    }
    if *u == width && v.is_zero() {
        return Ok(Verdict::no(
            "excluded corner (sigma/delta, 0)",
            format!("(1/p, 1/q) = ({u}, 0)"),
        ));
    }
    if u.is_one() && *v == &one - &width {
        return Ok(Verdict::no(
            "excluded corner (1, 1 - sigma/delta)",
            format!("(1/p, 1/q) = (1, {v})"),
        ));
    }
    Ok(Verdict::ok("local lower bound", format!("1/p - sigma/delta = {lo} <= 1/q = {v}")))
}

/// Decides boundedness of the potential operator restricted to the far
/// region max(x, y) > 2 in the convolution-type setting. The corner
/// exclusions are active only when sigma <= eta = 1/2.
pub fn bounded_global_conv(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let one = BigRational::one();
    let eta = std::cmp::max(-(&a), rat_i(1, 2));
    let u = &pt.inv_p;
    let v = &pt.inv_q;
    let lo = u - &(&s / &eta);
    let hi = u + &(&s / &(&a + &one));
    if *v < lo {
        return Ok(Verdict::no(
            "global lower inequality",
            format!("1/q = {v} < 1/p - sigma/eta = {lo}"),
        ));
    }
    if *v >= hi {
        return Ok(Verdict::no(
            "global upper inequality",
            format!("1/q = {v} >= 1/p + sigma/(alpha+1) = {hi}"),
        ));
    }
    let half = rat_i(1, 2);
    let two_s = rat_i(2, 1) * &s;
    if eta == half && s <= half {
        if *u == two_s && v.is_zero() {
            return Ok(Verdict::no(
                "excluded corner (2 sigma, 0)",
                format!("(1/p, 1/q) = ({u}, 0)"),
            ));
        }
        if u.is_one() && *v == &one - &two_s {
            return Ok(Verdict::no(
                "excluded corner (1, 1 - 2 sigma)",
                format!("(1/p, 1/q) = (1, {v})"),
            ));
        }
    }
    Ok(Verdict::ok("global strip", format!("{lo} <= 1/q = {v} < {hi}")))
}

/// Decides boundedness of the Hermite-type potential operator restricted to
/// the near region x, y <= 2. Mirrors [`bounded_hermite_type`] without the
/// upper strip inequality.
pub fn bounded_local_hermite(alpha: f64, sigma: f64, pt: &RegionPoint) -> Result<Verdict> {
    let pr = Params::new(alpha, sigma)?;
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let one = BigRational::one();
    let u = &pt.inv_p;
    let v = &pt.inv_q;
    let two_s = rat_i(2, 1) * &s;
    let small_order = a < neg_half();
    if small_order {
        let dom = &a + rat_i(3, 2);
        if *u >= dom {
            return Ok(Verdict::no(
                "Dom restriction",
                format!("1/p = {u} >= alpha + 3/2 = {dom}, so L^p does not embed in the domain of definition"),
            ));
        }
    }
    let lo = u - &two_s;
    if *v < lo {
        return Ok(Verdict::no(
            "local lower inequality",
            format!("1/q = {v} < 1/p - 2 sigma = {lo}"),
        ));
    }
    if small_order {
        let floor_q = -(&a) - rat_i(1, 2);
        if *v <= floor_q {
            return Ok(Verdict::no(
                "target exponent restriction",
                format!("1/q = {v} <= -alpha - 1/2 = {floor_q}"),
            ));
        }
        return Ok(Verdict::ok(
            "restricted local lower bound, order < -1/2",
            format!("{lo} <= 1/q = {v} and 1/q > {floor_q} and 1/p inside Dom"),
        ));
    }
    if *u == two_s && v.is_zero() {
        return Ok(Verdict::no("excluded corner (2 sigma, 0)", format!("(1/p, 1/q) = ({u}, 0)")));
    }
    if u.is_one() && *v == &one - &two_s {
        return Ok(Verdict::no(
            "excluded corner (1, 1 - 2 sigma)",
            format!("(1/p, 1/q) = (1, {v})"),
        ));
    }
    Ok(Verdict::ok("local lower bound", format!("1/p - 2 sigma = {lo} <= 1/q = {v}")))
}

/// Which operator family a figure or verdict describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureSetting {
    Conv,
    HermiteType,
    Dunkl,
}

impl FromStr for FigureSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conv" => Ok(Self::Conv),
            "hermite_type" => Ok(Self::HermiteType),
            "dunkl" => Ok(Self::Dunkl),
            other => Err(Error::Domain(format!(
                "unknown setting {other:?}, expected conv, hermite_type, or dunkl"
            ))),
        }
    }
}

impl fmt::Display for FigureSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Conv => "conv",
            Self::HermiteType => "hermite_type",
            Self::Dunkl => "dunkl",
        })
    }
}

/// Dispatches to the full-operator predicate for the given setting.
pub fn bounded_for_setting(
    setting: FigureSetting,
    alpha: f64,
    sigma: f64,
    pt: &RegionPoint,
) -> Result<Verdict> {
    match setting {
        FigureSetting::Conv => bounded_conv(alpha, sigma, pt),
        FigureSetting::HermiteType => bounded_hermite_type(alpha, sigma, pt),
        FigureSetting::Dunkl => bounded_dunkl(alpha, sigma, pt),
    }
}

/// Classifies the qualitative shape of the bounded region in the
/// (alpha, sigma) plane. Exactly one of "b1".."b4" holds for every
/// admissible pair: "b1" when sigma >= alpha+1 and sigma > -alpha/2 - 1/4,
/// "b2" when -alpha/2 - 1/4 < sigma < alpha+1, "b3" when
/// alpha+1 <= sigma <= -alpha/2 - 1/4, and "b4" otherwise.
pub fn shape_case(alpha: f64, sigma: f64) -> Result<&'static str> {
    let pr = Params::new(alpha, sigma)?;
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let wide = s >= &a + BigRational::one();
    let oscillatory = s > -(&a) / rat_i(2, 1) - rat_i(1, 4);
    Ok(match (wide, oscillatory) {
        (true, true) => "b1",
        (false, true) => "b2",
        (true, false) => "b3",
        (false, false) => "b4",
    })
}

/// One straight piece of a region boundary.
///
/// `closed_start` and `closed_end` say whether the endpoint itself belongs
/// to the bounded region; the label has the form
/// `<case>:<boundary name>:<closed|open>` where the final flag says whether
/// the interior of the segment belongs to the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub segment_id: usize,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub closed_start: bool,
    pub closed_end: bool,
    pub label: String,
}

/// Exact boundary geometry of a boundedness region, exported for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub setting: FigureSetting,
    pub alpha: f64,
    pub sigma: f64,
    /// Which of the four qualitative region shapes applies, "b1".."b4".
    pub case_label: String,
    /// Polygon vertices of the region closure, counterclockwise, starting
    /// from the lexicographically smallest vertex.
    pub vertices: Vec<(f64, f64)>,
    pub segments: Vec<Segment>,
}

impl FigureData {
    /// RFC 4180 CSV with header
    /// `segment_id,x0,y0,x1,y1,closed_start,closed_end,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("segment_id,x0,y0,x1,y1,closed_start,closed_end,label\n");
        for s in &self.segments {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.segment_id, s.x0, s.y0, s.x1, s.y1, s.closed_start, s.closed_end, s.label
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
struct RatPoint {
    u: BigRational,
    v: BigRational,
}

/// The closed half-plane a*u + b*v <= c; `strict` records that the region
/// actually excludes the boundary line itself.
struct Constraint {
    a: BigRational,
    b: BigRational,
    c: BigRational,
    strict: bool,
    name: &'static str,
}

impl Constraint {
    fn new(a: i64, b: i64, c: BigRational, strict: bool, name: &'static str) -> Self {
        Self { a: rat_i(a, 1), b: rat_i(b, 1), c, strict, name }
    }

    fn eval(&self, p: &RatPoint) -> BigRational {
        &self.a * &p.u + &self.b * &p.v
    }

    fn contains_line_point(&self, p: &RatPoint) -> bool {
        self.eval(p) == self.c
    }
}

fn unit_square() -> Vec<RatPoint> {
    let z = BigRational::zero();
    let o = BigRational::one();
    vec![
        RatPoint { u: z.clone(), v: z.clone() },
        RatPoint { u: o.clone(), v: z.clone() },
        RatPoint { u: o.clone(), v: o.clone() },
        RatPoint { u: z, v: o },
    ]
}

fn square_constraints() -> Vec<Constraint> {
    vec![
        Constraint::new(-1, 0, BigRational::zero(), false, "left_edge"),
        Constraint::new(0, -1, BigRational::zero(), false, "bottom_edge"),
        Constraint::new(1, 0, BigRational::one(), false, "right_edge"),
        Constraint::new(0, 1, BigRational::one(), false, "top_edge"),
    ]
}

fn setting_constraints(setting: FigureSetting, a: &BigRational, s: &BigRational) -> Vec<Constraint> {
    let one = BigRational::one();
    let mut cs = square_constraints();
    match setting {
        FigureSetting::Conv | FigureSetting::Dunkl => {
            let width = s / &(a + &one);
            let lower = if *a >= neg_half() { width.clone() } else { -(s / a) };
            cs.push(Constraint::new(1, -1, lower, false, "lower_strip"));
            cs.push(Constraint::new(-1, 1, width, true, "upper_strip"));
        }
        FigureSetting::HermiteType => {
            let two_s = rat_i(2, 1) * s;
            cs.push(Constraint::new(1, -1, two_s.clone(), false, "lower_strip"));
            cs.push(Constraint::new(-1, 1, two_s, true, "upper_strip"));
            if *a < neg_half() {
                cs.push(Constraint::new(1, 0, a + rat_i(3, 2), true, "domain_line"));
                cs.push(Constraint::new(0, -1, a + rat_i(1, 2), true, "target_floor"));
            }
        }
    }
    cs
}

/// Sutherland-Hodgman clip of a convex counterclockwise polygon against one
/// closed half-plane, in exact arithmetic.
fn clip(poly: Vec<RatPoint>, cons: &Constraint) -> Vec<RatPoint> {
    if poly.is_empty() {
        return poly;
    }
    let mut out: Vec<RatPoint> = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let cur = &poly[i];
        let nxt = &poly[(i + 1) % poly.len()];
        let vc = cons.eval(cur);
        let vn = cons.eval(nxt);
        let in_c = vc <= cons.c;
        let in_n = vn <= cons.c;
        if in_c {
            out.push(cur.clone());
        }
        if in_c != in_n {
            let t = (&cons.c - &vc) / (&vn - &vc);
            out.push(RatPoint {
                u: &cur.u + &(&t * &(&nxt.u - &cur.u)),
                v: &cur.v + &(&t * &(&nxt.v - &cur.v)),
            });
        }
    }
    dedup_cycle(out)
}

fn dedup_cycle(mut poly: Vec<RatPoint>) -> Vec<RatPoint> {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    poly
}

fn remove_collinear(poly: Vec<RatPoint>) -> Vec<RatPoint> {
    if poly.len() < 3 {
        return poly;
    }
    let n = poly.len();
    let mut keep = Vec::with_capacity(n);
    for i in 0..n {
        let prev = &poly[(i + n - 1) % n];
        let cur = &poly[i];
        let next = &poly[(i + 1) % n];
        let cross = (&cur.u - &prev.u) * (&next.v - &cur.v) - (&cur.v - &prev.v) * (&next.u - &cur.u);
        if !cross.is_zero() {
            keep.push(poly[i].clone());
        }
    }
    keep
}

fn canonical_rotation(poly: Vec<RatPoint>) -> Vec<RatPoint> {
    if poly.is_empty() {
        return poly;
    }
    let k = poly
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (&a.u, &a.v).cmp(&(&b.u, &b.v)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut out = poly[k..].to_vec();
    out.extend_from_slice(&poly[..k]);
    out
}

fn lerp(p: &RatPoint, q: &RatPoint, t: &BigRational) -> RatPoint {
    RatPoint { u: &p.u + &(t * &(&q.u - &p.u)), v: &p.v + &(t * &(&q.v - &p.v)) }
}

/// Computes the exact boundary polygon of the bounded region for the given
/// setting, annotated with the membership of every segment endpoint and the
/// open/closed character of every boundary line. Each polygon edge is split
/// into `resolution - 1` collinear sub-segments.
pub fn figure_data(
    setting: FigureSetting,
    alpha: f64,
    sigma: f64,
    resolution: usize,
) -> Result<FigureData> {
    let pr = Params::new(alpha, sigma)?;
    if resolution < 2 {
        return Err(Error::Domain(format!("resolution must be >= 2, got {resolution}")));
    }
    let a = rat(pr.alpha);
    let s = rat(pr.sigma);
    let constraints = setting_constraints(setting, &a, &s);
    let mut poly = unit_square();
    for c in &constraints {
        poly = clip(poly, c);
    }
    let poly = canonical_rotation(remove_collinear(poly));
    let case = shape_case(alpha, sigma)?;
    let vertices: Vec<(f64, f64)> = poly
        .iter()
        .map(|p| (p.u.to_f64().expect("in [0,1]"), p.v.to_f64().expect("in [0,1]")))
        .collect();

    let member = |p: &RatPoint| -> Result<bool> {
        let pt = RegionPoint::new(p.u.clone(), p.v.clone()).expect("clipped to unit square");
        Ok(bounded_for_setting(setting, alpha, sigma, &pt)?.bounded)
    };

    let mut segments = Vec::new();
    if poly.len() >= 3 {
        let n_sub = resolution - 1;
        for i in 0..poly.len() {
            let p = &poly[i];
            let q = &poly[(i + 1) % poly.len()];
            let mut names: Vec<&str> = Vec::new();
            let mut strict = false;
            for c in &constraints {
                if c.contains_line_point(p) && c.contains_line_point(q) {
                    names.push(c.name);
                    strict |= c.strict;
                }
            }
            debug_assert!(!names.is_empty(), "every boundary edge lies on a constraint line");
            let boundary = if names.is_empty() { "unattributed".into() } else { names.join("+") };
            let label =
                format!("{case}:{boundary}:{}", if strict { "open" } else { "closed" });
            let mut start = p.clone();
            let mut start_in = member(&start)?;
            for k in 0..n_sub {
                let t = rat_i((k + 1) as i64, n_sub as i64);
                let end = if k + 1 == n_sub { q.clone() } else { lerp(p, q, &t) };
                let end_in = member(&end)?;
                segments.push(Segment {
                    segment_id: segments.len(),
                    x0: start.u.to_f64().expect("in [0,1]"),
                    y0: start.v.to_f64().expect("in [0,1]"),
                    x1: end.u.to_f64().expect("in [0,1]"),
                    y1: end.v.to_f64().expect("in [0,1]"),
                    closed_start: start_in,
                    closed_end: end_in,
                    label: label.clone(),
                });
                start = end;
                start_in = end_in;
            }
        }
    }

    Ok(FigureData {
        setting,
        alpha,
        sigma,
        case_label: case.to_string(),
        vertices,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pt(inv_p: &str, inv_q: &str) -> RegionPoint {
        RegionPoint::parse(inv_p, inv_q).unwrap()
    }

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("3/4").unwrap(), rat_i(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat_i(1, 4));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), rat_i(1, 2));
        assert_eq!(parse_rational("-1/2").unwrap(), rat_i(-1, 2));
        assert_eq!(parse_rational("1.5").unwrap(), rat_i(3, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), rat_i(-1, 8));
        assert_eq!(parse_rational("2").unwrap(), rat_i(2, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat_i(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn region_point_construction_and_dual() {
        let p = RegionPoint::from_f64(0.5, 0.25).unwrap();
        assert_eq!(p, pt("1/2", "1/4"));
        assert_eq!(p.dual(), pt("3/4", "1/2"));
        assert_eq!(p.as_f64s(), (0.5, 0.25));
        assert!(RegionPoint::parse("-1/2", "0").is_err());
        assert!(RegionPoint::parse("0", "9/8").is_err());
        assert!(RegionPoint::from_f64(f64::NAN, 0.0).is_err());
        assert_eq!(format!("{}", pt("2/3", "1")), "(2/3, 1)");
    }

    #[test]
    fn convolution_examples() {
        // Upper right corner of the strip is excluded.
        let v = bounded_conv(0.0, 0.5, &pt("1", "1/2")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (1, 1 - sigma/(alpha+1))");

        // Interior point in the small-order asymmetric strip.
        let v = bounded_conv(-0.75, 0.1, &pt("1/2", "1/2")).unwrap();
        assert!(v.bounded, "{v:?}");

        // Wide strip swallows the whole square except two corners.
        let v = bounded_conv(0.0, 2.0, &pt("0", "1")).unwrap();
        assert!(v.bounded, "{v:?}");

        // Other excluded corner.
        let v = bounded_conv(0.0, 0.5, &pt("1/2", "0")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (sigma/(alpha+1), 0)");

        // Strict upper inequality: boundary line itself is unbounded.
        let v = bounded_conv(0.0, 0.5, &pt("1/4", "3/4")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "upper strip inequality");

        let v = bounded_conv(0.0, 0.5, &pt("3/4", "1/8")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "lower strip inequality");
    }

    #[test]
    fn hermite_type_examples() {
        // Outside the domain of definition: 1/p >= alpha + 3/2.
        let v = bounded_hermite_type(-0.75, 0.2, &pt("9/10", "3/10")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "Dom restriction");

        // Interior point of the restricted strip.
        let v = bounded_hermite_type(-0.75, 0.2, &pt("1/2", "3/10")).unwrap();
        assert!(v.bounded, "{v:?}");

        // Corner (2 sigma, 0) is excluded for order >= -1/2.
        let v = bounded_hermite_type(0.0, 0.25, &pt("1/2", "0")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (2 sigma, 0)");

        // Target exponent restriction is strict.
        let v = bounded_hermite_type(-0.75, 0.2, &pt("1/2", "1/4")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "target exponent restriction");
    }

    #[test]
    fn dunkl_matches_convolution() {
        let mut rng = StdRng::seed_from_u64(0x5EED);
        for _ in 0..1000 {
            let alpha = -1.0 + rng.random_range(1..=48) as f64 / 16.0;
            let sigma = rng.random_range(1..=32) as f64 / 16.0;
            let dp = rng.random_range(1..=16i64);
            let dq = rng.random_range(1..=16i64);
            let point = RegionPoint::new(
                rat_i(rng.random_range(0..=dp), dp),
                rat_i(rng.random_range(0..=dq), dq),
            )
            .unwrap();
            let c = bounded_conv(alpha, sigma, &point).unwrap();
            let d = bounded_dunkl(alpha, sigma, &point).unwrap();
            assert_eq!(c, d, "at alpha={alpha} sigma={sigma} {point}");
        }
        let v = bounded_dunkl(-0.5, 0.3, &pt("3/5", "3/10")).unwrap();
        assert!(v.bounded, "{v:?}");
        // pt = (sigma/(alpha+1), 0) is the excluded lower corner. The float
        // 0.6 is exactly twice the float 0.3, so building the point from
        // floats lands on the corner exactly.
        let corner = RegionPoint::from_f64(0.6, 0.0).unwrap();
        let v = bounded_dunkl(-0.5, 0.3, &corner).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (sigma/(alpha+1), 0)");
    }

    #[test]
    fn local_and_global_examples() {
        // delta = 2 at alpha = 1; (sigma/delta, 0) is excluded. The float
        // 0.4 halves exactly to the float 0.2.
        let v = bounded_local_conv(1.0, 0.4, &RegionPoint::from_f64(0.2, 0.0).unwrap()).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (sigma/delta, 0)");

        // eta = 0.8 at alpha = -0.8.
        let v = bounded_global_conv(-0.8, 0.3, &pt("9/10", "3/5")).unwrap();
        assert!(v.bounded, "{v:?}");

        // Global corners at (2 sigma, 0) and (1, 1 - 2 sigma), active for
        // order >= -1/2 and sigma <= 1/2; doubling a float is exact.
        let corner = RegionPoint::from_f64(0.6, 0.0).unwrap();
        let v = bounded_global_conv(0.0, 0.3, &corner).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (2 sigma, 0)");
        let v = bounded_global_conv(-0.5, 0.3, &corner).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (2 sigma, 0)");

        let de = DerivedExponents::new(1.0).unwrap();
        assert_eq!((de.delta, de.eta), (2.0, 0.5));
        let de = DerivedExponents::new(-0.8).unwrap();
        assert_eq!((de.delta, de.eta), (0.5, 0.8));
    }

    #[test]
    fn local_hermite_examples() {
        // Corner exclusion for order >= -1/2.
        let v = bounded_local_hermite(0.0, 0.25, &pt("1/2", "0")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "excluded corner (2 sigma, 0)");

        // Dom restriction for order < -1/2.
        let v = bounded_local_hermite(-0.75, 0.2, &pt("9/10", "3/10")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "Dom restriction");

        // Interior point: no upper strip constraint locally.
        let v = bounded_local_hermite(-0.75, 0.2, &pt("0", "1")).unwrap();
        assert!(v.bounded, "{v:?}");
        // The full operator rejects the same point by the upper inequality.
        let v = bounded_hermite_type(-0.75, 0.2, &pt("0", "1")).unwrap();
        assert!(!v.bounded);
        assert_eq!(v.rule, "upper strip inequality");
    }

    #[test]
    fn intersection_of_local_and_global_is_full_predicate() {
        let mut rng = StdRng::seed_from_u64(0x5EED);
        for _ in 0..1000 {
            let alpha = -1.0 + rng.random_range(1..=48) as f64 / 16.0;
            let sigma = rng.random_range(1..=32) as f64 / 16.0;
            let dp = rng.random_range(1..=16i64);
            let dq = rng.random_range(1..=16i64);
            let point = RegionPoint::new(
                rat_i(rng.random_range(0..=dp), dp),
                rat_i(rng.random_range(0..=dq), dq),
            )
            .unwrap();
            let full = bounded_conv(alpha, sigma, &point).unwrap().bounded;
            let local = bounded_local_conv(alpha, sigma, &point).unwrap().bounded;
            let global = bounded_global_conv(alpha, sigma, &point).unwrap().bounded;
            assert_eq!(
                full,
                local && global,
                "at alpha={alpha} sigma={sigma} {point}: full={full} local={local} global={global}"
            );
        }
    }

    #[test]
    fn duality_symmetry_off_corners() {
        let mut rng = StdRng::seed_from_u64(0x5EED);
        let mut checked = 0usize;
        for _ in 0..2000 {
            // Order >= -1/2 only; duality swaps the roles of p' and q.
            let alpha = -0.5 + rng.random_range(0..=40) as f64 / 16.0;
            let sigma = rng.random_range(1..=32) as f64 / 16.0;
            let dp = rng.random_range(1..=16i64);
            let dq = rng.random_range(1..=16i64);
            let point = RegionPoint::new(
                rat_i(rng.random_range(0..=dp), dp),
                rat_i(rng.random_range(0..=dq), dq),
            )
            .unwrap();
            let dual = point.dual();
            let v = bounded_conv(alpha, sigma, &point).unwrap();
            let w = bounded_conv(alpha, sigma, &dual).unwrap();
            if v.rule.contains("excluded corner") || w.rule.contains("excluded corner") {
                continue;
            }
            checked += 1;
            assert_eq!(v.bounded, w.bounded, "alpha={alpha} sigma={sigma} {point} vs {dual}");
            let v = bounded_dunkl(alpha, sigma, &point).unwrap();
            let w = bounded_dunkl(alpha, sigma, &dual).unwrap();
            assert_eq!(v.bounded, w.bounded, "dunkl alpha={alpha} sigma={sigma} {point}");
        }
        assert!(checked > 1500, "corner skips should be rare, kept {checked}");
    }

    #[test]
    fn bounded_region_grows_with_sigma() {
        let alphas = [-0.75, -0.5, 0.3, 1.5];
        let coords = ["0", "1/4", "1/2", "3/4", "1"];
        let sigmas: Vec<f64> = (1..=16).map(|k| k as f64 / 8.0).collect();
        for &alpha in &alphas {
            for up in &coords {
                for uq in &coords {
                    let point = pt(up, uq);
                    for pred in [
                        bounded_conv,
                        bounded_hermite_type,
                        bounded_local_conv,
                        bounded_global_conv,
                        bounded_local_hermite,
                    ] {
                        let mut seen_bounded = false;
                        for &sigma in &sigmas {
                            let b = pred(alpha, sigma, &point).unwrap().bounded;
                            assert!(
                                b || !seen_bounded,
                                "boundedness lost while raising sigma to {sigma} at \
                                 alpha={alpha} {point}"
                            );
                            seen_bounded |= b;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn excluded_corners_touch_the_region() {
        // Each excluded corner is unbounded, yet points a hair inside are
        // bounded, so the corner lies on the region's boundary closure.
        let eps = "1/1000";
        let cases: Vec<(fn(f64, f64, &RegionPoint) -> Result<Verdict>, f64, f64, &str, &str)> = vec![
            (bounded_conv, 0.0, 0.5, "1/2", "0"),
            (bounded_conv, 0.0, 0.5, "1", "1/2"),
            (bounded_hermite_type, 0.0, 0.25, "1/2", "0"),
            (bounded_hermite_type, 0.0, 0.25, "1", "1/2"),
            (bounded_local_conv, 1.0, 0.5, "1/4", "0"),
            (bounded_local_conv, 1.0, 0.5, "1", "3/4"),
            (bounded_global_conv, 0.0, 0.25, "1/2", "0"),
            (bounded_global_conv, 0.0, 0.25, "1", "1/2"),
        ];
        let e = parse_rational(eps).unwrap();
        for (pred, alpha, sigma, cu, cv) in cases {
            let corner = pt(cu, cv);
            let v = pred(alpha, sigma, &corner).unwrap();
            assert!(!v.bounded, "corner {corner} should be excluded: {v:?}");
            assert!(v.rule.contains("excluded corner"), "{v:?}");
            let nudged = if corner.inv_q.is_zero() {
                RegionPoint::new(&corner.inv_p - &e, BigRational::zero()).unwrap()
            } else {
                RegionPoint::new(corner.inv_p.clone(), &corner.inv_q + &e).unwrap()
            };
            let v = pred(alpha, sigma, &nudged).unwrap();
            assert!(v.bounded, "nudged point {nudged} should be bounded: {v:?}");
        }
    }

    #[test]
    fn shape_case_partition() {
        assert_eq!(shape_case(-0.75, 0.3).unwrap(), "b1");
        assert_eq!(shape_case(0.0, 0.5).unwrap(), "b2");
        assert_eq!(shape_case(-0.9, 0.15).unwrap(), "b3");
        assert_eq!(shape_case(-0.9, 0.05).unwrap(), "b4");

        let mut rng = StdRng::seed_from_u64(0x5EED);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..1000 {
            let alpha = -1.0 + rng.random_range(1..=127) as f64 / 256.0;
            let sigma = rng.random_range(1..=127) as f64 / 256.0;
            assert!(alpha < -0.5 && sigma < 0.5);
            let label = shape_case(alpha, sigma).unwrap();
            // Recompute the four clauses independently and check exactly one.
            let a = rat(alpha);
            let s = rat(sigma);
            let big = s >= &a + BigRational::one();
            let osc = s > -(&a) / rat_i(2, 1) - rat_i(1, 4);
            let fired = [
                ("b1", big && osc),
                ("b2", !big && osc),
                ("b3", big && !osc),
                ("b4", !big && !osc),
            ];
            assert_eq!(fired.iter().filter(|(_, f)| *f).count(), 1);
            let expect = fired.iter().find(|(_, f)| *f).unwrap().0;
            assert_eq!(label, expect, "alpha={alpha} sigma={sigma}");
            seen.insert(label);
        }
        assert_eq!(seen.len(), 4, "all four shapes occur in the sampled range");
    }

    #[test]
    fn hexagonal_band_figure() {
        let fig = figure_data(FigureSetting::Conv, 0.0, 0.5, 2).unwrap();
        assert_eq!(fig.case_label, "b2");
        assert_eq!(
            fig.vertices,
            vec![(0.0, 0.0), (0.5, 0.0), (1.0, 0.5), (1.0, 1.0), (0.5, 1.0), (0.0, 0.5)]
        );
        assert_eq!(fig.segments.len(), 6);

        let lower = fig.segments.iter().find(|s| s.label.contains("lower_strip")).unwrap();
        assert_eq!(lower.label, "b2:lower_strip:closed");
        assert_eq!((lower.x0, lower.y0, lower.x1, lower.y1), (0.5, 0.0, 1.0, 0.5));
        // Both endpoints are the excluded corners.
        assert!(!lower.closed_start && !lower.closed_end);

        let upper = fig.segments.iter().find(|s| s.label.contains("upper_strip")).unwrap();
        assert_eq!(upper.label, "b2:upper_strip:open");
        assert!(!upper.closed_start && !upper.closed_end);

        let bottom = fig.segments.iter().find(|s| s.label.contains("bottom_edge")).unwrap();
        assert_eq!(bottom.label, "b2:bottom_edge:closed");
        assert!(bottom.closed_start, "(0,0) belongs to the region");
        assert!(!bottom.closed_end, "(1/2,0) is an excluded corner");

        let csv = fig.to_csv();
        assert!(csv.starts_with("segment_id,x0,y0,x1,y1,closed_start,closed_end,label\n"));
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.contains("0,0,0,0.5,0,true,false,b2:bottom_edge:closed"));
    }

    #[test]
    fn wide_strip_figure_is_square_minus_corners() {
        // sigma = alpha + 1 makes both strip lines graze opposite corners.
        let fig = figure_data(FigureSetting::Conv, 0.25, 1.25, 2).unwrap();
        assert_eq!(
            fig.vertices,
            vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        );
        let flag = |x: f64, y: f64| {
            fig.segments
                .iter()
                .find_map(|s| {
                    if (s.x0, s.y0) == (x, y) {
                        Some(s.closed_start)
                    } else if (s.x1, s.y1) == (x, y) {
                        Some(s.closed_end)
                    } else {
                        None
                    }
                })
                .unwrap()
        };
        assert!(flag(0.0, 0.0));
        assert!(flag(1.0, 1.0));
        assert!(!flag(1.0, 0.0), "coincident excluded corners at (1,0)");
        assert!(!flag(0.0, 1.0), "grazed by the open upper strip line");

        // Strictly wider strip: every vertex of the square belongs.
        let fig = figure_data(FigureSetting::Conv, 0.0, 1.5, 2).unwrap();
        assert_eq!(fig.vertices.len(), 4);
        for s in &fig.segments {
            assert!(s.closed_start && s.closed_end, "{s:?}");
        }
    }

    #[test]
    fn restricted_hermite_figure_is_a_pentagon() {
        let fig = figure_data(FigureSetting::HermiteType, -0.75, 0.3, 2).unwrap();
        assert_eq!(fig.case_label, "b1");
        assert_eq!(
            fig.vertices,
            vec![(0.0, 0.25), (0.75, 0.25), (0.75, 1.0), (0.4, 1.0), (0.0, 0.6)]
        );
        let find = |name: &str| fig.segments.iter().find(|s| s.label.contains(name)).unwrap();
        assert_eq!(find("target_floor").label, "b1:target_floor:open");
        assert_eq!(find("domain_line").label, "b1:domain_line:open");
        assert_eq!(find("upper_strip").label, "b1:upper_strip:open");
        assert_eq!(find("top_edge").label, "b1:top_edge:closed");
        assert_eq!(find("left_edge").label, "b1:left_edge:closed");
        // Every vertex of this pentagon is excluded: the two closed square
        // edges end where open lines start.
        for s in &fig.segments {
            assert!(!s.closed_start && !s.closed_end, "{s:?}");
        }
    }

    #[test]
    fn figure_subdivision_keeps_interior_membership() {
        let fig = figure_data(FigureSetting::Conv, 0.0, 0.5, 3).unwrap();
        assert_eq!(fig.segments.len(), 12);
        // Midpoint of the closed lower strip edge belongs to the region.
        let mid = fig
            .segments
            .iter()
            .find(|s| s.label.contains("lower_strip") && (s.x1, s.y1) == (0.75, 0.25))
            .unwrap();
        assert!(!mid.closed_start && mid.closed_end);
        // Midpoint of the open upper strip edge does not.
        let mid = fig
            .segments
            .iter()
            .find(|s| s.label.contains("upper_strip") && (s.x1, s.y1) == (0.25, 0.75))
            .unwrap();
        assert!(!mid.closed_start && !mid.closed_end);
        let ids: Vec<usize> = fig.segments.iter().map(|s| s.segment_id).collect();
        assert_eq!(ids, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn small_order_band_figure() {
        // alpha < -1/2: asymmetric band, no excluded corners anywhere.
        let fig = figure_data(FigureSetting::Conv, -0.75, 0.1, 2).unwrap();
        for s in &fig.segments {
            if s.label.contains("lower_strip") {
                assert!(s.label.ends_with(":closed"));
            }
            if s.label.contains("upper_strip") {
                assert!(s.label.ends_with(":open"));
            }
        }
        // The band contains the diagonal, so (0,0) and (1,1) are vertices
        // and belong to the region.
        assert!(fig.vertices.contains(&(0.0, 0.0)));
        let corner = fig
            .segments
            .iter()
            .find(|s| (s.x0, s.y0) == (0.0, 0.0))
            .unwrap();
        assert!(corner.closed_start);
    }

    #[test]
    fn figure_rejects_bad_arguments() {
        assert!(figure_data(FigureSetting::Conv, 0.0, 0.5, 1).is_err());
        assert!(figure_data(FigureSetting::Conv, -1.0, 0.5, 2).is_err());
        assert!(figure_data(FigureSetting::Conv, 0.0, 0.0, 2).is_err());
        assert!(bounded_conv(0.0, -1.0, &pt("0", "0")).is_err());
        assert!(bounded_hermite_type(-1.5, 1.0, &pt("0", "0")).is_err());
        assert!("nope".parse::<FigureSetting>().is_err());
        assert_eq!("hermite_type".parse::<FigureSetting>().unwrap(), FigureSetting::HermiteType);
        assert_eq!(FigureSetting::Dunkl.to_string(), "dunkl");
    }

    #[test]
    fn exactness_on_boundary_lines() {
        // sigma/delta computed rationally: alpha = 1 gives delta = 2, and the
        // f64 0.4 halves exactly to the f64 0.2, so the corner is hit.
        let v = bounded_local_conv(1.0, 0.4, &RegionPoint::from_f64(0.2, 0.0).unwrap()).unwrap();
        assert!(!v.bounded);
        assert!(v.rule.contains("excluded corner"));
        // Doubling is exact too: 2 sigma with sigma = 0.3 hits the f64 0.6.
        let v = bounded_global_conv(0.0, 0.3, &RegionPoint::from_f64(0.6, 0.0).unwrap()).unwrap();
        assert!(!v.bounded);
        // A point on the closed lower line is bounded, one a hair below it
        // is not; the hair is 2^-60, far beyond float plotting resolution.
        let hair = BigRational::new(BigInt::from(1), BigInt::from(2u64).pow(60));
        let on_line = RegionPoint::new(rat_i(3, 4), rat_i(1, 4)).unwrap();
        assert!(bounded_conv(0.0, 0.5, &on_line).unwrap().bounded);
        let below = RegionPoint::new(rat_i(3, 4), rat_i(1, 4) - &hair).unwrap();
        assert!(!bounded_conv(0.0, 0.5, &below).unwrap().bounded);
    }
}
