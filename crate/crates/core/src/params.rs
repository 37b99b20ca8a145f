use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The type-parameter pair shared by every kernel in the crate: the order
/// `alpha > -1` of the underlying expansion and the subordination exponent
/// `sigma > 0` of the potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub alpha: f64,
    pub sigma: f64,
}

impl Params {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::Domain(format!("alpha must be finite and > -1, got {alpha}")));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!("sigma must be finite and > 0, got {sigma}")));
        }
        Ok(Self { alpha, sigma })
    }
}

/// A one-dimensional sampling axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    /// `n` log-spaced points from `lo` to `hi`, inclusive; requires 0 < lo <= hi.
    Log { lo: f64, hi: f64, n: usize },
    /// `n` evenly spaced points from `lo` to `hi`, inclusive.
    Lin { lo: f64, hi: f64, n: usize },
}

impl Axis {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Axis::Log { lo, hi, n } => {
                assert!(lo > 0.0 && hi >= lo && n >= 1, "bad log axis");
                if n == 1 {
                    return vec![lo];
                }
                let (a, b) = (lo.ln(), hi.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
            Axis::Lin { lo, hi, n } => {
                assert!(hi >= lo && n >= 1, "bad linear axis");
                if n == 1 {
                    return vec![lo];
                }
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Axis::Log { n, .. } | Axis::Lin { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same range sampled about twice as densely, used for
    /// refinement-stability checks.
    pub fn refined(&self) -> Axis {
        match *self {
            Axis::Log { lo, hi, n } => Axis::Log { lo, hi, n: 2 * n - 1 },
            Axis::Lin { lo, hi, n } => Axis::Lin { lo, hi, n: 2 * n - 1 },
        }
    }
}

/// A rectangular evaluation grid, the cartesian product of two axes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
}

impl GridSpec {
    pub fn square(axis: Axis) -> Self {
        Self { x: axis, y: axis }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = self.x.points();
        let ys = self.y.points();
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                out.push((x, y));
            }
        }
        out
    }

    pub fn refined(&self) -> GridSpec {
        GridSpec {
            x: self.x.refined(),
            y: self.y.refined(),
        }
    }
}
