//! Heat and potential kernels of Laguerre and Dunkl-Laguerre expansions.
//!
//! The crate evaluates the heat kernels of the Laguerre differential
//! operator on the half-line and of its Dunkl-type reflection-symmetric
//! extension on the real line, the Riesz-type potential kernels obtained by
//! subordination, sharp two-sided envelopes for those kernels, and the exact
//! regions of (1/p, 1/q) for which the potential operators are bounded
//! between Lebesgue spaces with power weights.
//!
//! All kernel evaluations are carried out in the log domain so that deep
//! Gaussian tails keep full relative accuracy.

pub mod aux_integrals;
pub mod error;
pub mod heat_kernels;
pub mod log_domain;
pub mod lp_lq_regions;
pub mod norm_experiments;
pub mod params;
pub mod potential_kernels;
pub mod quadrature;
pub mod special_functions;

pub use aux_integrals::{AuxParams, EnvelopeConstants};
pub use error::{Error, Result};
pub use log_domain::SignedLogValue;
pub use lp_lq_regions::{DerivedExponents, FigureData, FigureSetting, RegionPoint, Segment, Verdict};
pub use norm_experiments::{
    ExperimentRow, Family, Measure, NegativityReport, SplitKernel, SplitPart, TestFunction,
};
pub use params::{Axis, GridSpec, Params};
pub use potential_kernels::{EnvelopeFamily, KernelKind, RatioReport};
