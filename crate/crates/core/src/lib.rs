//! Mean residual demand, elasticity and optimal pricing for linear demand
//! `(α − p)₊` with a random market size `α`.
//!
//! The pieces:
//!
//! * [`dist`]: demand distributions, closed-form families and combinators.
//! * [`reliability`]: `m`, `ℓ = m/p`, hazard `h`, `g = p·h`, elasticity and revenue.
//! * [`classify`]: IFR / DMRD / IGFR / DGMRD verdicts, tail limits and moments.
//! * [`pricing`]: fixed points of `m`, the inelastic boundary `p₁`, and the optimum.
//! * [`mc`]: Monte Carlo and finite-difference cross-checks.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod config;
pub mod corpus;
pub mod dist;
pub mod error;
pub mod grid;
pub mod mc;
pub mod pricing;
pub mod quad;
pub mod reliability;
pub mod roots;

pub use classify::{classify, classify_monotone, ClassificationReport, Limit, MomentValue, Monotonicity, Verdict};
pub use config::NumericConfig;
pub use dist::{
    convolve, left_truncate, make_family, mixture, monotone_transform, scale, shift, DemandDistribution,
    DistributionSpec, Family, MonotoneMap,
};
pub use error::{Error, Result};
pub use mc::McEstimate;
pub use pricing::{solve, Certificate, PricingSolution};
pub use reliability::ReliabilityCurves;
