//! Two-step market- and actuarial-consistent valuation.
//!
//! Finite probability spaces with real-world and risk-neutral weights,
//! valuation principles and their two-step compositions, the bivariate
//! Gaussian longevity-bond example, and a guaranteed minimum maturity
//! benefit model with best estimate, SCR and cost-of-capital values.

pub mod error;
pub mod finite_space;
pub mod gaussian;
pub mod gmmb;
pub mod normal;
pub mod rng;
pub mod suites;
pub mod valuation;

pub use error::{Error, Result};
pub use finite_space::{Claim, Coordinate, Density, FiniteSpace, Measure, Outcome, Partition};
pub use valuation::{TwoStepKind, TwoStepValuation, ValuationPrinciple};
