//! Guaranteed minimum maturity benefit under dependent equity and mortality.
//!
//! The stock is a geometric Brownian motion, the force of mortality a
//! non-mean-reverting Ornstein-Uhlenbeck process, and the two drivers are
//! correlated with coefficient `rho`. The contract pays
//! `max(Y(T), K)` per survivor at `T`; all values are per initial policy.

mod capital;
mod model;
mod monte_carlo;

pub use capital::{coc_value, scr, ScenarioSummary, ScrPrinciple, ValuationReport, DEFAULT_COC_RATE};
pub use model::{
    bs_bracket, brennan_schwartz_value, conditional_gmmb_price, log_survival_law, rho0,
    survival_probability, x_variance,
};
pub use monte_carlo::{
    best_estimate, best_estimate_curve, best_estimate_from_sample, conditional_prices,
    mc_oracle_be, sample_survival_rates, Estimate, SurvivalSample,
};

use crate::error::{invalid, require_correlation, require_finite, require_nonnegative, require_positive, Result};

/// Model parameters. Defaults are the benchmark set used for the
/// numerical illustration (UK males aged 55).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmbParams {
    /// Intensity drift.
    pub c: f64,
    /// Intensity volatility.
    pub xi: f64,
    pub lambda0: f64,
    pub r: f64,
    pub sigma: f64,
    pub rho: f64,
    pub maturity: f64,
    pub guarantee: f64,
    pub y0: f64,
    /// Real-world stock drift. Pricing never uses it.
    pub mu: f64,
}

impl Default for GmmbParams {
    fn default() -> Self {
        Self {
            c: 0.075,
            xi: 0.000597,
            lambda0: 0.0087,
            r: 0.02,
            sigma: 0.2,
            rho: 0.0,
            maturity: 10.0,
            guarantee: 1.0,
            y0: 1.0,
            mu: 0.05,
        }
    }
}

impl GmmbParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("c", self.c)?;
        require_nonnegative("xi", self.xi)?;
        require_finite("lambda0", self.lambda0)?;
        require_finite("r", self.r)?;
        require_positive("sigma", self.sigma)?;
        require_correlation("rho", self.rho)?;
        require_positive("T", self.maturity)?;
        require_positive("K", self.guarantee)?;
        require_positive("y0", self.y0)?;
        require_finite("mu", self.mu)?;
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }
}

/// Monte Carlo controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    /// Size of a dedicated worker pool; `None` uses the global pool.
    /// Results do not depend on it.
    pub n_threads: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            seed: 42,
            n_threads: None,
        }
    }
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            n_threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(invalid("n_paths", "must be at least 1"));
        }
        if self.n_threads == Some(0) {
            return Err(invalid("n_threads", "must be at least 1"));
        }
        Ok(())
    }
}
