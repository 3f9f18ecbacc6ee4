//! Bivariate Gaussian longevity example.
//!
//! `L` is the insured population's (normal) number of survivors, `L~` the
//! reference population underlying a traded longevity bond. The two are
//! jointly normal with correlation `rho`; under `Q` the bond population is
//! shifted down by `sigma2 * kappa`. Interest is zero.

use crate::error::{require_correlation, require_finite, require_nonnegative, require_positive, Error, Result};
use crate::normal::{self, NormalLaw};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongevityExampleParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub beta: f64,
    /// Market price of longevity risk.
    pub kappa: f64,
    /// Value-at-Risk confidence level.
    pub p: f64,
}

impl Default for LongevityExampleParams {
    fn default() -> Self {
        Self {
            mu1: 100.0,
            mu2: 100.0,
            sigma1: 10.0,
            sigma2: 10.0,
            rho: 0.5,
            beta: 0.5,
            kappa: 0.2,
            p: 0.995,
        }
    }
}

impl LongevityExampleParams {
    pub fn validate(&self) -> Result<()> {
        require_finite("mu1", self.mu1)?;
        require_finite("mu2", self.mu2)?;
        require_positive("sigma1", self.sigma1)?;
        require_positive("sigma2", self.sigma2)?;
        require_correlation("rho", self.rho)?;
        require_nonnegative("beta", self.beta)?;
        require_nonnegative("kappa", self.kappa)?;
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Domain(format!("VaR level p must lie in (0, 1), got {}", self.p)));
        }
        Ok(())
    }

    fn residual_scale(&self) -> f64 {
        (1.0 - self.rho * self.rho).max(0.0).sqrt()
    }
}

/// Two-step actuarial value `mu1 + beta sigma1`: the risk-free strategy.
pub fn ts_actuarial_value(params: &LongevityExampleParams) -> Result<f64> {
    params.validate()?;
    Ok(params.mu1 + params.beta * params.sigma1)
}

/// Two-step financial value `mu1 - rho sigma1 kappa + beta sigma1 sqrt(1 - rho^2)`:
/// hedge with the longevity bond, load the residual.
pub fn ts_financial_value(params: &LongevityExampleParams) -> Result<f64> {
    params.validate()?;
    let s = params.sigma1;
    Ok(params.mu1 - params.rho * s * params.kappa + params.beta * s * params.residual_scale())
}

/// `sigma1 [beta (sqrt(1 - rho^2) - 1) - rho kappa]`, financial minus actuarial.
pub fn value_difference(params: &LongevityExampleParams) -> Result<f64> {
    params.validate()?;
    Ok(params.sigma1 * (params.beta * (params.residual_scale() - 1.0) - params.rho * params.kappa))
}

/// Laws of the residual loss at maturity without (`R1`) and with (`R2`) the
/// longevity-bond hedge. `R2` is a point mass when `|rho| = 1`.
pub fn residual_laws(params: &LongevityExampleParams) -> Result<(NormalLaw, NormalLaw)> {
    params.validate()?;
    let s = params.sigma1;
    let k = params.residual_scale();
    Ok((
        NormalLaw::new(-params.beta * s, s * s),
        NormalLaw::new(-params.beta * s * k, k * k * s * s),
    ))
}

/// `VaR_p[R2] - VaR_p[R1] = sigma1 (z_p - beta)(sqrt(1 - rho^2) - 1)`.
pub fn var_reduction(params: &LongevityExampleParams) -> Result<f64> {
    params.validate()?;
    let z = normal::try_quantile(params.p)?;
    Ok(params.sigma1 * (z - params.beta) * (params.residual_scale() - 1.0))
}

/// Buy the bond iff its extra price is strictly below the VaR change it buys.
/// Ties keep the risk-free strategy.
pub fn invest_decision(params: &LongevityExampleParams) -> Result<bool> {
    Ok(value_difference(params)? < var_reduction(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho: f64, beta: f64, kappa: f64) -> LongevityExampleParams {
        LongevityExampleParams {
            rho,
            beta,
            kappa,
            ..Default::default()
        }
    }

    #[test]
    fn actuarial_value_example() {
        let v = ts_actuarial_value(&params(0.3, 0.5, 0.1)).unwrap();
        assert!((v - 105.0).abs() < 1e-12);
        assert_eq!(ts_actuarial_value(&params(0.0, 0.0, 0.0)).unwrap(), 100.0);
    }

    #[test]
    fn independence_collapses_values() {
        let p = params(0.0, 0.7, 0.3);
        assert_eq!(ts_financial_value(&p).unwrap(), ts_actuarial_value(&p).unwrap());
        assert_eq!(value_difference(&p).unwrap(), 0.0);
    }

    #[test]
    fn perfect_correlation_is_a_full_hedge() {
        for rho in [1.0, -1.0] {
            let p = params(rho, 0.8, 0.25);
            let v = ts_financial_value(&p).unwrap();
            assert!((v - (100.0 - rho * 10.0 * 0.25)).abs() < 1e-12);
            let (_, r2) = residual_laws(&p).unwrap();
            assert!(r2.is_degenerate());
            assert_eq!(r2.mean, 0.0);
            assert_eq!(r2.value_at_risk(0.99).unwrap(), 0.0);
        }
        let d = value_difference(&params(1.0, 0.6, 0.0)).unwrap();
        assert!((d + 10.0 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn var_reduction_matches_normal_quantiles() {
        let p = params(0.6, 0.4, 0.1);
        let (r1, r2) = residual_laws(&p).unwrap();
        let direct = r2.value_at_risk(p.p).unwrap() - r1.value_at_risk(p.p).unwrap();
        assert!((direct - var_reduction(&p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn decision_edge_cases() {
        assert!(!invest_decision(&params(0.0, 0.5, 0.1)).unwrap());
        assert!(!invest_decision(&params(0.5, 0.0, 0.0)).unwrap());
        // rho=0.9, beta=0: LHS = -9 kappa, RHS = 10 z_p (sqrt(0.19) - 1) ~ -14.53.
        assert!(!invest_decision(&params(0.9, 0.0, 0.01)).unwrap());
        assert!(invest_decision(&params(0.9, 0.0, 3.0)).unwrap());
    }

    #[test]
    fn validation() {
        assert!(ts_actuarial_value(&params(1.1, 0.5, 0.1)).is_err());
        assert!(ts_actuarial_value(&params(0.5, -0.5, 0.1)).is_err());
        let bad_p = LongevityExampleParams { p: 1.0, ..Default::default() };
        assert!(matches!(invest_decision(&bad_p), Err(Error::Domain(_))));
        let bad_sigma = LongevityExampleParams { sigma2: 0.0, ..Default::default() };
        assert!(ts_financial_value(&bad_sigma).is_err());
    }
}
