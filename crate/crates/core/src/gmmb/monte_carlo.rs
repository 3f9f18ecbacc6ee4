use crate::error::Result;
use crate::rng::{mean_and_std_error, par_map, Domain, StreamFamily};

use super::model::{bs_bracket, conditional_gmmb_price, log_survival_law, rho0};
use super::{GmmbParams, McConfig};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Simulated survival rates `T p_x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSample {
    pub rates: Vec<f64>,
    /// Draws with `ln p > 0` (negative integrated intensity), set to 1.
    pub clamped: usize,
}

/// Draws `exp(N)` from the log-survival law, one counter-based stream per path.
///
/// The law does not involve `rho`, so a sample can be reused across a
/// correlation sweep.
pub fn sample_survival_rates(params: &GmmbParams, mc: &McConfig) -> Result<SurvivalSample> {
    mc.validate()?;
    let law = log_survival_law(params)?;
    let sd = law.std_dev();
    let family = StreamFamily::new(mc.seed, Domain::Survival);
    let logs = par_map(mc.n_paths, mc.n_threads, |i| {
        law.mean + sd * family.stream(i as u64).normal()
    });
    let clamped = logs.iter().filter(|&&l| l > 0.0).count();
    let rates = logs.into_iter().map(|l| l.min(0.0).exp()).collect();
    Ok(SurvivalSample { rates, clamped })
}

/// Conditional GMMB prices, one per simulated survival rate.
///
/// With `xi = 0` every scenario has the same survival rate, the scenario
/// carries no information about the stock, and each price is `p` times the
/// unadjusted bracket whatever `rho` is.
pub fn conditional_prices(
    params: &GmmbParams,
    sample: &SurvivalSample,
    n_threads: Option<usize>,
) -> Result<Vec<f64>> {
    if params.xi == 0.0 {
        let b = bs_bracket(params)?;
        return Ok(sample.rates.iter().map(|p| p * b).collect());
    }
    par_map(sample.rates.len(), n_threads, |i| {
        conditional_gmmb_price(params, sample.rates[i])
    })
    .into_iter()
    .collect()
}

pub fn best_estimate_from_sample(
    params: &GmmbParams,
    sample: &SurvivalSample,
    n_threads: Option<usize>,
) -> Result<Estimate> {
    let prices = conditional_prices(params, sample, n_threads)?;
    let (value, std_error) = mean_and_std_error(&prices);
    Ok(Estimate { value, std_error })
}

/// Average of conditional prices over simulated survival scenarios.
pub fn best_estimate(params: &GmmbParams, mc: &McConfig) -> Result<Estimate> {
    let sample = sample_survival_rates(params, mc)?;
    best_estimate_from_sample(params, &sample, mc.n_threads)
}

/// Best estimates over a correlation grid on common survival draws.
pub fn best_estimate_curve(
    params: &GmmbParams,
    mc: &McConfig,
    rhos: &[f64],
) -> Result<Vec<(f64, Estimate)>> {
    let sample = sample_survival_rates(params, mc)?;
    rhos.iter()
        .map(|&rho| {
            let p = params.with_rho(rho);
            Ok((rho, best_estimate_from_sample(&p, &sample, mc.n_threads)?))
        })
        .collect()
}

/// Joint simulation of `(X_T, Z)`: builds `W1(T)` from its correlation with
/// `X_T`, the stock under `Q` and the survival rate from `X_T`, then averages
/// the discounted per-policy payoff.
pub fn mc_oracle_be(params: &GmmbParams, mc: &McConfig) -> Result<Estimate> {
    mc.validate()?;
    let law = log_survival_law(params)?;
    let r0 = rho0(params)?;
    let t = params.maturity;
    let scale_x = law.std_dev();
    let (a, b) = (r0 * t.sqrt(), (t * (1.0 - r0 * r0)).max(0.0).sqrt());
    let drift = (params.r - params.sigma * params.sigma / 2.0) * t;
    let disc = (-params.r * t).exp();
    let family = StreamFamily::new(mc.seed, Domain::JointOracle);
    let payoffs = par_map(mc.n_paths, mc.n_threads, |i| {
        let mut s = family.stream(i as u64);
        // X_T / sd(X_T); ln p decreases in X_T.
        let x = s.normal();
        let z = s.normal();
        let p = (law.mean - scale_x * x).min(0.0).exp();
        let y = params.y0 * (drift + params.sigma * (a * x + b * z)).exp();
        disc * p * y.max(params.guarantee)
    });
    let (value, std_error) = mean_and_std_error(&payoffs);
    Ok(Estimate { value, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmmb::model::survival_probability;

    #[test]
    fn deterministic_mortality_has_no_variance() {
        let p = GmmbParams { xi: 0.0, ..Default::default() };
        let mc = McConfig::new(1000, 3);
        let s = sample_survival_rates(&p, &mc).unwrap();
        let sp = survival_probability(&p).unwrap();
        assert!(s.rates.iter().all(|&r| r == sp));
        let be = best_estimate(&p, &mc).unwrap();
        assert!((be.value - sp * bs_bracket(&p).unwrap()).abs() < 1e-14);
        assert!(be.std_error < 1e-15);
        let corr = GmmbParams { rho: -0.7, ..p };
        assert_eq!(best_estimate(&corr, &mc).unwrap(), be);
    }

    #[test]
    fn sample_is_thread_count_invariant() {
        let p = GmmbParams::default();
        let a = sample_survival_rates(&p, &McConfig { n_threads: Some(1), ..McConfig::new(5000, 11) }).unwrap();
        let b = sample_survival_rates(&p, &McConfig { n_threads: Some(4), ..McConfig::new(5000, 11) }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clamp_is_counted() {
        let p = GmmbParams { lambda0: 0.0, ..Default::default() };
        let s = sample_survival_rates(&p, &McConfig::new(2000, 5)).unwrap();
        assert!(s.clamped > 500 && s.clamped < 1500);
        assert!(s.rates.iter().all(|&r| r <= 1.0));
    }

    #[test]
    fn zero_paths_rejected() {
        assert!(best_estimate(&GmmbParams::default(), &McConfig::new(0, 1)).is_err());
    }
}
