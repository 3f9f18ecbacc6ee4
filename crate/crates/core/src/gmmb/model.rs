use crate::error::{Error, Result};
use crate::normal::{self, NormalLaw};

use super::GmmbParams;

/// Threshold on `|rho0|` beyond which the conditional stock is treated as
/// deterministic.
const DEGENERATE_RHO0: f64 = 1.0 - 1e-12;

/// `e^x - 1 - x` without cancellation for small `x`.
fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..10 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `e^{2cT}/2 - 2 e^{cT} + cT + 3/2`, written as `u^2/2 - (u - cT)` with
/// `u = e^{cT} - 1`.
fn bracket(p: &GmmbParams) -> f64 {
    let x = p.c * p.maturity;
    let u = x.exp_m1();
    u * u / 2.0 - expm1_minus_x(x)
}

/// Variance of `X_T = int_0^T (e^{c(T-u)} - 1) dW2(u)`:
/// `e^{2cT}/(2c) - 2 e^{cT}/c + T + 3/(2c)`.
pub fn x_variance(params: &GmmbParams) -> f64 {
    bracket(params) / params.c
}

/// Law of `ln(T p_x) = -int_0^T lambda`.
pub fn log_survival_law(params: &GmmbParams) -> Result<NormalLaw> {
    params.validate()?;
    let c = params.c;
    let mean = -params.lambda0 * (c * params.maturity).exp_m1() / c;
    let var = params.xi * params.xi * bracket(params) / (c * c * c);
    Ok(NormalLaw::new(mean, var))
}

/// `T p_x = exp(A lambda0 + B / 2)`.
pub fn survival_probability(params: &GmmbParams) -> Result<f64> {
    let law = log_survival_law(params)?;
    Ok((law.mean + law.variance / 2.0).exp())
}

/// Correlation between `W1(T)` and `X_T`.
pub fn rho0(params: &GmmbParams) -> Result<f64> {
    params.validate()?;
    if params.rho == 0.0 {
        return Ok(0.0);
    }
    let x = params.c * params.maturity;
    let cov = expm1_minus_x(x) / params.c;
    Ok(params.rho * cov / (params.maturity * x_variance(params)).sqrt())
}

/// Unadjusted `y0 N(d1) + K e^{-rT} (1 - N(d2))`.
pub fn bs_bracket(params: &GmmbParams) -> Result<f64> {
    params.validate()?;
    Ok(adjusted_bracket(params, params.y0, 0.0))
}

/// `y N(d1) + K e^{-rT} (1 - N(d2))` with volatility `sigma sqrt(1 - rho0^2)`.
fn adjusted_bracket(p: &GmmbParams, spot: f64, rho0: f64) -> f64 {
    let disc = (-p.r * p.maturity).exp();
    let vol = p.sigma * ((1.0 - rho0 * rho0) * p.maturity).sqrt();
    let d1 = ((spot / p.guarantee).ln() + p.r * p.maturity + vol * vol / 2.0) / vol;
    let d2 = d1 - vol;
    spot * normal::cdf(d1) + disc * p.guarantee * normal::cdf(-d2)
}

/// `E^Q[e^{-rT} p_i max(Y(T), K) | T p_x = p_i]`.
pub fn conditional_gmmb_price(params: &GmmbParams, p_i: f64) -> Result<f64> {
    params.validate()?;
    if !(p_i > 0.0 && p_i <= 1.0) {
        return Err(Error::Domain(format!("survival rate must lie in (0, 1], got {p_i}")));
    }
    let r0 = rho0(params)?;
    let spot = if r0 == 0.0 {
        params.y0
    } else {
        if params.xi == 0.0 {
            return Err(Error::Domain(
                "xi = 0 with rho != 0: the survival rate does not identify the mortality driver".into(),
            ));
        }
        let t = params.maturity;
        let x = -(params.c / params.xi) * p_i.ln()
            - (params.lambda0 / params.xi) * (params.c * t).exp_m1();
        let sd_x = x_variance(params).sqrt();
        let s = params.sigma;
        params.y0 * (s * r0 * t.sqrt() * x / sd_x - s * s * r0 * r0 * t / 2.0).exp()
    };
    if r0.abs() >= DEGENERATE_RHO0 {
        let growth = (params.r * params.maturity).exp();
        let disc = 1.0 / growth;
        return Ok(p_i * disc * (spot * growth).max(params.guarantee));
    }
    Ok(p_i * adjusted_bracket(params, spot, r0))
}

/// Fair value under complete diversification of mortality.
pub fn brennan_schwartz_value(params: &GmmbParams) -> Result<f64> {
    Ok(survival_probability(params)? * bs_bracket(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> GmmbParams {
        GmmbParams::default()
    }

    #[test]
    fn series_matches_direct_formula() {
        for x in [1e-3f64, 5e-3, 9.9e-3, 2e-2] {
            let direct = x.exp() - 1.0 - x;
            assert!((expm1_minus_x(x) - direct).abs() < 1e-15, "{x}");
        }
        let p = table1();
        let (c, t) = (p.c, p.maturity);
        let v = (2.0 * c * t).exp() / (2.0 * c) - 2.0 * (c * t).exp() / c + t + 1.5 / c;
        assert!((x_variance(&p) - v).abs() < 1e-12);
    }

    #[test]
    fn survival_reference_values() {
        let p = table1();
        assert!((survival_probability(&p).unwrap() - 0.878_566_6).abs() < 1e-6);
        let law = log_survival_law(&p).unwrap();
        assert!((law.variance - 2.169_88e-4).abs() < 1e-8);
        let det = GmmbParams { xi: 0.0, ..p };
        let expect = (-p.lambda0 * ((p.c * p.maturity).exp() - 1.0) / p.c).exp();
        assert!((survival_probability(&det).unwrap() - expect).abs() < 1e-15);
        let sure = GmmbParams { xi: 0.0, lambda0: 0.0, ..p };
        assert_eq!(survival_probability(&sure).unwrap(), 1.0);
    }

    #[test]
    fn lognormal_mean_identity() {
        let p = table1();
        let law = log_survival_law(&p).unwrap();
        let direct = (law.mean + law.variance / 2.0).exp();
        assert!((direct - survival_probability(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rho0_reference_and_sign() {
        let p = table1();
        assert_eq!(rho0(&p).unwrap(), 0.0);
        let r = rho0(&p.with_rho(1.0)).unwrap();
        assert!((r - 0.8362).abs() < 1e-3);
        assert!(rho0(&p.with_rho(-0.3)).unwrap() < 0.0);
        assert!(r <= 1.0 + 1e-12);
    }

    #[test]
    fn bs_bracket_reference() {
        let b = bs_bracket(&table1()).unwrap();
        // d1 = 0.2 sqrt(10) = 0.632456, d2 = 0.
        let expect = normal::cdf(0.2 * 10f64.sqrt()) + (-0.2f64).exp() * 0.5;
        assert!((b - expect).abs() < 1e-14);
        assert!((b - 1.1459).abs() < 1e-4);
    }

    #[test]
    fn conditional_price_limits() {
        let p = table1();
        let b = bs_bracket(&p).unwrap();
        assert!((conditional_gmmb_price(&p, 0.9).unwrap() - 0.9 * b).abs() < 1e-14);
        // Tiny guarantee: only the adjusted forward survives.
        let q = GmmbParams { guarantee: 1e-12, ..p.with_rho(0.5) };
        let v = conditional_gmmb_price(&q, 0.85).unwrap();
        let r0 = rho0(&q).unwrap();
        let x = -(q.c / q.xi) * 0.85f64.ln() - (q.lambda0 / q.xi) * (q.c * q.maturity).exp_m1();
        let spot = (q.sigma * r0 * q.maturity.sqrt() * x / x_variance(&q).sqrt()
            - q.sigma * q.sigma * r0 * r0 * q.maturity / 2.0)
            .exp();
        assert!((v - 0.85 * spot).abs() < 1e-12);
    }

    #[test]
    fn conditional_price_domain() {
        let p = table1();
        assert!(conditional_gmmb_price(&p, 0.0).is_err());
        assert!(conditional_gmmb_price(&p, 1.2).is_err());
        let det = GmmbParams { xi: 0.0, rho: 0.4, ..p };
        assert!(matches!(conditional_gmmb_price(&det, 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn brennan_schwartz_reference() {
        let v = brennan_schwartz_value(&table1()).unwrap();
        assert!((v - 1.0067).abs() < 5e-4);
    }
}
