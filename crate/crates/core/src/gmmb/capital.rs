use crate::error::{Error, Result};
use crate::rng::pairwise_sum;
use crate::valuation::ValuationPrinciple;

use super::model::brennan_schwartz_value;
use super::monte_carlo::{conditional_prices, sample_survival_rates};
use super::{GmmbParams, McConfig};

pub const DEFAULT_COC_RATE: f64 = 0.06;

/// Actuarial principle applied to the empirical law of conditional prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScrPrinciple {
    StdDev { beta: f64 },
    /// Tail value-at-risk at confidence `level`.
    Tvar { level: f64 },
}

impl ScrPrinciple {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::StdDev { beta } if !(beta.is_finite() && beta >= 0.0) => Err(Error::Configuration(
                format!("std_dev loading must be finite and nonnegative, got {beta}"),
            )),
            Self::Tvar { level } if !(level > 0.0 && level < 1.0) => Err(Error::Configuration(
                format!("TVaR level must lie in (0, 1), got {level}"),
            )),
            _ => Ok(()),
        }
    }
}

impl Default for ScrPrinciple {
    fn default() -> Self {
        Self::StdDev { beta: 1.0 }
    }
}

impl TryFrom<&ValuationPrinciple> for ScrPrinciple {
    type Error = Error;

    fn try_from(p: &ValuationPrinciple) -> Result<Self> {
        match p {
            ValuationPrinciple::StdDev { beta } => {
                let s = Self::StdDev { beta: *beta };
                s.validate()?;
                Ok(s)
            }
            other => Err(Error::Configuration(format!(
                "SCR supports std_dev and TVaR principles, got {other}"
            ))),
        }
    }
}

fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

fn population_std(xs: &[f64], m: f64) -> f64 {
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / xs.len() as f64).sqrt()
}

/// Mean of the worst `1 - level` share of the sorted sample, splitting the
/// boundary observation.
fn tvar(sorted: &[f64], level: f64) -> f64 {
    let n = sorted.len() as f64;
    let tail = (1.0 - level) * n;
    let whole = tail.floor() as usize;
    let frac = tail - whole as f64;
    let top = &sorted[sorted.len() - whole..];
    let mut sum = pairwise_sum(top);
    if frac > 0.0 && whole < sorted.len() {
        sum += frac * sorted[sorted.len() - whole - 1];
    }
    sum / tail
}

/// Linear-interpolation quantile of a sorted sample.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `pi2[prices] - mean[prices]` on the empirical scenario law.
pub fn scr(prices: &[f64], principle: &ScrPrinciple) -> Result<f64> {
    principle.validate()?;
    if prices.is_empty() {
        return Err(Error::Configuration("SCR needs at least one scenario".into()));
    }
    if prices.iter().all(|&x| x == prices[0]) {
        return Ok(0.0);
    }
    let m = mean(prices);
    let v = match *principle {
        ScrPrinciple::StdDev { beta } => beta * population_std(prices, m),
        ScrPrinciple::Tvar { level } => {
            let mut sorted = prices.to_vec();
            sorted.sort_by(f64::total_cmp);
            tvar(&sorted, level) - m
        }
    };
    // Rounding can leave a tiny negative excess for near-constant samples.
    Ok(v.max(0.0))
}

/// Distribution summary of the conditional prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSummary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub max: f64,
}

impl ScenarioSummary {
    fn of(prices: &[f64]) -> Self {
        let mut sorted = prices.to_vec();
        sorted.sort_by(f64::total_cmp);
        let m = mean(prices);
        Self {
            mean: m,
            std: population_std(prices, m),
            min: sorted[0],
            q05: quantile(&sorted, 0.05),
            median: quantile(&sorted, 0.5),
            q95: quantile(&sorted, 0.95),
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationReport {
    pub best_estimate: f64,
    pub std_error: f64,
    pub scr: f64,
    /// `best_estimate + coc_rate * scr`.
    pub coc_value: f64,
    pub coc_rate: f64,
    pub bs_benchmark: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub clamped: usize,
    pub summary: ScenarioSummary,
}

/// Best estimate, SCR for actuarial risk and cost-of-capital value.
pub fn coc_value(
    params: &GmmbParams,
    mc: &McConfig,
    principle: &ScrPrinciple,
    coc_rate: f64,
) -> Result<ValuationReport> {
    if !(coc_rate.is_finite() && coc_rate >= 0.0) {
        return Err(Error::Domain(format!("cost-of-capital rate must be >= 0, got {coc_rate}")));
    }
    principle.validate()?;
    let sample = sample_survival_rates(params, mc)?;
    let prices = conditional_prices(params, &sample, mc.n_threads)?;
    let summary = ScenarioSummary::of(&prices);
    let (best_estimate, std_error) = crate::rng::mean_and_std_error(&prices);
    let scr = scr(&prices, principle)?;
    Ok(ValuationReport {
        best_estimate,
        std_error,
        scr,
        coc_value: best_estimate + coc_rate * scr,
        coc_rate,
        bs_benchmark: brennan_schwartz_value(params)?,
        n_paths: mc.n_paths,
        seed: mc.seed,
        clamped: sample.clamped,
        summary,
    })
}
