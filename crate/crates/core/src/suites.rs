//! Named property suites over randomized finite spaces and the closed-form
//! examples. Each suite reports the first counterexample it finds.

use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::finite_space::{Claim, Density, FiniteSpace, Measure, Outcome};
use crate::gaussian::{self, LongevityExampleParams};
use crate::normal;
use crate::rng::{mean_and_std_error, par_map, pairwise_sum, Domain, StreamFamily};
use crate::valuation::hybrid::{
    comonotonic_space, example5_space, two_step_actuarial_closed_form,
    two_step_difference_example5, two_step_financial_closed_form, unit_linked_call,
};
use crate::valuation::{
    find_hedger_violation, find_strong_actuarial_violation, find_weak_actuarial_violation,
    find_weak_market_violation, hedge_based_value, hedge_cost_value, lemma33_decompose,
    quadratic_hedge, CheckConfig, Hedger, TradedAssets, TwoStepValuation, ValuationPrinciple,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Randomized spaces per finite-space suite.
    pub n_spaces: usize,
    /// Random claims per consistency check.
    pub n_claims: usize,
    pub tol: f64,
    /// Paths for the Gaussian Monte Carlo oracles.
    pub mc_paths: usize,
    /// Draw actuarial std-dev loadings from a negative range, bypassing
    /// validation. Used to check that the harness notices.
    pub inject_negative_beta: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_spaces: 200,
            n_claims: 32,
            tol: 1e-8,
            mc_paths: 1_000_000,
            inject_negative_beta: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub counterexample: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

type SuiteFn = fn(&SuiteConfig) -> SuiteOutcome;

const SUITES: &[(&str, SuiteFn)] = &[
    ("normalization-translation", normalization_translation),
    ("coherent-max-attained", coherent_max_attained),
    ("std-dev-loading-nonnegative", std_dev_loading_nonnegative),
    ("two-step-actuarial-weak-acv", two_step_actuarial_weak_acv),
    ("two-step-financial-weak-mcv", two_step_financial_weak_mcv),
    ("hedge-based-round-trip", hedge_based_round_trip),
    ("weak-implies-strong-acv", weak_implies_strong_acv),
    ("hedger-cost-valuation", hedger_cost_valuation),
    ("decomposition", decomposition),
    ("quadratic-orthogonality", quadratic_orthogonality),
    ("comonotonic-no-fair-value", comonotonic_no_fair_value),
    ("example5-closed-forms", example5_closed_forms),
    ("example4-identities", example4_identities),
    ("example4-monte-carlo", example4_monte_carlo),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteOutcome> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, f)| f(cfg))
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteOutcome> {
    SUITES.iter().map(|(_, f)| f(cfg)).collect()
}

// ---- random instances ----

fn trial_rng(cfg: &SuiteConfig, suite: u64, trial: usize) -> ChaCha8Rng {
    let family = StreamFamily::new(cfg.seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15), Domain::PropertyCheck);
    family.stream(trial as u64).rng().clone()
}

fn normalized(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// 2 to 12 outcomes with up to 4 financial and 4 actuarial labels and
/// strictly positive weights.
pub fn random_space(rng: &mut ChaCha8Rng) -> FiniteSpace {
    let n = rng.gen_range(2..=12);
    let nf = rng.gen_range(1..=4);
    let na = rng.gen_range(1..=4);
    let p = normalized(rng, n);
    let q = normalized(rng, n);
    let outcomes = (0..n)
        .map(|i| {
            let f = rng.gen_range(0..nf) as f64 * 10.0;
            let a = rng.gen_range(0..na) as f64;
            Outcome::new(f, a, p[i], q[i])
        })
        .collect();
    FiniteSpace::new(outcomes).expect("weights are normalized")
}

fn random_density(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> Density {
    let raw: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.1..3.0)).collect();
    let mean: f64 = raw.iter().zip(space.weights(Measure::P)).map(|(x, p)| x * p).sum();
    Density::new(raw.into_iter().map(|x| x / mean).collect(), space).expect("unit P-mean")
}

fn random_coherent(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> ValuationPrinciple {
    let k = rng.gen_range(1..=3);
    ValuationPrinciple::coherent((0..k).map(|_| random_density(rng, space)).collect()).expect("non-empty")
}

fn random_linear(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> ValuationPrinciple {
    match rng.gen_range(0..3) {
        0 => ValuationPrinciple::linear_p(),
        1 => ValuationPrinciple::linear_q(),
        _ => ValuationPrinciple::linear_density(random_density(rng, space)),
    }
}

fn random_std_dev(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> ValuationPrinciple {
    if cfg.inject_negative_beta {
        ValuationPrinciple::std_dev_unchecked(-rng.gen_range(0.1..2.0))
    } else {
        ValuationPrinciple::StdDev { beta: rng.gen_range(0.0..2.0) }
    }
}

fn random_financial(rng: &mut ChaCha8Rng, space: &FiniteSpace) -> ValuationPrinciple {
    match rng.gen_range(0..4) {
        0 | 1 => ValuationPrinciple::linear_q(),
        2 => random_linear(rng, space),
        _ => random_coherent(rng, space),
    }
}

fn random_actuarial(rng: &mut ChaCha8Rng, space: &FiniteSpace, cfg: &SuiteConfig) -> ValuationPrinciple {
    match rng.gen_range(0..4) {
        0 | 1 => random_std_dev(rng, cfg),
        2 => random_linear(rng, space),
        _ => random_coherent(rng, space),
    }
}

/// Risk-free account plus up to two financial assets priced by `fin`.
fn random_assets(rng: &mut ChaCha8Rng, space: &FiniteSpace, fin: &ValuationPrinciple) -> Result<TradedAssets> {
    let part = space.financial_partition();
    let n_risky = part.cells().len().saturating_sub(1).min(2);
    let payoffs = (0..n_risky)
        .map(|_| {
            let vals: Vec<f64> = (0..part.cells().len()).map(|_| rng.gen_range(0.0..100.0)).collect();
            part.broadcast(&vals)
        })
        .collect();
    TradedAssets::priced_by(payoffs, fin, space)
}

fn check_config(cfg: &SuiteConfig, trial: usize) -> CheckConfig {
    CheckConfig {
        n_claims: cfg.n_claims,
        tol: cfg.tol,
        seed: cfg.seed.wrapping_add(trial as u64),
    }
}

fn describe(space: &FiniteSpace) -> String {
    let mut s = String::from("[");
    for (i, o) in space.outcomes().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "(y={:?}, x={:?}, p={:?}, q={:?})", o.financial, o.actuarial, o.p, o.q);
    }
    s.push(']');
    s
}

/// Runs `check` on `cfg.n_spaces` random spaces; stops at the first failure.
fn over_spaces<F>(name: &'static str, suite: u64, cfg: &SuiteConfig, check: F) -> SuiteOutcome
where
    F: Fn(&mut ChaCha8Rng, &FiniteSpace, usize) -> std::result::Result<(), String>,
{
    for trial in 0..cfg.n_spaces {
        let mut rng = trial_rng(cfg, suite, trial);
        let space = random_space(&mut rng);
        if let Err(msg) = check(&mut rng, &space, trial) {
            return SuiteOutcome {
                name,
                trials: trial + 1,
                counterexample: Some(format!("trial {trial}: {msg}; space={}", describe(&space))),
            };
        }
    }
    SuiteOutcome {
        name,
        trials: cfg.n_spaces,
        counterexample: None,
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---- finite-space suites ----

fn normalization_translation(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("normalization-translation", 1, cfg, |rng, space, _| {
        let principles = [random_financial(rng, space), random_actuarial(rng, space, cfg)];
        for pr in &principles {
            let zero = pr.value(&Claim::zero(space.len()), space).map_err(err)?;
            if zero.abs() > 1e-10 {
                return Err(format!("{pr}: value of 0 is {zero:?}"));
            }
            let s = crate::valuation::consistency::random_claim(space.len(), rng);
            let a = rng.gen_range(-50.0..50.0);
            let lhs = pr.value(&s.shift(a), space).map_err(err)?;
            let rhs = pr.value(&s, space).map_err(err)? + a;
            if (lhs - rhs).abs() > 1e-10 {
                return Err(format!("{pr}: value(S+{a:?})={lhs:?} but value(S)+a={rhs:?}; S={:?}", s.values()));
            }
        }
        Ok(())
    })
}

fn coherent_max_attained(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("coherent-max-attained", 2, cfg, |rng, space, _| {
        let pr = random_coherent(rng, space);
        let s = crate::valuation::consistency::random_claim(space.len(), rng);
        let v = pr.value(&s, space).map_err(err)?;
        let members = pr.member_expectations(&s, space).map_err(err)?;
        let best = members.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if members.iter().any(|&m| m > v + 1e-10) || (best - v).abs() > 1e-10 {
            return Err(format!("{pr}: value {v:?}, member expectations {members:?}; S={:?}", s.values()));
        }
        Ok(())
    })
}

fn std_dev_loading_nonnegative(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("std-dev-loading-nonnegative", 3, cfg, |rng, space, _| {
        let pr = random_std_dev(rng, cfg);
        let s = crate::valuation::consistency::random_claim(space.len(), rng);
        let v = pr.value(&s, space).map_err(err)?;
        let m = space.expectation(&s, Measure::P).map_err(err)?;
        if v < m - 1e-10 {
            return Err(format!("{pr}: value {v:?} below P-expectation {m:?}; S={:?}", s.values()));
        }
        Ok(())
    })
}

fn two_step_actuarial_weak_acv(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("two-step-actuarial-weak-acv", 4, cfg, |rng, space, trial| {
        let fin = random_financial(rng, space);
        let act = random_actuarial(rng, space, cfg);
        let ts = TwoStepValuation::actuarial(fin.clone(), act.clone());
        match find_weak_actuarial_violation(|c| ts.value(c, space), &act, space, &check_config(cfg, trial)) {
            Some(v) => Err(format!("fin={fin} act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn two_step_financial_weak_mcv(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("two-step-financial-weak-mcv", 5, cfg, |rng, space, trial| {
        let fin = random_financial(rng, space);
        let act = random_actuarial(rng, space, cfg);
        let ts = TwoStepValuation::financial(fin.clone(), act.clone());
        match find_weak_market_violation(|c| ts.value(c, space), &fin, space, &check_config(cfg, trial)) {
            Some(v) => Err(format!("fin={fin} act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn hedge_based_round_trip(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("hedge-based-round-trip", 6, cfg, |rng, space, trial| {
        let fin = random_financial(rng, space);
        let act = random_actuarial(rng, space, cfg);
        let assets = random_assets(rng, space, &fin).map_err(err)?;
        let ts = TwoStepValuation::actuarial(fin.clone(), act.clone());
        let hedger = Hedger::RiskFreeFullValue(ts.clone());
        // Weak-ACV valuation -> hedger -> hedge-based valuation gives it back.
        for _ in 0..cfg.n_claims.min(8) {
            let s = crate::valuation::consistency::random_claim(space.len(), rng);
            let direct = ts.value(&s, space).map_err(err)?;
            let via = hedge_based_value(&hedger, &fin, &act, &s, &assets, space).map_err(err)?;
            if (direct - via).abs() > cfg.tol {
                return Err(format!("fin={fin} act={act}: Pi[S]={direct:?}, hedge-based={via:?}; S={:?}", s.values()));
            }
        }
        // Hedge-based valuation of an actuarial-consistent hedger is weak ACV.
        let composite = Hedger::composite(Hedger::Quadratic, act.clone());
        let value = |c: &Claim| hedge_based_value(&composite, &fin, &act, c, &assets, space);
        match find_weak_actuarial_violation(value, &act, space, &check_config(cfg, trial)) {
            Some(v) => Err(format!("composite hedge-based valuation, fin={fin} act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn weak_implies_strong_acv(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("weak-implies-strong-acv", 7, cfg, |rng, space, trial| {
        let fin = match rng.gen_range(0..2) {
            0 => random_coherent(rng, space),
            _ => random_linear(rng, space),
        };
        let act = match rng.gen_range(0..2) {
            0 => ValuationPrinciple::linear_p(),
            _ => ValuationPrinciple::linear_density(random_density(rng, space)),
        };
        let ts = TwoStepValuation::actuarial(fin.clone(), act.clone());
        let cc = check_config(cfg, trial);
        if let Some(v) = find_weak_actuarial_violation(|c| ts.value(c, space), &act, space, &cc) {
            return Err(format!("premise failed, fin={fin} act={act}: {v}"));
        }
        match find_strong_actuarial_violation(|c| ts.value(c, space), &act, space, &cc) {
            Some(v) => Err(format!("fin={fin} act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn hedger_cost_valuation(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("hedger-cost-valuation", 8, cfg, |rng, space, trial| {
        let fin = random_financial(rng, space);
        let act = random_actuarial(rng, space, cfg);
        let assets = random_assets(rng, space, &fin).map_err(err)?;
        let cc = check_config(cfg, trial);
        let composite = Hedger::composite(Hedger::Quadratic, act.clone());
        let cost = |c: &Claim| hedge_cost_value(&composite, c, &assets, space);
        if let Some(v) = find_weak_actuarial_violation(cost, &act, space, &cc) {
            return Err(format!("cost valuation of composite hedger, fin={fin} act={act}: {v}"));
        }
        let full = Hedger::RiskFreeFullValue(TwoStepValuation::actuarial(fin.clone(), act.clone()));
        match find_hedger_violation(&full, &act, space, &assets, &cc) {
            Some(v) => Err(format!("hedger from two-step valuation, fin={fin} act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn decomposition(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("decomposition", 9, cfg, |rng, space, trial| {
        let fin = random_financial(rng, space);
        let act = random_actuarial(rng, space, cfg);
        let s = crate::valuation::consistency::random_claim(space.len(), rng);
        let (h2, h1) = lemma33_decompose(&s, &act, space).map_err(err)?;
        if !h2.is_measurable(&space.actuarial_partition(), 1e-9) {
            return Err(format!("act={act}: H2={:?} is not actuarial; S={:?}", h2.values(), s.values()));
        }
        let sum = &h1 + &h2;
        if sum.max_abs_diff(&s) > 1e-10 {
            return Err(format!("act={act}: H1+H2={:?} != S={:?}", sum.values(), s.values()));
        }
        let assets = random_assets(rng, space, &fin).map_err(err)?;
        let composite = Hedger::composite(Hedger::Quadratic, act.clone());
        match find_hedger_violation(&composite, &act, space, &assets, &check_config(cfg, trial)) {
            Some(v) => Err(format!("composite hedger, act={act}: {v}")),
            None => Ok(()),
        }
    })
}

fn quadratic_orthogonality(cfg: &SuiteConfig) -> SuiteOutcome {
    over_spaces("quadratic-orthogonality", 10, cfg, |rng, space, _| {
        let fin = random_financial(rng, space);
        let assets = random_assets(rng, space, &fin).map_err(err)?;
        let s = crate::valuation::consistency::random_claim(space.len(), rng);
        let theta = quadratic_hedge(&s, &assets, space).map_err(err)?;
        let resid = &s - &theta.payoff(&assets);
        for (j, y) in assets.payoffs().iter().enumerate() {
            let inner = space.expectation(&(&resid * y), Measure::P).map_err(err)?;
            if inner.abs() > 1e-8 {
                return Err(format!("E[(S - theta.Y) Y_{j}] = {inner:?}; S={:?}", s.values()));
            }
        }
        Ok(())
    })
}

// ---- closed-form examples ----

fn comonotonic_no_fair_value(cfg: &SuiteConfig) -> SuiteOutcome {
    let name = "comonotonic-no-fair-value";
    for trial in 0..cfg.n_spaces {
        let mut rng = trial_rng(cfg, 11, trial);
        let p = rng.gen_range(0.01..0.99);
        let q = rng.gen_range(0.01..0.99);
        let beta = rng.gen_range(0.0..2.0);
        let outcome = (|| -> Result<Option<String>> {
            let space = comonotonic_space(p, q)?;
            let call = Claim::new(vec![0.0, 100.0])?;
            let fin = ValuationPrinciple::linear_q();
            let act = ValuationPrinciple::std_dev(beta)?;
            let f = TwoStepValuation::financial(fin, act.clone()).value(&call, &space)?;
            let a = act.value(&call, &space)?;
            let expect_a = 100.0 * (p + beta * (p * (1.0 - p)).sqrt());
            if (f - 100.0 * q).abs() > 1e-10 || (a - expect_a).abs() > 1e-10 {
                return Ok(Some(format!("p={p:?} q={q:?} beta={beta:?}: financial {f:?}, actuarial {a:?}")));
            }
            if (q - (p + beta * (p * (1.0 - p)).sqrt())).abs() > 1e-9 && (f - a).abs() <= 1e-10 {
                return Ok(Some(format!("p={p:?} q={q:?} beta={beta:?}: values coincide")));
            }
            Ok(None)
        })();
        let msg = match outcome {
            Ok(None) => continue,
            Ok(Some(m)) => m,
            Err(e) => e.to_string(),
        };
        return SuiteOutcome { name, trials: trial + 1, counterexample: Some(format!("trial {trial}: {msg}")) };
    }
    SuiteOutcome { name, trials: cfg.n_spaces, counterexample: None }
}

/// A Bayes-consistent draw for the four-outcome hybrid example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example5Draw {
    pub p_i: f64,
    pub p_y: f64,
    pub p_i_given_up: f64,
    pub kappa: f64,
    pub beta: f64,
}

pub fn random_example5(rng: &mut ChaCha8Rng) -> Example5Draw {
    let p_i: f64 = rng.gen_range(0.05..0.95);
    let p_y: f64 = rng.gen_range(0.05..0.95);
    let lo = ((p_i + p_y - 1.0) / p_y).max(0.0);
    let hi = (p_i / p_y).min(1.0);
    let p_i_given_up = lo + (hi - lo) * rng.gen_range(0.05..0.95);
    let both = p_i_given_up * p_y;
    let (up_alive, up_dead) = (both / p_i, (p_y - both) / (1.0 - p_i));
    let k_lo = -up_alive.min(up_dead);
    let k_hi = 1.0 - up_alive.max(up_dead);
    let kappa = 0.9 * (k_lo + (k_hi - k_lo) * rng.gen_range(0.0..1.0));
    Example5Draw {
        p_i,
        p_y,
        p_i_given_up,
        kappa,
        beta: rng.gen_range(0.0..2.0),
    }
}

/// Largest absolute deviation among: two-step actuarial value vs its closed
/// form, two-step financial value vs its closed form, and the difference
/// formula vs the difference of the two space-computed values.
pub fn example5_deviation(d: &Example5Draw) -> Result<f64> {
    let space = example5_space(d.p_i, d.p_y, d.p_i_given_up, d.kappa)?;
    let claim = unit_linked_call(&space);
    let ts_a = TwoStepValuation::actuarial(ValuationPrinciple::linear_q(), ValuationPrinciple::std_dev(d.beta)?);
    let ts_f = TwoStepValuation::financial(ts_a.financial.clone(), ts_a.actuarial.clone());
    let a = ts_a.value(&claim, &space)?;
    let f = ts_f.value(&claim, &space)?;
    let p_y_given_alive = d.p_i_given_up * d.p_y / d.p_i;
    let closed_a = two_step_actuarial_closed_form(p_y_given_alive + d.kappa, d.p_i, d.beta);
    let closed_f = two_step_financial_closed_form(d.p_y + d.kappa, d.p_i_given_up, d.beta);
    let diff = two_step_difference_example5(d.p_i, d.p_y, d.p_i_given_up, p_y_given_alive, d.beta, d.kappa)?;
    Ok((a - closed_a).abs().max((f - closed_f).abs()).max((diff - (a - f)).abs()))
}

fn example5_closed_forms(cfg: &SuiteConfig) -> SuiteOutcome {
    let name = "example5-closed-forms";
    for trial in 0..cfg.n_spaces {
        let mut rng = trial_rng(cfg, 12, trial);
        let d = random_example5(&mut rng);
        let msg = match example5_deviation(&d) {
            Ok(dev) if dev <= 1e-12 => continue,
            Ok(dev) => format!("{d:?}: deviation {dev:?}"),
            Err(e) => format!("{d:?}: {e}"),
        };
        return SuiteOutcome { name, trials: trial + 1, counterexample: Some(format!("trial {trial}: {msg}")) };
    }
    SuiteOutcome { name, trials: cfg.n_spaces, counterexample: None }
}

pub fn random_longevity_params(rng: &mut ChaCha8Rng) -> LongevityExampleParams {
    LongevityExampleParams {
        mu1: rng.gen_range(50.0..150.0),
        mu2: rng.gen_range(50.0..150.0),
        sigma1: rng.gen_range(1.0..20.0),
        sigma2: rng.gen_range(1.0..20.0),
        rho: rng.gen_range(-1.0..1.0),
        beta: rng.gen_range(0.0..2.0),
        kappa: rng.gen_range(0.0..1.0),
        p: rng.gen_range(0.5..0.999),
    }
}

fn example4_identities(cfg: &SuiteConfig) -> SuiteOutcome {
    let name = "example4-identities";
    let n = cfg.n_spaces * 50;
    for trial in 0..n {
        let mut rng = trial_rng(cfg, 13, trial);
        let mut prm = random_longevity_params(&mut rng);
        let check = (|| -> Result<Option<String>> {
            let d = gaussian::value_difference(&prm)?;
            let sub = gaussian::ts_financial_value(&prm)? - gaussian::ts_actuarial_value(&prm)?;
            if (d - sub).abs() > 1e-12 * (1.0 + prm.mu1.abs()) {
                return Ok(Some(format!("difference {d:?} vs subtraction {sub:?}")));
            }
            let (r1, r2) = gaussian::residual_laws(&prm)?;
            let direct = r2.value_at_risk(prm.p)? - r1.value_at_risk(prm.p)?;
            let formula = gaussian::var_reduction(&prm)?;
            if (direct - formula).abs() > 1e-9 * prm.sigma1 {
                return Ok(Some(format!("VaR change {direct:?} vs formula {formula:?}")));
            }
            // |difference| nondecreasing in kappa for rho > 0.
            prm.rho = prm.rho.abs();
            let mut last = f64::NEG_INFINITY;
            for k in 0..=10 {
                let v = gaussian::value_difference(&LongevityExampleParams { kappa: k as f64 * 0.2, ..prm })?.abs();
                if v < last - 1e-12 {
                    return Ok(Some(format!("|difference| decreased at kappa={}", k as f64 * 0.2)));
                }
                last = v;
            }
            Ok(None)
        })();
        let msg = match check {
            Ok(None) => continue,
            Ok(Some(m)) => m,
            Err(e) => e.to_string(),
        };
        return SuiteOutcome { name, trials: trial + 1, counterexample: Some(format!("trial {trial}: {prm:?}: {msg}")) };
    }
    SuiteOutcome { name, trials: n, counterexample: None }
}

/// One Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct McCheck {
    pub quantity: &'static str,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl McCheck {
    /// Within `k` standard errors; zero-variance quantities need `1e-9` agreement.
    pub fn within(&self, k: f64) -> bool {
        let gap = (self.closed_form - self.estimate).abs();
        gap <= k * self.std_error || gap <= 1e-9 * (1.0 + self.closed_form.abs())
    }
}

/// Bias correction `E[s] = c4(n) sigma` for the sample standard deviation.
fn c4(n: usize) -> f64 {
    let n = n as f64;
    1.0 - 1.0 / (4.0 * n) - 7.0 / (32.0 * n * n)
}

fn sample_std(xs: &[f64]) -> f64 {
    let m = pairwise_sum(xs) / xs.len() as f64;
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (xs.len() - 1) as f64).sqrt()
}

fn empirical_quantile(xs: &mut [f64], p: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let pos = p * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (pos - lo as f64) * (xs[hi] - xs[lo])
}

/// Simulation oracles for the Gaussian longevity example. Draws come from
/// `seed` alone, so different parameter sets share random numbers.
pub fn example4_mc_checks(prm: &LongevityExampleParams, n_paths: usize, seed: u64) -> Result<Vec<McCheck>> {
    prm.validate()?;
    let fam = StreamFamily::new(seed, Domain::GaussianOracle);
    let (s1, s2, rho) = (prm.sigma1, prm.sigma2, prm.rho);
    let root = (1.0 - rho * rho).max(0.0).sqrt();
    let pairs = par_map(n_paths, None, |i| {
        let mut s = fam.stream(i as u64);
        let (z1, z2) = (s.normal(), s.normal());
        (prm.mu1 + s1 * z1, prm.mu2 + s2 * (rho * z1 + root * z2))
    });
    let l: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let nf = n_paths as f64;
    let mut checks = Vec::new();

    // Two-step actuarial: mean + beta * sd of L under P.
    let (m, _) = mean_and_std_error(&l);
    let sd = sample_std(&l) / c4(n_paths);
    checks.push(McCheck {
        quantity: "ts_actuarial_value",
        closed_form: gaussian::ts_actuarial_value(prm)?,
        estimate: m + prm.beta * sd,
        std_error: sd * ((1.0 + prm.beta * prm.beta / 2.0) / nf).sqrt(),
    });

    // Two-step financial: outer L~ under Q, inner L | L~ sampled, std-dev
    // principle on the inner sample.
    let inner = 256usize;
    let outer = (n_paths / inner).max(2);
    let vals = par_map(outer, None, |j| {
        let mut s = fam.stream((n_paths + j) as u64);
        let w = -prm.kappa + s.normal();
        let xs: Vec<f64> = (0..inner)
            .map(|_| prm.mu1 + s1 * (rho * w + root * s.normal()))
            .collect();
        let m = pairwise_sum(&xs) / inner as f64;
        let sd = if root == 0.0 { 0.0 } else { sample_std(&xs) / c4(inner) };
        m + prm.beta * sd
    });
    let (est, se) = mean_and_std_error(&vals);
    checks.push(McCheck {
        quantity: "ts_financial_value",
        closed_form: gaussian::ts_financial_value(prm)?,
        estimate: est,
        std_error: se,
    });

    // Residual losses from the explicit strategies.
    let pi1 = gaussian::ts_actuarial_value(prm)?;
    let r1: Vec<f64> = l.iter().map(|x| x - pi1).collect();
    let r2: Vec<f64> = pairs
        .iter()
        .map(|&(x, xt)| x - (prm.mu1 + rho * s1 / s2 * (xt - prm.mu2) + prm.beta * s1 * root))
        .collect();
    let (law1, law2) = gaussian::residual_laws(prm)?;
    for (label, r, law) in [("R1", &r1, law1), ("R2", &r2, law2)] {
        let (mean, se) = mean_and_std_error(r);
        let sd = sample_std(r);
        let var = sd * sd;
        checks.push(McCheck {
            quantity: if label == "R1" { "R1 mean" } else { "R2 mean" },
            closed_form: law.mean,
            estimate: mean,
            std_error: se,
        });
        checks.push(McCheck {
            quantity: if label == "R1" { "R1 variance" } else { "R2 variance" },
            closed_form: law.variance,
            estimate: var,
            std_error: var * (2.0 / (nf - 1.0)).sqrt(),
        });
    }

    // VaR change between the two residuals.
    let q1 = empirical_quantile(&mut r1.clone(), prm.p);
    let q2 = empirical_quantile(&mut r2.clone(), prm.p);
    let z = normal::quantile(prm.p);
    let dens = normal::pdf(z);
    let qse = |sd: f64| if sd == 0.0 { 0.0 } else { sd * (prm.p * (1.0 - prm.p) / nf).sqrt() / dens };
    checks.push(McCheck {
        quantity: "VaR_p[R2] - VaR_p[R1]",
        closed_form: gaussian::var_reduction(prm)?,
        estimate: q2 - q1,
        std_error: qse(law1.std_dev()) + qse(law2.std_dev()),
    });
    Ok(checks)
}

fn example4_monte_carlo(cfg: &SuiteConfig) -> SuiteOutcome {
    let name = "example4-monte-carlo";
    let n_sets = 5;
    for trial in 0..n_sets {
        let mut rng = trial_rng(cfg, 14, trial);
        let prm = random_longevity_params(&mut rng);
        let msg = match example4_mc_checks(&prm, cfg.mc_paths, cfg.seed) {
            Ok(checks) => match checks.iter().find(|c| !c.within(3.0)) {
                None => continue,
                Some(c) => format!("{c:?}"),
            },
            Err(e) => e.to_string(),
        };
        return SuiteOutcome { name, trials: trial + 1, counterexample: Some(format!("trial {trial}: {prm:?}: {msg}")) };
    }
    SuiteOutcome { name, trials: n_sets, counterexample: None }
}
