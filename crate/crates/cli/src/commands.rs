use std::fmt::Write as _;

use twostep::gaussian::{self, LongevityExampleParams};
use twostep::gmmb::{best_estimate_curve, coc_value};
use twostep::suites::{run_all, SuiteConfig};
use twostep::valuation::hybrid::{
    example5_space, two_step_difference_example5, unit_linked_call,
};
use twostep::{TwoStepValuation, ValuationPrinciple};

use crate::config::RunConfig;
use crate::format::{be, g6};

/// `rho,best_estimate,std_error`, one row per grid point on common draws.
pub fn table2(cfg: &RunConfig) -> twostep::Result<String> {
    let curve = best_estimate_curve(&cfg.model, &cfg.mc, &cfg.rho_grid)?;
    let mut out = String::from("rho,best_estimate,std_error\n");
    for (rho, est) in curve {
        let _ = writeln!(out, "{},{},{}", g6(rho), be(est.value), g6(est.std_error));
    }
    Ok(out)
}

/// `rho,best_estimate,scr,coc_value,bs_benchmark`.
pub fn coc(cfg: &RunConfig) -> twostep::Result<String> {
    let mut out = String::from("rho,best_estimate,scr,coc_value,bs_benchmark\n");
    for &rho in &cfg.rho_grid {
        // Same seed per row: the survival draws are shared across rho.
        let r = coc_value(&cfg.model.with_rho(rho), &cfg.mc, &cfg.scr_principle, cfg.coc_rate)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g6(rho),
            be(r.best_estimate),
            g6(r.scr),
            g6(r.coc_value),
            g6(r.bs_benchmark)
        );
    }
    Ok(out)
}

pub struct VerifyReport {
    pub text: String,
    pub passed: bool,
}

pub fn verify(cfg: &RunConfig, inject_negative_beta: bool) -> VerifyReport {
    let suite_cfg = SuiteConfig {
        seed: cfg.mc.seed,
        inject_negative_beta,
        ..SuiteConfig::default()
    };
    let outcomes = run_all(&suite_cfg);
    let mut text = String::new();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{status} {} ({} trials)", o.name, o.trials);
    }
    let first = outcomes.iter().find(|o| !o.passed());
    if let Some(o) = first {
        let _ = writeln!(
            text,
            "counterexample [{}]: {}",
            o.name,
            o.counterexample.as_deref().unwrap_or_default()
        );
    }
    VerifyReport {
        text,
        passed: first.is_none(),
    }
}

/// Closed-form tables for the longevity-bond and unit-linked examples.
pub fn examples() -> twostep::Result<String> {
    let mut out = String::new();
    let base = LongevityExampleParams::default();
    let _ = writeln!(
        out,
        "# longevity bond: mu=100 sigma=10 beta={} kappa={} p={}",
        g6(base.beta),
        g6(base.kappa),
        g6(base.p)
    );
    out.push_str("rho,ts_actuarial,ts_financial,difference,var_change,invest\n");
    for k in 0..=10 {
        let prm = LongevityExampleParams { rho: k as f64 / 10.0, ..base };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            g6(prm.rho),
            g6(gaussian::ts_actuarial_value(&prm)?),
            g6(gaussian::ts_financial_value(&prm)?),
            g6(gaussian::value_difference(&prm)?),
            g6(gaussian::var_reduction(&prm)?),
            gaussian::invest_decision(&prm)?
        );
    }

    let (p_i, p_y, p_up, beta) = (0.8, 0.4, 0.9, 0.5);
    let _ = writeln!(
        out,
        "\n# unit-linked call: P[I=1]={} P[Y=200]={} P[I=1|Y=200]={} beta={}",
        g6(p_i),
        g6(p_y),
        g6(p_up),
        g6(beta)
    );
    out.push_str("kappa,ts_actuarial,ts_financial,difference\n");
    let act = ValuationPrinciple::std_dev(beta)?;
    for k in 0..=4 {
        let kappa = k as f64 * 0.05;
        let space = example5_space(p_i, p_y, p_up, kappa)?;
        let call = unit_linked_call(&space);
        let a = TwoStepValuation::actuarial(ValuationPrinciple::linear_q(), act.clone()).value(&call, &space)?;
        let f = TwoStepValuation::financial(ValuationPrinciple::linear_q(), act.clone()).value(&call, &space)?;
        let d = two_step_difference_example5(p_i, p_y, p_up, p_up * p_y / p_i, beta, kappa)?;
        let _ = writeln!(out, "{},{},{},{}", g6(kappa), g6(a), g6(f), g6(d));
    }
    Ok(out)
}
