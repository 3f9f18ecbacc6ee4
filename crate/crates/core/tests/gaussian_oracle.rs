use twostep::gaussian::{invest_decision, residual_laws, value_difference, var_reduction, LongevityExampleParams};
use twostep::suites::example4_mc_checks;

fn at(rho: f64, beta: f64, kappa: f64) -> LongevityExampleParams {
    LongevityExampleParams { rho, beta, kappa, ..Default::default() }
}

#[test]
fn closed_forms_match_simulation() {
    let sets = [
        LongevityExampleParams::default(),
        at(0.9, 1.2, 0.5),
        at(-0.6, 0.3, 0.1),
        at(0.0, 0.8, 0.4),
        LongevityExampleParams { mu1: 80.0, mu2: 140.0, sigma1: 4.0, sigma2: 15.0, p: 0.9, ..at(0.3, 1.5, 0.7) },
    ];
    for prm in sets {
        for c in example4_mc_checks(&prm, 1_000_000, 42).unwrap() {
            assert!(c.within(3.0), "{prm:?}: {c:?}");
        }
    }
}

#[test]
fn perfect_correlation_leaves_no_residual() {
    for rho in [1.0, -1.0] {
        let prm = at(rho, 0.5, 0.2);
        let checks = example4_mc_checks(&prm, 200_000, 42).unwrap();
        let var = checks.iter().find(|c| c.quantity == "R2 variance").unwrap();
        assert_eq!(var.closed_form, 0.0);
        assert!(var.estimate < 1e-18);
        let (_, r2) = residual_laws(&prm).unwrap();
        assert!(r2.is_degenerate());
    }
}

#[test]
fn decision_rule_on_a_grid() {
    // invest iff sigma1 [beta (k - 1) - rho kappa] < sigma1 (z - beta)(k - 1), k = sqrt(1 - rho^2).
    let z = 2.575_829_303_548_901;
    for i in 0..=10 {
        for j in 0..=10 {
            let prm = at(i as f64 / 10.0, 0.5, j as f64 * 0.5);
            let k = (1.0 - prm.rho * prm.rho).sqrt();
            let expect = prm.beta * (k - 1.0) - prm.rho * prm.kappa < (z - prm.beta) * (k - 1.0);
            let lhs = value_difference(&prm).unwrap();
            let rhs = var_reduction(&prm).unwrap();
            if (lhs - rhs).abs() > 1e-9 {
                assert_eq!(invest_decision(&prm).unwrap(), expect, "{prm:?}");
            }
        }
    }
}
