use crate::error::{invalid, Result};
use crate::finite_space::{Claim, FiniteSpace};

use super::principle::ValuationPrinciple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoStepKind {
    /// `pi2[ pi1[S | F2] ]`: financial value per actuarial scenario, then the
    /// actuarial principle across scenarios.
    Actuarial,
    /// `pi1[ pi2[S | F1] ]`.
    Financial,
}

/// A two-step valuation built from a financial and an actuarial principle.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepValuation {
    pub kind: TwoStepKind,
    pub financial: ValuationPrinciple,
    pub actuarial: ValuationPrinciple,
}

impl TwoStepValuation {
    pub fn actuarial(financial: ValuationPrinciple, actuarial: ValuationPrinciple) -> Self {
        Self {
            kind: TwoStepKind::Actuarial,
            financial,
            actuarial,
        }
    }

    pub fn financial(financial: ValuationPrinciple, actuarial: ValuationPrinciple) -> Self {
        Self {
            kind: TwoStepKind::Financial,
            financial,
            actuarial,
        }
    }

    /// The intermediate claim: the inner principle conditioned on the other
    /// filtration.
    pub fn inner(&self, claim: &Claim, space: &FiniteSpace) -> Result<Claim> {
        match self.kind {
            TwoStepKind::Actuarial => {
                self.financial
                    .conditional_value(claim, &space.actuarial_partition(), space)
            }
            TwoStepKind::Financial => {
                self.actuarial
                    .conditional_value(claim, &space.financial_partition(), space)
            }
        }
    }

    pub fn value(&self, claim: &Claim, space: &FiniteSpace) -> Result<f64> {
        let inner = self.inner(claim, space)?;
        match self.kind {
            TwoStepKind::Actuarial => self.actuarial.value(&inner, space),
            TwoStepKind::Financial => self.financial.value(&inner, space),
        }
    }
}

pub fn two_step_actuarial(
    fin: &ValuationPrinciple,
    act: &ValuationPrinciple,
    claim: &Claim,
    space: &FiniteSpace,
) -> Result<f64> {
    TwoStepValuation::actuarial(fin.clone(), act.clone()).value(claim, space)
}

pub fn two_step_financial(
    fin: &ValuationPrinciple,
    act: &ValuationPrinciple,
    claim: &Claim,
    space: &FiniteSpace,
) -> Result<f64> {
    TwoStepValuation::financial(fin.clone(), act.clone()).value(claim, space)
}

/// Outcome of [`product_formula_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductFormula {
    /// `Pi[s1 * s2]`.
    pub product_value: f64,
    /// `pi1[s1] * pi2[s2]`.
    pub factored_value: f64,
    /// Whether the conditional value of the inner factor is constant across
    /// the other filtration's cells (the sufficient condition for a fair
    /// valuation).
    pub condition_holds: bool,
    pub holds: bool,
}

/// Compares `Pi[s1 * s2]` with `pi1[s1] * pi2[s2]` for a financial claim `s1`
/// and an actuarial claim `s2`, both nonnegative.
pub fn product_formula_check(
    valuation: &TwoStepValuation,
    s1: &Claim,
    s2: &Claim,
    space: &FiniteSpace,
    tol: f64,
) -> Result<ProductFormula> {
    let fin_part = space.financial_partition();
    let act_part = space.actuarial_partition();
    if !s1.is_measurable(&fin_part, 0.0) {
        return Err(invalid("s1", "must be a financial claim"));
    }
    if !s2.is_measurable(&act_part, 0.0) {
        return Err(invalid("s2", "must be an actuarial claim"));
    }
    if !s1.is_nonnegative() || !s2.is_nonnegative() {
        return Err(invalid("claims", "product formula is stated for nonnegative factors"));
    }
    let pi1 = valuation.financial.value(s1, space)?;
    let pi2 = valuation.actuarial.value(s2, space)?;
    let condition_holds = match valuation.kind {
        TwoStepKind::Actuarial => valuation
            .financial
            .conditional_value(s1, &act_part, space)?
            .values()
            .iter()
            .all(|v| (v - pi1).abs() <= tol),
        TwoStepKind::Financial => valuation
            .actuarial
            .conditional_value(s2, &fin_part, space)?
            .values()
            .iter()
            .all(|v| (v - pi2).abs() <= tol),
    };
    let product_value = valuation.value(&(s1 * s2), space)?;
    let factored_value = pi1 * pi2;
    Ok(ProductFormula {
        product_value,
        factored_value,
        condition_holds,
        holds: (product_value - factored_value).abs() <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_space::{Measure, Outcome};

    fn correlated() -> FiniteSpace {
        FiniteSpace::new(vec![
            Outcome::new(50.0, 0.0, 0.3, 0.2),
            Outcome::new(50.0, 1.0, 0.1, 0.3),
            Outcome::new(200.0, 0.0, 0.1, 0.1),
            Outcome::new(200.0, 1.0, 0.5, 0.4),
        ])
        .unwrap()
    }

    #[test]
    fn pure_actuarial_claim_reduces_to_actuarial_principle() {
        let s = correlated();
        let fin = ValuationPrinciple::linear_q();
        let act = ValuationPrinciple::std_dev(0.7).unwrap();
        let c = Claim::new(vec![3.0, 9.0, 3.0, 9.0]).unwrap();
        let v = two_step_actuarial(&fin, &act, &c, &s).unwrap();
        assert!((v - act.value(&c, &s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pure_financial_claim_reduces_to_financial_principle() {
        let s = correlated();
        let fin = ValuationPrinciple::linear_q();
        let act = ValuationPrinciple::std_dev(0.7).unwrap();
        let c = Claim::new(vec![0.0, 0.0, 100.0, 100.0]).unwrap();
        let v = two_step_financial(&fin, &act, &c, &s).unwrap();
        assert!((v - s.expectation(&c, Measure::Q).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn product_formula_fails_under_q_dependence() {
        let s = correlated();
        let ts = TwoStepValuation::actuarial(
            ValuationPrinciple::linear_q(),
            ValuationPrinciple::std_dev(0.5).unwrap(),
        );
        let s1 = Claim::new(vec![0.0, 0.0, 100.0, 100.0]).unwrap();
        let s2 = Claim::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let r = product_formula_check(&ts, &s1, &s2, &s, 1e-10).unwrap();
        assert!(!r.condition_holds);
        assert!(!r.holds);
    }

    #[test]
    fn product_formula_rejects_hybrid_factor() {
        let s = correlated();
        let ts = TwoStepValuation::actuarial(
            ValuationPrinciple::linear_q(),
            ValuationPrinciple::linear_p(),
        );
        let hybrid = Claim::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let s2 = Claim::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(product_formula_check(&ts, &hybrid, &s2, &s, 1e-10).is_err());
    }
}
