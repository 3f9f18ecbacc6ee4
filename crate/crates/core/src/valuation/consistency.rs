//! Randomized consistency predicates.
//!
//! Each check evaluates a deterministic basis (cell indicators, constants)
//! followed by seeded random claims, and reports the first counterexample.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::Result;
use crate::finite_space::{Claim, FiniteSpace, Partition};

use super::principle::ValuationPrinciple;

/// Sampling controls shared by the predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub n_claims: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            n_claims: 64,
            tol: 1e-8,
            seed: 0x5eed,
        }
    }
}

/// A claim (or pair of claims) on which a consistency identity fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub property: &'static str,
    pub claim: Vec<f64>,
    pub other: Option<Vec<f64>>,
    pub lhs: f64,
    pub rhs: f64,
    pub error: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: claim={:?}", self.property, self.claim)?;
        if let Some(o) = &self.other {
            write!(f, " other={o:?}")?;
        }
        match &self.error {
            Some(e) => write!(f, " error={e}"),
            None => write!(f, " lhs={:?} rhs={:?}", self.lhs, self.rhs),
        }
    }
}

/// Uniform values in `[-100, 100]` per cell, broadcast onto outcomes.
pub fn random_measurable_claim(partition: &Partition, rng: &mut impl Rng) -> Claim {
    let values: Vec<f64> = (0..partition.cells().len())
        .map(|_| rng.gen_range(-100.0..100.0))
        .collect();
    partition.broadcast(&values)
}

pub fn random_claim(n: usize, rng: &mut impl Rng) -> Claim {
    Claim::new((0..n).map(|_| rng.gen_range(-100.0..100.0)).collect()).expect("finite")
}

/// Deterministic basis of measurable claims: constants and cell indicators
/// (plus their negatives and a scaled copy).
pub fn measurable_basis(partition: &Partition) -> Vec<Claim> {
    let n = partition.n_outcomes();
    let mut out = vec![Claim::zero(n), Claim::constant(1.0, n), Claim::constant(-3.5, n)];
    for c in 0..partition.cells().len() {
        let ind = partition.cell_indicator(c);
        out.push(ind.scale(-1.0));
        out.push(ind.scale(17.0));
        out.push(ind);
    }
    out
}

fn measurable_claims(partition: &Partition, cfg: &CheckConfig) -> Vec<Claim> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut claims = measurable_basis(partition);
    claims.extend((0..cfg.n_claims).map(|_| random_measurable_claim(partition, &mut rng)));
    claims
}

fn compare<F>(
    property: &'static str,
    claim: &Claim,
    other: Option<&Claim>,
    lhs: F,
    rhs: Result<f64>,
    tol: f64,
) -> Option<Violation>
where
    F: FnOnce() -> Result<f64>,
{
    let make = |lhs: f64, rhs: f64, error: Option<String>| Violation {
        property,
        claim: claim.values().to_vec(),
        other: other.map(|o| o.values().to_vec()),
        lhs,
        rhs,
        error,
    };
    match (lhs(), rhs) {
        (Ok(l), Ok(r)) if (l - r).abs() <= tol => None,
        (Ok(l), Ok(r)) => Some(make(l, r, None)),
        (Err(e), _) | (_, Err(e)) => Some(make(f64::NAN, f64::NAN, Some(e.to_string()))),
    }
}

/// Searches for an actuarial claim with `valuation[S2] != act[S2]`.
pub fn find_weak_actuarial_violation<V>(
    valuation: V,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> Option<Violation>
where
    V: Fn(&Claim) -> Result<f64>,
{
    let part = space.actuarial_partition();
    measurable_claims(&part, cfg).into_iter().find_map(|s2| {
        compare(
            "weak actuarial consistency",
            &s2,
            None,
            || valuation(&s2),
            act.value(&s2, space),
            cfg.tol,
        )
    })
}

pub fn is_weak_actuarial_consistent<V>(
    valuation: V,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> bool
where
    V: Fn(&Claim) -> Result<f64>,
{
    find_weak_actuarial_violation(valuation, act, space, cfg).is_none()
}

/// Searches for a financial claim with `valuation[S1] != fin[S1]`.
pub fn find_weak_market_violation<V>(
    valuation: V,
    fin: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> Option<Violation>
where
    V: Fn(&Claim) -> Result<f64>,
{
    let part = space.financial_partition();
    measurable_claims(&part, cfg).into_iter().find_map(|s1| {
        compare(
            "weak market consistency",
            &s1,
            None,
            || valuation(&s1),
            fin.value(&s1, space),
            cfg.tol,
        )
    })
}

pub fn is_weak_market_consistent<V>(
    valuation: V,
    fin: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> bool
where
    V: Fn(&Claim) -> Result<f64>,
{
    find_weak_market_violation(valuation, fin, space, cfg).is_none()
}

/// Searches for a pair `(S, S2)` with `valuation[S + S2] != valuation[S] + act[S2]`.
///
/// Exhaustive over (outcome indicator, actuarial cell indicator) pairs, then
/// `cfg.n_claims` random pairs.
pub fn find_strong_actuarial_violation<V>(
    valuation: V,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> Option<Violation>
where
    V: Fn(&Claim) -> Result<f64>,
{
    let n = space.len();
    let part = space.actuarial_partition();
    let mut pairs: Vec<(Claim, Claim)> = Vec::new();
    let mut general: Vec<Claim> = vec![Claim::zero(n)];
    general.extend((0..n).map(|i| Claim::indicator(&[i], n)));
    for s in &general {
        for s2 in measurable_basis(&part) {
            pairs.push((s.clone(), s2));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..cfg.n_claims {
        let s = random_claim(n, &mut rng);
        let s2 = random_measurable_claim(&part, &mut rng);
        pairs.push((s, s2));
    }
    pairs.into_iter().find_map(|(s, s2)| {
        let sum = &s + &s2;
        let rhs = valuation(&s).and_then(|a| Ok(a + act.value(&s2, space)?));
        compare(
            "strong actuarial consistency",
            &s,
            Some(&s2),
            || valuation(&sum),
            rhs,
            cfg.tol,
        )
    })
}

pub fn is_strong_actuarial_consistent<V>(
    valuation: V,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    cfg: &CheckConfig,
) -> bool
where
    V: Fn(&Claim) -> Result<f64>,
{
    find_strong_actuarial_violation(valuation, act, space, cfg).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_space::Outcome;
    use crate::valuation::two_step::TwoStepValuation;

    fn space() -> FiniteSpace {
        FiniteSpace::new(vec![
            Outcome::new(50.0, 0.0, 0.3, 0.2),
            Outcome::new(50.0, 1.0, 0.1, 0.3),
            Outcome::new(200.0, 0.0, 0.1, 0.1),
            Outcome::new(200.0, 1.0, 0.5, 0.4),
        ])
        .unwrap()
    }

    #[test]
    fn two_step_actuarial_is_weak_acv() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.8).unwrap();
        let ts = TwoStepValuation::actuarial(ValuationPrinciple::linear_q(), act.clone());
        let cfg = CheckConfig::default();
        assert!(is_weak_actuarial_consistent(|c| ts.value(c, &s), &act, &s, &cfg));
    }

    #[test]
    fn risk_neutral_pricing_is_not_weak_acv_for_std_dev() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.8).unwrap();
        let q = ValuationPrinciple::linear_q();
        let v = find_weak_actuarial_violation(|c| q.value(c, &s), &act, &s, &CheckConfig::default());
        let v = v.expect("violation expected");
        assert!((v.lhs - v.rhs).abs() > 1e-6);
    }

    #[test]
    fn actuarial_principle_itself_is_weak_acv() {
        let s = space();
        let act = ValuationPrinciple::std_dev(1.3).unwrap();
        assert!(is_weak_actuarial_consistent(
            |c| act.value(c, &s),
            &act,
            &s,
            &CheckConfig::default()
        ));
    }

    #[test]
    fn std_dev_two_step_is_not_strong_acv() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.8).unwrap();
        let ts = TwoStepValuation::actuarial(ValuationPrinciple::linear_q(), act.clone());
        assert!(!is_strong_actuarial_consistent(
            |c| ts.value(c, &s),
            &act,
            &s,
            &CheckConfig::default()
        ));
    }

    #[test]
    fn constant_shift_is_always_strongly_consistent() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.8).unwrap();
        let ts = TwoStepValuation::actuarial(ValuationPrinciple::linear_q(), act.clone());
        let base = Claim::new(vec![1.0, 5.0, -2.0, 0.5]).unwrap();
        for a in [-3.0, 0.0, 2.5] {
            let shifted = ts.value(&base.shift(a), &s).unwrap();
            let split = ts.value(&base, &s).unwrap() + act.value(&Claim::constant(a, 4), &s).unwrap();
            assert!((shifted - split).abs() < 1e-10);
        }
    }

    #[test]
    fn violation_display_is_stable() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.8).unwrap();
        let q = ValuationPrinciple::linear_q();
        let cfg = CheckConfig { seed: 7, ..CheckConfig::default() };
        let a = find_weak_actuarial_violation(|c| q.value(c, &s), &act, &s, &cfg).unwrap();
        let b = find_weak_actuarial_violation(|c| q.value(c, &s), &act, &s, &cfg).unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }
}
