//! Static hedging on a finite space.
//!
//! Asset 0 is the risk-free account with payoff 1 and price 1 (interest is
//! absorbed into the payoff units on finite spaces).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, require_finite, Error, Result};
use crate::finite_space::{Claim, FiniteSpace, Measure};

use super::consistency::{measurable_basis, random_measurable_claim, CheckConfig, Violation};
use super::principle::ValuationPrinciple;
use super::two_step::TwoStepValuation;

#[derive(Debug, Clone, PartialEq)]
pub struct TradedAssets {
    payoffs: Vec<Claim>,
    prices: Vec<f64>,
}

impl TradedAssets {
    /// Prepends the risk-free account to the given risky assets.
    pub fn new(risky_payoffs: Vec<Claim>, risky_prices: Vec<f64>, space: &FiniteSpace) -> Result<Self> {
        if risky_payoffs.len() != risky_prices.len() {
            return Err(invalid("prices", "one price per risky asset"));
        }
        for (p, &x) in risky_payoffs.iter().zip(&risky_prices) {
            space.check_claim(p)?;
            require_finite("asset price", x)?;
        }
        let mut payoffs = vec![Claim::constant(1.0, space.len())];
        payoffs.extend(risky_payoffs);
        let mut prices = vec![1.0];
        prices.extend(risky_prices);
        Ok(Self { payoffs, prices })
    }

    /// Risky assets priced by a financial principle.
    pub fn priced_by(
        risky_payoffs: Vec<Claim>,
        fin: &ValuationPrinciple,
        space: &FiniteSpace,
    ) -> Result<Self> {
        let prices = risky_payoffs
            .iter()
            .map(|p| fin.value(p, space))
            .collect::<Result<Vec<_>>>()?;
        Self::new(risky_payoffs, prices, space)
    }

    pub fn len(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn payoffs(&self) -> &[Claim] {
        &self.payoffs
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }
}

/// Units held in each traded asset, risk-free account first.
#[derive(Debug, Clone, PartialEq)]
pub struct TradingStrategy(pub Vec<f64>);

impl TradingStrategy {
    pub fn risk_free(amount: f64, n_assets: usize) -> Self {
        let mut v = vec![0.0; n_assets];
        v[0] = amount;
        Self(v)
    }

    pub fn units(&self) -> &[f64] {
        &self.0
    }

    /// Terminal payoff `theta . Y`.
    pub fn payoff(&self, assets: &TradedAssets) -> Claim {
        let n = assets.payoffs[0].len();
        let mut out = vec![0.0; n];
        for (units, payoff) in self.0.iter().zip(&assets.payoffs) {
            for (o, y) in out.iter_mut().zip(payoff.values()) {
                *o += units * y;
            }
        }
        Claim::new(out).expect("finite payoff")
    }

    /// Time-0 cost under the assets' quoted prices.
    pub fn cost(&self, assets: &TradedAssets) -> f64 {
        self.0.iter().zip(&assets.prices).map(|(u, p)| u * p).sum()
    }

    fn max_abs_diff(&self, other: &TradingStrategy) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Maps claims to static trading strategies.
#[derive(Debug, Clone, PartialEq)]
pub enum Hedger {
    /// Holds the full two-step actuarial value in the risk-free account.
    RiskFreeFullValue(TwoStepValuation),
    /// Least-squares replication under `P`.
    Quadratic,
    /// Hedges only the financial part `H1 = S - H2` of the decomposition
    /// `H2 = E[S | F2] - pi2[S]`, which makes any base hedger actuarial-consistent.
    Composite {
        base: Box<Hedger>,
        actuarial: ValuationPrinciple,
    },
}

impl Hedger {
    pub fn composite(base: Hedger, actuarial: ValuationPrinciple) -> Self {
        Self::Composite {
            base: Box::new(base),
            actuarial,
        }
    }

    pub fn hedge(&self, claim: &Claim, assets: &TradedAssets, space: &FiniteSpace) -> Result<TradingStrategy> {
        space.check_claim(claim)?;
        match self {
            Self::RiskFreeFullValue(valuation) => {
                Ok(TradingStrategy::risk_free(valuation.value(claim, space)?, assets.len()))
            }
            Self::Quadratic => quadratic_hedge(claim, assets, space),
            Self::Composite { base, actuarial } => {
                let (_, h1) = decompose(claim, actuarial, space)?;
                base.hedge(&h1, assets, space)
            }
        }
    }
}

/// Splits `S` into an actuarial part `H2 = E^P[S | F2] - pi2[S]` and the
/// remainder `H1 = S - H2`. Returns `(H2, H1)`.
pub fn decompose(claim: &Claim, act: &ValuationPrinciple, space: &FiniteSpace) -> Result<(Claim, Claim)> {
    let ce = space.conditional_expectation(claim, &space.actuarial_partition(), Measure::P)?;
    let level = act.value(claim, space)?;
    let h2 = ce.shift(-level);
    let h1 = claim - &h2;
    Ok((h2, h1))
}

fn gram_is_singular(gram: &DMatrix<f64>) -> bool {
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    !(max > 0.0) || min <= 1e-12 * max
}

fn gram_matrix(idx: &[usize], assets: &TradedAssets, w: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| {
        let (ya, yb) = (assets.payoffs[idx[a]].values(), assets.payoffs[idx[b]].values());
        w.iter().zip(ya).zip(yb).map(|((w, x), y)| w * x * y).sum()
    })
}

/// `argmin_theta E^P[(S - theta . Y)^2]` via the normal equations.
pub fn quadratic_hedge(claim: &Claim, assets: &TradedAssets, space: &FiniteSpace) -> Result<TradingStrategy> {
    let w = space.weights(Measure::P);
    let all: Vec<usize> = (0..assets.len()).collect();
    let gram = gram_matrix(&all, assets, &w);
    if gram_is_singular(&gram) {
        // Greedily keep assets that add rank; report the ones that do not.
        let mut kept: Vec<usize> = Vec::new();
        let mut dependent = Vec::new();
        for j in all {
            let mut trial = kept.clone();
            trial.push(j);
            if gram_is_singular(&gram_matrix(&trial, assets, &w)) {
                dependent.push(j);
            } else {
                kept = trial;
            }
        }
        return Err(Error::SingularGram { dependent });
    }
    // Least squares on the sqrt(P)-weighted design, not the normal
    // equations: payoff scales differ by orders of magnitude.
    let root: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let design = DMatrix::from_fn(claim.len(), assets.len(), |i, j| root[i] * assets.payoffs[j].values()[i]);
    let target = DVector::from_iterator(claim.len(), root.iter().zip(claim.values()).map(|(r, s)| r * s));
    let qr = design.clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let solve = |b: &DVector<f64>| {
        r.solve_upper_triangular(&(q.transpose() * b))
            .ok_or(Error::SingularGram { dependent: vec![] })
    };
    let mut theta = solve(&target)?;
    // One refinement step on the normal-equation residual.
    let resid = &target - &design * &theta;
    let corr = r
        .transpose()
        .solve_lower_triangular(&(design.transpose() * resid))
        .and_then(|y| r.solve_upper_triangular(&y))
        .ok_or(Error::SingularGram { dependent: vec![] })?;
    theta += corr;
    Ok(TradingStrategy(theta.iter().copied().collect()))
}

/// `pi1[theta_S . Y] + pi2[S - theta_S . Y]`.
///
/// The hedge is priced at the quoted asset prices. The residual is generally
/// hybrid, so `pi2` is extended to it through the two-step actuarial
/// valuation with `fin`; on actuarial residuals this is `act` itself.
/// The hedger must be actuarial-consistent.
pub fn hedge_based_value(
    hedger: &Hedger,
    fin: &ValuationPrinciple,
    act: &ValuationPrinciple,
    claim: &Claim,
    assets: &TradedAssets,
    space: &FiniteSpace,
) -> Result<f64> {
    if let Some(v) = find_hedger_violation(hedger, act, space, assets, &CheckConfig::default()) {
        return Err(Error::ContractViolation(format!(
            "hedger is not actuarial-consistent ({v})"
        )));
    }
    let theta = hedger.hedge(claim, assets, space)?;
    let residual = claim - &theta.payoff(assets);
    let residual_value = TwoStepValuation::actuarial(fin.clone(), act.clone()).value(&residual, space)?;
    Ok(theta.cost(assets) + residual_value)
}

/// The valuation `S -> pi1[theta_S . Y]` induced by a hedger.
pub fn hedge_cost_value(
    hedger: &Hedger,
    claim: &Claim,
    assets: &TradedAssets,
    space: &FiniteSpace,
) -> Result<f64> {
    Ok(hedger.hedge(claim, assets, space)?.cost(assets))
}

/// Searches for an actuarial claim whose hedge is not `(pi2[S2], 0, ..., 0)`.
pub fn find_hedger_violation(
    hedger: &Hedger,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    assets: &TradedAssets,
    cfg: &CheckConfig,
) -> Option<Violation> {
    let part = space.actuarial_partition();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut claims = measurable_basis(&part);
    claims.extend((0..cfg.n_claims).map(|_| random_measurable_claim(&part, &mut rng)));
    claims.into_iter().find_map(|s2| {
        let outcome = act.value(&s2, space).and_then(|level| {
            let theta = hedger.hedge(&s2, assets, space)?;
            Ok((level, theta))
        });
        match outcome {
            Ok((level, theta)) => {
                let target = TradingStrategy::risk_free(level, assets.len());
                let gap = theta.max_abs_diff(&target);
                (gap > cfg.tol).then(|| Violation {
                    property: "actuarial-consistent hedger",
                    claim: s2.values().to_vec(),
                    other: Some(theta.0.clone()),
                    lhs: theta.0[0],
                    rhs: level,
                    error: None,
                })
            }
            Err(e) => Some(Violation {
                property: "actuarial-consistent hedger",
                claim: s2.values().to_vec(),
                other: None,
                lhs: f64::NAN,
                rhs: f64::NAN,
                error: Some(e.to_string()),
            }),
        }
    })
}

pub fn is_actuarial_consistent_hedger(
    hedger: &Hedger,
    act: &ValuationPrinciple,
    space: &FiniteSpace,
    assets: &TradedAssets,
    cfg: &CheckConfig,
) -> bool {
    find_hedger_violation(hedger, act, space, assets, cfg).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_space::{Coordinate, Outcome, Partition};

    fn space() -> FiniteSpace {
        FiniteSpace::new(vec![
            Outcome::new(50.0, 0.0, 0.3, 0.2),
            Outcome::new(50.0, 1.0, 0.1, 0.3),
            Outcome::new(200.0, 0.0, 0.1, 0.1),
            Outcome::new(200.0, 1.0, 0.5, 0.4),
        ])
        .unwrap()
    }

    fn stock_assets(s: &FiniteSpace) -> TradedAssets {
        TradedAssets::priced_by(
            vec![s.coordinate_claim(Coordinate::Financial)],
            &ValuationPrinciple::linear_q(),
            s,
        )
        .unwrap()
    }

    #[test]
    fn quadratic_replicates_a_traded_asset() {
        let s = space();
        let assets = stock_assets(&s);
        let theta = quadratic_hedge(&assets.payoffs()[1].clone(), &assets, &s).unwrap();
        assert!((theta.0[0]).abs() < 1e-10);
        assert!((theta.0[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_two_by_two_closed_form() {
        let s = space();
        let assets = stock_assets(&s);
        let claim = Claim::new(vec![0.0, 0.0, 100.0, 100.0]).unwrap();
        let theta = quadratic_hedge(&claim, &assets, &s).unwrap();
        // Claim = (Y - 50) * 100 / 150 exactly, so replication is perfect.
        assert!((theta.0[1] - 100.0 / 150.0).abs() < 1e-10);
        assert!((theta.0[0] + 50.0 * 100.0 / 150.0).abs() < 1e-8);
        let resid = &claim - &theta.payoff(&assets);
        for y in assets.payoffs() {
            assert!(s.expectation(&(&resid * y), Measure::P).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn singular_gram_names_dependent_asset() {
        let s = space();
        let y = s.coordinate_claim(Coordinate::Financial);
        let assets = TradedAssets::new(vec![y.clone(), y.scale(2.0)], vec![1.0, 2.0], &s).unwrap();
        let err = quadratic_hedge(&y, &assets, &s).unwrap_err();
        assert_eq!(err, Error::SingularGram { dependent: vec![2] });
    }

    #[test]
    fn decomposition_of_actuarial_claim() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let s2 = Claim::new(vec![2.0, 8.0, 2.0, 8.0]).unwrap();
        let (h2, h1) = decompose(&s2, &act, &s).unwrap();
        let level = act.value(&s2, &s).unwrap();
        assert!(h2.max_abs_diff(&s2.shift(-level)) < 1e-12);
        assert!(h1.max_abs_diff(&Claim::constant(level, 4)) < 1e-12);
    }

    #[test]
    fn decomposition_of_constant() {
        let s = space();
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let (h2, h1) = decompose(&Claim::constant(4.0, 4), &act, &s).unwrap();
        assert!(h2.max_abs_diff(&Claim::zero(4)) < 1e-12);
        assert!(h1.max_abs_diff(&Claim::constant(4.0, 4)) < 1e-12);
    }

    #[test]
    fn hedgers_are_normalized() {
        let s = space();
        let assets = stock_assets(&s);
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let hedgers = [
            Hedger::Quadratic,
            Hedger::RiskFreeFullValue(TwoStepValuation::actuarial(
                ValuationPrinciple::linear_q(),
                act.clone(),
            )),
            Hedger::composite(Hedger::Quadratic, act),
        ];
        for h in &hedgers {
            let theta = h.hedge(&Claim::zero(4), &assets, &s).unwrap();
            assert!(theta.0.iter().all(|u| u.abs() < 1e-12), "{h:?}");
        }
    }

    #[test]
    fn consistency_of_hedgers() {
        let s = space();
        let assets = stock_assets(&s);
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let cfg = CheckConfig::default();
        let full = Hedger::RiskFreeFullValue(TwoStepValuation::actuarial(
            ValuationPrinciple::linear_q(),
            act.clone(),
        ));
        assert!(is_actuarial_consistent_hedger(&full, &act, &s, &assets, &cfg));
        assert!(!is_actuarial_consistent_hedger(&Hedger::Quadratic, &act, &s, &assets, &cfg));
        let comp = Hedger::composite(Hedger::Quadratic, act.clone());
        assert!(is_actuarial_consistent_hedger(&comp, &act, &s, &assets, &cfg));
    }

    #[test]
    fn hedge_based_value_rejects_inconsistent_hedger() {
        let s = space();
        let assets = stock_assets(&s);
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let fin = ValuationPrinciple::linear_q();
        let c = Claim::new(vec![0.0, 0.0, 0.0, 100.0]).unwrap();
        let err = hedge_based_value(&Hedger::Quadratic, &fin, &act, &c, &assets, &s).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn hedge_based_value_of_actuarial_claim() {
        let s = space();
        let assets = stock_assets(&s);
        let act = ValuationPrinciple::std_dev(0.5).unwrap();
        let fin = ValuationPrinciple::linear_q();
        let comp = Hedger::composite(Hedger::Quadratic, act.clone());
        let s2 = Partition::new(vec![vec![0, 2], vec![1, 3]], 4)
            .unwrap()
            .broadcast(&[3.0, 11.0]);
        let v = hedge_based_value(&comp, &fin, &act, &s2, &assets, &s).unwrap();
        assert!((v - act.value(&s2, &s).unwrap()).abs() < 1e-10);
    }
}
