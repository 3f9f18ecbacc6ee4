use std::fmt;

use crate::error::{invalid, require_nonnegative, Error, Result};
use crate::finite_space::{weighted_sum, Claim, Density, FiniteSpace, Measure, Partition};

/// The measure behind a linear valuation.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMeasure {
    P,
    Q,
    /// `density * dP`.
    Density(Density),
}

/// A valuation rule for claims on a finite space.
///
/// `StdDev` values a claim as `E^P[S] + beta * sd^P[S]`; `Coherent` takes the
/// worst case `max_phi E^P[phi S]` over a finite set of densities.
#[derive(Debug, Clone, PartialEq)]
pub enum ValuationPrinciple {
    Linear(LinearMeasure),
    StdDev { beta: f64 },
    Coherent(Vec<Density>),
}

impl ValuationPrinciple {
    pub fn linear_p() -> Self {
        Self::Linear(LinearMeasure::P)
    }

    /// Risk-neutral expectation (the risk-free rate is absorbed on finite spaces).
    pub fn linear_q() -> Self {
        Self::Linear(LinearMeasure::Q)
    }

    pub fn linear_density(density: Density) -> Self {
        Self::Linear(LinearMeasure::Density(density))
    }

    pub fn std_dev(beta: f64) -> Result<Self> {
        require_nonnegative("beta", beta)?;
        Ok(Self::StdDev { beta })
    }

    /// Builds a standard-deviation principle without validating `beta`.
    ///
    /// Exists so that verification harnesses can check that they catch an
    /// invalid loading.
    #[doc(hidden)]
    pub fn std_dev_unchecked(beta: f64) -> Self {
        Self::StdDev { beta }
    }

    pub fn coherent(densities: Vec<Density>) -> Result<Self> {
        if densities.is_empty() {
            return Err(invalid("densities", "coherent principle needs at least one density"));
        }
        Ok(Self::Coherent(densities))
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Self::Linear(_))
    }

    /// Value of `claim` on the whole space.
    pub fn value(&self, claim: &Claim, space: &FiniteSpace) -> Result<f64> {
        space.check_claim(claim)?;
        let all: Vec<usize> = (0..space.len()).collect();
        self.cell_value(&all, 0, claim, space)
    }

    /// Cell-wise application of the principle under cell-renormalized
    /// weights; the result is measurable with respect to `partition`.
    pub fn conditional_value(
        &self,
        claim: &Claim,
        partition: &Partition,
        space: &FiniteSpace,
    ) -> Result<Claim> {
        space.check_claim(claim)?;
        partition.check_space(space)?;
        let values = partition
            .cells()
            .iter()
            .enumerate()
            .map(|(c, cell)| self.cell_value(cell, c, claim, space))
            .collect::<Result<Vec<f64>>>()?;
        Ok(partition.broadcast(&values))
    }

    fn cell_value(
        &self,
        cell: &[usize],
        cell_index: usize,
        claim: &Claim,
        space: &FiniteSpace,
    ) -> Result<f64> {
        match self {
            Self::Linear(m) => {
                let (w, name) = match m {
                    LinearMeasure::P => (space.weights(Measure::P), "P"),
                    LinearMeasure::Q => (space.weights(Measure::Q), "Q"),
                    LinearMeasure::Density(d) => {
                        check_density(d, space)?;
                        (d.measure_weights(space), "density")
                    }
                };
                cell_mean(cell, cell_index, claim, &w, name)
            }
            Self::StdDev { beta } => {
                let w = space.weights(Measure::P);
                let mean = cell_mean(cell, cell_index, claim, &w, "P")?;
                let mass: f64 = cell.iter().map(|&i| w[i]).sum();
                let var = cell
                    .iter()
                    .map(|&i| w[i] * (claim[i] - mean).powi(2))
                    .sum::<f64>()
                    / mass;
                Ok(mean + beta * var.max(0.0).sqrt())
            }
            Self::Coherent(densities) => {
                let mut best = f64::NEG_INFINITY;
                for d in densities {
                    check_density(d, space)?;
                    let w = d.measure_weights(space);
                    let v = cell_mean(cell, cell_index, claim, &w, "density")?;
                    if v > best {
                        best = v;
                    }
                }
                Ok(best)
            }
        }
    }

    /// Plain expectation of `claim` under the principle's reference measure(s),
    /// one entry per member for coherent principles.
    pub fn member_expectations(&self, claim: &Claim, space: &FiniteSpace) -> Result<Vec<f64>> {
        space.check_claim(claim)?;
        match self {
            Self::Coherent(ds) => ds
                .iter()
                .map(|d| space.density_expectation(d, claim))
                .collect(),
            Self::Linear(LinearMeasure::Density(d)) => Ok(vec![space.density_expectation(d, claim)?]),
            Self::Linear(LinearMeasure::Q) => Ok(vec![space.expectation(claim, Measure::Q)?]),
            Self::Linear(LinearMeasure::P) | Self::StdDev { .. } => {
                Ok(vec![space.expectation(claim, Measure::P)?])
            }
        }
    }
}

fn check_density(d: &Density, space: &FiniteSpace) -> Result<()> {
    if d.values().len() != space.len() {
        return Err(Error::Dimension {
            expected: space.len(),
            actual: d.values().len(),
        });
    }
    Ok(())
}

fn cell_mean(cell: &[usize], cell_index: usize, claim: &Claim, w: &[f64], name: &str) -> Result<f64> {
    let mass: f64 = cell.iter().map(|&i| w[i]).sum();
    if mass <= 0.0 {
        return Err(Error::Conditioning {
            cell: cell_index,
            measure: name.to_string(),
        });
    }
    let cw: Vec<f64> = cell.iter().map(|&i| w[i]).collect();
    let cx: Vec<f64> = cell.iter().map(|&i| claim[i]).collect();
    Ok(weighted_sum(&cw, &cx) / mass)
}

impl fmt::Display for ValuationPrinciple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear(LinearMeasure::P) => write!(f, "linear(P)"),
            Self::Linear(LinearMeasure::Q) => write!(f, "linear(Q)"),
            Self::Linear(LinearMeasure::Density(d)) => write!(f, "linear(density {:?})", d.values()),
            Self::StdDev { beta } => write!(f, "std_dev(beta={beta:?})"),
            Self::Coherent(ds) => write!(f, "coherent({} densities)", ds.len()),
        }
    }
}
