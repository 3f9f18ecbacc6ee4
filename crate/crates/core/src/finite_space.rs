//! Finite probability spaces carrying a real-world measure `P` and a pricing
//! measure `Q` side by side.
//!
//! Each outcome records the terminal value of the traded risk (financial
//! coordinate) and of the non-traded risk (actuarial coordinate). Sigma-algebras
//! at maturity are represented by [`Partition`]s, so conditioning reduces to
//! weighted averages over cells and every identity can be checked exactly.

use std::ops::{Add, Mul, Sub};

use crate::error::{invalid, require_finite, Error, Result};

const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub financial: f64,
    pub actuarial: f64,
    pub p: f64,
    pub q: f64,
}

impl Outcome {
    pub fn new(financial: f64, actuarial: f64, p: f64, q: f64) -> Self {
        Self {
            financial,
            actuarial,
            p,
            q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    P,
    Q,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::P => "P",
            Measure::Q => "Q",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    Financial,
    Actuarial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    outcomes: Vec<Outcome>,
}

impl FiniteSpace {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(invalid("outcomes", "space must have at least one outcome"));
        }
        for o in &outcomes {
            require_finite("financial coordinate", o.financial)?;
            require_finite("actuarial coordinate", o.actuarial)?;
            require_finite("p weight", o.p)?;
            require_finite("q weight", o.q)?;
            if o.p < 0.0 || o.q < 0.0 {
                return Err(invalid("weights", "weights must be nonnegative"));
            }
        }
        let p_total: f64 = outcomes.iter().map(|o| o.p).sum();
        let q_total: f64 = outcomes.iter().map(|o| o.q).sum();
        if (p_total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid("p weights", format!("sum to {p_total}, not 1")));
        }
        if (q_total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid("q weights", format!("sum to {q_total}, not 1")));
        }
        Ok(Self { outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn weights(&self, measure: Measure) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|o| match measure {
                Measure::P => o.p,
                Measure::Q => o.q,
            })
            .collect()
    }

    pub fn coordinate(&self, coord: Coordinate) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|o| match coord {
                Coordinate::Financial => o.financial,
                Coordinate::Actuarial => o.actuarial,
            })
            .collect()
    }

    /// Claim equal to the chosen coordinate, e.g. the terminal stock value.
    pub fn coordinate_claim(&self, coord: Coordinate) -> Claim {
        Claim(self.coordinate(coord))
    }

    /// Outcomes with positive `P` weight but zero `Q` weight (or vice versa).
    ///
    /// Equivalence of the two measures is not enforced at construction; this
    /// lint reports where it fails.
    pub fn non_equivalent_outcomes(&self) -> Vec<usize> {
        self.outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| (o.p > 0.0) != (o.q > 0.0))
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn check_claim(&self, claim: &Claim) -> Result<()> {
        if claim.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                actual: claim.len(),
            });
        }
        Ok(())
    }

    pub fn expectation(&self, claim: &Claim, measure: Measure) -> Result<f64> {
        self.check_claim(claim)?;
        Ok(weighted_sum(&self.weights(measure), claim.values()))
    }

    /// Expectation of `density * claim` under `P`.
    pub fn density_expectation(&self, density: &Density, claim: &Claim) -> Result<f64> {
        self.check_claim(claim)?;
        let w = density.measure_weights(self);
        Ok(weighted_sum(&w, claim.values()))
    }

    /// Groups outcomes by exact equality of the chosen coordinate, cells in
    /// ascending coordinate order.
    pub fn partition_by(&self, coord: Coordinate) -> Partition {
        let values = self.coordinate(coord);
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut last: Option<f64> = None;
        for i in order {
            match last {
                Some(v) if v == values[i] => cells.last_mut().expect("open cell").push(i),
                _ => cells.push(vec![i]),
            }
            last = Some(values[i]);
        }
        Partition::from_cells_unchecked(cells, self.len())
    }

    pub fn actuarial_partition(&self) -> Partition {
        self.partition_by(Coordinate::Actuarial)
    }

    pub fn financial_partition(&self) -> Partition {
        self.partition_by(Coordinate::Financial)
    }

    /// `E[claim | partition]` under `measure`.
    pub fn conditional_expectation(
        &self,
        claim: &Claim,
        partition: &Partition,
        measure: Measure,
    ) -> Result<Claim> {
        self.check_claim(claim)?;
        partition.check_space(self)?;
        let w = self.weights(measure);
        conditional_mean(claim, partition, &w, measure.name())
    }
}

pub(crate) fn weighted_sum(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(w, x)| w * x).sum()
}

/// Cell-wise weighted average, broadcast back onto the outcomes.
pub(crate) fn conditional_mean(
    claim: &Claim,
    partition: &Partition,
    weights: &[f64],
    measure_name: &str,
) -> Result<Claim> {
    let mut out = vec![0.0; claim.len()];
    for (c, cell) in partition.cells().iter().enumerate() {
        let mass: f64 = cell.iter().map(|&i| weights[i]).sum();
        if mass <= 0.0 {
            return Err(Error::Conditioning {
                cell: c,
                measure: measure_name.to_string(),
            });
        }
        let avg = cell.iter().map(|&i| weights[i] * claim[i]).sum::<f64>() / mass;
        for &i in cell {
            out[i] = avg;
        }
    }
    Ok(Claim(out))
}

/// Payoff vector indexed by the outcomes of one space.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim(Vec<f64>);

impl Claim {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            require_finite("claim value", v)?;
        }
        Ok(Self(values))
    }

    pub fn constant(value: f64, len: usize) -> Self {
        Self(vec![value; len])
    }

    pub fn zero(len: usize) -> Self {
        Self::constant(0.0, len)
    }

    /// Indicator of a set of outcome indices.
    pub fn indicator(indices: &[usize], len: usize) -> Self {
        let mut v = vec![0.0; len];
        for &i in indices {
            v[i] = 1.0;
        }
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Claim {
        Claim(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn zip_with(&self, other: &Claim, f: impl Fn(f64, f64) -> f64) -> Claim {
        assert_eq!(self.len(), other.len(), "claims on different spaces");
        Claim(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scale(&self, a: f64) -> Claim {
        self.map(|x| a * x)
    }

    pub fn shift(&self, a: f64) -> Claim {
        self.map(|x| x + a)
    }

    /// Largest entrywise distance.
    pub fn max_abs_diff(&self, other: &Claim) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_measurable(&self, partition: &Partition, tol: f64) -> bool {
        partition.cells().iter().all(|cell| {
            let (lo, hi) = cell.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(self.0[i]), hi.max(self.0[i]))
            });
            hi - lo <= tol
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0.0)
    }
}

impl std::ops::Index<usize> for Claim {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Claim {
    type Output = Claim;
    fn add(self, rhs: &Claim) -> Claim {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Claim {
    type Output = Claim;
    fn sub(self, rhs: &Claim) -> Claim {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Claim {
    type Output = Claim;
    fn mul(self, rhs: &Claim) -> Claim {
        self.zip_with(rhs, |a, b| a * b)
    }
}

/// A sigma-algebra on a finite space: disjoint non-empty cells covering all
/// outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    pub fn new(cells: Vec<Vec<usize>>, n_outcomes: usize) -> Result<Self> {
        let mut seen = vec![false; n_outcomes];
        for cell in &cells {
            if cell.is_empty() {
                return Err(invalid("partition", "empty cell"));
            }
            for &i in cell {
                if i >= n_outcomes {
                    return Err(invalid("partition", format!("outcome {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(invalid("partition", format!("outcome {i} in two cells")));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(invalid("partition", format!("outcome {i} not covered")));
        }
        Ok(Self::from_cells_unchecked(cells, n_outcomes))
    }

    fn from_cells_unchecked(cells: Vec<Vec<usize>>, n_outcomes: usize) -> Self {
        let mut cell_of = vec![0; n_outcomes];
        for (c, cell) in cells.iter().enumerate() {
            for &i in cell {
                cell_of[i] = c;
            }
        }
        Self { cells, cell_of }
    }

    /// The trivial sigma-algebra.
    pub fn trivial(n_outcomes: usize) -> Self {
        Self::from_cells_unchecked(vec![(0..n_outcomes).collect()], n_outcomes)
    }

    /// The power set: one singleton per outcome.
    pub fn discrete(n_outcomes: usize) -> Self {
        Self::from_cells_unchecked((0..n_outcomes).map(|i| vec![i]).collect(), n_outcomes)
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn n_outcomes(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cell_of(&self, outcome: usize) -> usize {
        self.cell_of[outcome]
    }

    /// Claim taking `cell_values[c]` on cell `c`.
    pub fn broadcast(&self, cell_values: &[f64]) -> Claim {
        assert_eq!(cell_values.len(), self.cells.len());
        Claim(self.cell_of.iter().map(|&c| cell_values[c]).collect())
    }

    pub fn cell_indicator(&self, cell: usize) -> Claim {
        Claim::indicator(&self.cells[cell], self.n_outcomes())
    }

    pub(crate) fn check_space(&self, space: &FiniteSpace) -> Result<()> {
        if self.n_outcomes() != space.len() {
            return Err(Error::Dimension {
                expected: space.len(),
                actual: self.n_outcomes(),
            });
        }
        Ok(())
    }
}

/// Radon-Nikodym density with respect to `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density(Vec<f64>);

impl Density {
    pub fn new(values: Vec<f64>, space: &FiniteSpace) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Dimension {
                expected: space.len(),
                actual: values.len(),
            });
        }
        for &v in &values {
            require_finite("density value", v)?;
            if v < 0.0 {
                return Err(invalid("density", "entries must be nonnegative"));
            }
        }
        let mean = weighted_sum(&space.weights(Measure::P), &values);
        if (mean - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid("density", format!("E^P[density] = {mean}, not 1")));
        }
        Ok(Self(values))
    }

    /// The density of `P` with respect to itself.
    pub fn unit(space: &FiniteSpace) -> Self {
        Self(vec![1.0; space.len()])
    }

    /// `dQ/dP`; requires `Q << P`.
    pub fn q_over_p(space: &FiniteSpace) -> Result<Self> {
        let values = space
            .outcomes()
            .iter()
            .map(|o| {
                if o.p > 0.0 {
                    Ok(o.q / o.p)
                } else if o.q == 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::Domain("Q is not absolutely continuous w.r.t. P".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, space)
    }

    /// Normalizes an arbitrary nonnegative, not-all-zero vector to a density.
    pub fn normalized(raw: Vec<f64>, space: &FiniteSpace) -> Result<Self> {
        let mean = weighted_sum(&space.weights(Measure::P), &raw);
        if !(mean > 0.0) {
            return Err(invalid("density", "raw weights have zero P-mean"));
        }
        Self::new(raw.iter().map(|v| v / mean).collect(), space)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Outcome weights of the measure `density * dP`.
    pub fn measure_weights(&self, space: &FiniteSpace) -> Vec<f64> {
        space
            .outcomes()
            .iter()
            .zip(&self.0)
            .map(|(o, d)| o.p * d)
            .collect()
    }
}
