//! Python bindings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use twostep::gaussian::{self, LongevityExampleParams as CoreLongevity};
use twostep::gmmb::{self, GmmbParams as CoreGmmb, McConfig, ScrPrinciple};
use twostep::suites::{run_all, SuiteConfig};
use twostep::{Claim, Density, Measure, Outcome, TwoStepValuation};

fn py_err(e: twostep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn claim(values: Vec<f64>) -> PyResult<Claim> {
    Claim::new(values).map_err(py_err)
}

/// Finite space of (financial, actuarial) outcomes with P and Q weights.
#[pyclass(frozen)]
struct FiniteSpace(twostep::FiniteSpace);

#[pymethods]
impl FiniteSpace {
    /// `outcomes` is a list of `(financial, actuarial, p, q)` tuples.
    #[new]
    fn new(outcomes: Vec<(f64, f64, f64, f64)>) -> PyResult<Self> {
        let outcomes = outcomes.into_iter().map(|(y, x, p, q)| Outcome::new(y, x, p, q)).collect();
        Ok(Self(twostep::FiniteSpace::new(outcomes).map_err(py_err)?))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Expectation under `"P"` or `"Q"`.
    fn expectation(&self, claim_values: Vec<f64>, measure: &str) -> PyResult<f64> {
        let m = match measure {
            "P" => Measure::P,
            "Q" => Measure::Q,
            other => return Err(PyValueError::new_err(format!("measure must be P or Q, got {other}"))),
        };
        self.0.expectation(&claim(claim_values)?, m).map_err(py_err)
    }
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct ValuationPrinciple(twostep::ValuationPrinciple);

#[pymethods]
impl ValuationPrinciple {
    #[staticmethod]
    fn linear_p() -> Self {
        Self(twostep::ValuationPrinciple::linear_p())
    }

    #[staticmethod]
    fn linear_q() -> Self {
        Self(twostep::ValuationPrinciple::linear_q())
    }

    #[staticmethod]
    fn std_dev(beta: f64) -> PyResult<Self> {
        Ok(Self(twostep::ValuationPrinciple::std_dev(beta).map_err(py_err)?))
    }

    /// Maximum of expectations over the given P-densities.
    #[staticmethod]
    fn coherent(densities: Vec<Vec<f64>>, space: &FiniteSpace) -> PyResult<Self> {
        let ds = densities
            .into_iter()
            .map(|d| Density::new(d, &space.0))
            .collect::<twostep::Result<Vec<_>>>()
            .map_err(py_err)?;
        Ok(Self(twostep::ValuationPrinciple::coherent(ds).map_err(py_err)?))
    }

    fn value(&self, claim_values: Vec<f64>, space: &FiniteSpace) -> PyResult<f64> {
        self.0.value(&claim(claim_values)?, &space.0).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// `act[fin[S | actuarial info]]`.
#[pyfunction]
fn two_step_actuarial(
    fin: &ValuationPrinciple,
    act: &ValuationPrinciple,
    claim_values: Vec<f64>,
    space: &FiniteSpace,
) -> PyResult<f64> {
    TwoStepValuation::actuarial(fin.0.clone(), act.0.clone())
        .value(&claim(claim_values)?, &space.0)
        .map_err(py_err)
}

/// `fin[act[S | financial info]]`.
#[pyfunction]
fn two_step_financial(
    fin: &ValuationPrinciple,
    act: &ValuationPrinciple,
    claim_values: Vec<f64>,
    space: &FiniteSpace,
) -> PyResult<f64> {
    TwoStepValuation::financial(fin.0.clone(), act.0.clone())
        .value(&claim(claim_values)?, &space.0)
        .map_err(py_err)
}

#[pyclass(get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
struct LongevityExampleParams {
    mu1: f64,
    mu2: f64,
    sigma1: f64,
    sigma2: f64,
    rho: f64,
    beta: f64,
    kappa: f64,
    p: f64,
}

impl LongevityExampleParams {
    fn core(&self) -> CoreLongevity {
        CoreLongevity {
            mu1: self.mu1,
            mu2: self.mu2,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            rho: self.rho,
            beta: self.beta,
            kappa: self.kappa,
            p: self.p,
        }
    }
}

#[pymethods]
impl LongevityExampleParams {
    #[new]
    #[pyo3(signature = (mu1=100.0, mu2=100.0, sigma1=10.0, sigma2=10.0, rho=0.5, beta=0.5, kappa=0.2, p=0.995))]
    #[allow(clippy::too_many_arguments)]
    fn new(mu1: f64, mu2: f64, sigma1: f64, sigma2: f64, rho: f64, beta: f64, kappa: f64, p: f64) -> Self {
        Self { mu1, mu2, sigma1, sigma2, rho, beta, kappa, p }
    }

    fn ts_actuarial_value(&self) -> PyResult<f64> {
        gaussian::ts_actuarial_value(&self.core()).map_err(py_err)
    }

    fn ts_financial_value(&self) -> PyResult<f64> {
        gaussian::ts_financial_value(&self.core()).map_err(py_err)
    }

    fn value_difference(&self) -> PyResult<f64> {
        gaussian::value_difference(&self.core()).map_err(py_err)
    }

    fn var_reduction(&self) -> PyResult<f64> {
        gaussian::var_reduction(&self.core()).map_err(py_err)
    }

    fn invest_decision(&self) -> PyResult<bool> {
        gaussian::invest_decision(&self.core()).map_err(py_err)
    }
}

#[pyclass(get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
struct GmmbParams {
    c: f64,
    xi: f64,
    lambda0: f64,
    r: f64,
    sigma: f64,
    rho: f64,
    maturity: f64,
    guarantee: f64,
    y0: f64,
}

impl GmmbParams {
    fn core(&self) -> CoreGmmb {
        CoreGmmb {
            c: self.c,
            xi: self.xi,
            lambda0: self.lambda0,
            r: self.r,
            sigma: self.sigma,
            rho: self.rho,
            maturity: self.maturity,
            guarantee: self.guarantee,
            y0: self.y0,
            ..CoreGmmb::default()
        }
    }
}

#[pymethods]
impl GmmbParams {
    #[new]
    #[pyo3(signature = (rho=0.0))]
    fn new(rho: f64) -> Self {
        let d = CoreGmmb::default();
        Self {
            c: d.c,
            xi: d.xi,
            lambda0: d.lambda0,
            r: d.r,
            sigma: d.sigma,
            rho,
            maturity: d.maturity,
            guarantee: d.guarantee,
            y0: d.y0,
        }
    }

    fn survival_probability(&self) -> PyResult<f64> {
        gmmb::survival_probability(&self.core()).map_err(py_err)
    }

    fn rho0(&self) -> PyResult<f64> {
        gmmb::rho0(&self.core()).map_err(py_err)
    }

    fn brennan_schwartz_value(&self) -> PyResult<f64> {
        gmmb::brennan_schwartz_value(&self.core()).map_err(py_err)
    }

    fn conditional_price(&self, p_i: f64) -> PyResult<f64> {
        gmmb::conditional_gmmb_price(&self.core(), p_i).map_err(py_err)
    }

    /// `(value, std_error)`.
    #[pyo3(signature = (n_paths=100_000, seed=42))]
    fn best_estimate(&self, n_paths: usize, seed: u64) -> PyResult<(f64, f64)> {
        let e = gmmb::best_estimate(&self.core(), &McConfig::new(n_paths, seed)).map_err(py_err)?;
        Ok((e.value, e.std_error))
    }

    /// Best estimates on common survival draws: list of `(rho, value, std_error)`.
    #[pyo3(signature = (rhos, n_paths=100_000, seed=42))]
    fn best_estimate_curve(&self, rhos: Vec<f64>, n_paths: usize, seed: u64) -> PyResult<Vec<(f64, f64, f64)>> {
        let curve = gmmb::best_estimate_curve(&self.core(), &McConfig::new(n_paths, seed), &rhos).map_err(py_err)?;
        Ok(curve.into_iter().map(|(r, e)| (r, e.value, e.std_error)).collect())
    }

    /// `(best_estimate, scr, coc_value)` with a std-dev SCR.
    #[pyo3(signature = (beta=1.0, coc_rate=0.06, n_paths=100_000, seed=42))]
    fn coc_value(&self, beta: f64, coc_rate: f64, n_paths: usize, seed: u64) -> PyResult<(f64, f64, f64)> {
        let r = gmmb::coc_value(&self.core(), &McConfig::new(n_paths, seed), &ScrPrinciple::StdDev { beta }, coc_rate)
            .map_err(py_err)?;
        Ok((r.best_estimate, r.scr, r.coc_value))
    }
}

/// Runs the property suites: list of `(name, passed, counterexample)`.
#[pyfunction]
#[pyo3(signature = (seed=42, n_spaces=200))]
fn verify(seed: u64, n_spaces: usize) -> Vec<(String, bool, Option<String>)> {
    let cfg = SuiteConfig { seed, n_spaces, ..SuiteConfig::default() };
    run_all(&cfg)
        .into_iter()
        .map(|o| (o.name.to_string(), o.passed(), o.counterexample))
        .collect()
}

#[pymodule]
fn twostep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<FiniteSpace>()?;
    m.add_class::<ValuationPrinciple>()?;
    m.add_class::<LongevityExampleParams>()?;
    m.add_class::<GmmbParams>()?;
    m.add_function(wrap_pyfunction!(two_step_actuarial, m)?)?;
    m.add_function(wrap_pyfunction!(two_step_financial, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
