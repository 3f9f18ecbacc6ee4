//! Small hybrid-claim spaces: a stock that moves 50 -> {50, 200} and a
//! survival indicator, with closed forms for the two-step values of the
//! unit-linked call `(Y - 100)+ * I`.

use crate::error::{invalid, Error, Result};
use crate::finite_space::{Claim, FiniteSpace, Outcome};

const DOWN: f64 = 50.0;
const UP: f64 = 200.0;
const STRIKE: f64 = 100.0;
const BAYES_TOL: f64 = 1e-9;

fn require_probability(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} must be a probability, got {x}")));
    }
    Ok(())
}

fn require_open_probability(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

fn sd(p: f64) -> f64 {
    (p * (1.0 - p)).max(0.0).sqrt()
}

/// `P` joint weights in the order (50,0), (50,1), (200,0), (200,1).
fn joint_p(p_i: f64, p_y: f64, p_i_given_up: f64) -> Result<[f64; 4]> {
    let both = p_i_given_up * p_y;
    let w = [1.0 - p_y - p_i + both, p_i - both, p_y - both, both];
    if w.iter().any(|&x| x < -1e-15) {
        return Err(Error::Domain(format!(
            "no joint law with P[I=1]={p_i}, P[Y=200]={p_y}, P[I=1|Y=200]={p_i_given_up}"
        )));
    }
    Ok(w.map(|x| x.max(0.0)))
}

/// The four-outcome space with `P` given by the marginals `p_i`, `p_y` and
/// the conditional `P[I=1 | Y=200]`, and `Q` keeping the survival marginal
/// while raising the up-probability by `kappa` in each survival scenario.
pub fn example5_space(p_i: f64, p_y: f64, p_i_given_up: f64, kappa: f64) -> Result<FiniteSpace> {
    require_open_probability("p_i", p_i)?;
    require_open_probability("p_y", p_y)?;
    require_probability("p_i_given_up", p_i_given_up)?;
    if !kappa.is_finite() {
        return Err(invalid("kappa", "must be finite"));
    }
    let p = joint_p(p_i, p_y, p_i_given_up)?;
    let up_alive = p[3] / p_i;
    let up_dead = p[2] / (1.0 - p_i);
    let (q_alive, q_dead) = (up_alive + kappa, up_dead + kappa);
    if !(0.0..=1.0).contains(&q_alive) || !(0.0..=1.0).contains(&q_dead) {
        return Err(Error::Domain(format!(
            "kappa={kappa} pushes a conditional Q-probability outside [0, 1]"
        )));
    }
    let q = [
        (1.0 - p_i) * (1.0 - q_dead),
        p_i * (1.0 - q_alive),
        (1.0 - p_i) * q_dead,
        p_i * q_alive,
    ];
    FiniteSpace::new(vec![
        Outcome::new(DOWN, 0.0, p[0], q[0]),
        Outcome::new(DOWN, 1.0, p[1], q[1]),
        Outcome::new(UP, 0.0, p[2], q[2]),
        Outcome::new(UP, 1.0, p[3], q[3]),
    ])
}

/// `(Y - 100)+ * I` on a space built by [`example5_space`].
pub fn unit_linked_call(space: &FiniteSpace) -> Claim {
    Claim::new(
        space
            .outcomes()
            .iter()
            .map(|o| (o.financial - STRIKE).max(0.0) * o.actuarial)
            .collect(),
    )
    .expect("finite payoff")
}

/// `100 q_Y (p_{I|up} + beta sd(p_{I|up}))`.
pub fn two_step_financial_closed_form(q_y: f64, p_i_given_up: f64, beta: f64) -> f64 {
    (UP - STRIKE) * q_y * (p_i_given_up + beta * sd(p_i_given_up))
}

/// `100 q_{Y|I=1} (p_I + beta sd(p_I))`.
pub fn two_step_actuarial_closed_form(q_y_given_alive: f64, p_i: f64, beta: f64) -> f64 {
    (UP - STRIKE) * q_y_given_alive * (p_i + beta * sd(p_i))
}

/// Actuarial minus financial two-step value of the unit-linked call when `Q`
/// differs from `P` by a constant up-shift `kappa`.
pub fn two_step_difference_example5(
    p_i: f64,
    p_y: f64,
    p_i_given_up: f64,
    p_y_given_alive: f64,
    beta: f64,
    kappa: f64,
) -> Result<f64> {
    require_probability("p_i", p_i)?;
    require_probability("p_y", p_y)?;
    require_probability("p_i_given_up", p_i_given_up)?;
    require_probability("p_y_given_alive", p_y_given_alive)?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be finite and nonnegative, got {beta}")));
    }
    if !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be finite, got {kappa}")));
    }
    joint_p(p_i, p_y, p_i_given_up)?;
    if (p_y_given_alive * p_i - p_i_given_up * p_y).abs() > BAYES_TOL {
        return Err(Error::Domain(format!(
            "P[Y=200|I=1] P[I=1] = {} but P[I=1|Y=200] P[Y=200] = {}",
            p_y_given_alive * p_i,
            p_i_given_up * p_y
        )));
    }
    let h = UP - STRIKE;
    let (sd_i, sd_up) = (sd(p_i), sd(p_i_given_up));
    Ok(h * kappa * (p_i - p_i_given_up)
        + h * kappa * beta * (sd_i - sd_up)
        + h * p_y_given_alive * beta * sd_i
        - h * p_y * beta * sd_up)
}

/// Two outcomes (50, dead) and (200, alive): the call and the survival index
/// pay the same. `p_alive = P[I=1]`, `q_up = Q[Y=200]`.
pub fn comonotonic_space(p_alive: f64, q_up: f64) -> Result<FiniteSpace> {
    require_probability("p_alive", p_alive)?;
    require_probability("q_up", q_up)?;
    FiniteSpace::new(vec![
        Outcome::new(DOWN, 0.0, 1.0 - p_alive, 1.0 - q_up),
        Outcome::new(UP, 1.0, p_alive, q_up),
    ])
}

/// Stock and survival independent under both `P` and `Q`.
pub fn independent_space(p_i: f64, p_y: f64, q_y: f64) -> Result<FiniteSpace> {
    require_probability("p_i", p_i)?;
    require_probability("p_y", p_y)?;
    require_probability("q_y", q_y)?;
    let cells = [(DOWN, 0.0), (DOWN, 1.0), (UP, 0.0), (UP, 1.0)];
    FiniteSpace::new(
        cells
            .iter()
            .map(|&(y, i)| {
                let pi = if i > 0.5 { p_i } else { 1.0 - p_i };
                let py = if y > DOWN { p_y } else { 1.0 - p_y };
                let qy = if y > DOWN { q_y } else { 1.0 - q_y };
                Outcome::new(y, i, pi * py, pi * qy)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::{two_step_actuarial, two_step_financial, ValuationPrinciple};

    fn principles(beta: f64) -> (ValuationPrinciple, ValuationPrinciple) {
        (ValuationPrinciple::linear_q(), ValuationPrinciple::std_dev(beta).unwrap())
    }

    #[test]
    fn concrete_actuarial_instance() {
        assert!((two_step_actuarial_closed_form(0.55, 0.9, 0.5) - 57.75).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_space() {
        let (p_i, p_y, p_up, kappa, beta) = (0.8, 0.4, 0.9, 0.05, 0.7);
        let s = example5_space(p_i, p_y, p_up, kappa).unwrap();
        let claim = unit_linked_call(&s);
        let (fin, act) = principles(beta);
        let q_y = p_y + kappa;
        let q_alive = p_up * p_y / p_i + kappa;
        let a = two_step_actuarial(&fin, &act, &claim, &s).unwrap();
        let f = two_step_financial(&fin, &act, &claim, &s).unwrap();
        assert!((a - two_step_actuarial_closed_form(q_alive, p_i, beta)).abs() < 1e-12);
        assert!((f - two_step_financial_closed_form(q_y, p_up, beta)).abs() < 1e-12);
        let d = two_step_difference_example5(p_i, p_y, p_up, p_up * p_y / p_i, beta, kappa).unwrap();
        assert!((d - (a - f)).abs() < 1e-12);
    }

    #[test]
    fn difference_edge_cases() {
        let d = two_step_difference_example5(0.7, 0.3, 0.7, 0.3, 0.9, 0.0).unwrap();
        assert!(d.abs() < 1e-12);
        let d = two_step_difference_example5(0.8, 0.4, 0.9, 0.45, 0.0, 0.1).unwrap();
        assert!((d - 100.0 * 0.1 * (0.8 - 0.9)).abs() < 1e-12);
    }

    #[test]
    fn difference_rejects_bad_inputs() {
        assert!(two_step_difference_example5(1.2, 0.3, 0.5, 0.5, 0.1, 0.0).is_err());
        assert!(two_step_difference_example5(0.8, 0.4, 0.9, 0.2, 0.1, 0.0).is_err());
        assert!(two_step_difference_example5(0.1, 0.9, 0.9, 0.5, 0.1, 0.0).is_err());
    }

    #[test]
    fn independent_space_gives_equal_two_step_values() {
        let s = independent_space(0.85, 0.4, 0.47).unwrap();
        let claim = unit_linked_call(&s);
        let (fin, act) = principles(0.6);
        let a = two_step_actuarial(&fin, &act, &claim, &s).unwrap();
        let f = two_step_financial(&fin, &act, &claim, &s).unwrap();
        assert!((a - f).abs() < 1e-12);
    }

    #[test]
    fn comonotonic_values_disagree() {
        let (p, q, beta) = (0.9, 0.6, 0.5);
        let s = comonotonic_space(p, q).unwrap();
        let call = Claim::new(vec![0.0, 100.0]).unwrap();
        let (fin, act) = principles(beta);
        let f = two_step_financial(&fin, &act, &call, &s).unwrap();
        let a = act.value(&call, &s).unwrap();
        assert!((f - 100.0 * q).abs() < 1e-12);
        assert!((a - 100.0 * (p + beta * (p * (1.0 - p)).sqrt())).abs() < 1e-12);
        assert!((f - a).abs() > 1.0);
    }
}
