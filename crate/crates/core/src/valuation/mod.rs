//! Valuation principles, two-step valuations, consistency predicates and
//! hedge-based valuations on finite spaces.

pub mod consistency;
pub mod hedge;
pub mod hybrid;
pub mod principle;
pub mod two_step;

pub use consistency::{
    find_strong_actuarial_violation, find_weak_actuarial_violation, find_weak_market_violation,
    is_strong_actuarial_consistent, is_weak_actuarial_consistent, is_weak_market_consistent,
    CheckConfig, Violation,
};
pub use hedge::{
    decompose as lemma33_decompose, find_hedger_violation, hedge_based_value, hedge_cost_value,
    is_actuarial_consistent_hedger, quadratic_hedge, Hedger, TradedAssets, TradingStrategy,
};
pub use principle::{LinearMeasure, ValuationPrinciple};
pub use two_step::{
    product_formula_check, two_step_actuarial, two_step_financial, ProductFormula, TwoStepKind,
    TwoStepValuation,
};
