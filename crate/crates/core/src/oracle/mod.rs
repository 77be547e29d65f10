//! Independent checks of the analytic benefit.
//!
//! Discrete priors are checked by listing the host events that can produce an
//! observation and weighing their benefits; proper priors are checked by
//! simulating plays and averaging the benefit over those whose allocated
//! content lands near the observation.

mod enumerate;
mod mc;
mod suite;

pub use enumerate::{enumerate_conditional_benefit, enumerate_exact, induced_events, WeightedEvent};
pub use mc::{
    blind_switch_advantage, compare, mc_conditional_benefit, mc_conditional_benefit_auto, Comparison,
    McEstimate, Moments, UnconditionalEstimate, AUTO_MAX_PLAYS, BIAS_ALLOWANCE_C, MIN_CONDITIONED,
};
pub use suite::{
    discrete_suite, mc_suite, random_dyadic_table, DiscreteSuiteReport, McCase, McSuiteReport,
    MC_SUITE_PLAYS,
};
