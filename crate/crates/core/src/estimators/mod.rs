//! Monte Carlo estimators of the walk's distance to uniformity, the tail of
//! the stopping time, and the mixing time, together with the closed-form
//! predictions they are compared against.

mod analysis;
mod experiment;
mod theory;

pub use analysis::{
    analyze, estimate_conditional_tv, estimate_tau_tail, estimate_tv_curve, first_crossing,
    measure_mixing_time, run_experiment, ConditionalMode, MixingSource, MixingTimeEstimate,
    ResultRow, ResultScalars, ResultTable, JACKKNIFE_GROUPS, PLUGIN_FACTOR, WILSON_Z,
};
pub use experiment::{
    simulate_replicas, Curves, Engine, ExperimentSpec, InitialCondition, Rate, ReplicaBatch, NO_TAU,
};
pub use theory::{
    default_horizon, theory_mixing_time, theory_tau_tail, tree_tau_tail, TheoryMixingTime,
};
