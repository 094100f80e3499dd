//! PMax-SAT solving for quotienting instances.

pub mod baseline;
pub mod equality;
pub mod greedy;

pub use baseline::{all_optima, enumerate_models, solve_baseline_exhaustive, MAX_EXHAUSTIVE_VARS};
pub use equality::EqualityContext;
pub use greedy::{
    solve_greedy, Assignment, GreedySolver, Reason, SolveStats, SolverOptions, TrailEntry,
};
