//! Independent checkers used to validate the minimizer.

pub mod bisim;
pub mod equiv;
pub mod fixtures;
pub mod raq;

pub use bisim::direct_bisim_fa;
pub use equiv::{bounded_equiv, Equivalence};
pub use raq::{check_local_max, check_raq, RaqViolation};
