//! Language-preserving state reduction for nondeterministic visibly
//! pushdown automata.
//!
//! A call pushes the current state, so the stack alphabet is the state set
//! plus a bottom marker. [`minimize`] trims the automaton, completes it so
//! that every reachable stack top has a return move, encodes the admissible
//! state merges as a partial max-SAT instance and solves it with a greedy
//! DPLL solver that handles transitivity through an equality theory. The
//! result is a quotient automaton with the same language.
//!
//! ```
//! use vpamin::{minimize, oracle::fixtures, MinimizeOptions};
//!
//! let vpa = fixtures::sevpa(4);
//! let out = minimize(&vpa, MinimizeOptions::default()).unwrap();
//! assert_eq!(out.vpa.num_states(), 3);
//! ```

pub mod alphabet;
pub mod encode;
pub mod error;
pub mod format;
pub mod oracle;
pub mod partition;
pub mod prepare;
pub mod quotient;
pub mod random;
pub mod run;
pub mod solver;
pub mod sweep;
pub mod tops;
pub mod vpa;

pub use alphabet::{classify_word, Alphabet, SymbolId, SymbolKind, Word, WordClass};
pub use encode::{build_instance, Clause, ClauseDb, EncodeOptions, Lit, PairVar, VarId};
pub use error::VpaError;
pub use partition::{initial_partition, StatePartition};
pub use prepare::{make_live, trim, LiveMode};
pub use quotient::{
    assignment_to_partition, build_quotient, minimize, MinimizeOptions, MinimizeReport, Minimized,
};
pub use random::{generate, RandomSpec};
pub use run::{accepts, enumerate_language};
pub use tops::{compute_tops, TopsMap};
pub use vpa::{validate, ReturnTransition, StackSymbol, StateId, Transition, Vpa, VpaBuilder};
