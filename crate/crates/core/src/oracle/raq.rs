//! Direct checkers for quotienting relations and their local maximality.

use std::fmt;

use crate::alphabet::SymbolId;
use crate::error::VpaError;
use crate::partition::StatePartition;
use crate::tops::TopsMap;
use crate::vpa::{StateId, Vpa};

/// The first constraint a partition breaks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RaqViolation {
    /// `p` and `q` are related but only one of them is accepting.
    Acceptance { p: StateId, q: StateId },
    /// `p --symbol--> dst` has no matching internal or call move from `q`.
    Successor {
        p: StateId,
        q: StateId,
        symbol: SymbolId,
        dst: StateId,
    },
    /// `p --symbol/p_stack--> dst` has no matching return from `q` popping
    /// `q_stack`, and both stack configurations are reachable.
    Return {
        p: StateId,
        q: StateId,
        p_stack: StateId,
        q_stack: StateId,
        symbol: SymbolId,
        dst: StateId,
    },
}

impl RaqViolation {
    /// Human-readable form using the names of `vpa`.
    pub fn describe(&self, vpa: &Vpa) -> String {
        let n = |q: &StateId| vpa.state_name(*q);
        let s = |x: &SymbolId| vpa.alphabet().name(*x);
        match self {
            RaqViolation::Acceptance { p, q } => {
                format!("acceptance differs between {} and {}", n(p), n(q))
            }
            RaqViolation::Successor { p, q, symbol, dst } => format!(
                "{} --{}--> {} has no related counterpart from {}",
                n(p),
                s(symbol),
                n(dst),
                n(q)
            ),
            RaqViolation::Return {
                p,
                q,
                p_stack,
                q_stack,
                symbol,
                dst,
            } => format!(
                "{} --{}/{}--> {} has no related counterpart from {} with stack {}",
                n(p),
                s(symbol),
                n(p_stack),
                n(dst),
                n(q),
                n(q_stack)
            ),
        }
    }
}

impl fmt::Display for RaqViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Checks that `part` is a reachability-aware quotienting relation of
/// `vpa`: related states agree on acceptance, internal and call successors
/// are matched in both directions, and return successors are matched for
/// every related stack pair unless one of the two stack configurations is
/// unreachable according to `tops`.
///
/// Returns the first violation found, or `None`.
pub fn check_raq(
    vpa: &Vpa,
    tops: &TopsMap,
    part: &StatePartition,
) -> Result<Option<RaqViolation>, VpaError> {
    if part.num_states() != vpa.num_states() {
        return Err(VpaError::PartitionMismatch(format!(
            "partition has {} states, automaton {}",
            part.num_states(),
            vpa.num_states()
        )));
    }
    for p in vpa.states() {
        for &q in part.block(p) {
            if vpa.is_accepting(p) != vpa.is_accepting(q) {
                return Ok(Some(RaqViolation::Acceptance { p, q }));
            }
            for t in vpa.transitions_from(p) {
                let matched = vpa
                    .successors(q, t.symbol)
                    .iter()
                    .any(|&d| part.same_block(d, t.dst));
                if !matched {
                    return Ok(Some(RaqViolation::Successor {
                        p,
                        q,
                        symbol: t.symbol,
                        dst: t.dst,
                    }));
                }
            }
            for t in vpa.returns_from(p) {
                if !tops.has_state(p, t.stack) {
                    continue;
                }
                for &q_stack in part.block(t.stack) {
                    if !tops.has_state(q, q_stack) {
                        continue;
                    }
                    let matched = vpa
                        .return_successors(q, t.symbol, q_stack)
                        .iter()
                        .any(|&d| part.same_block(d, t.dst));
                    if !matched {
                        return Ok(Some(RaqViolation::Return {
                            p,
                            q,
                            p_stack: t.stack,
                            q_stack,
                            symbol: t.symbol,
                            dst: t.dst,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Looks for two blocks of `part` whose union still passes [`check_raq`].
/// Returns the least states of the first such pair of blocks, or `None` if
/// `part` is locally maximal.
pub fn check_local_max(
    vpa: &Vpa,
    tops: &TopsMap,
    part: &StatePartition,
) -> Result<Option<(StateId, StateId)>, VpaError> {
    let blocks = part.blocks();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (p, q) = (blocks[i][0], blocks[j][0]);
            if check_raq(vpa, tops, &part.merged(p, q))?.is_none() {
                return Ok(Some((p, q)));
            }
        }
    }
    Ok(None)
}
