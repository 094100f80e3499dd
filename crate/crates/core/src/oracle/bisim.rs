//! Direct bisimulation on finite automata by signature refinement.

use std::collections::BTreeSet;

use crate::alphabet::SymbolKind;
use crate::error::VpaError;
use crate::partition::StatePartition;
use crate::vpa::Vpa;

/// The coarsest partition in which related states agree on acceptance and,
/// for every symbol, reach the same set of blocks.
///
/// Only defined for automata without call and return symbols.
pub fn direct_bisim_fa(fa: &Vpa) -> Result<StatePartition, VpaError> {
    let alphabet = fa.alphabet();
    if alphabet.symbols_of(SymbolKind::Call).next().is_some()
        || alphabet.symbols_of(SymbolKind::Return).next().is_some()
    {
        return Err(VpaError::NotFiniteAutomaton);
    }
    let symbols = alphabet.internal();
    let acc: Vec<bool> = fa.states().map(|q| fa.is_accepting(q)).collect();
    let mut part = StatePartition::from_labels(&acc);
    loop {
        let sigs: Vec<(usize, Vec<BTreeSet<usize>>)> = fa
            .states()
            .map(|q| {
                let succ = symbols
                    .iter()
                    .map(|&a| {
                        fa.successors(q, a)
                            .iter()
                            .map(|&d| part.block_of(d))
                            .collect()
                    })
                    .collect();
                (part.block_of(q), succ)
            })
            .collect();
        let next = StatePartition::from_labels(&sigs);
        if next.num_blocks() == part.num_blocks() {
            return Ok(next);
        }
        part = next;
    }
}
