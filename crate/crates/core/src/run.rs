//! Run semantics by configuration-set simulation.

use std::collections::BTreeSet;

use crate::alphabet::{SymbolId, SymbolKind, Word};
use crate::error::VpaError;
use crate::vpa::{StackSymbol, StateId, Vpa};

/// A state together with the stack contents above the bottom marker; the
/// last element is the top.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub stack: Vec<StateId>,
}

impl Configuration {
    pub fn top(&self) -> StackSymbol {
        self.stack
            .last()
            .map_or(StackSymbol::Bottom, |&q| StackSymbol::State(q))
    }
}

/// A sorted, duplicate-free set of configurations.
pub type ConfigSet = Vec<Configuration>;

pub fn initial_configs(vpa: &Vpa) -> ConfigSet {
    vpa.initial()
        .iter()
        .map(|&q| Configuration {
            state: q,
            stack: Vec::new(),
        })
        .collect()
}

/// All configurations reachable from `configs` by reading `sym`.
pub fn step(vpa: &Vpa, configs: &[Configuration], sym: SymbolId) -> ConfigSet {
    let mut next = Vec::new();
    match vpa.alphabet().kind(sym) {
        Some(SymbolKind::Internal) => {
            for c in configs {
                for &d in vpa.successors(c.state, sym) {
                    next.push(Configuration {
                        state: d,
                        stack: c.stack.clone(),
                    });
                }
            }
        }
        Some(SymbolKind::Call) => {
            for c in configs {
                for &d in vpa.successors(c.state, sym) {
                    let mut stack = c.stack.clone();
                    stack.push(c.state);
                    next.push(Configuration { state: d, stack });
                }
            }
        }
        Some(SymbolKind::Return) => {
            for c in configs {
                // A return on the empty stack kills the configuration.
                let Some((&top, rest)) = c.stack.split_last() else {
                    continue;
                };
                for &d in vpa.return_successors(c.state, sym, top) {
                    next.push(Configuration {
                        state: d,
                        stack: rest.to_vec(),
                    });
                }
            }
        }
        None => {}
    }
    next.sort_unstable();
    next.dedup();
    next
}

pub fn any_accepting(vpa: &Vpa, configs: &[Configuration]) -> bool {
    configs.iter().any(|c| vpa.is_accepting(c.state))
}

/// Whether some initial run on `word` ends in an accepting state.
pub fn accepts(vpa: &Vpa, word: &Word) -> Result<bool, VpaError> {
    vpa.alphabet().check_word(word)?;
    let mut configs = initial_configs(vpa);
    for &sym in word.symbols() {
        if configs.is_empty() {
            return Ok(false);
        }
        configs = step(vpa, &configs, sym);
    }
    Ok(any_accepting(vpa, &configs))
}

/// Every accepted word of length at most `max_len`.
///
/// Prefixes whose configuration set is empty are not extended.
pub fn enumerate_language(vpa: &Vpa, max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    let symbols: Vec<SymbolId> = vpa.alphabet().symbols().collect();
    let mut prefix = Vec::new();
    explore(
        vpa,
        &symbols,
        initial_configs(vpa),
        &mut prefix,
        max_len,
        &mut out,
    );
    out
}

fn explore(
    vpa: &Vpa,
    symbols: &[SymbolId],
    configs: ConfigSet,
    prefix: &mut Vec<SymbolId>,
    budget: usize,
    out: &mut BTreeSet<Word>,
) {
    if any_accepting(vpa, &configs) {
        out.insert(Word(prefix.clone()));
    }
    if budget == 0 {
        return;
    }
    for &sym in symbols {
        let next = step(vpa, &configs, sym);
        if next.is_empty() {
            continue;
        }
        prefix.push(sym);
        explore(vpa, symbols, next, prefix, budget - 1, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;

    #[test]
    fn fig1x_membership() {
        let v = fixtures::fig1x();
        let acc = |t: &str| accepts(&v, &v.alphabet().parse_word(t).unwrap()).unwrap();
        assert!(acc("c1 r"));
        assert!(acc("c2 r a"));
        assert!(!acc("c1 r a"));
        assert!(!acc("c2 r"));
        assert!(!acc(""));
        assert!(!acc("r"));
    }

    #[test]
    fn initial_final_accepts_empty_word() {
        let mut b = crate::VpaBuilder::new(crate::Alphabet::new());
        let q = b.state("q");
        b.initial(q).accepting(q);
        let v = b.build();
        assert!(accepts(&v, &Word::empty()).unwrap());
        assert_eq!(enumerate_language(&v, 0), BTreeSet::from([Word::empty()]));
    }

    #[test]
    fn fig1x_language() {
        let v = fixtures::fig1x();
        let words: Vec<String> = enumerate_language(&v, 3)
            .iter()
            .map(|w| v.alphabet().display_word(w))
            .collect();
        assert_eq!(words, vec!["c1 r", "c2 r a"]);
    }

    #[test]
    fn no_final_states_means_empty_language() {
        let mut b =
            crate::VpaBuilder::new(crate::Alphabet::from_names(&["a"], &["c"], &["r"]).unwrap());
        b.edge("p", "a", None, "p").edge("p", "c", None, "p");
        b.edge("p", "r", Some("p"), "p");
        let p = b.state("p");
        b.initial(p);
        assert!(enumerate_language(&b.build(), 5).is_empty());
    }

    #[test]
    fn unknown_symbol_is_input_error() {
        let v = fixtures::fig1x();
        assert!(accepts(&v, &Word(vec![SymbolId(99)])).is_err());
    }
}
