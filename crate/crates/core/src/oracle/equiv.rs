//! Bounded language equivalence.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::alphabet::{SymbolId, SymbolKind, Word};
use crate::error::VpaError;
use crate::vpa::{StateId, Vpa};

/// Outcome of [`bounded_equiv`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// A shortest word accepted by exactly one side; the least such word in
    /// symbol order.
    Counterexample(Word),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }

    pub fn counterexample(&self) -> Option<&Word> {
        match self {
            Equivalence::Equivalent => None,
            Equivalence::Counterexample(w) => Some(w),
        }
    }
}

/// Fewest transitions from each state to an accepting state, ignoring the
/// stack; `usize::MAX` if none is reachable.
fn distance_to_accepting(vpa: &Vpa) -> Vec<usize> {
    let n = vpa.num_states();
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for t in vpa
        .internal_transitions()
        .iter()
        .chain(vpa.call_transitions())
    {
        preds[t.dst.index()].push(t.src);
    }
    for t in vpa.return_transitions() {
        preds[t.dst.index()].push(t.src);
    }
    let mut dist = vec![usize::MAX; n];
    let mut queue: VecDeque<StateId> = vpa.accepting().iter().copied().collect();
    for q in &queue {
        dist[q.index()] = 0;
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q.index()] {
            if dist[p.index()] == usize::MAX {
                dist[p.index()] = dist[q.index()] + 1;
                queue.push_back(p);
            }
        }
    }
    dist
}

/// Hash-consed stacks: equal contents always get the same id, so sets of
/// `(state, stack id)` pairs compare like sets of configurations.
struct Stacks {
    /// `(parent, top, depth)`; id 0 is the empty stack.
    nodes: Vec<(u32, StateId, u32)>,
    index: HashMap<(u32, StateId), u32>,
}

impl Stacks {
    fn new() -> Self {
        Stacks {
            nodes: vec![(0, StateId(0), 0)],
            index: HashMap::new(),
        }
    }

    fn push(&mut self, stack: u32, q: StateId) -> u32 {
        let fresh = self.nodes.len() as u32;
        let id = *self.index.entry((stack, q)).or_insert(fresh);
        if id == fresh {
            let depth = self.nodes[stack as usize].2 + 1;
            self.nodes.push((stack, q, depth));
        }
        id
    }

    fn pop(&self, stack: u32) -> Option<(StateId, u32)> {
        let (parent, top, depth) = self.nodes[stack as usize];
        (depth > 0).then_some((top, parent))
    }

    /// The stack made of the top `keep` symbols.
    fn truncate(&mut self, stack: u32, keep: usize) -> u32 {
        if self.nodes[stack as usize].2 as usize <= keep {
            return stack;
        }
        let mut top = Vec::with_capacity(keep);
        let mut s = stack;
        for _ in 0..keep {
            let (q, parent) = self.pop(s).unwrap();
            top.push(q);
            s = parent;
        }
        top.iter().rev().fold(0, |acc, &q| self.push(acc, q))
    }
}

fn pack(q: StateId, stack: u32) -> u64 {
    (q.index() as u64) << 32 | stack as u64
}

fn unpack(c: u64) -> (StateId, u32) {
    (StateId((c >> 32) as u32), c as u32)
}

/// One automaton with its stack table.
struct Side<'a> {
    vpa: &'a Vpa,
    dist: Vec<usize>,
    stacks: Stacks,
}

impl<'a> Side<'a> {
    fn new(vpa: &'a Vpa) -> Self {
        Side {
            vpa,
            dist: distance_to_accepting(vpa),
            stacks: Stacks::new(),
        }
    }

    fn initial(&self, budget: usize) -> Vec<u64> {
        self.vpa
            .initial()
            .iter()
            .filter(|q| self.dist[q.index()] <= budget)
            .map(|&q| pack(q, 0))
            .collect()
    }

    fn accepting(&self, configs: &[u64]) -> bool {
        configs.iter().any(|&c| self.vpa.is_accepting(unpack(c).0))
    }

    /// Successors under `sym`, without configurations that cannot accept
    /// within `budget` more symbols and with stacks cut to their top `budget`
    /// symbols, since deeper ones cannot be popped in time.
    fn step(&mut self, configs: &[u64], sym: SymbolId, budget: usize) -> Vec<u64> {
        let vpa = self.vpa;
        let kind = vpa.alphabet().kind(sym);
        let mut next = Vec::new();
        for &c in configs {
            let (q, stack) = unpack(c);
            let (dsts, stack) = match kind {
                Some(SymbolKind::Internal) => (vpa.successors(q, sym), stack),
                Some(SymbolKind::Call) => (vpa.successors(q, sym), self.stacks.push(stack, q)),
                Some(SymbolKind::Return) => match self.stacks.pop(stack) {
                    // A return on the empty stack kills the configuration.
                    None => continue,
                    Some((top, rest)) => (vpa.return_successors(q, sym, top), rest),
                },
                None => continue,
            };
            let stack = self.stacks.truncate(stack, budget);
            for &d in dsts {
                if self.dist[d.index()] <= budget {
                    next.push(pack(d, stack));
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        next
    }
}

/// Compares the languages of `a` and `b` on all words of length at most
/// `max_len`.
///
/// Both automata are run in lockstep, one word length at a time. Words that
/// reach a pair of configuration sets already seen at the same length are
/// dropped, as are words after which neither side can still accept.
pub fn bounded_equiv(a: &Vpa, b: &Vpa, max_len: usize) -> Result<Equivalence, VpaError> {
    if a.alphabet() != b.alphabet() {
        return Err(VpaError::AlphabetMismatch);
    }
    let symbols: Vec<SymbolId> = a.alphabet().symbols().collect();
    let (mut sa, mut sb) = (Side::new(a), Side::new(b));
    let mut frontier: Vec<(Vec<SymbolId>, Vec<u64>, Vec<u64>)> =
        vec![(Vec::new(), sa.initial(max_len), sb.initial(max_len))];
    for len in 0..=max_len {
        for (w, ca, cb) in &frontier {
            if sa.accepting(ca) != sb.accepting(cb) {
                return Ok(Equivalence::Counterexample(Word(w.clone())));
            }
        }
        if len == max_len {
            break;
        }
        let budget = max_len - len - 1;
        let mut seen: HashSet<(Vec<u64>, Vec<u64>)> = HashSet::new();
        let mut next = Vec::new();
        for (w, ca, cb) in &frontier {
            for &s in &symbols {
                let na = sa.step(ca, s, budget);
                let nb = sb.step(cb, s, budget);
                if na.is_empty() && nb.is_empty() {
                    continue;
                }
                if seen.insert((na.clone(), nb.clone())) {
                    let mut w2 = w.clone();
                    w2.push(s);
                    next.push((w2, na, nb));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(Equivalence::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;
    use crate::partition::StatePartition;
    use crate::quotient::build_quotient;
    use crate::run::{accepts, enumerate_language};

    fn merged(v: &Vpa, p: &str, q: &str) -> Vpa {
        let part = StatePartition::with_groups(v.num_states(), &[vec![v.state(p), v.state(q)]]);
        build_quotient(v, &part)
    }

    #[test]
    fn reflexive() {
        for v in [fixtures::fig1x(), fixtures::fig2x(), fixtures::sevpa(3)] {
            assert!(bounded_equiv(&v, &v, 8).unwrap().is_equivalent());
        }
    }

    #[test]
    fn fig1x_merge_is_equivalent() {
        let v = fixtures::fig1x();
        assert!(bounded_equiv(&v, &merged(&v, "q1", "q2"), 8)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn fig2x_merge_counterexample() {
        let v = fixtures::fig2x();
        let q = merged(&v, "q1", "q2");
        let r = bounded_equiv(&v, &q, 4).unwrap();
        let w = r.counterexample().unwrap();
        assert_eq!(v.alphabet().display_word(w), "a1 c r2");
        assert_ne!(accepts(&v, w).unwrap(), accepts(&q, w).unwrap());
        // Symmetric.
        assert_eq!(bounded_equiv(&q, &v, 4).unwrap(), r);
    }

    #[test]
    fn too_short_bound_misses_difference() {
        let v = fixtures::fig2x();
        assert!(bounded_equiv(&v, &merged(&v, "q1", "q2"), 2)
            .unwrap()
            .is_equivalent());
    }

    #[test]
    fn agrees_with_enumeration() {
        let v = fixtures::fig1x();
        let q = merged(&v, "q1", "q3");
        let differ = enumerate_language(&v, 6) != enumerate_language(&q, 6);
        assert_eq!(!bounded_equiv(&v, &q, 6).unwrap().is_equivalent(), differ);
    }

    #[test]
    fn alphabet_mismatch() {
        assert_eq!(
            bounded_equiv(&fixtures::fig1x(), &fixtures::fig2x(), 3),
            Err(VpaError::AlphabetMismatch)
        );
    }
}
