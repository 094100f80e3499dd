use std::collections::BTreeSet;

use crate::alphabet::SymbolKind;
use crate::vpa::{StackSymbol, StateId, Vpa};

/// For each state, the topmost symbols of all stacks reachable with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopsMap {
    tops: Vec<BTreeSet<StackSymbol>>,
}

impl TopsMap {
    pub fn get(&self, q: StateId) -> &BTreeSet<StackSymbol> {
        &self.tops[q.index()]
    }

    pub fn contains(&self, q: StateId, top: StackSymbol) -> bool {
        self.tops[q.index()].contains(&top)
    }

    /// `stack ∈ tops(q)` for a state stack symbol.
    pub fn has_state(&self, q: StateId, stack: StateId) -> bool {
        self.contains(q, StackSymbol::State(stack))
    }

    /// Some configuration with state `q` is reachable.
    pub fn is_reachable(&self, q: StateId) -> bool {
        !self.tops[q.index()].is_empty()
    }

    /// The state part of `tops(q)`, ascending.
    pub fn stack_states(&self, q: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.tops[q.index()].iter().filter_map(|s| s.state())
    }

    pub fn len(&self) -> usize {
        self.tops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tops.is_empty()
    }

    pub fn from_sets(tops: Vec<BTreeSet<StackSymbol>>) -> Self {
        TopsMap { tops }
    }
}

/// Least function satisfying the four closure rules: initial states see the
/// bottom marker, internal moves keep the top, a call from a reachable state
/// pushes it, and a return popping `s` exposes everything below `s`, i.e.
/// `tops(s)`.
pub fn compute_tops(vpa: &Vpa) -> TopsMap {
    let n = vpa.num_states();
    let mut tops = vec![BTreeSet::new(); n];
    let mut queued = vec![false; n];
    let mut work = Vec::new();

    for &q in vpa.initial() {
        if q.index() < n && tops[q.index()].insert(StackSymbol::Bottom) && !queued[q.index()] {
            queued[q.index()] = true;
            work.push(q);
        }
    }

    // Adds `items` to tops(dst), queueing dst if it grew.
    fn absorb(
        tops: &mut [BTreeSet<StackSymbol>],
        queued: &mut [bool],
        work: &mut Vec<StateId>,
        dst: StateId,
        items: &BTreeSet<StackSymbol>,
    ) {
        let before = tops[dst.index()].len();
        tops[dst.index()].extend(items.iter().copied());
        if tops[dst.index()].len() != before && !queued[dst.index()] {
            queued[dst.index()] = true;
            work.push(dst);
        }
    }

    while let Some(q) = work.pop() {
        queued[q.index()] = false;
        let current = tops[q.index()].clone();
        for t in vpa.transitions_from(q) {
            match vpa.alphabet().kind(t.symbol) {
                Some(SymbolKind::Internal) => {
                    absorb(&mut tops, &mut queued, &mut work, t.dst, &current);
                }
                Some(SymbolKind::Call) => {
                    let pushed = BTreeSet::from([StackSymbol::State(q)]);
                    absorb(&mut tops, &mut queued, &mut work, t.dst, &pushed);
                }
                _ => {}
            }
        }
        for t in vpa.returns_from(q) {
            if current.contains(&StackSymbol::State(t.stack)) {
                let below = tops[t.stack.index()].clone();
                absorb(&mut tops, &mut queued, &mut work, t.dst, &below);
            }
        }
        // tops(q) grew, so returns popping q may expose more.
        for t in vpa.returns_popping(q) {
            if tops[t.src.index()].contains(&StackSymbol::State(q)) {
                absorb(&mut tops, &mut queued, &mut work, t.dst, &current);
            }
        }
    }
    TopsMap { tops }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;
    use crate::run::{initial_configs, step};
    use std::collections::HashSet;

    fn names(v: &Vpa, set: &BTreeSet<StackSymbol>) -> Vec<String> {
        set.iter()
            .map(|s| match s {
                StackSymbol::Bottom => "⊥".to_string(),
                StackSymbol::State(q) => v.state_name(*q).to_string(),
            })
            .collect()
    }

    #[test]
    fn fig1x_tops() {
        let v = fixtures::fig1x();
        let t = compute_tops(&v);
        let expect = [
            ("q0", vec!["⊥"]),
            ("q1", vec!["q0"]),
            ("q2", vec!["⊥"]),
            ("q3", vec!["q0"]),
            ("q4", vec!["⊥"]),
            ("qf", vec!["⊥"]),
        ];
        for (q, want) in expect {
            assert_eq!(names(&v, t.get(v.state(q))), want, "tops({q})");
        }
    }

    /// Explores all configurations with stacks up to `height` and collects
    /// the observed tops.
    fn explored_tops(v: &Vpa, height: usize) -> Vec<BTreeSet<StackSymbol>> {
        let mut seen = HashSet::new();
        let mut frontier = initial_configs(v);
        let mut out = vec![BTreeSet::new(); v.num_states()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in frontier {
                if c.stack.len() > height || !seen.insert(c.clone()) {
                    continue;
                }
                out[c.state.index()].insert(c.top());
                for s in v.alphabet().symbols() {
                    next.extend(step(v, std::slice::from_ref(&c), s));
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn fig1x_tops_match_configuration_exploration() {
        for v in [fixtures::fig1x(), fixtures::fig2x(), fixtures::sevpa(3)] {
            let t = compute_tops(&v);
            let explored = explored_tops(&v, 3);
            for q in v.states() {
                assert_eq!(t.get(q), &explored[q.index()]);
            }
        }
    }

    #[test]
    fn unreferenced_state_has_empty_tops() {
        let mut b = crate::VpaBuilder::new(crate::Alphabet::new());
        let p = b.state("p");
        let z = b.state("z");
        b.initial(p);
        let t = compute_tops(&b.build());
        assert!(t.contains(p, StackSymbol::Bottom));
        assert!(!t.is_reachable(z));
    }
}
