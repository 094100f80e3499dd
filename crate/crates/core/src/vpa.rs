//! Weakly-hierarchical visibly pushdown automata.
//!
//! A call pushes the current state, so the stack alphabet is the state set
//! plus a bottom marker that is never a state. Return transitions always name
//! a state as the popped stack symbol: returns on the empty stack are not
//! expressible and a run reading one gets stuck.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use crate::alphabet::{Alphabet, SymbolId, SymbolKind};
use crate::error::VpaError;

/// Dense state identifier; indexes into the owning [`Vpa`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A stack symbol: either the bottom marker or a pushed state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackSymbol {
    Bottom,
    State(StateId),
}

impl StackSymbol {
    pub fn state(self) -> Option<StateId> {
        match self {
            StackSymbol::Bottom => None,
            StackSymbol::State(q) => Some(q),
        }
    }
}

/// An internal or call transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: StateId,
    pub symbol: SymbolId,
    pub dst: StateId,
}

impl Transition {
    pub fn new(src: StateId, symbol: SymbolId, dst: StateId) -> Self {
        Transition { src, symbol, dst }
    }
}

/// A return transition popping `stack`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReturnTransition {
    pub src: StateId,
    pub symbol: SymbolId,
    pub stack: StateId,
    pub dst: StateId,
}

impl ReturnTransition {
    pub fn new(src: StateId, symbol: SymbolId, stack: StateId, dst: StateId) -> Self {
        ReturnTransition {
            src,
            symbol,
            stack,
            dst,
        }
    }
}

/// Transition counts per kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Size {
    pub states: usize,
    pub internal: usize,
    pub call: usize,
    pub ret: usize,
}

/// An immutable visibly pushdown automaton.
///
/// Construction does not validate; use [`validate`] (or [`Vpa::validated`])
/// before handing an automaton to the algorithms.
#[derive(Clone)]
pub struct Vpa {
    alphabet: Alphabet,
    state_names: Vec<String>,
    initial: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    internal: BTreeSet<Transition>,
    call: BTreeSet<Transition>,
    ret: BTreeSet<ReturnTransition>,
    index: OnceLock<TransitionIndex>,
}

impl PartialEq for Vpa {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.state_names == other.state_names
            && self.initial == other.initial
            && self.accepting == other.accepting
            && self.internal == other.internal
            && self.call == other.call
            && self.ret == other.ret
    }
}

impl Eq for Vpa {}

impl fmt::Debug for Vpa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize(self))
    }
}

impl Vpa {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        alphabet: Alphabet,
        state_names: Vec<String>,
        initial: impl IntoIterator<Item = StateId>,
        accepting: impl IntoIterator<Item = StateId>,
        internal: impl IntoIterator<Item = Transition>,
        call: impl IntoIterator<Item = Transition>,
        ret: impl IntoIterator<Item = ReturnTransition>,
    ) -> Self {
        Vpa {
            alphabet,
            state_names,
            initial: initial.into_iter().collect(),
            accepting: accepting.into_iter().collect(),
            internal: internal.into_iter().collect(),
            call: call.into_iter().collect(),
            ret: ret.into_iter().collect(),
            index: OnceLock::new(),
        }
    }

    /// Returns `self` if it passes [`validate`].
    pub fn validated(self) -> Result<Self, VpaError> {
        let report = validate(&self);
        if report.is_ok() {
            Ok(self)
        } else {
            Err(VpaError::Invalid(report.violations))
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn lookup_state(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|n| n == name)
            .map(|i| StateId(i as u32))
    }

    /// Like [`Vpa::lookup_state`], but panics on an unknown name.
    pub fn state(&self, name: &str) -> StateId {
        self.lookup_state(name)
            .unwrap_or_else(|| panic!("no state named `{name}`"))
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial.contains(&q)
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn internal_transitions(&self) -> &BTreeSet<Transition> {
        &self.internal
    }

    pub fn call_transitions(&self) -> &BTreeSet<Transition> {
        &self.call
    }

    pub fn return_transitions(&self) -> &BTreeSet<ReturnTransition> {
        &self.ret
    }

    pub fn size(&self) -> Size {
        Size {
            states: self.num_states(),
            internal: self.internal.len(),
            call: self.call.len(),
            ret: self.ret.len(),
        }
    }

    fn index(&self) -> &TransitionIndex {
        self.index.get_or_init(|| TransitionIndex::build(self))
    }

    /// Targets of internal or call transitions from `q` on `sym`.
    pub fn successors(&self, q: StateId, sym: SymbolId) -> &[StateId] {
        let idx = self.index();
        idx.succ
            .get(q.index() * idx.n_symbols + sym.index())
            .map_or(&[], Vec::as_slice)
    }

    /// Targets of return transitions from `q` on `sym` popping `stack`.
    pub fn return_successors(&self, q: StateId, sym: SymbolId, stack: StateId) -> &[StateId] {
        self.index()
            .ret_succ
            .get(&(q, sym, stack))
            .map_or(&[], Vec::as_slice)
    }

    /// Internal and call transitions leaving `q`, ordered by symbol.
    pub fn transitions_from(&self, q: StateId) -> &[Transition] {
        self.index().out.get(q.index()).map_or(&[], Vec::as_slice)
    }

    pub fn returns_from(&self, q: StateId) -> &[ReturnTransition] {
        self.index()
            .ret_from
            .get(q.index())
            .map_or(&[], Vec::as_slice)
    }

    /// Return transitions whose popped stack symbol is `q`.
    pub fn returns_popping(&self, q: StateId) -> &[ReturnTransition] {
        self.index()
            .ret_popping
            .get(q.index())
            .map_or(&[], Vec::as_slice)
    }

    /// Deterministic: one initial state and functional transition relations.
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() != 1 {
            return false;
        }
        let idx = self.index();
        idx.succ.iter().all(|s| s.len() <= 1) && idx.ret_succ.values().all(|s| s.len() <= 1)
    }

    /// Keeps the states with `keep[q]` set, renumbering them in order, and
    /// drops every transition touching a removed state.
    pub fn retain_states(&self, keep: &[bool]) -> Vpa {
        let mut map = vec![None; self.num_states()];
        let mut names = Vec::new();
        for q in self.states() {
            if keep[q.index()] {
                map[q.index()] = Some(StateId(names.len() as u32));
                names.push(self.state_name(q).to_string());
            }
        }
        let m = |q: StateId| map[q.index()];
        Vpa::from_parts(
            self.alphabet.clone(),
            names,
            self.initial.iter().filter_map(|&q| m(q)),
            self.accepting.iter().filter_map(|&q| m(q)),
            self.internal
                .iter()
                .filter_map(|t| Some(Transition::new(m(t.src)?, t.symbol, m(t.dst)?))),
            self.call
                .iter()
                .filter_map(|t| Some(Transition::new(m(t.src)?, t.symbol, m(t.dst)?))),
            self.ret.iter().filter_map(|t| {
                Some(ReturnTransition::new(
                    m(t.src)?,
                    t.symbol,
                    m(t.stack)?,
                    m(t.dst)?,
                ))
            }),
        )
    }
}

/// Lookup tables derived from the transition sets. Out-of-range ids are
/// skipped so that an invalid automaton can still be inspected.
#[derive(Clone, Debug)]
struct TransitionIndex {
    n_symbols: usize,
    succ: Vec<Vec<StateId>>,
    out: Vec<Vec<Transition>>,
    ret_succ: HashMap<(StateId, SymbolId, StateId), Vec<StateId>>,
    ret_from: Vec<Vec<ReturnTransition>>,
    ret_popping: Vec<Vec<ReturnTransition>>,
}

impl TransitionIndex {
    fn build(vpa: &Vpa) -> Self {
        let n = vpa.num_states();
        let m = vpa.alphabet.len();
        let ok_state = |q: StateId| q.index() < n;
        let ok_sym = |s: SymbolId| s.index() < m;
        let mut succ = vec![Vec::new(); n * m];
        let mut out = vec![Vec::new(); n];
        for t in vpa.internal.iter().chain(vpa.call.iter()) {
            if ok_state(t.src) && ok_state(t.dst) && ok_sym(t.symbol) {
                succ[t.src.index() * m + t.symbol.index()].push(t.dst);
                out[t.src.index()].push(*t);
            }
        }
        for o in &mut out {
            o.sort();
        }
        let mut ret_succ: HashMap<_, Vec<StateId>> = HashMap::new();
        let mut ret_from = vec![Vec::new(); n];
        let mut ret_popping = vec![Vec::new(); n];
        for t in &vpa.ret {
            if ok_state(t.src) && ok_state(t.dst) && ok_state(t.stack) && ok_sym(t.symbol) {
                ret_succ
                    .entry((t.src, t.symbol, t.stack))
                    .or_default()
                    .push(t.dst);
                ret_from[t.src.index()].push(*t);
                ret_popping[t.stack.index()].push(*t);
            }
        }
        TransitionIndex {
            n_symbols: m,
            succ,
            out,
            ret_succ,
            ret_from,
            ret_popping,
        }
    }
}

/// Incremental construction of a [`Vpa`].
#[derive(Clone, Debug)]
pub struct VpaBuilder {
    alphabet: Alphabet,
    names: Vec<String>,
    by_name: HashMap<String, StateId>,
    initial: BTreeSet<StateId>,
    accepting: BTreeSet<StateId>,
    internal: BTreeSet<Transition>,
    call: BTreeSet<Transition>,
    ret: BTreeSet<ReturnTransition>,
}

impl VpaBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        VpaBuilder {
            alphabet,
            names: Vec::new(),
            by_name: HashMap::new(),
            initial: BTreeSet::new(),
            accepting: BTreeSet::new(),
            internal: BTreeSet::new(),
            call: BTreeSet::new(),
            ret: BTreeSet::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Returns the id of state `name`, declaring it if needed.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&q) = self.by_name.get(name) {
            return q;
        }
        let q = StateId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.by_name.insert(name.to_string(), q);
        q
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&mut self, q: StateId) -> &mut Self {
        self.initial.insert(q);
        self
    }

    pub fn accepting(&mut self, q: StateId) -> &mut Self {
        self.accepting.insert(q);
        self
    }

    pub fn internal(&mut self, src: StateId, sym: SymbolId, dst: StateId) -> &mut Self {
        self.internal.insert(Transition::new(src, sym, dst));
        self
    }

    pub fn call(&mut self, src: StateId, sym: SymbolId, dst: StateId) -> &mut Self {
        self.call.insert(Transition::new(src, sym, dst));
        self
    }

    pub fn ret(&mut self, src: StateId, sym: SymbolId, stack: StateId, dst: StateId) -> &mut Self {
        self.ret.insert(ReturnTransition::new(src, sym, stack, dst));
        self
    }

    /// Adds a transition given by names, dispatching on the symbol's kind.
    /// `stack` must be given exactly for return symbols.
    pub fn edge(&mut self, src: &str, sym: &str, stack: Option<&str>, dst: &str) -> &mut Self {
        let s = self
            .alphabet
            .lookup(sym)
            .unwrap_or_else(|| panic!("no symbol named `{sym}`"));
        let (p, d) = (self.state(src), self.state(dst));
        match (self.alphabet.kind(s).unwrap(), stack) {
            (SymbolKind::Internal, None) => self.internal(p, s, d),
            (SymbolKind::Call, None) => self.call(p, s, d),
            (SymbolKind::Return, Some(st)) => {
                let st = self.state(st);
                self.ret(p, s, st, d)
            }
            (kind, _) => panic!("stack symbol mismatch for {kind} symbol `{sym}`"),
        }
    }

    pub fn build(&self) -> Vpa {
        Vpa::from_parts(
            self.alphabet.clone(),
            self.names.clone(),
            self.initial.iter().copied(),
            self.accepting.iter().copied(),
            self.internal.iter().copied(),
            self.call.iter().copied(),
            self.ret.iter().copied(),
        )
    }
}

/// One broken invariant of a [`Vpa`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    InitialEmpty,
    UndeclaredInitial(StateId),
    UndeclaredFinal(StateId),
    DuplicateStateName(String),
    UndeclaredState {
        kind: SymbolKind,
        state: StateId,
    },
    UndeclaredSymbol {
        kind: SymbolKind,
        symbol: SymbolId,
    },
    WrongSymbolKind {
        expected: SymbolKind,
        found: SymbolKind,
        symbol: SymbolId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "no states"),
            Violation::InitialEmpty => write!(f, "initial empty"),
            Violation::UndeclaredInitial(q) => write!(f, "initial state #{} undeclared", q.0),
            Violation::UndeclaredFinal(q) => write!(f, "final state #{} undeclared", q.0),
            Violation::DuplicateStateName(n) => write!(f, "duplicate state name `{n}`"),
            Violation::UndeclaredState { kind, state } => {
                write!(
                    f,
                    "{kind} transition references undeclared state #{}",
                    state.0
                )
            }
            Violation::UndeclaredSymbol { kind, symbol } => {
                write!(
                    f,
                    "{kind} transition references undeclared symbol #{}",
                    symbol.0
                )
            }
            Violation::WrongSymbolKind {
                expected,
                found,
                symbol,
            } => write!(f, "{expected} transition uses {found} symbol #{}", symbol.0),
        }
    }
}

/// Outcome of [`validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports every invariant violation of `vpa`.
pub fn validate(vpa: &Vpa) -> ValidationReport {
    let mut v = Vec::new();
    let n = vpa.num_states();
    let declared = |q: StateId| q.index() < n;
    if n == 0 {
        v.push(Violation::NoStates);
    }
    if vpa.initial.is_empty() {
        v.push(Violation::InitialEmpty);
    }
    v.extend(
        vpa.initial
            .iter()
            .filter(|q| !declared(**q))
            .map(|&q| Violation::UndeclaredInitial(q)),
    );
    v.extend(
        vpa.accepting
            .iter()
            .filter(|q| !declared(**q))
            .map(|&q| Violation::UndeclaredFinal(q)),
    );
    let mut seen = std::collections::HashSet::new();
    for name in &vpa.state_names {
        if !seen.insert(name.as_str()) {
            v.push(Violation::DuplicateStateName(name.clone()));
        }
    }

    let check_symbol = |v: &mut Vec<Violation>, expected: SymbolKind, symbol: SymbolId| match vpa
        .alphabet
        .kind(symbol)
    {
        None => v.push(Violation::UndeclaredSymbol {
            kind: expected,
            symbol,
        }),
        Some(found) if found != expected => v.push(Violation::WrongSymbolKind {
            expected,
            found,
            symbol,
        }),
        Some(_) => {}
    };
    for (kind, set) in [
        (SymbolKind::Internal, &vpa.internal),
        (SymbolKind::Call, &vpa.call),
    ] {
        for t in set {
            check_symbol(&mut v, kind, t.symbol);
            for q in [t.src, t.dst] {
                if !declared(q) {
                    v.push(Violation::UndeclaredState { kind, state: q });
                }
            }
        }
    }
    for t in &vpa.ret {
        check_symbol(&mut v, SymbolKind::Return, t.symbol);
        for q in [t.src, t.stack, t.dst] {
            if !declared(q) {
                v.push(Violation::UndeclaredState {
                    kind: SymbolKind::Return,
                    state: q,
                });
            }
        }
    }
    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_state() -> Vpa {
        let mut b = VpaBuilder::new(Alphabet::from_names(&["a"], &["c"], &["r"]).unwrap());
        let q = b.state("q");
        b.initial(q);
        b.build()
    }

    #[test]
    fn one_state_is_valid() {
        assert!(validate(&one_state()).is_ok());
    }

    #[test]
    fn empty_initial_reported() {
        let v = one_state();
        let bad = Vpa::from_parts(v.alphabet().clone(), vec!["q".into()], [], [], [], [], []);
        let report = validate(&bad);
        assert_eq!(report.violations, vec![Violation::InitialEmpty]);
        assert_eq!(report.violations[0].to_string(), "initial empty");
    }

    #[test]
    fn undeclared_stack_state_reported() {
        let v = one_state();
        let r = v.alphabet().lookup("r").unwrap();
        let bad = Vpa::from_parts(
            v.alphabet().clone(),
            vec!["q".into()],
            [StateId(0)],
            [],
            [],
            [],
            [ReturnTransition::new(StateId(0), r, StateId(5), StateId(0))],
        );
        let report = validate(&bad);
        assert_eq!(
            report.violations,
            vec![Violation::UndeclaredState {
                kind: SymbolKind::Return,
                state: StateId(5)
            }]
        );
        // The index skips the broken transition instead of panicking.
        assert!(bad.returns_from(StateId(0)).is_empty());
    }

    #[test]
    fn wrong_symbol_kind_reported() {
        let v = one_state();
        let a = v.alphabet().lookup("a").unwrap();
        let bad = Vpa::from_parts(
            v.alphabet().clone(),
            vec!["q".into()],
            [StateId(0)],
            [],
            [],
            [Transition::new(StateId(0), a, StateId(0))],
            [],
        );
        assert!(matches!(
            validate(&bad).violations.as_slice(),
            [Violation::WrongSymbolKind {
                expected: SymbolKind::Call,
                found: SymbolKind::Internal,
                ..
            }]
        ));
    }

    #[test]
    fn retain_renumbers_and_drops_touching_transitions() {
        let mut b = VpaBuilder::new(Alphabet::from_names(&["a"], &["c"], &["r"]).unwrap());
        b.edge("p", "a", None, "q")
            .edge("q", "c", None, "s")
            .edge("s", "r", Some("q"), "p");
        let p = b.state("p");
        b.initial(p);
        let v = b.build();
        let kept = v.retain_states(&[true, false, true]);
        assert_eq!(kept.num_states(), 2);
        assert_eq!(kept.state_name(StateId(1)), "s");
        assert_eq!(kept.size().internal + kept.size().call + kept.size().ret, 0);
    }
}
