//! Preprocessing: removal of unreachable and dead states, and completion to
//! live form.

use std::collections::BTreeSet;

use crate::alphabet::SymbolKind;
use crate::error::VpaError;
use crate::tops::{compute_tops, TopsMap};
use crate::vpa::{ReturnTransition, StackSymbol, StateId, Transition, Vpa};

/// Removes states that are unreachable or from which no accepting state can
/// be reached.
///
/// Co-reachability is computed on the transition graph where a return edge
/// `(q, r, s, q')` is enabled iff `s ∈ tops(q)`. This over-approximates
/// co-reachability in the configuration graph, so no state on an accepting
/// run is ever removed. If every initial state goes, the result is the
/// canonical empty automaton: one non-final initial state, no transitions.
pub fn trim(vpa: &Vpa) -> Vpa {
    let tops = compute_tops(vpa);
    let n = vpa.num_states();
    let reach: Vec<bool> = vpa.states().map(|q| tops.is_reachable(q)).collect();

    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for t in vpa
        .internal_transitions()
        .iter()
        .chain(vpa.call_transitions())
    {
        if reach[t.src.index()] && reach[t.dst.index()] {
            preds[t.dst.index()].push(t.src);
        }
    }
    for t in vpa.return_transitions() {
        if reach[t.src.index()] && reach[t.dst.index()] && tops.has_state(t.src, t.stack) {
            preds[t.dst.index()].push(t.src);
        }
    }

    let mut keep = vec![false; n];
    let mut work: Vec<StateId> = vpa
        .accepting()
        .iter()
        .copied()
        .filter(|q| reach[q.index()])
        .collect();
    for q in &work {
        keep[q.index()] = true;
    }
    while let Some(q) = work.pop() {
        for &p in &preds[q.index()] {
            if !keep[p.index()] {
                keep[p.index()] = true;
                work.push(p);
            }
        }
    }

    if !vpa.initial().iter().any(|q| keep[q.index()]) {
        return empty_language(vpa);
    }
    vpa.retain_states(&keep)
}

/// One non-final initial state and no transitions, over `like`'s alphabet.
fn empty_language(like: &Vpa) -> Vpa {
    let name = like
        .initial()
        .iter()
        .next()
        .map_or("q0".to_string(), |&q| like.state_name(q).to_string());
    Vpa::from_parts(
        like.alphabet().clone(),
        vec![name],
        [StateId(0)],
        [],
        [],
        [],
        [],
    )
}

/// Which transitions liveness completion enforces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LiveMode {
    /// Total for internal and call symbols, returns exactly where reachable.
    Full,
    /// Only the return part of liveness. Missing internal and call moves are
    /// read as moves to an implicit sink.
    #[default]
    ReturnsOnly,
}

/// Result of [`make_live`].
#[derive(Clone, Debug)]
pub struct Live {
    pub vpa: Vpa,
    /// The added sink state, if one was needed.
    pub sink: Option<StateId>,
}

/// Completes `vpa` to live form with at most one extra non-final sink.
///
/// Return transitions `(q, r, s, q')` with `s ∉ tops(q)` can never fire and
/// are deleted; for every `s ∈ tops(q)` and return symbol lacking a
/// transition, one to the sink is added. In [`LiveMode::Full`], missing
/// internal and call moves also go to the sink, which loops on itself.
pub fn make_live(vpa: &Vpa, mode: LiveMode) -> Live {
    let tops = compute_tops(vpa);
    let n = vpa.num_states();
    let sink = StateId(n as u32);
    let alphabet = vpa.alphabet();
    let rets = alphabet.ret();

    let mut internal: BTreeSet<Transition> = vpa.internal_transitions().clone();
    let mut call: BTreeSet<Transition> = vpa.call_transitions().clone();
    let mut ret: BTreeSet<ReturnTransition> = vpa
        .return_transitions()
        .iter()
        .copied()
        .filter(|t| tops.has_state(t.src, t.stack))
        .collect();
    let mut needs_sink = false;

    if mode == LiveMode::Full {
        for q in vpa.states() {
            for sym in alphabet.symbols() {
                let set = match alphabet.kind(sym) {
                    Some(SymbolKind::Internal) => &mut internal,
                    Some(SymbolKind::Call) => &mut call,
                    _ => continue,
                };
                if vpa.successors(q, sym).is_empty() {
                    set.insert(Transition::new(q, sym, sink));
                    needs_sink = true;
                }
            }
        }
    }
    for q in vpa.states() {
        for s in tops.stack_states(q) {
            for &r in &rets {
                if vpa.return_successors(q, r, s).is_empty() {
                    ret.insert(ReturnTransition::new(q, r, s, sink));
                    needs_sink = true;
                }
            }
        }
    }

    let names = vpa.state_names().to_vec();
    let build =
        |names: Vec<String>, internal: &BTreeSet<_>, call: &BTreeSet<_>, ret: &BTreeSet<_>| {
            Vpa::from_parts(
                alphabet.clone(),
                names,
                vpa.initial().iter().copied(),
                vpa.accepting().iter().copied(),
                internal.iter().copied(),
                call.iter().copied(),
                ret.iter().copied(),
            )
        };
    if !needs_sink {
        return Live {
            vpa: build(names, &internal, &call, &ret),
            sink: None,
        };
    }

    let mut names = names;
    names.push(fresh_name(vpa, "sink"));
    if mode == LiveMode::Full {
        for sym in alphabet.symbols() {
            match alphabet.kind(sym) {
                Some(SymbolKind::Internal) => {
                    internal.insert(Transition::new(sink, sym, sink));
                }
                Some(SymbolKind::Call) => {
                    call.insert(Transition::new(sink, sym, sink));
                }
                _ => {}
            }
        }
    }
    // Self-loops on returns can grow tops(sink), so iterate.
    loop {
        let candidate = build(names.clone(), &internal, &call, &ret);
        let sink_tops = compute_tops(&candidate);
        let mut grew = false;
        for s in sink_tops.stack_states(sink) {
            for &r in &rets {
                grew |= ret.insert(ReturnTransition::new(sink, r, s, sink));
            }
        }
        if !grew {
            return Live {
                vpa: candidate,
                sink: Some(sink),
            };
        }
    }
}

/// `base`, or `base_1`, `base_2`, ... whichever is not a state name yet.
pub(crate) fn fresh_name(vpa: &Vpa, base: &str) -> String {
    if vpa.lookup_state(base).is_none() {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| vpa.lookup_state(n).is_none())
        .unwrap()
}

/// Checks the liveness predicate, reporting the first violation.
pub fn check_live(vpa: &Vpa, tops: &TopsMap, mode: LiveMode) -> Result<(), VpaError> {
    let alphabet = vpa.alphabet();
    for q in vpa.states() {
        if mode == LiveMode::Full {
            for sym in alphabet.symbols() {
                if alphabet.kind(sym) != Some(SymbolKind::Return)
                    && vpa.successors(q, sym).is_empty()
                {
                    return Err(VpaError::NotLive(format!(
                        "state `{}` has no `{}` transition",
                        vpa.state_name(q),
                        alphabet.name(sym)
                    )));
                }
            }
        }
        for t in vpa.returns_from(q) {
            if !tops.contains(q, StackSymbol::State(t.stack)) {
                return Err(VpaError::NotLive(format!(
                    "return from `{}` pops `{}`, which is not in its tops",
                    vpa.state_name(q),
                    vpa.state_name(t.stack)
                )));
            }
        }
        for s in tops.stack_states(q) {
            for r in alphabet.symbols_of(SymbolKind::Return) {
                if vpa.return_successors(q, r, s).is_empty() {
                    return Err(VpaError::NotLive(format!(
                        "state `{}` lacks a `{}` return popping `{}`",
                        vpa.state_name(q),
                        alphabet.name(r),
                        vpa.state_name(s)
                    )));
                }
            }
        }
    }
    Ok(())
}
