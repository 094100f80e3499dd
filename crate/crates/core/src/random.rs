//! Random automata: uniform transition sampling by density, extended to returns.
//!
//! Densities are relative to the number of states `n`: a density `d` means
//! `round(d * n)` items, rounding halves up. The stream comes from ChaCha8
//! seeded with [`RandomSpec::seed`], so output is identical across
//! platforms.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, SymbolKind};
use crate::error::VpaError;
use crate::vpa::{ReturnTransition, StateId, Transition, Vpa};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n_states: usize,
    pub n_internal: usize,
    pub n_call: usize,
    pub n_return: usize,
    /// Fraction of accepting states, in `[0, 1]`.
    pub accept_density: f64,
    /// Transitions (or return skeletons) per symbol, relative to `n_states`.
    pub trans_density: f64,
    /// Stack symbols per return skeleton, relative to `n_states`, in `[0, 1]`.
    pub stack_density: f64,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            n_states: 10,
            n_internal: 1,
            n_call: 1,
            n_return: 1,
            accept_density: 0.5,
            trans_density: 1.0,
            stack_density: 0.5,
            seed: 0,
        }
    }
}

/// `round(d * n)` with halves rounded up.
pub fn density_count(d: f64, n: usize) -> usize {
    (d * n as f64 + 0.5).floor() as usize
}

impl RandomSpec {
    pub fn accepting_count(&self) -> usize {
        density_count(self.accept_density, self.n_states)
    }

    pub fn transitions_per_symbol(&self) -> usize {
        density_count(self.trans_density, self.n_states)
    }

    pub fn stacks_per_skeleton(&self) -> usize {
        density_count(self.stack_density, self.n_states)
    }

    pub fn check(&self) -> Result<(), VpaError> {
        let bad = |msg: String| Err(VpaError::InvalidSpec(msg));
        if self.n_states == 0 {
            return bad("at least one state is required".into());
        }
        for (name, d) in [
            ("accept density", self.accept_density),
            ("stack density", self.stack_density),
        ] {
            if !(0.0..=1.0).contains(&d) {
                return bad(format!("{name} {d} is outside [0, 1]"));
            }
        }
        if !(self.trans_density >= 0.0 && self.trans_density.is_finite()) {
            return bad(format!(
                "transition density {} must be non-negative",
                self.trans_density
            ));
        }
        let universe = self.n_states * self.n_states;
        if self.transitions_per_symbol() > universe {
            return bad(format!(
                "{} transitions per symbol exceed the {universe} distinct (source, target) pairs",
                self.transitions_per_symbol()
            ));
        }
        Ok(())
    }
}

/// Draws a random automaton. State `q0` is the only initial state.
pub fn generate(spec: &RandomSpec) -> Result<Vpa, VpaError> {
    spec.check()?;
    let n = spec.n_states;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let names = |p: &str, k: usize| (0..k).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    let alphabet = Alphabet::from_names(
        &names("a", spec.n_internal),
        &names("c", spec.n_call),
        &names("r", spec.n_return),
    )?;

    let accepting: Vec<StateId> = sample(&mut rng, n, spec.accepting_count())
        .into_iter()
        .map(|i| StateId(i as u32))
        .collect();
    let k = spec.transitions_per_symbol();
    let m = spec.stacks_per_skeleton();
    let pair = |i: usize| (StateId((i / n) as u32), StateId((i % n) as u32));

    let mut internal = BTreeSet::new();
    let mut call = BTreeSet::new();
    let mut ret = BTreeSet::new();
    for sym in alphabet.symbols() {
        let kind = alphabet.kind(sym).unwrap();
        for i in sample(&mut rng, n * n, k) {
            let (src, dst) = pair(i);
            match kind {
                SymbolKind::Internal => {
                    internal.insert(Transition::new(src, sym, dst));
                }
                SymbolKind::Call => {
                    call.insert(Transition::new(src, sym, dst));
                }
                SymbolKind::Return => {
                    for s in sample(&mut rng, n, m) {
                        ret.insert(ReturnTransition::new(src, sym, StateId(s as u32), dst));
                    }
                }
            }
        }
    }

    Ok(Vpa::from_parts(
        alphabet,
        names("q", n),
        [StateId(0)],
        accepting,
        internal,
        call,
        ret,
    ))
}

/// Keeps, for every source and symbol (and stack symbol, for returns), only
/// the transition with the least target.
pub fn filter_deterministic(vpa: &Vpa) -> Vpa {
    let mut seen = BTreeSet::new();
    let internal: Vec<Transition> = vpa
        .internal_transitions()
        .iter()
        .chain(vpa.call_transitions())
        .copied()
        .filter(|t| seen.insert((t.src, t.symbol)))
        .collect();
    let mut seen_ret = BTreeSet::new();
    let ret: Vec<ReturnTransition> = vpa
        .return_transitions()
        .iter()
        .copied()
        .filter(|t| seen_ret.insert((t.src, t.symbol, t.stack)))
        .collect();
    let a = vpa.alphabet();
    let is = |k: SymbolKind| move |t: &&Transition| a.kind(t.symbol) == Some(k);
    Vpa::from_parts(
        a.clone(),
        vpa.state_names().to_vec(),
        vpa.initial().iter().next().copied(),
        vpa.accepting().iter().copied(),
        internal.iter().filter(is(SymbolKind::Internal)).copied(),
        internal.iter().filter(is(SymbolKind::Call)).copied(),
        ret,
    )
}
