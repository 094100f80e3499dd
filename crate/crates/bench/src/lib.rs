//! Workloads shared by the benchmarks.

use vpamin::{generate, RandomSpec, Vpa};

/// Random automata with `n` states, one symbol of each kind, and the given
/// transition density. Seeds start at `seed` and count up.
pub fn corpus(n: usize, trans_density: f64, count: usize, seed: u64) -> Vec<Vpa> {
    (0..count as u64)
        .map(|i| {
            generate(&RandomSpec {
                n_states: n,
                trans_density,
                seed: seed + i,
                ..RandomSpec::default()
            })
            .expect("valid parameters")
        })
        .collect()
}
