#![allow(dead_code)]

use vpamin::encode::{build_instance, ClauseDb, EncodeOptions};
use vpamin::prepare::{make_live, trim, LiveMode};
use vpamin::{
    compute_tops, generate, initial_partition, RandomSpec, StateId, StatePartition, TopsMap, Vpa,
};

/// A trimmed, return-live automaton with everything needed to encode it.
pub struct Prepared {
    pub vpa: Vpa,
    pub sink: Option<StateId>,
    pub tops: TopsMap,
    pub seed: StatePartition,
}

pub fn prepare(v: &Vpa) -> Prepared {
    let live = make_live(&trim(v), LiveMode::ReturnsOnly);
    let tops = compute_tops(&live.vpa);
    let seed = initial_partition(&live.vpa);
    Prepared {
        vpa: live.vpa,
        sink: live.sink,
        tops,
        seed,
    }
}

impl Prepared {
    pub fn instance(&self, use_theory: bool) -> ClauseDb {
        build_instance(
            &self.vpa,
            &self.tops,
            &self.seed,
            EncodeOptions {
                use_theory,
                sink: self.sink,
            },
        )
        .unwrap()
    }
}

/// Small random automata of 3 to 6 states with varied shapes.
pub fn small_vpa(seed: u64) -> Vpa {
    let n = 3 + (seed % 4) as usize;
    let k = 1 + (seed / 4 % 2) as usize;
    generate(&RandomSpec {
        n_states: n,
        n_internal: k,
        n_call: k,
        n_return: k,
        accept_density: 0.5,
        trans_density: [1.0, 1.5, 2.0][(seed / 8 % 3) as usize],
        stack_density: [0.3, 0.6][(seed / 24 % 2) as usize],
        seed,
    })
    .unwrap()
}

/// Every partition of `0..n`, as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<StatePartition> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<StatePartition>) {
        if i == labels.len() {
            out.push(StatePartition::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            rec(i + 1, max.max(l), labels, out);
        }
    }
    if n == 0 {
        return vec![StatePartition::discrete(0)];
    }
    rec(1, 0, &mut labels, &mut out);
    out
}
