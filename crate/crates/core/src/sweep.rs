//! Density sweeps over random automata.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::VpaError;
use crate::prepare::trim;
use crate::quotient::{minimize, MinimizeOptions};
use crate::random::{generate, RandomSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Template for every sample; `trans_density` and `seed` are overridden.
    pub base: RandomSpec,
    pub densities: Vec<f64>,
    pub samples: usize,
    pub options: MinimizeOptions,
}

/// Mean sizes at one transition density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub density: f64,
    pub samples: usize,
    pub mean_states_input: f64,
    pub mean_states_trimmed: f64,
    pub mean_states_minimized: f64,
}

/// `start, start + step, ...` up to `end` inclusive, tolerating rounding.
pub fn density_range(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "step must be positive");
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

/// For each density, draws `samples` automata and records the mean state
/// count before processing, after trimming and after minimization.
///
/// Sample `i` of point `p` uses seed `base.seed + p * samples + i`, so rows
/// do not depend on the number of worker threads.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, VpaError> {
    let jobs: Vec<(usize, usize)> = (0..spec.densities.len())
        .flat_map(|p| (0..spec.samples).map(move |i| (p, i)))
        .collect();
    let sizes: Vec<(usize, [usize; 3])> = jobs
        .par_iter()
        .map(|&(p, i)| {
            let rs = RandomSpec {
                trans_density: spec.densities[p],
                seed: spec.base.seed.wrapping_add((p * spec.samples + i) as u64),
                ..spec.base
            };
            let v = generate(&rs)?;
            let trimmed = trim(&v).num_states();
            let min = minimize(&v, spec.options)?.vpa.num_states();
            Ok((p, [v.num_states(), trimmed, min]))
        })
        .collect::<Result<_, VpaError>>()?;

    let mut sums = vec![[0usize; 3]; spec.densities.len()];
    for (p, s) in sizes {
        for k in 0..3 {
            sums[p][k] += s[k];
        }
    }
    let n = spec.samples.max(1) as f64;
    Ok(spec
        .densities
        .iter()
        .zip(sums)
        .map(|(&density, s)| SweepRow {
            density,
            samples: spec.samples,
            mean_states_input: s[0] as f64 / n,
            mean_states_trimmed: s[1] as f64 / n,
            mean_states_minimized: s[2] as f64 / n,
        })
        .collect())
}
