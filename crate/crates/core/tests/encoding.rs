//! The instance describes exactly the quotienting relations, and the greedy
//! solver finds a locally maximal one.

mod common;

use common::{all_partitions, prepare, small_vpa};
use vpamin::encode::ClauseDb;
use vpamin::oracle::{check_local_max, check_raq};
use vpamin::quotient::assignment_to_partition;
use vpamin::solver::{
    enumerate_models, solve_baseline_exhaustive, solve_greedy, SolverOptions, MAX_EXHAUSTIVE_VARS,
};
use vpamin::{StatePartition, VarId};

fn values_of(db: &ClauseDb, part: &StatePartition) -> Vec<bool> {
    (0..db.num_vars())
        .map(|i| {
            let pv = db.pair(VarId(i as u32));
            part.same_block(pv.lo(), pv.hi())
        })
        .collect()
}

#[test]
fn models_are_exactly_the_raq_partitions() {
    let mut checked = 0;
    for seed in 0..120 {
        let p = prepare(&small_vpa(seed));
        let db = p.instance(false);
        if db.num_vars() > 16 {
            continue;
        }
        checked += 1;
        let n = p.vpa.num_states();
        let models = enumerate_models(&db).unwrap();
        for m in &models {
            let part = assignment_to_partition(
                n,
                &db,
                &vpamin::solver::Assignment::from_values(m.clone()),
            )
            .unwrap();
            assert_eq!(
                check_raq(&p.vpa, &p.tops, &part).unwrap(),
                None,
                "seed {seed}: unsound model"
            );
        }
        // Completeness: every RAQ partition is a model.
        for part in all_partitions(n) {
            if check_raq(&p.vpa, &p.tops, &part).unwrap().is_none() {
                assert!(part.refines(&p.seed), "seed {seed}: seed too fine");
                let vals = values_of(&db, &part);
                assert!(models.contains(&vals), "seed {seed}: RAQ partition missing");
            }
        }
    }
    assert!(checked >= 60, "only {checked} instances were small enough");
}

#[test]
fn theory_and_clauses_agree() {
    for seed in 0..150 {
        let p = prepare(&small_vpa(seed));
        let (a, _) = solve_greedy(&p.instance(true), SolverOptions::default()).unwrap();
        let (b, _) = solve_greedy(&p.instance(false), SolverOptions::default()).unwrap();
        assert_eq!(a.values, b.values, "seed {seed}");
    }
}

#[test]
fn greedy_is_hard_satisfying_and_locally_maximal() {
    for seed in 0..200 {
        let p = prepare(&small_vpa(seed));
        for theory in [true, false] {
            let db = p.instance(theory);
            let (a, _) = solve_greedy(&db, SolverOptions::default()).unwrap();
            assert!(db.satisfies_hard(&a.values), "seed {seed}");
            let part = assignment_to_partition(p.vpa.num_states(), &db, &a).unwrap();
            assert_eq!(check_raq(&p.vpa, &p.tops, &part).unwrap(), None);
            assert_eq!(
                check_local_max(&p.vpa, &p.tops, &part).unwrap(),
                None,
                "seed {seed}"
            );
            // Assignment level: any false variable forced true, closed
            // under transitivity, breaks a hard clause.
            for v in 0..db.num_vars() {
                if a.values[v] {
                    continue;
                }
                let pv = db.pair(VarId(v as u32));
                let bigger = part.merged(pv.lo(), pv.hi());
                let vals: Vec<bool> = (0..db.num_vars())
                    .map(|i| {
                        let q = db.pair(VarId(i as u32));
                        bigger.same_block(q.lo(), q.hi())
                    })
                    .collect();
                assert!(!db.satisfies_hard(&vals), "seed {seed}: var {v} extendable");
            }
        }
    }
}

#[test]
fn greedy_matches_exhaustive_optimum_size() {
    for seed in 0..80 {
        let p = prepare(&small_vpa(seed));
        let db = p.instance(true);
        if db.num_vars() > MAX_EXHAUSTIVE_VARS {
            continue;
        }
        let opt = solve_baseline_exhaustive(&db).unwrap();
        let (greedy, _) = solve_greedy(&db, SolverOptions::default()).unwrap();
        assert!(db.soft_score(&greedy.values) <= db.soft_score(&opt.values));
    }
}
