//! Exhaustive reference solver for small instances.

use crate::encode::{ClauseDb, Lit, PairVar, VarId};
use crate::error::VpaError;
use crate::solver::greedy::Assignment;

/// Largest instance the exhaustive solvers accept.
pub const MAX_EXHAUSTIVE_VARS: usize = 24;

fn guard(db: &ClauseDb) -> Result<(), VpaError> {
    if db.num_vars() > MAX_EXHAUSTIVE_VARS {
        return Err(VpaError::InstanceTooLarge {
            vars: db.num_vars(),
            limit: MAX_EXHAUSTIVE_VARS,
        });
    }
    Ok(())
}

/// Hard constraints in a form cheap to check under partial assignments:
/// the clauses plus, for theory instances, the transitivity triples.
struct Constraints {
    clauses: Vec<Vec<Lit>>,
    soft: Vec<bool>,
}

impl Constraints {
    fn new(db: &ClauseDb) -> Self {
        let mut clauses: Vec<Vec<Lit>> = db.hard_clauses().map(|c| c.lits.clone()).collect();
        if db.uses_theory() {
            clauses.extend(transitivity_clauses(db));
        }
        let mut soft = vec![false; db.num_vars()];
        for c in db.soft_clauses() {
            soft[c.lits[0].var.index()] = true;
        }
        Constraints { clauses, soft }
    }

    /// False iff some clause is already falsified.
    fn consistent(&self, values: &[Option<bool>]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| l.eval(values[l.var.index()]) != Some(false))
        })
    }
}

/// Transitivity over the variables of `db`: for states x, y, z with all
/// three pairs present, `X{x,y} ∧ X{x,z} → X{y,z}` in every rotation.
fn transitivity_clauses(db: &ClauseDb) -> Vec<Vec<Lit>> {
    let pairs = db.pairs();
    let mut states: Vec<_> = pairs.iter().flat_map(|p| [p.lo(), p.hi()]).collect();
    states.sort_unstable();
    states.dedup();
    let mut out = Vec::new();
    for (i, &a) in states.iter().enumerate() {
        for (j, &b) in states.iter().enumerate().skip(i + 1) {
            for &c in &states[j + 1..] {
                let (Some(ab), Some(ac), Some(bc)) = (db.var(a, b), db.var(a, c), db.var(b, c))
                else {
                    continue;
                };
                for (x, y, z) in [(ab, ac, bc), (ab, bc, ac), (ac, bc, ab)] {
                    out.push(vec![Lit::neg(x), Lit::neg(y), Lit::pos(z)]);
                }
            }
        }
    }
    out
}

/// A model maximising the number of satisfied soft clauses. Ties go to the
/// first model found with variables tried true before false.
pub fn solve_baseline_exhaustive(db: &ClauseDb) -> Result<Assignment, VpaError> {
    guard(db)?;
    let cons = Constraints::new(db);
    let n = db.num_vars();
    let mut values = vec![None; n];
    let mut best: Option<(usize, Vec<bool>)> = None;
    search(&cons, &mut values, 0, 0, &mut |score, vals| {
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, vals.to_vec()));
        }
        best.as_ref().map(|(b, _)| *b)
    });
    best.map(|(_, v)| Assignment::from_values(v))
        .ok_or(VpaError::Unsatisfiable)
}

/// Depth-first search with a soft-count bound. `visit` receives each model
/// reached and returns the score below which branches may be pruned.
fn search(
    cons: &Constraints,
    values: &mut Vec<Option<bool>>,
    i: usize,
    score: usize,
    visit: &mut dyn FnMut(usize, &[bool]) -> Option<usize>,
) -> Option<usize> {
    search_inner(cons, values, i, score, None, visit)
}

fn search_inner(
    cons: &Constraints,
    values: &mut Vec<Option<bool>>,
    i: usize,
    score: usize,
    mut bound: Option<usize>,
    visit: &mut dyn FnMut(usize, &[bool]) -> Option<usize>,
) -> Option<usize> {
    if !cons.consistent(values) {
        return bound;
    }
    let remaining = cons.soft[i..].iter().filter(|&&s| s).count();
    if bound.is_some_and(|b| score + remaining <= b) {
        return bound;
    }
    if i == values.len() {
        let total: Vec<bool> = values.iter().map(|v| v.unwrap()).collect();
        return visit(score, &total);
    }
    for value in [true, false] {
        values[i] = Some(value);
        let gain = usize::from(value && cons.soft[i]);
        bound = search_inner(cons, values, i + 1, score + gain, bound, visit);
    }
    values[i] = None;
    bound
}

/// Every hard-satisfying assignment, in the order true-before-false.
pub fn enumerate_models(db: &ClauseDb) -> Result<Vec<Vec<bool>>, VpaError> {
    guard(db)?;
    let cons = Constraints::new(db);
    let mut out = Vec::new();
    let mut values = vec![None; db.num_vars()];
    search(&cons, &mut values, 0, 0, &mut |_, vals| {
        out.push(vals.to_vec());
        None
    });
    Ok(out)
}

/// All models with the optimal soft score.
pub fn all_optima(db: &ClauseDb) -> Result<Vec<Vec<bool>>, VpaError> {
    let models = enumerate_models(db)?;
    let best = models.iter().map(|m| db.soft_score(m)).max();
    Ok(models
        .into_iter()
        .filter(|m| Some(db.soft_score(m)) == best)
        .collect())
}

/// The pairs set to true by `values`.
pub fn true_pairs(db: &ClauseDb, values: &[bool]) -> Vec<PairVar> {
    (0..db.num_vars())
        .filter(|&i| values[i])
        .map(|i| db.pair(VarId(i as u32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Clause;

    fn db(n: usize, hard: Vec<Vec<Lit>>) -> ClauseDb {
        let mut db = ClauseDb::with_vars(n);
        for c in hard {
            db.push(Clause::hard(c));
        }
        for i in 0..n {
            db.push(Clause::soft(vec![Lit::pos(VarId(i as u32))]));
        }
        db
    }

    #[test]
    fn picks_global_optimum() {
        // x0 excludes x1 and x2; optimum sets x1, x2 rather than x0.
        let v = |i| VarId(i);
        let d = db(
            3,
            vec![
                vec![Lit::neg(v(0)), Lit::neg(v(1))],
                vec![Lit::neg(v(0)), Lit::neg(v(2))],
            ],
        );
        let a = solve_baseline_exhaustive(&d).unwrap();
        assert_eq!(a.values, vec![false, true, true]);
        assert_eq!(all_optima(&d).unwrap().len(), 1);
    }

    #[test]
    fn tie_goes_to_first_true() {
        let v = |i| VarId(i);
        let d = db(2, vec![vec![Lit::neg(v(0)), Lit::neg(v(1))]]);
        assert_eq!(
            solve_baseline_exhaustive(&d).unwrap().values,
            vec![true, false]
        );
        assert_eq!(all_optima(&d).unwrap().len(), 2);
        assert_eq!(enumerate_models(&d).unwrap().len(), 3);
    }

    #[test]
    fn unsat_is_reported() {
        let v = VarId(0);
        let d = db(1, vec![vec![Lit::pos(v)], vec![Lit::neg(v)]]);
        assert_eq!(solve_baseline_exhaustive(&d), Err(VpaError::Unsatisfiable));
    }

    #[test]
    fn size_guard() {
        let d = db(MAX_EXHAUSTIVE_VARS + 1, vec![]);
        assert!(matches!(
            solve_baseline_exhaustive(&d),
            Err(VpaError::InstanceTooLarge { .. })
        ));
    }
}
