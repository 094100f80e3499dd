//! Quotient construction and the end-to-end minimization pipeline.

use std::time::Instant;

use serde::Serialize;

use crate::encode::{build_instance, ClauseDb, EncodeOptions, PairVar};
use crate::error::VpaError;
use crate::partition::{initial_partition, StatePartition};
use crate::prepare::{make_live, trim, LiveMode};
use crate::solver::{solve_greedy, Assignment, SolveStats, SolverOptions};
use crate::tops::{compute_tops, TopsMap};
use crate::vpa::{ReturnTransition, StateId, Transition, Vpa};

/// The partition induced by the true variables of `a`.
///
/// Fails if the relation is not already transitive, which can only happen
/// when an instance was solved with neither transitivity clauses nor the
/// equality theory.
pub fn assignment_to_partition(
    num_states: usize,
    db: &ClauseDb,
    a: &Assignment,
) -> Result<StatePartition, VpaError> {
    let groups: Vec<Vec<StateId>> = db
        .pairs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| a.values[i])
        .map(|(_, pv)| vec![pv.lo(), pv.hi()])
        .collect();
    let part = StatePartition::with_groups(num_states, &groups);
    for block in part.blocks() {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                let related = db.var(p, q).is_some_and(|v| a.value(v));
                if !related {
                    return Err(VpaError::NonTransitive(format!(
                        "{{#{}, #{}}} follows by transitivity but is not set",
                        p.0, q.0
                    )));
                }
            }
        }
    }
    Ok(part)
}

/// The quotient of `vpa` by `part`: one state per block, with every
/// transition lifted to the blocks of its states, including the stack
/// symbol of returns.
pub fn build_quotient(vpa: &Vpa, part: &StatePartition) -> Vpa {
    let b = |q: StateId| StateId(part.block_of(q) as u32);
    let names = part
        .blocks()
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|&q| vpa.state_name(q))
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    Vpa::from_parts(
        vpa.alphabet().clone(),
        names,
        vpa.initial().iter().map(|&q| b(q)),
        vpa.accepting().iter().map(|&q| b(q)),
        vpa.internal_transitions()
            .iter()
            .map(|t| Transition::new(b(t.src), t.symbol, b(t.dst))),
        vpa.call_transitions()
            .iter()
            .map(|t| Transition::new(b(t.src), t.symbol, b(t.dst))),
        vpa.return_transitions()
            .iter()
            .map(|t| ReturnTransition::new(b(t.src), t.symbol, b(t.stack), b(t.dst))),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimizeOptions {
    /// Handle transitivity with the equality theory rather than clauses.
    pub use_theory: bool,
    pub live_mode: LiveMode,
    pub trace: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            use_theory: true,
            live_mode: LiveMode::ReturnsOnly,
            trace: false,
        }
    }
}

/// One CSV row describing a minimization run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MinimizeReport {
    pub name: String,
    pub states_in: usize,
    pub states_out: usize,
    pub ti_in: usize,
    pub ti_out: usize,
    pub tc_in: usize,
    pub tc_out: usize,
    pub tr_in: usize,
    pub tr_out: usize,
    pub vars: usize,
    pub clauses: usize,
    pub decisions: usize,
    pub backtracks: usize,
    pub time_ms: f64,
}

/// Everything [`minimize`] computed along the way.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub vpa: Vpa,
    pub report: MinimizeReport,
    /// The trimmed, live automaton that was quotiented.
    pub live: Vpa,
    pub sink: Option<StateId>,
    pub tops: TopsMap,
    pub seed: StatePartition,
    pub instance: ClauseDb,
    pub assignment: Assignment,
    /// Partition of the states of `live`.
    pub partition: StatePartition,
    pub stats: SolveStats,
    /// Solver trace, when requested.
    pub trace: Vec<String>,
}

/// Trims, completes, encodes, solves greedily and quotients `vpa`.
pub fn minimize(vpa: &Vpa, options: MinimizeOptions) -> Result<Minimized, VpaError> {
    let start = Instant::now();
    let vpa = vpa.clone().validated()?;
    let trimmed = trim(&vpa);
    let live = make_live(&trimmed, options.live_mode);
    let tops = compute_tops(&live.vpa);
    let seed = initial_partition(&live.vpa);
    let instance = build_instance(
        &live.vpa,
        &tops,
        &seed,
        EncodeOptions {
            use_theory: options.use_theory,
            sink: live.sink,
        },
    )?;
    let mut solver = crate::solver::GreedySolver::from_db(
        &instance,
        SolverOptions {
            trace: options.trace,
        },
    )?;
    let assignment = solver.solve()?;
    let stats = *solver.stats();
    let trace = solver.trace().map(<[String]>::to_vec).unwrap_or_default();

    let partition = assignment_to_partition(live.vpa.num_states(), &instance, &assignment)?;
    let out = finish_quotient(&live.vpa, live.sink, &partition);

    let (si, so) = (vpa.size(), out.size());
    let report = MinimizeReport {
        name: String::new(),
        states_in: si.states,
        states_out: so.states,
        ti_in: si.internal,
        ti_out: so.internal,
        tc_in: si.call,
        tc_out: so.call,
        tr_in: si.ret,
        tr_out: so.ret,
        vars: instance.num_vars(),
        clauses: instance.clauses().len(),
        decisions: stats.decisions,
        backtracks: stats.backtracks,
        time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(Minimized {
        vpa: out,
        report,
        live: live.vpa,
        sink: live.sink,
        tops,
        seed,
        instance,
        assignment,
        partition,
        stats,
        trace,
    })
}

/// Quotients a live automaton, drops the sink if it stayed on its own, and
/// trims the result.
pub fn finish_quotient(live: &Vpa, sink: Option<StateId>, part: &StatePartition) -> Vpa {
    let mut out = build_quotient(live, part);
    if let Some(s) = sink {
        if part.block(s).len() == 1 {
            let drop = part.block_of(s);
            let keep: Vec<bool> = (0..out.num_states()).map(|b| b != drop).collect();
            out = out.retain_states(&keep);
        }
    }
    trim(&out)
}

/// Solves an already built instance greedily and returns its partition.
pub fn greedy_partition(
    num_states: usize,
    db: &ClauseDb,
) -> Result<(StatePartition, SolveStats), VpaError> {
    let (a, stats) = solve_greedy(db, SolverOptions::default())?;
    Ok((assignment_to_partition(num_states, db, &a)?, stats))
}

/// Pairs related by `part` that the instance has a variable for.
pub fn related_pairs(db: &ClauseDb, part: &StatePartition) -> Vec<PairVar> {
    db.pairs()
        .iter()
        .copied()
        .filter(|pv| part.same_block(pv.lo(), pv.hi()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{bounded_equiv, fixtures};
    use crate::run::{accepts, enumerate_language};

    fn merge(v: &Vpa, names: &[&str]) -> StatePartition {
        let group: Vec<StateId> = names.iter().map(|n| v.state(n)).collect();
        StatePartition::with_groups(v.num_states(), &[group])
    }

    #[test]
    fn all_false_gives_discrete() {
        let v = fixtures::fig1x();
        let live = make_live(&v, LiveMode::ReturnsOnly).vpa;
        let tops = compute_tops(&live);
        let db = build_instance(
            &live,
            &tops,
            &initial_partition(&live),
            EncodeOptions::default(),
        )
        .unwrap();
        let a = Assignment::from_values(vec![false; db.num_vars()]);
        let p = assignment_to_partition(live.num_states(), &db, &a).unwrap();
        assert_eq!(p, StatePartition::discrete(live.num_states()));
    }

    #[test]
    fn non_transitive_assignment_rejected() {
        let v = fixtures::sevpa(3);
        let tops = compute_tops(&v);
        let db = build_instance(
            &v,
            &tops,
            &initial_partition(&v),
            EncodeOptions {
                use_theory: true,
                sink: None,
            },
        )
        .unwrap();
        let (q1, q2, q3) = (v.state("q1"), v.state("q2"), v.state("q3"));
        let mut values = vec![false; db.num_vars()];
        values[db.var(q1, q2).unwrap().index()] = true;
        values[db.var(q2, q3).unwrap().index()] = true;
        let a = Assignment::from_values(values.clone());
        assert!(matches!(
            assignment_to_partition(v.num_states(), &db, &a),
            Err(VpaError::NonTransitive(_))
        ));
        values[db.var(q1, q3).unwrap().index()] = true;
        let p =
            assignment_to_partition(v.num_states(), &db, &Assignment::from_values(values)).unwrap();
        assert_eq!(p.block(q1), &[q1, q2, q3]);
    }

    #[test]
    fn identity_quotient_is_isomorphic() {
        let v = fixtures::fig2x();
        let q = build_quotient(&v, &StatePartition::discrete(v.num_states()));
        assert_eq!(q, v);
    }

    #[test]
    fn fig2x_merge_accepts_crossed_word() {
        let v = fixtures::fig2x();
        let q = build_quotient(&v, &merge(&v, &["q1", "q2"]));
        let w = q.alphabet().parse_word("a1 c r2").unwrap();
        assert!(accepts(&q, &w).unwrap());
        assert!(!accepts(&v, &w).unwrap());
    }

    #[test]
    fn fig1x_merges() {
        let v = fixtures::fig1x();
        let lang = enumerate_language(&v, 8);
        for pair in [["q1", "q2"], ["q2", "q3"]] {
            let q = build_quotient(&v, &merge(&v, &pair));
            assert_eq!(enumerate_language(&q, 8), lang, "{pair:?}");
        }
        let all = build_quotient(&v, &merge(&v, &["q1", "q2", "q3"]));
        let w = v.alphabet().parse_word("c2 r").unwrap();
        assert!(accepts(&all, &w).unwrap());
        assert!(!accepts(&v, &w).unwrap());
    }

    #[test]
    fn minimize_fig1x() {
        let v = fixtures::fig1x();
        let m = minimize(&v, MinimizeOptions::default()).unwrap();
        // The dead state q2 goes during trimming; q1 and q3 must stay apart.
        assert!(m.live.lookup_state("q2").is_none());
        assert!(!m
            .partition
            .same_block(m.live.state("q1"), m.live.state("q3")));
        assert!(bounded_equiv(&v, &m.vpa, 8).unwrap().is_equivalent());
        assert_eq!(m.report.states_in, 6);
        assert_eq!(m.report.states_out, 5);
        assert_eq!(m.report.vars, m.instance.num_vars());
    }

    #[test]
    fn fig1x_untrimmed_instance_merges_q1_q2() {
        let v = make_live(&fixtures::fig1x(), LiveMode::ReturnsOnly);
        let tops = compute_tops(&v.vpa);
        let db = build_instance(
            &v.vpa,
            &tops,
            &initial_partition(&v.vpa),
            EncodeOptions {
                use_theory: true,
                sink: v.sink,
            },
        )
        .unwrap();
        let (part, _) = greedy_partition(v.vpa.num_states(), &db).unwrap();
        let q = |n| v.vpa.state(n);
        assert!(part.same_block(q("q1"), q("q2")));
        assert!(!part.same_block(q("q2"), q("q3")));
        assert!(!part.same_block(q("q1"), q("q3")));
        let quot = build_quotient(&v.vpa, &part);
        assert!(bounded_equiv(&v.vpa, &quot, 8).unwrap().is_equivalent());
    }

    #[test]
    fn minimize_sevpa_to_three_states() {
        for k in 2..=8 {
            let m = minimize(&fixtures::sevpa(k), MinimizeOptions::default()).unwrap();
            assert_eq!(m.vpa.num_states(), 3, "k = {k}");
        }
    }

    #[test]
    fn one_state_unchanged() {
        let mut b =
            crate::VpaBuilder::new(crate::Alphabet::from_names(&["a"], &["c"], &["r"]).unwrap());
        b.edge("q", "a", None, "q");
        let q = b.state("q");
        b.initial(q).accepting(q);
        let v = b.build();
        let m = minimize(&v, MinimizeOptions::default()).unwrap();
        assert_eq!(m.vpa, v);
        assert_eq!(m.report.vars, 0);
    }

    #[test]
    fn fig2x_sink_is_stripped() {
        let v = fixtures::fig2x();
        let m = minimize(&v, MinimizeOptions::default()).unwrap();
        assert!(m.sink.is_some());
        assert!(m.vpa.lookup_state("sink").is_none());
        assert!(!m
            .partition
            .same_block(m.live.state("q1"), m.live.state("q2")));
        assert!(bounded_equiv(&v, &m.vpa, 8).unwrap().is_equivalent());
    }
}
