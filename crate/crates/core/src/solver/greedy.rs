//! Interactive greedy PMax-SAT solver.
//!
//! Plain DPLL with chronological backtracking: clauses are propagated as they
//! are added, then each unset variable is decided true first and flipped to
//! false if that branch fails. There is no clause learning and no restart.
//! The result is the lexicographically greatest model in decision order,
//! which makes it locally maximal: no false variable can be set to true,
//! together with its transitive consequences, without violating a hard
//! clause.
//!
//! With the equality theory attached, every variable set to true merges its
//! two states and the theory's implied equalities are assigned true as well.
//! Conflicts only surface in the Boolean part.

use std::collections::HashMap;

use crate::encode::{Clause, ClauseDb, ClauseKind, Lit, PairVar, VarId};
use crate::error::VpaError;
use crate::solver::equality::EqualityContext;

/// Why a trail entry was assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Decision,
    /// A decision that was flipped to false after its true branch failed.
    Flipped,
    Propagation,
    Theory,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailEntry {
    pub var: VarId,
    pub value: bool,
    pub reason: Reason,
    pub level: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub decisions: usize,
    pub propagations: usize,
    pub theory_propagations: usize,
    pub backtracks: usize,
    /// Largest number of decision levels undone by a single conflict.
    pub max_backtrack_depth: usize,
}

/// A total assignment with the trail that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<bool>,
    pub trail: Vec<TrailEntry>,
}

impl Assignment {
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment {
            values,
            trail: Vec::new(),
        }
    }

    pub fn value(&self, v: VarId) -> bool {
        self.values[v.index()]
    }

    pub fn true_count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Record a trace line per decision, propagation and backtrack.
    pub trace: bool,
}

#[derive(Clone, Copy, Debug)]
struct Frame {
    var: VarId,
    trail_start: usize,
    flipped: bool,
    order_pos: usize,
}

struct Theory {
    ctx: EqualityContext,
    pairs: Vec<PairVar>,
    var_of: HashMap<PairVar, VarId>,
}

struct Conflict;

pub struct GreedySolver {
    values: Vec<Option<bool>>,
    clauses: Vec<Vec<Lit>>,
    /// Clause indices per literal, at `2 * var + positive`.
    occurs: Vec<Vec<u32>>,
    soft: Vec<bool>,
    trail: Vec<TrailEntry>,
    head: usize,
    frames: Vec<Frame>,
    theory: Option<Theory>,
    unsat: bool,
    stats: SolveStats,
    trace: Option<Vec<String>>,
}

impl GreedySolver {
    pub fn new(num_vars: usize, options: SolverOptions) -> Self {
        GreedySolver {
            values: vec![None; num_vars],
            clauses: Vec::new(),
            occurs: vec![Vec::new(); 2 * num_vars],
            soft: vec![false; num_vars],
            trail: Vec::new(),
            head: 0,
            frames: Vec::new(),
            theory: None,
            unsat: false,
            stats: SolveStats::default(),
            trace: options.trace.then(Vec::new),
        }
    }

    /// A solver whose variables stand for state pairs, with transitivity
    /// handled by the equality theory.
    pub fn with_theory(num_states: usize, pairs: &[PairVar], options: SolverOptions) -> Self {
        let mut s = Self::new(pairs.len(), options);
        s.theory = Some(Theory {
            ctx: EqualityContext::new(num_states),
            pairs: pairs.to_vec(),
            var_of: pairs
                .iter()
                .enumerate()
                .map(|(i, &pv)| (pv, VarId(i as u32)))
                .collect(),
        });
        s
    }

    /// Loads every clause of `db`, attaching the theory if the instance
    /// relies on it.
    pub fn from_db(db: &ClauseDb, options: SolverOptions) -> Result<Self, VpaError> {
        let mut s = if db.uses_theory() {
            let n = db
                .pairs()
                .iter()
                .map(|pv| pv.hi().index() + 1)
                .max()
                .unwrap_or(0);
            Self::with_theory(n, db.pairs(), options)
        } else {
            Self::new(db.num_vars(), options)
        };
        for c in db.clauses() {
            s.add_clause(c)?;
        }
        Ok(s)
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    pub fn trace(&self) -> Option<&[String]> {
        self.trace.as_deref()
    }

    pub fn value(&self, v: VarId) -> Option<bool> {
        self.values[v.index()]
    }

    fn level(&self) -> u32 {
        self.frames.len() as u32
    }

    fn log(&mut self, tag: char, var: VarId, value: bool) {
        let level = self.level();
        if let Some(t) = &mut self.trace {
            let seq = t.len();
            t.push(format!("{seq} {tag} {} {} {level}", var.0, u8::from(value)));
        }
    }

    fn assign(&mut self, var: VarId, value: bool, reason: Reason) {
        self.values[var.index()] = Some(value);
        let level = self.level();
        self.trail.push(TrailEntry {
            var,
            value,
            reason,
            level,
        });
        let tag = match reason {
            Reason::Decision => 'D',
            Reason::Flipped => 'B',
            Reason::Propagation => {
                self.stats.propagations += 1;
                'P'
            }
            Reason::Theory => {
                self.stats.theory_propagations += 1;
                'T'
            }
        };
        self.log(tag, var, value);
    }

    /// Adds a clause and propagates to fixpoint.
    ///
    /// Soft clauses must be unit positive; they only mark their variable as
    /// preferred. Fails if the hard clauses become unsatisfiable at the root.
    pub fn add_clause(&mut self, clause: &Clause) -> Result<(), VpaError> {
        if clause.kind == ClauseKind::Soft {
            return match clause.lits.as_slice() {
                [l] if l.positive => {
                    self.soft[l.var.index()] = true;
                    Ok(())
                }
                _ => Err(VpaError::UnsupportedClause(
                    "soft clauses must be unit positive".into(),
                )),
            };
        }
        if self.unsat {
            return Err(VpaError::Unsatisfiable);
        }
        let idx = self.clauses.len() as u32;
        for l in &clause.lits {
            self.occurs[2 * l.var.index() + usize::from(l.positive)].push(idx);
        }
        self.clauses.push(clause.lits.clone());
        let result = match self.inspect(idx as usize) {
            Inspect::Conflict => Err(Conflict),
            Inspect::Unit(l) => {
                self.assign(l.var, l.positive, Reason::Propagation);
                self.propagate()
            }
            Inspect::Open => Ok(()),
        };
        if result.is_err() {
            self.unsat = true;
            return Err(VpaError::Unsatisfiable);
        }
        Ok(())
    }

    fn inspect(&self, idx: usize) -> Inspect {
        let mut unset = None;
        let mut n_unset = 0;
        for &l in &self.clauses[idx] {
            match l.eval(self.values[l.var.index()]) {
                Some(true) => return Inspect::Open,
                Some(false) => {}
                None => {
                    n_unset += 1;
                    unset = Some(l);
                }
            }
        }
        match n_unset {
            0 => Inspect::Conflict,
            1 => Inspect::Unit(unset.unwrap()),
            _ => Inspect::Open,
        }
    }

    fn propagate(&mut self) -> Result<(), Conflict> {
        while self.head < self.trail.len() {
            let TrailEntry { var, value, .. } = self.trail[self.head];
            self.head += 1;
            // Clauses containing the literal that just became false.
            let falsified = 2 * var.index() + usize::from(!value);
            for k in 0..self.occurs[falsified].len() {
                let idx = self.occurs[falsified][k] as usize;
                match self.inspect(idx) {
                    Inspect::Conflict => return Err(Conflict),
                    Inspect::Unit(l) => self.assign(l.var, l.positive, Reason::Propagation),
                    Inspect::Open => {}
                }
            }
            if value {
                if let Some(th) = &mut self.theory {
                    let pv = th.pairs[var.index()];
                    let implied: Vec<Option<VarId>> = th
                        .ctx
                        .assert_equal(pv.lo(), pv.hi())
                        .into_iter()
                        .map(|p| th.var_of.get(&p).copied())
                        .collect();
                    for v in implied {
                        // A pair without a variable is constant false.
                        let Some(v) = v else { return Err(Conflict) };
                        match self.values[v.index()] {
                            Some(false) => return Err(Conflict),
                            Some(true) => {}
                            None => self.assign(v, true, Reason::Theory),
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn undo_to(&mut self, trail_len: usize) {
        for e in self.trail.drain(trail_len..) {
            self.values[e.var.index()] = None;
        }
        self.head = trail_len;
    }

    fn open_frame(&mut self, frame: Frame) {
        if let Some(th) = &mut self.theory {
            th.ctx.push_frame();
        }
        self.frames.push(frame);
    }

    fn close_frame(&mut self) -> Option<Frame> {
        let f = self.frames.pop()?;
        self.undo_to(f.trail_start);
        if let Some(th) = &mut self.theory {
            th.ctx
                .pop_frame()
                .expect("theory frames track decision levels");
        }
        Some(f)
    }

    /// Assigns every variable. Variables with a soft clause are decided
    /// first, each group in ascending index order.
    pub fn solve(&mut self) -> Result<Assignment, VpaError> {
        if self.unsat || self.propagate().is_err() {
            self.unsat = true;
            return Err(VpaError::Unsatisfiable);
        }
        let order: Vec<VarId> = (0..self.values.len() as u32)
            .map(VarId)
            .filter(|v| self.soft[v.index()])
            .chain(
                (0..self.values.len() as u32)
                    .map(VarId)
                    .filter(|v| !self.soft[v.index()]),
            )
            .collect();

        let mut cursor = 0;
        loop {
            while cursor < order.len() && self.values[order[cursor].index()].is_some() {
                cursor += 1;
            }
            let Some(&var) = order.get(cursor) else {
                break;
            };
            self.stats.decisions += 1;
            self.open_frame(Frame {
                var,
                trail_start: self.trail.len(),
                flipped: false,
                order_pos: cursor,
            });
            self.assign(var, true, Reason::Decision);

            while self.propagate().is_err() {
                let mut depth = 0;
                loop {
                    let Some(f) = self.close_frame() else {
                        self.unsat = true;
                        return Err(VpaError::Unsatisfiable);
                    };
                    depth += 1;
                    if !f.flipped {
                        self.open_frame(Frame { flipped: true, ..f });
                        self.assign(f.var, false, Reason::Flipped);
                        cursor = f.order_pos;
                        break;
                    }
                }
                self.stats.backtracks += 1;
                self.stats.max_backtrack_depth = self.stats.max_backtrack_depth.max(depth);
            }
        }

        Ok(Assignment {
            values: self.values.iter().map(|v| v.unwrap()).collect(),
            trail: self.trail.clone(),
        })
    }
}

enum Inspect {
    Conflict,
    Unit(Lit),
    Open,
}

/// Loads `db` into a fresh solver and solves it.
pub fn solve_greedy(
    db: &ClauseDb,
    options: SolverOptions,
) -> Result<(Assignment, SolveStats), VpaError> {
    let mut s = GreedySolver::from_db(db, options)?;
    let a = s.solve()?;
    Ok((a, s.stats))
}
