//! Encoding of quotienting relations as a partial max-SAT instance.
//!
//! There is one Boolean variable per unordered pair of distinct states that
//! share a block of the seed partition; it is true iff the two states are
//! related. Diagonal pairs are the constant true and pairs split by the seed
//! are the constant false. Clauses are simplified against these constants as
//! they are built.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::alphabet::SymbolKind;
use crate::error::VpaError;
use crate::partition::StatePartition;
use crate::prepare::{check_live, LiveMode};
use crate::tops::TopsMap;
use crate::vpa::{StateId, Vpa};

/// An unordered pair of distinct states, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairVar {
    lo: StateId,
    hi: StateId,
}

impl PairVar {
    /// `None` for a diagonal pair.
    pub fn new(p: StateId, q: StateId) -> Option<Self> {
        match p.cmp(&q) {
            std::cmp::Ordering::Less => Some(PairVar { lo: p, hi: q }),
            std::cmp::Ordering::Greater => Some(PairVar { lo: q, hi: p }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(self) -> StateId {
        self.lo
    }

    pub fn hi(self) -> StateId {
        self.hi
    }

    pub fn touches(self, q: StateId) -> bool {
        self.lo == q || self.hi == q
    }
}

/// Dense index of a Boolean variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: VarId,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: VarId) -> Self {
        Lit {
            var,
            positive: true,
        }
    }

    pub fn neg(var: VarId) -> Self {
        Lit {
            var,
            positive: false,
        }
    }

    /// Truth value under a total or partial assignment.
    pub fn eval(self, value: Option<bool>) -> Option<bool> {
        value.map(|v| v == self.positive)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClauseKind {
    Hard,
    Soft,
}

/// Which constraint a clause encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Acceptance,
    Internal,
    Call,
    Return,
    Transitivity,
    Soft,
    /// Clauses added by hand rather than by [`build_instance`].
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub kind: ClauseKind,
    pub family: Family,
}

impl Clause {
    pub fn hard(lits: Vec<Lit>) -> Self {
        Clause {
            lits,
            kind: ClauseKind::Hard,
            family: Family::Other,
        }
    }

    pub fn soft(lits: Vec<Lit>) -> Self {
        Clause {
            lits,
            kind: ClauseKind::Soft,
            family: Family::Other,
        }
    }

    pub fn is_hard(&self) -> bool {
        self.kind == ClauseKind::Hard
    }

    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.lits
            .iter()
            .any(|l| values[l.var.index()] == l.positive)
    }
}

/// Clause counts per family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FamilyCounts {
    pub acceptance: usize,
    pub internal: usize,
    pub call: usize,
    pub ret: usize,
    pub transitivity: usize,
    pub soft: usize,
    pub other: usize,
    /// Return clauses skipped because a stack symbol fails the tops test.
    pub omitted_returns: usize,
}

impl FamilyCounts {
    fn bump(&mut self, family: Family) {
        match family {
            Family::Acceptance => self.acceptance += 1,
            Family::Internal => self.internal += 1,
            Family::Call => self.call += 1,
            Family::Return => self.ret += 1,
            Family::Transitivity => self.transitivity += 1,
            Family::Soft => self.soft += 1,
            Family::Other => self.other += 1,
        }
    }

    pub fn hard(&self) -> usize {
        self.acceptance + self.internal + self.call + self.ret + self.transitivity + self.other
    }

    pub fn total(&self) -> usize {
        self.hard() + self.soft
    }
}

/// A PMax-SAT instance; soft clauses are unit positive.
#[derive(Clone, Debug, Default)]
pub struct ClauseDb {
    clauses: Vec<Clause>,
    num_vars: usize,
    pairs: Vec<PairVar>,
    var_of: HashMap<PairVar, VarId>,
    stats: FamilyCounts,
    theory: bool,
}

impl ClauseDb {
    /// An instance over `num_vars` anonymous variables.
    pub fn with_vars(num_vars: usize) -> Self {
        ClauseDb {
            num_vars,
            ..Default::default()
        }
    }

    pub fn push(&mut self, clause: Clause) {
        self.stats.bump(clause.family);
        self.clauses.push(clause);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn hard_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.is_hard())
    }

    pub fn soft_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| !c.is_hard())
    }

    pub fn stats(&self) -> &FamilyCounts {
        &self.stats
    }

    /// State pairs of the variables, indexed by [`VarId`]; empty for
    /// anonymous instances.
    pub fn pairs(&self) -> &[PairVar] {
        &self.pairs
    }

    pub fn pair(&self, v: VarId) -> PairVar {
        self.pairs[v.index()]
    }

    pub fn var(&self, p: StateId, q: StateId) -> Option<VarId> {
        PairVar::new(p, q).and_then(|pv| self.var_of.get(&pv).copied())
    }

    /// Whether transitivity is left to the equality theory.
    pub fn uses_theory(&self) -> bool {
        self.theory
    }

    /// Checks every hard clause against a total assignment.
    pub fn satisfies_hard(&self, values: &[bool]) -> bool {
        self.hard_clauses().all(|c| c.satisfied_by(values))
    }

    pub fn soft_score(&self, values: &[bool]) -> usize {
        self.soft_clauses()
            .filter(|c| c.satisfied_by(values))
            .count()
    }

    /// Weighted CNF text: hard clauses carry the top weight, soft ones weight
    /// 1. Comment lines record the pair behind each variable.
    pub fn to_wcnf(&self, state_names: &[String]) -> String {
        let mut out = String::new();
        let top = self.stats.soft + 1;
        writeln!(out, "c vpamin quotienting instance").unwrap();
        for (i, pv) in self.pairs.iter().enumerate() {
            let name = |q: StateId| {
                state_names
                    .get(q.index())
                    .cloned()
                    .unwrap_or_else(|| q.0.to_string())
            };
            writeln!(out, "c var {} = {{{},{}}}", i + 1, name(pv.lo), name(pv.hi)).unwrap();
        }
        writeln!(
            out,
            "p wcnf {} {} {}",
            self.num_vars,
            self.clauses.len(),
            top
        )
        .unwrap();
        for c in &self.clauses {
            let w = if c.is_hard() { top } else { 1 };
            write!(out, "{w}").unwrap();
            for l in &c.lits {
                let v = l.var.0 as i64 + 1;
                write!(out, " {}", if l.positive { v } else { -v }).unwrap();
            }
            out.push_str(" 0\n");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Leave transitivity to the solver's equality theory instead of
    /// emitting transitivity clauses.
    pub use_theory: bool,
    /// Pairs touching this state get no soft clause.
    pub sink: Option<StateId>,
}

/// Value of `X{p,q}` before solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Term {
    True,
    False,
    Var(VarId),
}

/// Accumulates one clause, folding constants as literals are added.
struct ClauseBuilder {
    lits: Vec<Lit>,
    satisfied: bool,
}

impl ClauseBuilder {
    fn new() -> Self {
        ClauseBuilder {
            lits: Vec::new(),
            satisfied: false,
        }
    }

    fn neg(&mut self, t: Term) -> &mut Self {
        match t {
            Term::True => {}
            Term::False => self.satisfied = true,
            Term::Var(v) => self.lits.push(Lit::neg(v)),
        }
        self
    }

    fn pos(&mut self, t: Term) -> &mut Self {
        match t {
            Term::True => self.satisfied = true,
            Term::False => {}
            Term::Var(v) => self.lits.push(Lit::pos(v)),
        }
        self
    }

    /// The simplified literals, or `None` if the clause is trivially true.
    fn finish(mut self) -> Option<Vec<Lit>> {
        if self.satisfied {
            return None;
        }
        self.lits.sort_unstable();
        self.lits.dedup();
        let tautology = self.lits.windows(2).any(|w| w[0].var == w[1].var);
        (!tautology).then_some(self.lits)
    }
}

/// Builds the PMax-SAT instance whose hard-satisfying assignments are the
/// quotienting relations of `vpa` refining `seed`.
///
/// `vpa` must be live at least for returns and `tops` must be its tops map.
pub fn build_instance(
    vpa: &Vpa,
    tops: &TopsMap,
    seed: &StatePartition,
    options: EncodeOptions,
) -> Result<ClauseDb, VpaError> {
    check_live(vpa, tops, LiveMode::ReturnsOnly)?;
    if seed.num_states() != vpa.num_states() {
        return Err(VpaError::PartitionMismatch(format!(
            "seed has {} states, automaton {}",
            seed.num_states(),
            vpa.num_states()
        )));
    }

    let mut pairs: Vec<PairVar> = Vec::new();
    for block in seed.blocks() {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                pairs.push(PairVar::new(p, q).unwrap());
            }
        }
    }
    pairs.sort_unstable();
    let var_of: HashMap<PairVar, VarId> = pairs
        .iter()
        .enumerate()
        .map(|(i, &pv)| (pv, VarId(i as u32)))
        .collect();
    let term = |p: StateId, q: StateId| match PairVar::new(p, q) {
        None => Term::True,
        Some(pv) => var_of.get(&pv).map_or(Term::False, |&v| Term::Var(v)),
    };

    let mut db = ClauseDb {
        num_vars: pairs.len(),
        theory: options.use_theory,
        ..Default::default()
    };
    let mut seen: HashSet<Vec<Lit>> = HashSet::new();
    let mut emit = |db: &mut ClauseDb, b: ClauseBuilder, family: Family| {
        if let Some(lits) = b.finish() {
            if seen.insert(lits.clone()) {
                db.push(Clause {
                    lits,
                    kind: ClauseKind::Hard,
                    family,
                });
            }
        }
    };

    // Acceptance. Only reachable with a seed that ignores acceptance.
    for &pv in &pairs {
        if vpa.is_accepting(pv.lo) != vpa.is_accepting(pv.hi) {
            let mut b = ClauseBuilder::new();
            b.neg(term(pv.lo, pv.hi));
            emit(&mut db, b, Family::Acceptance);
        }
    }

    // Internal and call successors, for both orientations of each pair.
    for &pv in &pairs {
        for (p, q) in [(pv.lo, pv.hi), (pv.hi, pv.lo)] {
            for t in vpa.transitions_from(p) {
                let family = match vpa.alphabet().kind(t.symbol) {
                    Some(SymbolKind::Internal) => Family::Internal,
                    _ => Family::Call,
                };
                let mut b = ClauseBuilder::new();
                b.neg(term(p, q));
                for &s in vpa.successors(q, t.symbol) {
                    b.pos(term(t.dst, s));
                }
                emit(&mut db, b, family);
            }
        }
    }

    // Return successors, for every ordered related-or-equal pair (p, q) and
    // every ordered stack pair. p = q is included: it is what keeps two
    // stack symbols with different return behaviour apart.
    for p in vpa.states() {
        for &q in seed.block(p) {
            for t in vpa.returns_from(p) {
                let p_stack = t.stack;
                for &q_stack in seed.block(p_stack) {
                    if !tops.has_state(p, p_stack) || !tops.has_state(q, q_stack) {
                        db.stats.omitted_returns += 1;
                        continue;
                    }
                    let mut b = ClauseBuilder::new();
                    b.neg(term(p, q)).neg(term(p_stack, q_stack));
                    for &s in vpa.return_successors(q, t.symbol, q_stack) {
                        b.pos(term(t.dst, s));
                    }
                    emit(&mut db, b, Family::Return);
                }
            }
        }
    }

    if !options.use_theory {
        for block in seed.blocks() {
            for (i, &a) in block.iter().enumerate() {
                for (j, &b) in block.iter().enumerate().skip(i + 1) {
                    for &c in &block[j + 1..] {
                        for (x, y, z) in [(a, b, c), (b, a, c), (c, a, b)] {
                            // X{x,y} ∧ X{x,z} → X{y,z}
                            let mut cb = ClauseBuilder::new();
                            cb.neg(term(x, y)).neg(term(x, z)).pos(term(y, z));
                            emit(&mut db, cb, Family::Transitivity);
                        }
                    }
                }
            }
        }
    }

    for (i, &pv) in pairs.iter().enumerate() {
        if options.sink.is_some_and(|s| pv.touches(s)) {
            continue;
        }
        db.push(Clause {
            lits: vec![Lit::pos(VarId(i as u32))],
            kind: ClauseKind::Soft,
            family: Family::Soft,
        });
    }

    db.pairs = pairs;
    db.var_of = var_of;
    Ok(db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;
    use crate::partition::initial_partition;
    use crate::prepare::make_live;
    use crate::tops::compute_tops;
    use crate::{Alphabet, VpaBuilder};

    fn instance(v: &Vpa, use_theory: bool) -> ClauseDb {
        let tops = compute_tops(v);
        build_instance(
            v,
            &tops,
            &initial_partition(v),
            EncodeOptions {
                use_theory,
                sink: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn one_state_instance_is_empty() {
        let mut b = VpaBuilder::new(Alphabet::new());
        let q = b.state("q");
        b.initial(q);
        let db = instance(&b.build(), false);
        assert_eq!(db.num_vars(), 0);
        assert!(db.clauses().is_empty());
    }

    #[test]
    fn two_final_states_one_var_one_soft() {
        let mut b = VpaBuilder::new(Alphabet::new());
        let (p, q) = (b.state("p"), b.state("q"));
        b.initial(p).accepting(p).accepting(q);
        let db = instance(&b.build(), false);
        assert_eq!(db.num_vars(), 1);
        assert_eq!(db.stats().hard(), 0);
        assert_eq!(db.stats().soft, 1);
    }

    #[test]
    fn fig1x_instance() {
        let v = fixtures::fig1x();
        let db = instance(&v, true);
        let q = |n| v.state(n);
        assert_eq!(db.num_vars(), 3);
        let x13 = db.var(q("q1"), q("q3")).unwrap();
        let units: Vec<_> = db
            .hard_clauses()
            .filter(|c| c.lits.len() == 1)
            .map(|c| c.lits[0])
            .collect();
        assert_eq!(units, vec![Lit::neg(x13)]);
        assert_eq!(db.stats().transitivity, 0);
    }

    #[test]
    fn fig2x_forces_stack_symbols_apart() {
        let v = make_live(&fixtures::fig2x(), LiveMode::ReturnsOnly).vpa;
        let db = instance(&v, true);
        let x12 = db.var(v.state("q1"), v.state("q2")).unwrap();
        assert!(db
            .hard_clauses()
            .any(|c| c.family == Family::Return && c.lits == vec![Lit::neg(x12)]));
    }

    #[test]
    fn non_live_is_rejected() {
        let v = fixtures::fig2x();
        let tops = compute_tops(&v);
        assert!(matches!(
            build_instance(&v, &tops, &initial_partition(&v), EncodeOptions::default()),
            Err(VpaError::NotLive(_))
        ));
    }

    #[test]
    fn transitivity_clauses_only_without_theory() {
        let v = fixtures::sevpa(3);
        let with = instance(&v, false);
        let without = instance(&v, true);
        // Three module states in one block: one triple, three clauses.
        assert_eq!(with.stats().transitivity, 3);
        assert_eq!(without.stats().transitivity, 0);
    }

    #[test]
    fn wcnf_header_and_weights() {
        let v = fixtures::fig1x();
        let db = instance(&v, true);
        let text = db.to_wcnf(v.state_names());
        assert!(text.contains("c var 1 = {q1,q2}"));
        assert!(text.contains(&format!("p wcnf 3 {} 4", db.clauses().len())));
        assert!(text.lines().any(|l| l == "4 -2 0"));
        assert!(text.lines().any(|l| l == "1 1 0"));
    }
}
