use std::collections::HashMap;
use std::hash::Hash;

use crate::alphabet::{SymbolId, SymbolKind};
use crate::error::VpaError;
use crate::vpa::{StateId, Vpa};

/// An equivalence relation over `0..n` states, stored as disjoint blocks.
///
/// The representation is canonical: states inside a block are ascending and
/// blocks are ordered by their least state, so two partitions are equal iff
/// they denote the same relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StatePartition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<StateId>>,
}

impl StatePartition {
    /// Builds a partition from arbitrary per-state labels; equal labels share
    /// a block.
    pub fn from_labels<L: Eq + Hash>(labels: &[L]) -> Self {
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            let next = ids.len();
            let b = *ids.entry(l).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(StateId(i as u32));
            block_of.push(b);
        }
        StatePartition { block_of, blocks }
    }

    /// Every state alone.
    pub fn discrete(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// All states in one block.
    pub fn single(n: usize) -> Self {
        Self::from_labels(&vec![0u8; n])
    }

    /// Builds a partition from explicit blocks, which must cover `0..n`
    /// exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<StateId>]) -> Result<Self, VpaError> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(VpaError::PartitionMismatch("empty block".into()));
            }
            for q in block {
                let slot = labels.get_mut(q.index()).ok_or_else(|| {
                    VpaError::PartitionMismatch(format!("state #{} out of range", q.0))
                })?;
                if *slot != usize::MAX {
                    return Err(VpaError::PartitionMismatch(format!(
                        "state #{} in two blocks",
                        q.0
                    )));
                }
                *slot = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(VpaError::PartitionMismatch(format!(
                "state #{i} not covered"
            )));
        }
        Ok(Self::from_labels(&labels))
    }

    /// The discrete partition with the given groups merged.
    pub fn with_groups(n: usize, groups: &[Vec<StateId>]) -> Self {
        let mut labels: Vec<usize> = (0..n).collect();
        for g in groups {
            if let Some(first) = g.first() {
                let target = labels[first.index()];
                for q in g {
                    let old = labels[q.index()];
                    for l in labels.iter_mut() {
                        if *l == old {
                            *l = target;
                        }
                    }
                }
            }
        }
        Self::from_labels(&labels)
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_of(&self, q: StateId) -> usize {
        self.block_of[q.index()]
    }

    pub fn block(&self, q: StateId) -> &[StateId] {
        &self.blocks[self.block_of(q)]
    }

    pub fn same_block(&self, p: StateId, q: StateId) -> bool {
        self.block_of[p.index()] == self.block_of[q.index()]
    }

    /// This partition with the blocks of `p` and `q` united.
    pub fn merged(&self, p: StateId, q: StateId) -> Self {
        let (bp, bq) = (self.block_of(p), self.block_of(q));
        let labels: Vec<usize> = self
            .block_of
            .iter()
            .map(|&b| if b == bq { bp } else { b })
            .collect();
        Self::from_labels(&labels)
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &StatePartition) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&q| coarser.same_block(q, b[0])))
    }

    /// Per-state block labels.
    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }
}

/// Coarsest partition such that states in a block agree on acceptance and
/// on their sets of outgoing internal and call symbols, and, for a symbol
/// under which every state of the block has exactly one successor, those
/// successors share a block.
///
/// Any quotienting relation refines this partition, so pairs split here can
/// be fixed to false before encoding.
pub fn initial_partition(vpa: &Vpa) -> StatePartition {
    let alphabet = vpa.alphabet();
    let symbols: Vec<SymbolId> = alphabet
        .symbols()
        .filter(|&s| alphabet.kind(s) != Some(SymbolKind::Return))
        .collect();

    let signatures: Vec<(bool, Vec<SymbolId>)> = vpa
        .states()
        .map(|q| {
            let mut out: Vec<SymbolId> = vpa.transitions_from(q).iter().map(|t| t.symbol).collect();
            out.dedup();
            (vpa.is_accepting(q), out)
        })
        .collect();
    let mut part = StatePartition::from_labels(&signatures);

    loop {
        // For each block and symbol: is the successor unique for every member?
        let unique: Vec<Vec<bool>> = part
            .blocks()
            .iter()
            .map(|block| {
                symbols
                    .iter()
                    .map(|&s| block.iter().all(|&q| vpa.successors(q, s).len() == 1))
                    .collect()
            })
            .collect();
        let labels: Vec<(usize, Vec<Option<usize>>)> = vpa
            .states()
            .map(|q| {
                let b = part.block_of(q);
                let succ = symbols
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| unique[b][i].then(|| part.block_of(vpa.successors(q, s)[0])))
                    .collect();
                (b, succ)
            })
            .collect();
        let next = StatePartition::from_labels(&labels);
        if next.num_blocks() == part.num_blocks() {
            return part;
        }
        part = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures;
    use crate::{Alphabet, VpaBuilder};

    #[test]
    fn canonical_form() {
        let a = StatePartition::from_labels(&[5, 3, 5, 9]);
        let b = StatePartition::from_blocks(
            4,
            &[
                vec![StateId(1)],
                vec![StateId(3)],
                vec![StateId(2), StateId(0)],
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.blocks()[0], vec![StateId(0), StateId(2)]);
    }

    #[test]
    fn from_blocks_rejects_bad_cover() {
        assert!(StatePartition::from_blocks(3, &[vec![StateId(0), StateId(1)]]).is_err());
        assert!(
            StatePartition::from_blocks(2, &[vec![StateId(0), StateId(1)], vec![StateId(1)]])
                .is_err()
        );
        assert!(StatePartition::from_blocks(1, &[vec![StateId(3)]]).is_err());
    }

    #[test]
    fn merged_and_refines() {
        let d = StatePartition::discrete(4);
        let m = d
            .merged(StateId(1), StateId(3))
            .merged(StateId(3), StateId(0));
        assert_eq!(m.num_blocks(), 2);
        assert!(d.refines(&m));
        assert!(!m.refines(&d));
        assert_eq!(
            m,
            StatePartition::with_groups(4, &[vec![StateId(0), StateId(1), StateId(3)]])
        );
    }

    #[test]
    fn fig1x_initial_partition() {
        let v = fixtures::fig1x();
        let p = initial_partition(&v);
        let q = |n| v.state(n);
        assert!(p.same_block(q("q1"), q("q3")));
        assert!(p.same_block(q("q1"), q("q2")));
        assert!(!p.same_block(q("qf"), q("q0")));
        assert!(!p.same_block(q("q4"), q("q1")));
        assert_eq!(p.num_blocks(), 4);
    }

    #[test]
    fn all_final_no_transitions_is_one_block() {
        let mut b = VpaBuilder::new(Alphabet::from_names(&["a"], &["c"], &["r"]).unwrap());
        for n in ["p", "q", "s"] {
            let id = b.state(n);
            b.accepting(id);
        }
        let p = b.state("p");
        b.initial(p);
        assert_eq!(initial_partition(&b.build()).num_blocks(), 1);
    }

    #[test]
    fn unique_successor_splits() {
        // p -a-> x (final), q -a-> y (non-final): p and q must separate.
        let mut b = VpaBuilder::new(Alphabet::from_names(&["a"], &[] as &[&str], &[]).unwrap());
        b.edge("p", "a", None, "x").edge("q", "a", None, "y");
        let (p, x) = (b.state("p"), b.state("x"));
        b.initial(p).accepting(x);
        let v = b.build();
        let part = initial_partition(&v);
        assert!(!part.same_block(v.state("p"), v.state("q")));
    }
}
