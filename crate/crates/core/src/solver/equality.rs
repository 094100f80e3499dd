//! Backtrackable equality reasoning over states.
//!
//! A union-find forest where every union hangs both roots under a fresh
//! temporary node. Temporary nodes are recorded per frame, so popping a frame
//! detaches exactly the unions made since the matching push. Paths are never
//! compressed, which keeps undo a matter of resetting two parent links.

use crate::encode::PairVar;
use crate::error::VpaError;
use crate::vpa::StateId;

/// A node of the forest: a state (`< num_states`) or a temporary node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub u32);

#[derive(Clone, Debug)]
pub struct EqualityContext {
    num_states: usize,
    parent: Vec<u32>,
    /// Children of temporary node `num_states + i`.
    children: Vec<(u32, u32)>,
    /// Number of temporary nodes alive when each open frame was pushed.
    frames: Vec<usize>,
}

impl EqualityContext {
    pub fn new(num_states: usize) -> Self {
        EqualityContext {
            num_states,
            parent: (0..num_states as u32).collect(),
            children: Vec::new(),
            frames: Vec::new(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Number of open frames.
    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    fn root(&self, mut node: u32) -> u32 {
        while self.parent[node as usize] != node {
            node = self.parent[node as usize];
        }
        node
    }

    pub fn find(&self, q: StateId) -> NodeId {
        NodeId(self.root(q.0))
    }

    /// Root of an arbitrary node; `find_node(find(q)) == find(q)`.
    pub fn find_node(&self, node: NodeId) -> NodeId {
        NodeId(self.root(node.0))
    }

    pub fn same(&self, p: StateId, q: StateId) -> bool {
        self.root(p.0) == self.root(q.0)
    }

    fn collect_members(&self, node: u32, out: &mut Vec<StateId>) {
        if (node as usize) < self.num_states {
            out.push(StateId(node));
        } else {
            let (a, b) = self.children[node as usize - self.num_states];
            self.collect_members(a, out);
            self.collect_members(b, out);
        }
    }

    /// States in the class of `q`, ascending.
    pub fn class_of(&self, q: StateId) -> Vec<StateId> {
        let mut out = Vec::new();
        self.collect_members(self.root(q.0), &mut out);
        out.sort_unstable();
        out
    }

    /// Merges the classes of `p` and `q` and returns the pairs that became
    /// equal, other than `{p, q}` itself. Empty if already merged.
    pub fn assert_equal(&mut self, p: StateId, q: StateId) -> Vec<PairVar> {
        let (rp, rq) = (self.root(p.0), self.root(q.0));
        if rp == rq {
            return Vec::new();
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        self.collect_members(rp, &mut left);
        self.collect_members(rq, &mut right);

        let temp = self.parent.len() as u32;
        self.parent.push(temp);
        self.children.push((rp, rq));
        self.parent[rp as usize] = temp;
        self.parent[rq as usize] = temp;

        let asserted = PairVar::new(p, q);
        let mut implied = Vec::with_capacity(left.len() * right.len());
        for &a in &left {
            for &b in &right {
                let pv = PairVar::new(a, b).expect("classes are disjoint");
                if Some(pv) != asserted {
                    implied.push(pv);
                }
            }
        }
        implied.sort_unstable();
        implied
    }

    pub fn push_frame(&mut self) {
        self.frames.push(self.children.len());
    }

    /// Undoes every union made since the matching [`push_frame`](Self::push_frame).
    pub fn pop_frame(&mut self) -> Result<(), VpaError> {
        let mark = self.frames.pop().ok_or(VpaError::FrameUnderflow)?;
        while self.children.len() > mark {
            let (a, b) = self.children.pop().unwrap();
            self.parent.pop();
            self.parent[a as usize] = a;
            self.parent[b as usize] = b;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const Q1: StateId = StateId(1);
    const Q2: StateId = StateId(2);
    const Q3: StateId = StateId(3);

    #[test]
    fn transitivity_is_reported() {
        let mut ctx = EqualityContext::new(4);
        assert!(ctx.assert_equal(Q1, Q2).is_empty());
        assert_eq!(
            ctx.assert_equal(Q2, Q3),
            vec![PairVar::new(Q1, Q3).unwrap()]
        );
    }

    #[test]
    fn repeated_assert_is_empty() {
        let mut ctx = EqualityContext::new(4);
        ctx.assert_equal(Q1, Q2);
        assert!(ctx.assert_equal(Q1, Q2).is_empty());
        assert!(ctx.assert_equal(Q2, Q1).is_empty());
    }

    #[test]
    fn frames_undo_unions() {
        let mut ctx = EqualityContext::new(4);
        ctx.assert_equal(Q1, Q2);
        ctx.push_frame();
        ctx.assert_equal(Q2, Q3);
        assert!(ctx.same(Q1, Q3));
        ctx.pop_frame().unwrap();
        assert!(!ctx.same(Q1, Q3));
        assert!(ctx.same(Q1, Q2));
    }

    #[test]
    fn nested_frames() {
        let mut ctx = EqualityContext::new(5);
        ctx.push_frame();
        ctx.assert_equal(Q1, Q2);
        ctx.push_frame();
        ctx.assert_equal(Q3, StateId(4));
        ctx.pop_frame().unwrap();
        assert!(ctx.same(Q1, Q2));
        assert!(!ctx.same(Q3, StateId(4)));
        assert_eq!(ctx.class_of(Q2), vec![Q1, Q2]);
    }

    #[test]
    fn pop_on_empty_is_an_error() {
        let mut ctx = EqualityContext::new(2);
        assert_eq!(ctx.pop_frame(), Err(VpaError::FrameUnderflow));
    }

    #[test]
    fn find_is_idempotent() {
        let mut ctx = EqualityContext::new(4);
        ctx.assert_equal(Q1, Q2);
        ctx.assert_equal(Q3, Q1);
        for q in 0..4 {
            let r = ctx.find(StateId(q));
            assert_eq!(ctx.find_node(r), r);
        }
    }

    /// Naive model: the list of asserted pairs per frame, closed from scratch.
    fn naive_classes(n: usize, frames: &[Vec<(StateId, StateId)>]) -> Vec<usize> {
        let mut label: Vec<usize> = (0..n).collect();
        loop {
            let mut changed = false;
            for &(p, q) in frames.iter().flatten() {
                let (a, b) = (label[p.index()], label[q.index()]);
                if a != b {
                    let m = a.min(b);
                    for l in label.iter_mut() {
                        if *l == a || *l == b {
                            *l = m;
                        }
                    }
                    changed = true;
                }
            }
            if !changed {
                return label;
            }
        }
    }

    #[test]
    fn random_push_assert_pop_matches_recompute() {
        let n = 8;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ctx = EqualityContext::new(n);
            let mut model: Vec<Vec<(StateId, StateId)>> = vec![Vec::new()];
            for _ in 0..40 {
                match rng.random_range(0..3) {
                    0 => {
                        ctx.push_frame();
                        model.push(Vec::new());
                    }
                    1 if model.len() > 1 => {
                        ctx.pop_frame().unwrap();
                        model.pop();
                    }
                    _ => {
                        let p = StateId(rng.random_range(0..n as u32));
                        let q = StateId(rng.random_range(0..n as u32));
                        let before = naive_classes(n, &model);
                        let implied = ctx.assert_equal(p, q);
                        model.last_mut().unwrap().push((p, q));
                        let after = naive_classes(n, &model);
                        let mut fresh: Vec<PairVar> = Vec::new();
                        for a in 0..n {
                            for b in a + 1..n {
                                if before[a] != before[b] && after[a] == after[b] {
                                    let pv = PairVar::new(StateId(a as u32), StateId(b as u32));
                                    if pv != PairVar::new(p, q) {
                                        fresh.push(pv.unwrap());
                                    }
                                }
                            }
                        }
                        assert_eq!(implied, fresh, "seed {seed}");
                    }
                }
                let expect = naive_classes(n, &model);
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(
                            ctx.same(StateId(a as u32), StateId(b as u32)),
                            expect[a] == expect[b],
                            "seed {seed}"
                        );
                    }
                }
            }
        }
    }
}
