use smallvec::SmallVec;

use super::{NodeList, Topology, TreeError};
use crate::NodeId;

/// A complete tree whose structure is computed from node ids.
///
/// Structural ids are assigned level by level, left to right: the apex is 0,
/// it has `root_children` children, and every other internal node has
/// `branching` children. The searcher's root σ and the treasure τ may be any
/// two nodes; all [`Topology`] answers are relative to σ. Numbering matches
/// [`super::build_complete_ary`] when σ is the apex.
#[derive(Clone, Debug)]
pub struct CompleteAryTree {
    branching: u64,
    root_children: u64,
    depth: usize,
    /// `offsets[k]` is the first id on level `k`; `offsets[depth + 1]` is n.
    offsets: Vec<u64>,
    sigma: NodeId,
    tau: NodeId,
    /// Structural ancestors of σ indexed by level, σ included.
    chain: Vec<NodeId>,
    treasure_path: Vec<NodeId>,
    max_depth: usize,
}

impl CompleteAryTree {
    pub fn new(
        branching: usize,
        root_children: usize,
        depth: usize,
        sigma: NodeId,
        tau: NodeId,
    ) -> Result<Self, TreeError> {
        if branching < 2 || (depth > 0 && root_children < 1) {
            return Err(TreeError::Invalid(format!(
                "complete tree needs branching >= 2 and root_children >= 1, got {branching}/{root_children}"
            )));
        }
        let (b, r) = (branching as u64, root_children as u64);
        let mut offsets = vec![0u64, 1];
        let mut width = r;
        for _ in 1..=depth {
            let last = *offsets.last().unwrap();
            let next = last
                .checked_add(width)
                .ok_or_else(|| TreeError::Invalid("node count overflows u64".into()))?;
            offsets.push(next);
            width = width.saturating_mul(b);
        }
        let n = offsets[depth + 1];
        for id in [sigma, tau] {
            if id as u64 >= n {
                return Err(TreeError::OutOfRange(id));
            }
        }
        let mut t = CompleteAryTree {
            branching: b,
            root_children: r,
            depth,
            offsets,
            sigma,
            tau,
            chain: Vec::new(),
            treasure_path: Vec::new(),
            max_depth: 0,
        };
        let mut chain = vec![sigma];
        let mut cur = sigma;
        while let Some(p) = t.structural_parent(cur) {
            chain.push(p);
            cur = p;
        }
        chain.reverse();
        t.chain = chain;
        t.treasure_path = t.compute_treasure_path();
        t.max_depth = t.compute_max_depth();
        Ok(t)
    }

    /// Apex as root, treasure at `tau`.
    pub fn rooted(branching: usize, root_children: usize, depth: usize, tau: NodeId) -> Result<Self, TreeError> {
        Self::new(branching, root_children, depth, 0, tau)
    }

    pub fn branching(&self) -> usize {
        self.branching as usize
    }

    pub fn root_children(&self) -> usize {
        self.root_children as usize
    }

    /// Depth of the structural tree (apex to leaves).
    pub fn structural_depth(&self) -> usize {
        self.depth
    }

    /// First id on structural level `k`.
    pub fn level_start(&self, k: usize) -> NodeId {
        self.offsets[k] as NodeId
    }

    /// Last id on structural level `k`.
    pub fn level_end(&self, k: usize) -> NodeId {
        (self.offsets[k + 1] - 1) as NodeId
    }

    pub fn level(&self, x: NodeId) -> usize {
        self.offsets.partition_point(|&o| o <= x as u64) - 1
    }

    pub fn structural_parent(&self, x: NodeId) -> Option<NodeId> {
        let k = self.level(x);
        match k {
            0 => None,
            1 => Some(0),
            _ => {
                let idx = x as u64 - self.offsets[k];
                Some((self.offsets[k - 1] + idx / self.branching) as NodeId)
            }
        }
    }

    pub fn structural_children(&self, x: NodeId) -> std::ops::Range<NodeId> {
        let k = self.level(x);
        if k == self.depth {
            return 0..0;
        }
        if k == 0 {
            return self.offsets[1] as NodeId..self.offsets[2] as NodeId;
        }
        let idx = x as u64 - self.offsets[k];
        let start = self.offsets[k + 1] + idx * self.branching;
        start as NodeId..(start + self.branching) as NodeId
    }

    fn on_chain(&self, x: NodeId, level: usize) -> bool {
        level < self.chain.len() && self.chain[level] == x
    }

    fn structural_leaves_below(&self, x: NodeId) -> u64 {
        let k = self.level(x);
        if k == self.depth {
            return 1;
        }
        let below = (self.depth - k) as u32;
        if k == 0 {
            self.root_children * self.branching.pow(below - 1)
        } else {
            self.branching.pow(below)
        }
    }

    fn compute_treasure_path(&self) -> Vec<NodeId> {
        let mut down = vec![self.tau];
        let mut cur = self.tau;
        loop {
            let k = self.level(cur);
            if self.on_chain(cur, k) {
                break;
            }
            cur = self.structural_parent(cur).expect("apex is on the chain");
            down.push(cur);
        }
        let meet = self.level(cur);
        let mut path: Vec<NodeId> = self.chain[meet..].iter().rev().copied().collect();
        path.pop();
        path.extend(down.into_iter().rev());
        path
    }

    fn compute_max_depth(&self) -> usize {
        let ls = self.chain.len() - 1;
        let mut best = (self.depth - ls).max(ls);
        for k in 0..ls {
            let fanout = if k == 0 { self.root_children } else { self.branching };
            if fanout >= 2 {
                best = best.max((ls - k) + (self.depth - k));
            }
        }
        best
    }
}

impl Topology for CompleteAryTree {
    fn node_count(&self) -> u64 {
        self.offsets[self.depth + 1]
    }

    fn root(&self) -> NodeId {
        self.sigma
    }

    fn treasure(&self) -> NodeId {
        self.tau
    }

    fn parent(&self, u: NodeId) -> Option<NodeId> {
        if u == self.sigma {
            return None;
        }
        let k = self.level(u);
        if self.on_chain(u, k) {
            Some(self.chain[k + 1])
        } else {
            self.structural_parent(u)
        }
    }

    fn children(&self, u: NodeId) -> NodeList<'_> {
        let k = self.level(u);
        if !self.on_chain(u, k) {
            return NodeList::Range(self.structural_children(u));
        }
        let mut out: SmallVec<[NodeId; 8]> = SmallVec::new();
        out.extend(self.structural_parent(u));
        let skip = self.chain.get(k + 1).copied();
        out.extend(self.structural_children(u).filter(|&c| Some(c) != skip));
        NodeList::Owned(out)
    }

    fn degree(&self, u: NodeId) -> usize {
        let k = self.level(u);
        if k == 0 {
            if self.depth == 0 {
                0
            } else {
                self.root_children as usize
            }
        } else if k == self.depth {
            1
        } else {
            self.branching as usize + 1
        }
    }

    fn depth(&self, u: NodeId) -> usize {
        let ku = self.level(u);
        let mut a = u;
        let mut ka = ku;
        while !self.on_chain(a, ka) {
            a = self.structural_parent(a).expect("apex is on the chain");
            ka -= 1;
        }
        (ku - ka) + (self.chain.len() - 1 - ka)
    }

    fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn treasure_path(&self) -> &[NodeId] {
        &self.treasure_path
    }

    fn max_degree(&self) -> usize {
        match self.depth {
            0 => 0,
            1 => self.root_children as usize,
            _ => (self.root_children as usize).max(self.branching as usize + 1),
        }
    }

    fn leaf_count(&self, u: NodeId) -> u64 {
        if self.depth == 0 {
            return 1;
        }
        let k = self.level(u);
        if !self.on_chain(u, k) {
            return self.structural_leaves_below(u);
        }
        let mut total = self.structural_leaves_below(0);
        if let Some(&next) = self.chain.get(k + 1) {
            total -= self.structural_leaves_below(next);
        }
        if u == self.sigma && k == self.depth {
            // σ is a structural leaf but roots the searcher's tree
            total -= 1;
        }
        if self.root_children == 1 && self.sigma != 0 {
            total += 1;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_complete_ary, CompleteAry};

    #[test]
    fn apex_rooted_matches_explicit() {
        let explicit = build_complete_ary(3, 3, 2).unwrap();
        let implicit = CompleteAry::new(3, 3, 2).implicit().unwrap();
        assert_eq!(implicit.node_count(), explicit.len() as u64);
        for u in explicit.nodes() {
            assert_eq!(implicit.parent(u), explicit.parent(u));
            assert_eq!(implicit.children(u).to_vec(), explicit.child_slice(u));
            assert_eq!(implicit.degree(u), explicit.degree(u));
            assert_eq!(implicit.depth(u), explicit.depth(u));
            assert_eq!(implicit.leaf_count(u), explicit.leaf_count(u));
        }
        assert_eq!(implicit.treasure_path(), explicit.treasure_path());
        assert_eq!(implicit.max_depth(), 3);
    }

    #[test]
    fn rerooted_at_leaf() {
        // binary, depth 2: 0 | 1 2 | 3 4 5 6 ; σ = 3, τ = 0
        let t = CompleteAryTree::new(2, 2, 2, 3, 0).unwrap();
        assert_eq!(t.parent(3), None);
        assert_eq!(t.children(3).to_vec(), vec![1]);
        assert_eq!(t.children(1).to_vec(), vec![0, 4]);
        assert_eq!(t.children(0).to_vec(), vec![2]);
        assert_eq!(t.parent(0), Some(1));
        assert_eq!(t.depth(6), 4);
        assert_eq!(t.depth(0), 2);
        assert_eq!(t.max_depth(), 4);
        assert_eq!(t.treasure_path(), &[3, 1, 0]);
        assert_eq!(t.toward_treasure(4), Some(1));
        assert_eq!(t.toward_treasure(2), Some(0));
        assert_eq!(t.degree(3), 1);
        // leaves of the searcher's tree: 4, 5, 6
        assert_eq!(t.leaf_count(3), 3);
        assert_eq!(t.leaf_count(0), 2);
    }
}
