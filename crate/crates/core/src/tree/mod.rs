//! Rooted trees with a treasure node.
//!
//! [`Topology`] is what the algorithms consume. [`Tree`] stores a tree
//! explicitly; [`CompleteAryTree`] computes the structure of a complete tree on
//! demand, which lets walking algorithms run on trees far larger than memory.

mod centroid;
mod generators;
mod implicit;
mod io;
mod measures;
mod path;

use std::ops::Range;

use smallvec::SmallVec;
use thiserror::Error;

use crate::NodeId;

pub use centroid::CentroidTree;
pub use generators::{
    apex_implicit, build_apex, build_caterpillar, build_complete_ary, build_heap_ary, build_path,
    build_random, build_star, build_trimmed_ary, CompleteAry, Placement,
};
pub use implicit::CompleteAryTree;
pub use measures::{beta, log_beta, theta, weighted_sums_check};
pub use path::{path_between, NodePath};

/// Generators refuse to materialize trees larger than this.
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree has no nodes")]
    Empty,
    #[error("tree would have {nodes} nodes, above the budget of {budget}")]
    Budget { nodes: u128, budget: u64 },
    #[error("node id {0} out of range")]
    OutOfRange(NodeId),
    #[error("node {0} listed more than once")]
    Duplicate(NodeId),
    #[error("node {0} has no parent line")]
    MissingParent(NodeId),
    #[error("parent links contain a cycle or the graph is disconnected")]
    NotATree,
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A list of nodes that is either borrowed, a contiguous id range, or small
/// and owned.
#[derive(Clone, Debug)]
pub enum NodeList<'a> {
    Slice(&'a [NodeId]),
    Range(Range<NodeId>),
    Owned(SmallVec<[NodeId; 8]>),
}

impl NodeList<'_> {
    pub fn len(&self) -> usize {
        match self {
            NodeList::Slice(s) => s.len(),
            NodeList::Range(r) => r.len(),
            NodeList::Owned(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> NodeId {
        match self {
            NodeList::Slice(s) => s[i],
            NodeList::Range(r) => {
                assert!(i < r.len());
                r.start + i
            }
            NodeList::Owned(v) => v[i],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

/// Read access to a rooted tree with a treasure.
///
/// `parent`, `children` and `depth` are relative to the root σ. Neighbors are
/// ordered parent first, then children.
pub trait Topology: Sync {
    fn node_count(&self) -> u64;
    fn root(&self) -> NodeId;
    fn treasure(&self) -> NodeId;
    fn parent(&self, u: NodeId) -> Option<NodeId>;
    fn children(&self, u: NodeId) -> NodeList<'_>;
    /// Graph degree: children, plus one unless `u` is the root.
    fn degree(&self, u: NodeId) -> usize;
    fn depth(&self, u: NodeId) -> usize;
    /// Depth of the deepest node.
    fn max_depth(&self) -> usize;
    /// Nodes from σ to τ, both included.
    fn treasure_path(&self) -> &[NodeId];
    /// Number of leaves in the subtree rooted at `u`.
    fn leaf_count(&self, u: NodeId) -> u64;
    fn max_degree(&self) -> usize;

    fn treasure_depth(&self) -> usize {
        self.treasure_path().len() - 1
    }

    /// The neighbor of `u` on the path toward τ, or `None` at τ.
    fn toward_treasure(&self, u: NodeId) -> Option<NodeId> {
        let path = self.treasure_path();
        if u == self.treasure() {
            return None;
        }
        let d = self.depth(u);
        if d + 1 < path.len() && path[d] == u {
            Some(path[d + 1])
        } else {
            self.parent(u)
        }
    }

    fn nth_neighbor(&self, u: NodeId, i: usize) -> NodeId {
        match self.parent(u) {
            Some(p) if i == 0 => p,
            Some(_) => self.children(u).get(i - 1),
            None => self.children(u).get(i),
        }
    }

    fn neighbors(&self, u: NodeId) -> SmallVec<[NodeId; 8]> {
        let mut out = SmallVec::new();
        out.extend(self.parent(u));
        out.extend(self.children(u).iter());
        out
    }

    fn is_neighbor(&self, u: NodeId, v: NodeId) -> bool {
        self.parent(u) == Some(v) || self.parent(v) == Some(u)
    }

    /// Downcast for algorithms that need random access to every node.
    fn as_tree(&self) -> Option<&Tree> {
        None
    }
}

/// An explicitly stored tree. Node 0 is the root; children lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<NodeId>>,
    child_start: Vec<usize>,
    child_list: Vec<NodeId>,
    depth: Vec<usize>,
    leaves: Vec<u64>,
    bfs: Vec<NodeId>,
    treasure: NodeId,
    treasure_path: Vec<NodeId>,
    max_depth: usize,
    max_degree: usize,
}

impl Tree {
    /// Builds a tree from parent links. Node 0 must be the only node without
    /// a parent.
    pub fn from_parents(parent: Vec<Option<NodeId>>, treasure: NodeId) -> Result<Tree, TreeError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if treasure >= n {
            return Err(TreeError::OutOfRange(treasure));
        }
        if parent[0].is_some() {
            return Err(TreeError::Invalid("node 0 must be the root".into()));
        }
        let mut child_count = vec![0usize; n];
        for (v, p) in parent.iter().enumerate().skip(1) {
            match *p {
                None => return Err(TreeError::MissingParent(v)),
                Some(p) if p >= n => return Err(TreeError::OutOfRange(p)),
                Some(p) if p == v => return Err(TreeError::NotATree),
                Some(p) => child_count[p] += 1,
            }
        }
        let mut child_start = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for &c in &child_count {
            child_start.push(acc);
            acc += c;
        }
        child_start.push(acc);
        let mut fill = child_start.clone();
        let mut child_list = vec![0; n - 1];
        for (v, p) in parent.iter().enumerate().skip(1) {
            let p = p.expect("checked above");
            child_list[fill[p]] = v;
            fill[p] += 1;
        }

        let mut depth = vec![usize::MAX; n];
        let mut bfs = Vec::with_capacity(n);
        depth[0] = 0;
        bfs.push(0);
        let mut head = 0;
        while head < bfs.len() {
            let u = bfs[head];
            head += 1;
            for &c in &child_list[child_start[u]..child_start[u + 1]] {
                depth[c] = depth[u] + 1;
                bfs.push(c);
            }
        }
        if bfs.len() != n {
            return Err(TreeError::NotATree);
        }

        let mut leaves = vec![0u64; n];
        for &u in bfs.iter().rev() {
            let kids = &child_list[child_start[u]..child_start[u + 1]];
            leaves[u] = if kids.is_empty() {
                1
            } else {
                kids.iter().map(|&c| leaves[c]).sum()
            };
        }

        let mut treasure_path = vec![treasure];
        let mut cur = treasure;
        while let Some(p) = parent[cur] {
            treasure_path.push(p);
            cur = p;
        }
        treasure_path.reverse();
        let max_depth = depth.iter().copied().max().unwrap_or(0);
        let max_degree = (0..n)
            .map(|u| child_start[u + 1] - child_start[u] + usize::from(u != 0))
            .max()
            .unwrap_or(0);

        Ok(Tree {
            parent,
            child_start,
            child_list,
            depth,
            leaves,
            bfs,
            treasure,
            treasure_path,
            max_depth,
            max_degree,
        })
    }

    /// Builds a tree from parent links under an arbitrary labeling, relabeling
    /// nodes in breadth-first order from `root` (children visited by
    /// ascending original id). Returns the tree and the old-to-new id map.
    pub fn canonical(
        parent: &[Option<NodeId>],
        root: NodeId,
        treasure: NodeId,
    ) -> Result<(Tree, Vec<NodeId>), TreeError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if root >= n {
            return Err(TreeError::OutOfRange(root));
        }
        if treasure >= n {
            return Err(TreeError::OutOfRange(treasure));
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(TreeError::OutOfRange(p));
                }
                adj[v].push(p);
                adj[p].push(v);
            }
        }
        let edges = parent.iter().filter(|p| p.is_some()).count();
        if edges != n - 1 {
            return Err(TreeError::NotATree);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut new_parent = Vec::with_capacity(n);
        new_id[root] = 0;
        order.push(root);
        new_parent.push(None);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in &adj[u] {
                if new_id[w] == usize::MAX {
                    new_id[w] = order.len();
                    order.push(w);
                    new_parent.push(Some(new_id[u]));
                }
            }
        }
        if order.len() != n {
            return Err(TreeError::NotATree);
        }
        let tree = Tree::from_parents(new_parent, new_id[treasure])?;
        Ok((tree, new_id))
    }

    /// Same tree with the treasure moved to `treasure`.
    pub fn with_treasure(&self, treasure: NodeId) -> Result<Tree, TreeError> {
        Tree::from_parents(self.parent.clone(), treasure)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn nodes(&self) -> Range<NodeId> {
        0..self.len()
    }

    pub fn child_slice(&self, u: NodeId) -> &[NodeId] {
        &self.child_list[self.child_start[u]..self.child_start[u + 1]]
    }

    /// Nodes in breadth-first order from the root.
    pub fn bfs_order(&self) -> &[NodeId] {
        &self.bfs
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn is_leaf(&self, u: NodeId) -> bool {
        self.child_slice(u).is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes().filter(move |&u| self.is_leaf(u))
    }
}

impl Topology for Tree {
    fn node_count(&self) -> u64 {
        self.len() as u64
    }

    fn root(&self) -> NodeId {
        0
    }

    fn treasure(&self) -> NodeId {
        self.treasure
    }

    fn parent(&self, u: NodeId) -> Option<NodeId> {
        self.parent[u]
    }

    fn children(&self, u: NodeId) -> NodeList<'_> {
        NodeList::Slice(self.child_slice(u))
    }

    fn degree(&self, u: NodeId) -> usize {
        self.child_start[u + 1] - self.child_start[u] + usize::from(u != 0)
    }

    fn depth(&self, u: NodeId) -> usize {
        self.depth[u]
    }

    fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn treasure_path(&self) -> &[NodeId] {
        &self.treasure_path
    }

    fn leaf_count(&self, u: NodeId) -> u64 {
        self.leaves[u]
    }

    fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn as_tree(&self) -> Option<&Tree> {
        Some(self)
    }
}
