use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CompleteAryTree, Topology, Tree, TreeError, DEFAULT_NODE_BUDGET};
use crate::NodeId;

/// Where to put the treasure among the nodes of its level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Placement {
    #[default]
    Leftmost,
    Rightmost,
}

/// Parameters of a complete tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteAry {
    pub branching: usize,
    pub depth: usize,
    pub treasure_depth: usize,
    pub root_children: usize,
    pub placement: Placement,
}

impl CompleteAry {
    pub fn new(branching: usize, depth: usize, treasure_depth: usize) -> Self {
        CompleteAry {
            branching,
            depth,
            treasure_depth,
            root_children: branching,
            placement: Placement::Leftmost,
        }
    }

    pub fn root_children(mut self, r: usize) -> Self {
        self.root_children = r;
        self
    }

    pub fn placement(mut self, p: Placement) -> Self {
        self.placement = p;
        self
    }

    /// Exact node count, saturating at `u128::MAX`.
    pub fn node_count(&self) -> u128 {
        let (b, r) = (self.branching as u128, self.root_children as u128);
        let mut total: u128 = 1;
        let mut width = r;
        for _ in 0..self.depth {
            total = total.saturating_add(width);
            width = width.saturating_mul(b);
        }
        total
    }

    fn check(&self) -> Result<(), TreeError> {
        if self.branching < 2 {
            return Err(TreeError::Invalid(format!("branching {} < 2", self.branching)));
        }
        if self.treasure_depth > self.depth {
            return Err(TreeError::Invalid(format!(
                "treasure depth {} exceeds depth {}",
                self.treasure_depth, self.depth
            )));
        }
        Ok(())
    }

    fn treasure_in(&self, t: &CompleteAryTree) -> NodeId {
        match self.placement {
            Placement::Leftmost => t.level_start(self.treasure_depth),
            Placement::Rightmost => t.level_end(self.treasure_depth),
        }
    }

    /// Implicit version, rooted at the apex. No node budget applies.
    pub fn implicit(&self) -> Result<CompleteAryTree, TreeError> {
        self.check()?;
        let shape = CompleteAryTree::rooted(self.branching, self.root_children, self.depth, 0)?;
        let tau = self.treasure_in(&shape);
        CompleteAryTree::rooted(self.branching, self.root_children, self.depth, tau)
    }

    pub fn build(&self) -> Result<Tree, TreeError> {
        self.build_with_budget(DEFAULT_NODE_BUDGET)
    }

    pub fn build_with_budget(&self, budget: u64) -> Result<Tree, TreeError> {
        self.check()?;
        let nodes = self.node_count();
        if nodes > budget as u128 {
            return Err(TreeError::Budget { nodes, budget });
        }
        let shape = self.implicit()?;
        let parents = (0..nodes as usize).map(|v| shape.structural_parent(v)).collect();
        Tree::from_parents(parents, self.treasure_in(&shape))
    }
}

/// Complete tree with `branching` children per internal node (root
/// included), treasure at the leftmost node of depth `treasure_depth`.
pub fn build_complete_ary(branching: usize, depth: usize, treasure_depth: usize) -> Result<Tree, TreeError> {
    CompleteAry::new(branching, depth, treasure_depth).build()
}

/// A complete tree searched from its leftmost leaf toward the apex, which
/// holds the treasure. The root has `branching` children.
pub fn build_apex(branching: usize, depth: usize) -> Result<Tree, TreeError> {
    let spec = CompleteAry::new(branching, depth, 0);
    spec.check()?;
    let nodes = spec.node_count();
    if nodes > DEFAULT_NODE_BUDGET as u128 {
        return Err(TreeError::Budget {
            nodes,
            budget: DEFAULT_NODE_BUDGET,
        });
    }
    let shape = spec.implicit()?;
    let parents: Vec<_> = (0..nodes as usize).map(|v| shape.structural_parent(v)).collect();
    let leaf = shape.level_start(depth);
    Ok(Tree::canonical(&parents, leaf, 0)?.0)
}

/// Implicit counterpart of [`build_apex`].
pub fn apex_implicit(branching: usize, depth: usize) -> Result<CompleteAryTree, TreeError> {
    let shape = CompleteAryTree::rooted(branching, branching, depth, 0)?;
    CompleteAryTree::new(branching, branching, depth, shape.level_start(depth), 0)
}

fn budgeted(n: u128) -> Result<(), TreeError> {
    if n > DEFAULT_NODE_BUDGET as u128 {
        Err(TreeError::Budget {
            nodes: n,
            budget: DEFAULT_NODE_BUDGET,
        })
    } else {
        Ok(())
    }
}

/// A spine of `spine_len` edges (`spine_len + 1` nodes) starting at the
/// root; every spine node has total degree `star_degree`, the remainder
/// being pendant leaves. The treasure is the spine node at `treasure_depth`.
pub fn build_caterpillar(spine_len: usize, star_degree: usize, treasure_depth: usize) -> Result<Tree, TreeError> {
    if spine_len == 0 {
        return Err(TreeError::Invalid("caterpillar spine must have at least one edge".into()));
    }
    if star_degree < 2 {
        return Err(TreeError::Invalid(format!("star degree {star_degree} < 2")));
    }
    if treasure_depth > spine_len {
        return Err(TreeError::Invalid(format!(
            "treasure depth {treasure_depth} exceeds spine length {spine_len}"
        )));
    }
    let pendants = |i: usize| star_degree - if i == 0 || i == spine_len { 1 } else { 2 };
    let n: u128 = (0..=spine_len).map(|i| 1 + pendants(i) as u128).sum();
    budgeted(n)?;
    // spine nodes first, then pendants
    let mut parent: Vec<Option<NodeId>> = (0..=spine_len).map(|i| i.checked_sub(1)).collect();
    for i in 0..=spine_len {
        for _ in 0..pendants(i) {
            parent.push(Some(i));
        }
    }
    Ok(Tree::canonical(&parent, 0, treasure_depth)?.0)
}

/// Complete `branching`-ary tree of the given depth where the leftmost root
/// child is a leaf holding the treasure.
pub fn build_trimmed_ary(branching: usize, depth: usize) -> Result<Tree, TreeError> {
    if depth == 0 {
        return Err(TreeError::Invalid("trimmed tree needs depth >= 1".into()));
    }
    let spec = CompleteAry::new(branching, depth, 1);
    spec.check()?;
    budgeted(spec.node_count())?;
    let shape = spec.implicit()?;
    let n = spec.node_count() as usize;
    let keep = |v: NodeId| {
        let mut a = v;
        while shape.level(a) > 1 {
            a = shape.structural_parent(a).unwrap();
        }
        v == 1 || a != 1
    };
    let mut new_id = vec![usize::MAX; n];
    let mut parent = Vec::new();
    for v in 0..n {
        if keep(v) {
            new_id[v] = parent.len();
            parent.push(shape.structural_parent(v).map(|p| new_id[p]));
        }
    }
    Tree::from_parents(parent, 1)
}

/// The first `n` nodes of a complete tree in breadth-first order. The
/// treasure is the leftmost node of the deepest level.
pub fn build_heap_ary(root_children: usize, branching: usize, n: usize) -> Result<Tree, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    if branching < 2 || root_children < 1 {
        return Err(TreeError::Invalid("heap tree needs branching >= 2 and root_children >= 1".into()));
    }
    budgeted(n as u128)?;
    let mut depth = 0;
    while (CompleteAry::new(branching, depth, 0).root_children(root_children).node_count()) < n as u128 {
        depth += 1;
    }
    let shape = CompleteAryTree::rooted(branching, root_children, depth, 0)?;
    let parent = (0..n).map(|v| shape.structural_parent(v)).collect();
    Tree::from_parents(parent, shape.level_start(depth).min(n - 1))
}

/// A path of `nodes` nodes rooted at one end.
pub fn build_path(nodes: usize, treasure_depth: usize) -> Result<Tree, TreeError> {
    if treasure_depth >= nodes {
        return Err(TreeError::Invalid(format!(
            "treasure depth {treasure_depth} outside a path of {nodes} nodes"
        )));
    }
    budgeted(nodes as u128)?;
    Tree::from_parents((0..nodes).map(|i| i.checked_sub(1)).collect(), treasure_depth)
}

/// A star rooted at its center; `treasure` 0 is the center, `k` the k-th leaf.
pub fn build_star(leaves: usize, treasure: usize) -> Result<Tree, TreeError> {
    if treasure > leaves {
        return Err(TreeError::OutOfRange(treasure));
    }
    budgeted(leaves as u128 + 1)?;
    let mut parent = vec![None];
    parent.extend((0..leaves).map(|_| Some(0)));
    Tree::from_parents(parent, treasure)
}

/// Random recursive tree: node `i` attaches to a uniform earlier node. With
/// no treasure given, the treasure is the deepest node (lowest id on ties).
pub fn build_random(n: usize, seed: u64, treasure: Option<NodeId>) -> Result<Tree, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    budgeted(n as u128)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent: Vec<_> = (0..n).map(|i| (i > 0).then(|| rng.random_range(0..i))).collect();
    let shape = Tree::from_parents(parent, 0)?;
    let tau = match treasure {
        Some(t) => t,
        None => shape
            .nodes()
            .max_by_key(|&u| (shape.depth(u), std::cmp::Reverse(u)))
            .unwrap(),
    };
    shape.with_treasure(tau)
}
