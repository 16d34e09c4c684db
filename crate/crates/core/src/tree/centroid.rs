use super::{Topology, Tree};
use crate::NodeId;

/// A fixed centroid decomposition.
///
/// Each node is the separator of exactly one component; `parent(s)` is the
/// separator of the enclosing component. A component is identified with its
/// separator, so membership is a walk up the separator tree.
#[derive(Clone, Debug)]
pub struct CentroidTree {
    parent: Vec<Option<NodeId>>,
    level: Vec<usize>,
    size: Vec<usize>,
    root: NodeId,
}

impl CentroidTree {
    pub fn new(t: &Tree) -> Self {
        let n = t.len();
        let mut removed = vec![false; n];
        let mut parent = vec![None; n];
        let mut level = vec![0; n];
        let mut size = vec![0; n];
        let mut sub = vec![0usize; n];
        let mut via = vec![usize::MAX; n];
        let mut order = Vec::new();
        let mut stack = Vec::new();
        let mut work: Vec<(NodeId, Option<NodeId>)> = vec![(0, None)];
        let mut root = 0;

        while let Some((start, sep_parent)) = work.pop() {
            order.clear();
            via[start] = usize::MAX;
            stack.push(start);
            while let Some(u) = stack.pop() {
                order.push(u);
                for w in t.neighbors(u) {
                    if !removed[w] && w != via[u] {
                        via[w] = u;
                        stack.push(w);
                    }
                }
            }
            for &u in order.iter().rev() {
                sub[u] = 1;
                for w in t.neighbors(u) {
                    if !removed[w] && w != via[u] {
                        sub[u] += sub[w];
                    }
                }
            }
            let total = order.len();
            let mut c = start;
            'descend: loop {
                for w in t.neighbors(c) {
                    if !removed[w] && w != via[c] && sub[w] > total / 2 {
                        c = w;
                        continue 'descend;
                    }
                }
                break;
            }
            removed[c] = true;
            parent[c] = sep_parent;
            level[c] = sep_parent.map_or(0, |p| level[p] + 1);
            size[c] = total;
            if sep_parent.is_none() {
                root = c;
            }
            for w in t.neighbors(c) {
                if !removed[w] {
                    work.push((w, Some(c)));
                }
            }
        }
        CentroidTree {
            parent,
            level,
            size,
            root,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn parent(&self, s: NodeId) -> Option<NodeId> {
        self.parent[s]
    }

    pub fn level(&self, s: NodeId) -> usize {
        self.level[s]
    }

    /// Size of the component whose separator is `s`.
    pub fn component_size(&self, s: NodeId) -> usize {
        self.size[s]
    }

    /// Number of halvings from the whole tree to the deepest separator.
    pub fn depth(&self) -> usize {
        self.level.iter().copied().max().unwrap_or(0)
    }

    /// Whether `x` lies in the component separated by `s`.
    pub fn contains(&self, s: NodeId, x: NodeId) -> bool {
        let mut cur = x;
        while self.level[cur] > self.level[s] {
            cur = self.parent[cur].unwrap();
        }
        cur == s
    }

    /// The sub-component of `s`'s component that holds `x`, named by its
    /// separator. `None` if `x == s` or `x` lies outside.
    pub fn child_toward(&self, s: NodeId, x: NodeId) -> Option<NodeId> {
        if x == s || self.level[x] <= self.level[s] {
            return None;
        }
        let mut cur = x;
        while self.level[cur] > self.level[s] + 1 {
            cur = self.parent[cur].unwrap();
        }
        (self.parent[cur] == Some(s)).then_some(cur)
    }
}
