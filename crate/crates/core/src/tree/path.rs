use super::Topology;
use crate::NodeId;

/// The simple path between two nodes, with flags for whether each endpoint
/// counts as part of the interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodePath {
    pub nodes: Vec<NodeId>,
    pub include_start: bool,
    pub include_end: bool,
}

impl NodePath {
    /// `[u, v]`
    pub fn closed(self) -> Self {
        NodePath {
            include_start: true,
            include_end: true,
            ..self
        }
    }

    /// `[u, v⟩`
    pub fn half_open(self) -> Self {
        NodePath {
            include_start: true,
            include_end: false,
            ..self
        }
    }

    /// `⟨u, v⟩`
    pub fn open(self) -> Self {
        NodePath {
            include_start: false,
            include_end: false,
            ..self
        }
    }

    pub fn start(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn end(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    /// Number of edges.
    pub fn edges(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Nodes inside the interval, in order.
    pub fn included(&self) -> impl Iterator<Item = NodeId> + '_ {
        let n = self.nodes.len();
        let lo = usize::from(!self.include_start);
        let hi = if self.include_end || n == 1 { n } else { n - 1 };
        // a single-node path is [u,u]; drop it if either end is open
        let hi = if n == 1 && !(self.include_start && self.include_end) { 0 } else { hi };
        self.nodes[lo.min(hi)..hi].iter().copied()
    }
}

/// Closed path `[u, v]`, found by climbing parent links.
pub fn path_between<T: Topology + ?Sized>(t: &T, u: NodeId, v: NodeId) -> NodePath {
    let (mut a, mut b) = (u, v);
    let (mut da, mut db) = (t.depth(a), t.depth(b));
    let mut up = vec![a];
    let mut down = vec![b];
    while da > db {
        a = t.parent(a).unwrap();
        da -= 1;
        up.push(a);
    }
    while db > da {
        b = t.parent(b).unwrap();
        db -= 1;
        down.push(b);
    }
    while a != b {
        a = t.parent(a).unwrap();
        b = t.parent(b).unwrap();
        up.push(a);
        down.push(b);
    }
    down.pop();
    up.extend(down.into_iter().rev());
    NodePath {
        nodes: up,
        include_start: true,
        include_end: true,
    }
}
