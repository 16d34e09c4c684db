//! The frontier engine shared by the walking and local query algorithms.
//!
//! The agent keeps the explored set (connected, containing the start) and the
//! candidates (unexplored children of explored nodes). Each candidate gets a
//! key when its parent is explored; keys never change afterwards because a
//! candidate's ranking relative to the others depends only on advice along
//! its own root path, all of which is already known. The engine repeatedly
//! pops the best key (lowest id on ties), walks there and queries it.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::NodeId;

struct Info {
    up: Option<NodeId>,
    depth: usize,
}

/// What the key function sees when a node is explored.
pub(crate) struct Explored<'a, K> {
    pub node: NodeId,
    pub key: &'a K,
    pub pointer: Option<NodeId>,
    pub up: Option<NodeId>,
}

/// A node about to be queried.
pub(crate) struct Popped {
    pub node: NodeId,
    /// Edges walked since the previous query.
    pub moves: u64,
    /// Nodes walked through, endpoints included, when routes are requested.
    pub route: Option<Vec<NodeId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Callbacks that specialize the engine.
pub(crate) trait FrontierRule {
    type Key: Ord;
    /// Children of `x` in the searched space, given its parent there.
    fn expand(&mut self, x: NodeId, up: Option<NodeId>, out: &mut Vec<NodeId>);
    fn child_key(&mut self, parent: &Explored<'_, Self::Key>, child: NodeId) -> Self::Key;
    /// Called before `x`'s advice is read; `Stop` ends the search.
    fn on_pop(&mut self, p: &Popped) -> Flow;
    fn pointer(&mut self, x: NodeId) -> Option<NodeId>;
}

/// Runs the frontier search from `root`. Returns the last popped node and
/// whether the search stopped on request (rather than running dry).
pub(crate) fn run_frontier<R: FrontierRule>(
    rule: &mut R,
    root: NodeId,
    root_key: R::Key,
    routes: bool,
) -> (NodeId, bool) {
    let mut info: FxHashMap<NodeId, Info> = FxHashMap::default();
    let mut heap: BinaryHeap<(R::Key, Reverse<NodeId>)> = BinaryHeap::new();
    let mut kids = Vec::new();
    info.insert(root, Info { up: None, depth: 0 });
    heap.push((root_key, Reverse(root)));

    let mut pos = root;
    while let Some((key, Reverse(x))) = heap.pop() {
        let (moves, route) = if routes {
            let r = route(&info, pos, x);
            ((r.len() - 1) as u64, Some(r))
        } else {
            (distance(&info, pos, x), None)
        };
        pos = x;
        let popped = Popped {
            node: x,
            moves,
            route,
        };
        if rule.on_pop(&popped) == Flow::Stop {
            return (x, true);
        }
        let ctx = Explored {
            node: x,
            key: &key,
            pointer: rule.pointer(x),
            up: info[&x].up,
        };
        let depth = info[&x].depth;
        kids.clear();
        rule.expand(x, ctx.up, &mut kids);
        for &c in &kids {
            let k = rule.child_key(&ctx, c);
            info.insert(c, Info { up: Some(x), depth: depth + 1 });
            heap.push((k, Reverse(c)));
        }
    }
    (pos, false)
}

fn distance(info: &FxHashMap<NodeId, Info>, a: NodeId, b: NodeId) -> u64 {
    let (mut a, mut b) = (a, b);
    let (mut da, mut db) = (info[&a].depth, info[&b].depth);
    let mut d = 0;
    while da > db {
        a = info[&a].up.unwrap();
        da -= 1;
        d += 1;
    }
    while db > da {
        b = info[&b].up.unwrap();
        db -= 1;
        d += 1;
    }
    while a != b {
        a = info[&a].up.unwrap();
        b = info[&b].up.unwrap();
        d += 2;
    }
    d
}

/// Nodes from `a` to `b` through explored nodes, both included.
fn route(info: &FxHashMap<NodeId, Info>, a: NodeId, b: NodeId) -> Vec<NodeId> {
    let (mut x, mut y) = (a, b);
    let (mut dx, mut dy) = (info[&x].depth, info[&y].depth);
    let mut up = vec![x];
    let mut down = vec![y];
    while dx > dy {
        x = info[&x].up.unwrap();
        dx -= 1;
        up.push(x);
    }
    while dy > dx {
        y = info[&y].up.unwrap();
        dy -= 1;
        down.push(y);
    }
    while x != y {
        x = info[&x].up.unwrap();
        y = info[&y].up.unwrap();
        up.push(x);
        down.push(y);
    }
    down.pop();
    up.extend(down.into_iter().rev());
    up
}

/// Advice at an explored node as seen from its child `c`: `+1` toward `c`,
/// `-1` toward the explored node's own parent, `0` otherwise.
pub(crate) fn arrow<K>(e: &Explored<'_, K>, c: NodeId) -> i64 {
    match e.pointer {
        Some(p) if p == c => 1,
        Some(p) if Some(p) == e.up => -1,
        _ => 0,
    }
}
