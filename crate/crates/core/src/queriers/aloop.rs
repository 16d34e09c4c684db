//! The level-cycling exploration.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::noise::Advice;
use crate::tree::Topology;
use crate::walkers::frontier::Flow;
use crate::walkers::SearchTranscript;
use crate::NodeId;

/// Callbacks that specialize [`run_loop`].
pub(crate) trait LoopRule {
    /// Children of `x` in the explored domain, given its parent there.
    fn expand(&mut self, x: NodeId, up: Option<NodeId>, out: &mut Vec<NodeId>);
    /// Called when `x` is queried; `Stop` ends the search.
    fn on_query(&mut self, x: NodeId, up: Option<NodeId>, level: usize) -> Flow;
    fn pointer(&mut self, x: NodeId) -> Option<NodeId>;
}

type Level = BinaryHeap<(u64, Reverse<NodeId>)>;

/// Queries `root`, then cycles through levels 1, 2, …, D. At each level it
/// queries the reachable unqueried node with the most explored ancestors
/// pointing toward it (lowest id on ties), skipping empty levels. Returns
/// whether the rule stopped the search.
pub(crate) fn run_loop<R: LoopRule>(rule: &mut R, root: NodeId) -> bool {
    if rule.on_query(root, None, 0) == Flow::Stop {
        return true;
    }
    let mut levels: Vec<Level> = vec![Level::new()];
    let mut info: FxHashMap<NodeId, (Option<NodeId>, u64)> = FxHashMap::default();
    let mut kids = Vec::new();
    info.insert(root, (None, 0));
    spread(rule, root, 0, &mut levels, &mut info, &mut kids);

    let mut i = 1;
    loop {
        let top = levels.len() - 1;
        let Some(j) = (0..top).map(|s| (i - 1 + s) % top + 1).find(|&j| !levels[j].is_empty()) else {
            return false;
        };
        let (_, Reverse(x)) = levels[j].pop().unwrap();
        let up = info[&x].0;
        if rule.on_query(x, up, j) == Flow::Stop {
            return true;
        }
        spread(rule, x, j, &mut levels, &mut info, &mut kids);
        i = if j + 1 >= levels.len() { 1 } else { j + 1 };
    }
}

fn spread<R: LoopRule>(
    rule: &mut R,
    x: NodeId,
    level: usize,
    levels: &mut Vec<Level>,
    info: &mut FxHashMap<NodeId, (Option<NodeId>, u64)>,
    kids: &mut Vec<NodeId>,
) {
    let (up, key) = info[&x];
    let p = rule.pointer(x);
    kids.clear();
    rule.expand(x, up, kids);
    if kids.is_empty() {
        return;
    }
    if levels.len() <= level + 1 {
        levels.push(Level::new());
    }
    for &c in kids.iter() {
        let k = key + u64::from(p == Some(c));
        info.insert(c, (Some(x), k));
        levels[level + 1].push((k, Reverse(c)));
    }
}

struct Whole<'a, T: ?Sized, A: ?Sized, F> {
    tree: &'a T,
    adv: &'a A,
    in_domain: F,
    transcript: SearchTranscript,
}

impl<T: Topology + ?Sized, A: Advice + ?Sized, F: Fn(NodeId) -> bool> LoopRule for Whole<'_, T, A, F> {
    fn expand(&mut self, x: NodeId, _up: Option<NodeId>, out: &mut Vec<NodeId>) {
        out.extend(self.tree.children(x).iter().filter(|&c| (self.in_domain)(c)));
    }

    fn on_query(&mut self, x: NodeId, _up: Option<NodeId>, _level: usize) -> Flow {
        self.transcript.query(x);
        if x == self.tree.treasure() {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn pointer(&mut self, x: NodeId) -> Option<NodeId> {
        self.adv.pointer(x)
    }
}

/// Runs the level loop from the root over the nodes accepted by
/// `in_domain`, which must be a connected set containing the root. Returns
/// the transcript and whether τ was found.
pub fn a_loop_in<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    in_domain: impl Fn(NodeId) -> bool,
    record: bool,
) -> (SearchTranscript, bool) {
    let mut w = Whole {
        tree: t,
        adv,
        in_domain,
        transcript: SearchTranscript::new(t.root(), record),
    };
    let found = run_loop(&mut w, t.root());
    (w.transcript, found)
}

/// Runs the level loop over the whole tree.
pub fn a_loop<T: Topology + ?Sized, A: Advice + ?Sized>(t: &T, adv: &A) -> SearchTranscript {
    a_loop_in(t, adv, |_| true, false).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::AdviceAssignment;
    use crate::tree::{build_complete_ary, build_path, build_star, Tree};

    #[test]
    fn path_in_depth_order() {
        let t = build_path(6, 5).unwrap();
        let a = AdviceAssignment::correct(&t);
        let tr = a_loop(&t, &a);
        assert_eq!(tr.visits, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn noiseless_queries_ancestors_only() {
        let t = build_complete_ary(3, 5, 5).unwrap();
        let a = AdviceAssignment::correct(&t);
        let tr = a_loop(&t, &a);
        assert_eq!(tr.visits, t.treasure_path());
    }

    #[test]
    fn shallow_treasure_in_deep_tree() {
        // τ at depth 2 of a depth-4 binary tree: one extra node per level at most
        let t = Tree::from_parents(
            vec![None, Some(0), Some(0), Some(1), Some(1), Some(3), Some(5)],
            4,
        )
        .unwrap();
        let a = AdviceAssignment::correct(&t);
        let tr = a_loop(&t, &a);
        assert_eq!(tr.visits, vec![0, 1, 4]);
    }

    #[test]
    fn ties_go_to_lower_id() {
        let t = build_star(4, 3).unwrap();
        // root points at the treasure-free leaf 2, all others equal
        let mut ptr = AdviceAssignment::correct(&t).pointer;
        ptr[0] = Some(2);
        let a = AdviceAssignment::from_pointers(&t, ptr);
        let tr = a_loop(&t, &a);
        assert_eq!(tr.visits, vec![0, 2, 1, 3]);
    }

    #[test]
    fn domain_restricts() {
        let t = build_complete_ary(2, 3, 3).unwrap();
        let a = AdviceAssignment::correct(&t);
        let (tr, found) = a_loop_in(&t, &a, |x| x != t.treasure_path()[1], false);
        assert!(!found);
        assert!(tr.visits.iter().all(|&x| x != t.treasure_path()[1]));
    }
}
