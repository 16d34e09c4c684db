//! Walking algorithms, which pay for every edge the agent traverses.
//!
//! All three share one frontier discipline and differ only in the ranking:
//!
//! * [`a_walk`] ranks a candidate `u` by
//!   `score(u) = (2/3)·ln(1/β(u)) − Σ ln Δ_w` over explored `w` whose advice
//!   points away from `u`;
//! * [`a_natural`] ranks by the number of explored arrows pointing at `u`;
//! * [`a_walk_uniform_theta`] is `a_walk` with `1/β(u)` replaced by the
//!   fraction of leaves below `u`.
//!
//! Internally each candidate carries three times its score minus a term
//! common to all candidates, which keeps the arithmetic exact.

pub(crate) mod frontier;

use std::fmt;
use std::marker::PhantomData;

use thiserror::Error;

use crate::noise::Advice;
use crate::tree::{log_beta, path_between, Topology};
use crate::{LogWeight, NodeId};
use frontier::{arrow, run_frontier, Explored, Flow, FrontierRule, Popped};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("advice at node {0} is not known")]
    MissingAdvice(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepAction {
    Move,
    Query,
}

/// One line of a transcript dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub action: StepAction,
    pub node: NodeId,
    pub moves: u64,
    pub queries: u64,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.action {
            StepAction::Move => "move",
            StepAction::Query => "query",
        };
        write!(f, "{action} {} {} {}", self.node, self.moves, self.queries)
    }
}

/// The record of one search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchTranscript {
    pub queries: u64,
    pub moves: u64,
    /// Queried nodes in order.
    pub visits: Vec<NodeId>,
    pub end: NodeId,
    /// Per-step dump, when recording was requested.
    pub steps: Option<Vec<Step>>,
}

impl SearchTranscript {
    pub fn new(start: NodeId, record: bool) -> Self {
        SearchTranscript {
            end: start,
            steps: record.then(Vec::new),
            ..Default::default()
        }
    }

    pub fn query(&mut self, u: NodeId) {
        self.queries += 1;
        self.visits.push(u);
        self.end = u;
        self.push_step(Step {
            action: StepAction::Query,
            node: u,
            moves: self.moves,
            queries: self.queries,
        });
    }

    pub fn push_step(&mut self, s: Step) {
        if let Some(v) = &mut self.steps {
            v.push(s);
        }
    }

    /// The dump, one step per line.
    pub fn dump(&self) -> String {
        self.steps
            .iter()
            .flatten()
            .map(|s| format!("{s}\n"))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WalkAlgo {
    Walk,
    Natural,
    UniformTheta,
}

pub fn a_walk<T: Topology + ?Sized, A: Advice + ?Sized>(t: &T, adv: &A) -> SearchTranscript {
    run_walk(t, adv, WalkAlgo::Walk, false)
}

pub fn a_natural<T: Topology + ?Sized, A: Advice + ?Sized>(t: &T, adv: &A) -> SearchTranscript {
    run_walk(t, adv, WalkAlgo::Natural, false)
}

pub fn a_walk_uniform_theta<T: Topology + ?Sized, A: Advice + ?Sized>(t: &T, adv: &A) -> SearchTranscript {
    run_walk(t, adv, WalkAlgo::UniformTheta, false)
}

struct WalkRule<'a, T: ?Sized, A: ?Sized, K, F> {
    t: &'a T,
    adv: &'a A,
    key_fn: F,
    tr: SearchTranscript,
    _key: PhantomData<K>,
}

impl<T, A, K, F> FrontierRule for WalkRule<'_, T, A, K, F>
where
    T: Topology + ?Sized,
    A: Advice + ?Sized,
    K: Ord,
    F: FnMut(&Explored<'_, K>, NodeId) -> K,
{
    type Key = K;

    fn expand(&mut self, x: NodeId, _up: Option<NodeId>, out: &mut Vec<NodeId>) {
        out.extend(self.t.children(x).iter());
    }

    fn child_key(&mut self, parent: &Explored<'_, K>, child: NodeId) -> K {
        (self.key_fn)(parent, child)
    }

    fn on_pop(&mut self, p: &Popped) -> Flow {
        match &p.route {
            Some(route) => {
                for &w in &route[1..] {
                    self.tr.moves += 1;
                    let step = Step {
                        action: StepAction::Move,
                        node: w,
                        moves: self.tr.moves,
                        queries: self.tr.queries,
                    };
                    self.tr.push_step(step);
                }
            }
            None => self.tr.moves += p.moves,
        }
        self.tr.query(p.node);
        if p.node == self.t.treasure() {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    fn pointer(&mut self, x: NodeId) -> Option<NodeId> {
        self.adv.pointer(x)
    }
}

fn walk_with<T, A, K, F>(t: &T, adv: &A, root_key: K, key_fn: F, record: bool) -> SearchTranscript
where
    T: Topology + ?Sized,
    A: Advice + ?Sized,
    K: Ord,
    F: FnMut(&Explored<'_, K>, NodeId) -> K,
{
    let mut rule = WalkRule {
        t,
        adv,
        key_fn,
        tr: SearchTranscript::new(t.root(), record),
        _key: PhantomData,
    };
    run_frontier(&mut rule, t.root(), root_key, record);
    rule.tr
}

pub fn run_walk<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    algo: WalkAlgo,
    record: bool,
) -> SearchTranscript {
    match algo {
        WalkAlgo::Walk => walk_with(
            t,
            adv,
            LogWeight::zero(),
            |e, c| {
                let deg = t.degree(e.node) as u64;
                let mut k = e.key.clone();
                k.add_ln(deg, 3 * arrow(e, c) - 2);
                k
            },
            record,
        ),
        WalkAlgo::Natural => walk_with(t, adv, 0i64, |e, c| e.key + arrow(e, c), record),
        WalkAlgo::UniformTheta => walk_with(
            t,
            adv,
            LogWeight::zero(),
            |e, c| {
                let deg = t.degree(e.node) as u64;
                let mut k = e.key.clone();
                k.add_ln(t.leaf_count(e.node), -2);
                k.add_ln(t.leaf_count(c), 2);
                k.add_ln(deg, 3 * arrow(e, c));
                k
            },
            record,
        ),
    }
}

/// The neighbor of `w` on the path to `u` (`w ≠ u`).
pub fn step_toward<T: Topology + ?Sized>(t: &T, w: NodeId, u: NodeId) -> NodeId {
    let dw = t.depth(w);
    let mut x = u;
    let mut dx = t.depth(u);
    if dx <= dw {
        return t.parent(w).expect("w is not the root");
    }
    while dx > dw + 1 {
        x = t.parent(x).unwrap();
        dx -= 1;
    }
    if t.parent(x) == Some(w) {
        x
    } else {
        t.parent(w).expect("w is not the root")
    }
}

/// Three times `score(u)` given the advice at the `explored` nodes, computed
/// straight from the definition.
pub fn scaled_score<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    explored: &[NodeId],
    u: NodeId,
) -> LogWeight {
    let mut s = log_beta(t, u).scale(-2);
    for &w in explored {
        if w == u {
            continue;
        }
        if let Some(p) = adv.pointer(w) {
            if p != step_toward(t, w, u) {
                s.add_ln(t.degree(w) as u64, -3);
            }
        }
    }
    s
}

/// Whether `u` outranks `v` for `a_walk` given the advice strictly between
/// them: `Σ_{advTo(u)} ln Δ_w − Σ_{advTo(v)} ln Δ_w > (2/3)·ln(β(u)/β(v))`.
pub fn pairwise_beats<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    u: NodeId,
    v: NodeId,
) -> Result<bool, WalkError> {
    let path = path_between(t, u, v).nodes;
    let mut lhs = LogWeight::zero();
    for i in 1..path.len().saturating_sub(1) {
        let w = path[i];
        let Some(p) = adv.pointer(w) else {
            if w == t.treasure() {
                continue;
            }
            return Err(WalkError::MissingAdvice(w));
        };
        let deg = t.degree(w) as u64;
        if p == path[i - 1] {
            lhs.add_ln(deg, 3);
        } else if p == path[i + 1] {
            lhs.add_ln(deg, -3);
        }
    }
    let rhs = (log_beta(t, u) - &log_beta(t, v)).scale(2);
    Ok((lhs - &rhs).signum() == std::cmp::Ordering::Greater)
}
