//! Local balls, the promising test, the `local` procedure and the
//! misleading-separator oracle.

use rustc_hash::FxHashMap;

use super::strand::{Strand, StrandFlow};
use super::QueryError;
use crate::noise::Advice;
use crate::tree::{path_between, Topology, Tree};
use crate::walkers::frontier::{arrow, run_frontier, Explored, Flow, FrontierRule, Popped};
use crate::{LogWeight, NodeId};

/// How the ball `T_h(u)` is cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BallMode {
    /// Nodes with `β_u(v) < Δ^h`, plus their children. Nominees are the
    /// nodes with `β_u(v) ≥ Δ^h`. Arrows weigh `ln Δ_w`.
    Weighted,
    /// Nodes within distance `h`. Nominees sit at distance exactly `h`.
    /// Arrows weigh 1.
    Regular,
}

/// Running quantities along the path from the ball center.
#[derive(Clone, Debug, Default)]
pub(crate) struct PathSums {
    /// `ln β_u(v)`
    pub ln_beta: LogWeight,
    /// `Σ X_w` with `ln Δ_w` weights.
    pub weighted: LogWeight,
    /// `Σ X_w` with unit weights.
    pub unit: i64,
    pub dist: usize,
}

impl PathSums {
    /// Sums at the child `c` of `w`, where `a ∈ {-1, 0, 1}` is `w`'s arrow
    /// relative to `c`.
    pub fn step(&self, deg_w: usize, a: i64) -> PathSums {
        let mut next = self.clone();
        next.ln_beta.add_ln(deg_w as u64, 1);
        next.weighted.add_ln(deg_w as u64, a);
        next.unit += a;
        next.dist += 1;
        next
    }
}

/// The cut and threshold parameters of a ball.
#[derive(Clone, Debug)]
pub(crate) struct BallRule {
    pub mode: BallMode,
    pub h: usize,
    /// `h · ln Δ`
    h_ln_delta: LogWeight,
}

impl BallRule {
    pub fn new(mode: BallMode, h: usize, delta: usize) -> Self {
        BallRule {
            mode,
            h,
            h_ln_delta: LogWeight::ln_scaled(delta.max(1) as u64, h as i64),
        }
    }

    pub fn is_nominee(&self, s: &PathSums) -> bool {
        match self.mode {
            BallMode::Weighted => (s.ln_beta.clone() - &self.h_ln_delta).signum().is_ge(),
            BallMode::Regular => s.dist == self.h,
        }
    }

    /// Sum of arrows ≥ (2/3)·h (times `ln Δ` when weighted).
    pub fn is_promising(&self, s: &PathSums) -> bool {
        match self.mode {
            BallMode::Weighted => (s.weighted.scale(3) - &self.h_ln_delta.scale(2)).signum().is_ge(),
            BallMode::Regular => 3 * s.unit >= 2 * self.h as i64,
        }
    }

    /// Whether some nominee below a node with sums `s` could still be
    /// promising. Never returns `false` for a reachable one.
    pub fn can_reach_promising(&self, s: &PathSums, delta: usize) -> bool {
        match self.mode {
            BallMode::Weighted => {
                let ln_d = (delta as f64).ln();
                let best = s.weighted.value() + (self.h as f64 + 1.0) * ln_d - s.ln_beta.value();
                best * 3.0 >= 2.0 * self.h as f64 * ln_d - 1e-9
            }
            BallMode::Regular => 3 * (s.unit + (self.h - s.dist) as i64) >= 2 * self.h as i64,
        }
    }
}

/// Outcome of `local`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    TreasureFound,
    /// A promising nominee; the treasure is declared to be in its
    /// component of `T ∖ {u}`.
    Component(NodeId),
    /// The ball ran out with neither.
    Exhausted,
}

/// The ball `T_h(u)` materialized, for inspection.
#[derive(Clone, Debug)]
pub struct LocalBall {
    pub center: NodeId,
    pub nodes: Vec<NodeId>,
    pub nominees: Vec<NodeId>,
}

impl LocalBall {
    pub fn build<T: Topology + ?Sized>(t: &T, u: NodeId, h: usize, mode: BallMode) -> LocalBall {
        let rule = BallRule::new(mode, h, t.max_degree());
        let mut nodes = vec![u];
        let mut nominees = Vec::new();
        let mut stack = vec![(u, None, PathSums::default())];
        while let Some((x, from, sums)) = stack.pop() {
            if x != u && rule.is_nominee(&sums) {
                nominees.push(x);
                continue;
            }
            for y in t.neighbors(x) {
                if Some(y) != from {
                    nodes.push(y);
                    stack.push((y, Some(x), sums.step(t.degree(x), 0)));
                }
            }
        }
        nodes.sort_unstable();
        nominees.sort_unstable();
        LocalBall { center: u, nodes, nominees }
    }
}

/// `Σ_{w∈[u,v⟩} X_w` meets the promising threshold.
pub fn promising<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    u: NodeId,
    v: NodeId,
    h: usize,
    mode: BallMode,
) -> Result<bool, QueryError> {
    let rule = BallRule::new(mode, h, t.max_degree());
    let path = path_between(t, u, v).nodes;
    let mut sums = PathSums::default();
    for i in 0..path.len() - 1 {
        let w = path[i];
        let p = adv.pointer(w).ok_or(QueryError::MissingAdvice(w))?;
        let a = if p == path[i + 1] {
            1
        } else if i > 0 && p == path[i - 1] {
            -1
        } else {
            0
        };
        sums = sums.step(t.degree(w), a);
    }
    Ok(rule.is_promising(&sums))
}

/// `a_walk` on a ball inside one component, charging queries to a strand.
pub(crate) struct LocalWalk<'a, A: ?Sized, F> {
    pub tree: &'a Tree,
    pub adv: &'a A,
    pub rule: BallRule,
    pub in_component: F,
    pub strand: &'a mut Strand,
    pub sums: FxHashMap<NodeId, PathSums>,
    pub outcome: Option<LocalOutcome>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LocalOutcome {
    Verdict(Verdict),
    OutOfBudget,
}

impl<A: Advice + ?Sized, F: Fn(NodeId) -> bool> FrontierRule for LocalWalk<'_, A, F> {
    type Key = LogWeight;

    fn expand(&mut self, x: NodeId, up: Option<NodeId>, out: &mut Vec<NodeId>) {
        if up.is_some() && self.rule.is_nominee(&self.sums[&x]) {
            return;
        }
        for y in self.tree.neighbors(x) {
            if Some(y) != up && (self.in_component)(y) {
                out.push(y);
            }
        }
    }

    fn child_key(&mut self, e: &Explored<'_, LogWeight>, c: NodeId) -> LogWeight {
        let deg = self.tree.degree(e.node);
        let a = arrow(e, c);
        let next = self.sums[&e.node].step(deg, a);
        self.sums.insert(c, next);
        let mut k = e.key.clone();
        k.add_ln(deg as u64, 3 * a - 2);
        k
    }

    fn on_pop(&mut self, p: &Popped) -> Flow {
        let x = p.node;
        if self.strand.query(x) == StrandFlow::OutOfBudget {
            self.outcome = Some(LocalOutcome::OutOfBudget);
            return Flow::Stop;
        }
        if x == self.tree.treasure() {
            self.outcome = Some(LocalOutcome::Verdict(Verdict::TreasureFound));
            return Flow::Stop;
        }
        let s = &self.sums[&x];
        if s.dist > 0 && self.rule.is_nominee(s) && self.rule.is_promising(s) {
            self.outcome = Some(LocalOutcome::Verdict(Verdict::Component(x)));
            return Flow::Stop;
        }
        Flow::Continue
    }

    fn pointer(&mut self, x: NodeId) -> Option<NodeId> {
        self.adv.pointer(x)
    }
}

pub(crate) fn local_walk<A: Advice + ?Sized>(
    t: &Tree,
    adv: &A,
    u: NodeId,
    rule: BallRule,
    in_component: impl Fn(NodeId) -> bool,
    strand: &mut Strand,
) -> LocalOutcome {
    let mut sums = FxHashMap::default();
    sums.insert(u, PathSums::default());
    let mut lw = LocalWalk {
        tree: t,
        adv,
        rule,
        in_component,
        strand,
        sums,
        outcome: None,
    };
    run_frontier(&mut lw, u, LogWeight::zero(), false);
    lw.outcome.unwrap_or(LocalOutcome::Verdict(Verdict::Exhausted))
}

/// Runs `local(u)` on the whole tree. Returns the verdict and the number of
/// queries it made.
pub fn local<A: Advice + ?Sized>(t: &Tree, adv: &A, u: NodeId, h: usize, mode: BallMode) -> (Verdict, u64) {
    let mut strand = Strand::new(t.treasure(), u64::MAX);
    let rule = BallRule::new(mode, h, t.max_degree());
    match local_walk(t, adv, u, rule, |_| true, &mut strand) {
        LocalOutcome::Verdict(v) => (v, strand.queries),
        LocalOutcome::OutOfBudget => unreachable!("unbounded budget"),
    }
}

/// Whether `u` is `h`-misleading: either τ is outside the ball and the
/// nominee toward τ is not promising, or some promising nominee lies in a
/// different component of `T ∖ {u}` than the one holding τ.
///
/// Only advice that can matter is read, so this runs on huge implicit trees
/// with lazily sampled advice.
pub fn is_misleading<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    u: NodeId,
    h: usize,
    mode: BallMode,
) -> bool {
    let tau = t.treasure();
    if u == tau {
        return false;
    }
    let delta = t.max_degree();
    let rule = BallRule::new(mode, h, delta);
    let path = path_between(t, u, tau).nodes;

    // the nominee toward τ, unless τ is in the ball
    let mut sums = PathSums::default();
    for i in 1..path.len() {
        let w = path[i - 1];
        let a = match adv.pointer(w) {
            Some(p) if p == path[i] => 1,
            Some(p) if i >= 2 && p == path[i - 2] => -1,
            _ => 0,
        };
        sums = sums.step(t.degree(w), a);
        if path[i] == tau && !rule.is_nominee(&sums) {
            break;
        }
        if rule.is_nominee(&sums) {
            if !rule.is_promising(&sums) {
                return true;
            }
            break;
        }
    }

    // promising nominees in the other components
    let home = path[1];
    let mut stack: Vec<(NodeId, NodeId, PathSums)> = Vec::new();
    let a_u = adv.pointer(u);
    for c in t.neighbors(u) {
        if c != home {
            let a = i64::from(a_u == Some(c));
            stack.push((c, u, PathSums::default().step(t.degree(u), a)));
        }
    }
    while let Some((x, from, s)) = stack.pop() {
        if rule.is_nominee(&s) {
            if rule.is_promising(&s) {
                return true;
            }
            continue;
        }
        if !rule.can_reach_promising(&s, delta) {
            continue;
        }
        let p = adv.pointer(x);
        for y in t.neighbors(x) {
            if y == from {
                continue;
            }
            let a = if p == Some(y) {
                1
            } else if p == Some(from) {
                -1
            } else {
                0
            };
            stack.push((y, x, s.step(t.degree(x), a)));
        }
    }
    false
}
