//! Query-counting searches on a fully known tree.
//!
//! Moves are free here; only queries count. The separator searches descend
//! a fixed centroid decomposition. At each separator `s` a local procedure
//! explores a ball around `s` until it either queries τ or finds a
//! promising nominee, which names the component of `T ∖ {s}` to continue
//! in. Each search runs its strands round-robin with a breadth-first scan,
//! so the total is bounded by a constant times the cheapest strand.

mod aloop;
mod local;
mod strand;

use rustc_hash::FxHashMap;
use thiserror::Error;

pub use aloop::{a_loop, a_loop_in};
pub use local::{is_misleading, local, promising, BallMode, LocalBall, Verdict};

use aloop::{run_loop, LoopRule};
use local::{local_walk, BallRule, LocalOutcome, PathSums};
use strand::{round_robin, Strand, StrandFlow};

use crate::noise::Advice;
use crate::tree::{CentroidTree, Topology, Tree};
use crate::walkers::frontier::Flow;
use crate::walkers::SearchTranscript;
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("node {0} has no advice")]
    MissingAdvice(NodeId),
}

/// Per-tree data shared by all runs on that tree.
#[derive(Clone, Debug)]
pub struct QueryContext {
    centroid: CentroidTree,
    /// Queries the breadth-first scan needs to reach τ.
    scan_cost: u64,
}

impl QueryContext {
    pub fn new(t: &Tree) -> Self {
        let pos = t.bfs_order().iter().position(|&x| x == t.treasure()).unwrap();
        QueryContext {
            centroid: CentroidTree::new(t),
            scan_cost: pos as u64 + 1,
        }
    }

    pub fn centroid(&self) -> &CentroidTree {
        &self.centroid
    }

    pub fn scan_cost(&self) -> u64 {
        self.scan_cost
    }
}

/// The fallback scan order: breadth-first from the root.
pub fn exhaustive(t: &Tree) -> Vec<NodeId> {
    t.bfs_order().to_vec()
}

/// Ball height for the separator search: `⌈−3 ln(2n) / ln(1−ε)⌉`, at least 1.
pub fn sep_height(n: usize, eps: f64) -> usize {
    let h = (-3.0 * (2.0 * n as f64).ln() / (1.0 - eps).ln()).ceil();
    (h as usize).max(1)
}

/// Default two-layer constant `⌈3 / (−ln(1−ε))⌉`.
pub fn default_kappa(eps: f64) -> f64 {
    (3.0 / -(1.0 - eps).ln()).ceil()
}

/// Parameters of the two-layer search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLayers {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl TwoLayers {
    pub fn from_eps(eps: f64) -> Self {
        let k = default_kappa(eps);
        TwoLayers { kappa1: k, kappa2: k }
    }

    /// `h₁ = ⌈κ₁ ln n⌉`, at least 1.
    pub fn h1(&self, n: usize) -> usize {
        ((self.kappa1 * (n as f64).ln()).ceil() as usize).max(1)
    }

    /// `h₂ = ⌈κ₂ ln ln n⌉`, at least 1.
    pub fn h2(&self, n: usize) -> usize {
        let lln = (n as f64).ln().ln();
        if lln.is_finite() && lln > 0.0 {
            ((self.kappa2 * lln).ceil() as usize).max(1)
        } else {
            1
        }
    }
}

/// The exploration used inside each ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalKind {
    Walk,
    Loop,
}

/// Record of one separator descent.
#[derive(Clone, Debug, Default)]
pub struct SeparatorRun {
    /// Separators visited, in order.
    pub separators: Vec<NodeId>,
    /// Verdict of each phase; `None` when the budget ran out mid-phase.
    pub verdicts: Vec<Option<Verdict>>,
    pub queries: u64,
    pub found: bool,
    /// Queried nodes in order.
    pub order: Vec<NodeId>,
}

/// Descends the centroid decomposition with the given local procedure,
/// spending at most `budget` distinct queries.
pub fn separator_descent<A: Advice + ?Sized>(
    t: &Tree,
    ctx: &QueryContext,
    adv: &A,
    h: usize,
    mode: BallMode,
    kind: LocalKind,
    budget: u64,
) -> SeparatorRun {
    let c = &ctx.centroid;
    let rule = BallRule::new(mode, h, t.max_degree());
    let mut strand = Strand::new(t.treasure(), budget);
    let mut run = SeparatorRun::default();
    let mut s = c.root();
    loop {
        run.separators.push(s);
        let outcome = match kind {
            LocalKind::Walk => local_walk(t, adv, s, rule.clone(), |x| c.contains(s, x), &mut strand),
            LocalKind::Loop => local_loop(t, adv, s, rule.clone(), |x| c.contains(s, x), &mut strand),
        };
        match outcome {
            LocalOutcome::Verdict(Verdict::Component(v)) => {
                run.verdicts.push(Some(Verdict::Component(v)));
                match c.child_toward(s, v) {
                    Some(next) => s = next,
                    None => break,
                }
            }
            LocalOutcome::Verdict(v) => {
                run.verdicts.push(Some(v));
                break;
            }
            LocalOutcome::OutOfBudget => {
                run.verdicts.push(None);
                break;
            }
        }
    }
    run.queries = strand.queries;
    run.found = strand.found;
    run.order = strand.order;
    run
}

/// Per-strand summary of a query search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrandSummary {
    /// Queries the strand would make alone, capped at the scan cost.
    pub queries: u64,
    pub found: bool,
}

/// Result of an interleaved query search.
#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub transcript: SearchTranscript,
    pub strands: Vec<StrandSummary>,
}

fn interleave(t: &Tree, ctx: &QueryContext, runs: Vec<SeparatorRun>, record: bool) -> QueryOutcome {
    let scan = &t.bfs_order()[..ctx.scan_cost as usize];
    let mut seqs: Vec<(&[NodeId], bool)> = runs.iter().map(|r| (r.order.as_slice(), r.found)).collect();
    seqs.push((scan, true));
    let merged = round_robin(&seqs, t.treasure());
    let mut transcript = SearchTranscript::new(t.root(), record);
    for x in merged {
        transcript.query(x);
    }
    let mut strands: Vec<StrandSummary> = runs
        .iter()
        .map(|r| StrandSummary {
            queries: r.queries,
            found: r.found,
        })
        .collect();
    strands.push(StrandSummary {
        queries: ctx.scan_cost,
        found: true,
    });
    QueryOutcome { transcript, strands }
}

/// The separator search with an explicit ball height.
pub fn a_sep_height<A: Advice + ?Sized>(t: &Tree, ctx: &QueryContext, adv: &A, h: usize, record: bool) -> QueryOutcome {
    let sep = separator_descent(t, ctx, adv, h, BallMode::Weighted, LocalKind::Walk, ctx.scan_cost);
    interleave(t, ctx, vec![sep], record)
}

/// The separator search with `h = ⌈−3 ln(2n)/ln(1−ε)⌉`.
pub fn a_sep_with<A: Advice + ?Sized>(t: &Tree, ctx: &QueryContext, adv: &A, eps: f64) -> SearchTranscript {
    a_sep_height(t, ctx, adv, sep_height(t.len(), eps), false).transcript
}

/// The separator search, building the per-tree context on the fly.
pub fn a_sep<A: Advice + ?Sized>(t: &Tree, adv: &A, eps: f64) -> SearchTranscript {
    a_sep_with(t, &QueryContext::new(t), adv, eps)
}

/// The two-layer search: a fast separator strand with small balls, a
/// separator strand with large balls explored level by level, and the scan.
pub fn a_two_layers_outcome<A: Advice + ?Sized>(
    t: &Tree,
    ctx: &QueryContext,
    adv: &A,
    params: TwoLayers,
    record: bool,
) -> QueryOutcome {
    let n = t.len();
    let budget = ctx.scan_cost;
    let fast = separator_descent(t, ctx, adv, params.h2(n), BallMode::Regular, LocalKind::Walk, budget);
    let mid = separator_descent(t, ctx, adv, params.h1(n), BallMode::Regular, LocalKind::Loop, budget);
    interleave(t, ctx, vec![fast, mid], record)
}

pub fn a_two_layers_with<A: Advice + ?Sized>(
    t: &Tree,
    ctx: &QueryContext,
    adv: &A,
    params: TwoLayers,
) -> SearchTranscript {
    a_two_layers_outcome(t, ctx, adv, params, false).transcript
}

pub fn a_two_layers<A: Advice + ?Sized>(t: &Tree, adv: &A, kappa1: f64, kappa2: f64) -> SearchTranscript {
    a_two_layers_with(t, &QueryContext::new(t), adv, TwoLayers { kappa1, kappa2 })
}

/// The level loop inside one ball, halted at τ or a promising nominee.
struct LoopLocal<'a, A: ?Sized, F> {
    tree: &'a Tree,
    adv: &'a A,
    rule: BallRule,
    in_component: F,
    strand: &'a mut Strand,
    /// Sums, own parent in the ball, and own pointer once read.
    state: FxHashMap<NodeId, (PathSums, Option<NodeId>, Option<NodeId>)>,
    outcome: Option<LocalOutcome>,
}

impl<A: Advice + ?Sized, F: Fn(NodeId) -> bool> LoopRule for LoopLocal<'_, A, F> {
    fn expand(&mut self, x: NodeId, up: Option<NodeId>, out: &mut Vec<NodeId>) {
        if up.is_some() && self.rule.is_nominee(&self.state[&x].0) {
            return;
        }
        for y in self.tree.neighbors(x) {
            if Some(y) != up && (self.in_component)(y) {
                out.push(y);
            }
        }
    }

    fn on_query(&mut self, x: NodeId, up: Option<NodeId>, _level: usize) -> Flow {
        let sums = match up {
            None => PathSums::default(),
            Some(w) => {
                let (ws, wup, wp) = &self.state[&w];
                let a = match *wp {
                    Some(p) if p == x => 1,
                    Some(p) if Some(p) == *wup => -1,
                    _ => 0,
                };
                ws.step(self.tree.degree(w), a)
            }
        };
        if self.strand.query(x) == StrandFlow::OutOfBudget {
            self.outcome = Some(LocalOutcome::OutOfBudget);
            return Flow::Stop;
        }
        if x == self.tree.treasure() {
            self.outcome = Some(LocalOutcome::Verdict(Verdict::TreasureFound));
            return Flow::Stop;
        }
        let stop = sums.dist > 0 && self.rule.is_nominee(&sums) && self.rule.is_promising(&sums);
        self.state.insert(x, (sums, up, None));
        if stop {
            self.outcome = Some(LocalOutcome::Verdict(Verdict::Component(x)));
            return Flow::Stop;
        }
        Flow::Continue
    }

    fn pointer(&mut self, x: NodeId) -> Option<NodeId> {
        let p = self.adv.pointer(x);
        if let Some(e) = self.state.get_mut(&x) {
            e.2 = p;
        }
        p
    }
}

fn local_loop<A: Advice + ?Sized>(
    t: &Tree,
    adv: &A,
    u: NodeId,
    rule: BallRule,
    in_component: impl Fn(NodeId) -> bool,
    strand: &mut Strand,
) -> LocalOutcome {
    let mut ll = LoopLocal {
        tree: t,
        adv,
        rule,
        in_component,
        strand,
        state: FxHashMap::default(),
        outcome: None,
    };
    run_loop(&mut ll, u);
    ll.outcome.unwrap_or(LocalOutcome::Verdict(Verdict::Exhausted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_advice, AdviceAssignment, NoiseModel};
    use crate::rng::trial_key;
    use crate::tree::{build_complete_ary, build_path, build_random, CompleteAry};

    #[test]
    fn single_node() {
        let t = build_path(1, 0).unwrap();
        let a = AdviceAssignment::correct(&t);
        assert_eq!(a_sep(&t, &a, 0.2).queries, 1);
        assert_eq!(a_two_layers(&t, &a, 3.0, 3.0).queries, 1);
        assert_eq!(exhaustive(&t), vec![0]);
    }

    #[test]
    fn exhaustive_is_bfs_permutation() {
        let t = build_path(3, 2).unwrap();
        assert_eq!(exhaustive(&t), vec![0, 1, 2]);
        let t = build_random(40, 3, None).unwrap();
        let mut e = exhaustive(&t);
        e.sort_unstable();
        assert_eq!(e, (0..40).collect::<Vec<_>>());
    }

    #[test]
    fn heights() {
        assert_eq!(sep_height(127, 0.2), 75);
        assert_eq!(default_kappa(0.1), 29.0);
        let p = TwoLayers::from_eps(0.1);
        assert_eq!(p.h2(2), 1);
        assert_eq!(p.h1(100), (29.0 * 100f64.ln()).ceil() as usize);
    }

    #[test]
    fn noiseless_binary_127() {
        let t = build_complete_ary(2, 6, 6).unwrap();
        let a = AdviceAssignment::correct(&t);
        let tr = a_sep(&t, &a, 0.2);
        assert_eq!(*tr.visits.last().unwrap(), t.treasure());
        assert!(tr.queries <= 2 * 7 * t.len() as u64);
        assert!(tr.queries <= 2 * ctx_scan(&t));
    }

    fn ctx_scan(t: &Tree) -> u64 {
        QueryContext::new(t).scan_cost()
    }

    #[test]
    fn noiseless_fast_strand_alone() {
        let t = CompleteAry::new(3, 6, 6).root_children(4).build().unwrap();
        let ctx = QueryContext::new(&t);
        let a = AdviceAssignment::correct(&t);
        let out = a_two_layers_outcome(&t, &ctx, &a, TwoLayers::from_eps(0.1), false);
        assert!(out.strands[0].found);
        assert!(out.transcript.queries <= 3 * out.strands[0].queries);
    }

    #[test]
    fn interleave_bound_and_termination() {
        let model = NoiseModel::uniform(0.3);
        for seed in 0..20 {
            let t = build_random(60, seed, None).unwrap();
            let ctx = QueryContext::new(&t);
            let a = sample_advice(&t, &model, trial_key(seed, 0));
            for out in [
                a_sep_height(&t, &ctx, &a, 3, false),
                a_two_layers_outcome(&t, &ctx, &a, TwoLayers { kappa1: 1.0, kappa2: 1.0 }, false),
            ] {
                let k = out.strands.len() as u64;
                let best = out.strands.iter().filter(|s| s.found).map(|s| s.queries).min().unwrap();
                assert!(out.transcript.queries <= k * best);
                assert_eq!(out.transcript.end, t.treasure());
            }
        }
    }

    #[test]
    fn safety_without_misleading_separators() {
        let model = NoiseModel::uniform(0.05);
        let t = build_complete_ary(2, 7, 7).unwrap();
        let ctx = QueryContext::new(&t);
        let h = 6;
        let phases = (t.len() as f64).log2().ceil() as usize;
        let mut checked = 0;
        for trial in 0..40 {
            let a = sample_advice(&t, &model, trial_key(11, trial));
            let run = separator_descent(&t, &ctx, &a, h, BallMode::Weighted, LocalKind::Walk, u64::MAX);
            if run.separators.iter().any(|&s| is_misleading(&t, &a, s, h, BallMode::Weighted)) {
                continue;
            }
            checked += 1;
            assert!(run.found, "trial {trial}");
            assert!(run.separators.len() <= phases);
        }
        assert!(checked > 0);
    }
}
