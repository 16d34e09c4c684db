use std::cell::RefCell;
use std::collections::HashSet;

use proptest::prelude::*;

use nts_core::noise::{sample_advice, Advice, AdviceAssignment, NoiseModel};
use nts_core::queriers::{a_loop, a_sep_height, a_two_layers_outcome, sep_height, QueryContext, TwoLayers};
use nts_core::tree::{build_random, path_between};
use nts_core::walkers::{pairwise_beats, run_walk, WalkAlgo};
use nts_core::{NodeId, Topology, Tree};

/// Advice that remembers which nodes were read.
struct Audited<'a> {
    inner: &'a AdviceAssignment,
    reads: RefCell<Vec<NodeId>>,
}

impl Advice for Audited<'_> {
    fn pointer(&self, u: NodeId) -> Option<NodeId> {
        self.reads.borrow_mut().push(u);
        self.inner.pointer(u)
    }
}

fn instance() -> impl Strategy<Value = (Tree, AdviceAssignment)> {
    (2usize..80, any::<u64>(), 0.0f64..0.9, any::<u64>()).prop_map(|(n, s, q, key)| {
        let t = build_random(n, s, None).unwrap();
        let adv = sample_advice(&t, &NoiseModel::uniform(q), key);
        (t, adv)
    })
}

const WALKERS: [WalkAlgo; 3] = [WalkAlgo::Walk, WalkAlgo::Natural, WalkAlgo::UniformTheta];

proptest! {
    #[test]
    fn walkers_read_only_explored_advice((t, adv) in instance()) {
        for algo in WALKERS {
            let audited = Audited { inner: &adv, reads: RefCell::new(Vec::new()) };
            let tr = run_walk(&t, &audited, algo, false);
            let visited: HashSet<NodeId> = tr.visits.iter().copied().collect();
            for u in audited.reads.borrow().iter() {
                prop_assert!(visited.contains(u), "{algo:?} read advice at unexplored {u}");
            }
        }
    }

    #[test]
    fn walkers_terminate_and_account_moves((t, adv) in instance()) {
        for algo in WALKERS {
            let tr = run_walk(&t, &adv, algo, false);
            prop_assert_eq!(tr.end, t.treasure());
            prop_assert!(tr.queries as usize <= t.len());
            let distinct: HashSet<NodeId> = tr.visits.iter().copied().collect();
            prop_assert_eq!(distinct.len(), tr.visits.len());
            let walked: u64 = tr
                .visits
                .windows(2)
                .map(|w| path_between(&t, w[0], w[1]).nodes.len() as u64 - 1)
                .sum();
            prop_assert_eq!(walked, tr.moves);
            prop_assert!(tr.moves >= t.treasure_depth() as u64);
        }
    }

    #[test]
    fn walk_pops_the_pairwise_winner((t, adv) in instance()) {
        let tr = run_walk(&t, &adv, WalkAlgo::Walk, false);
        let mut explored: HashSet<NodeId> = HashSet::new();
        let mut frontier: Vec<NodeId> = vec![t.root()];
        for &x in &tr.visits {
            for &y in &frontier {
                if y == x {
                    continue;
                }
                let x_wins = pairwise_beats(&t, &adv, x, y).unwrap();
                let y_wins = pairwise_beats(&t, &adv, y, x).unwrap();
                prop_assert!(x_wins || (!y_wins && x < y), "popped {x} but {y} outranks it");
            }
            explored.insert(x);
            frontier.retain(|&y| y != x);
            frontier.extend(t.children(x).iter());
        }
    }

    #[test]
    fn queriers_find_the_treasure((t, adv) in instance()) {
        let ctx = QueryContext::new(&t);
        let h = sep_height(t.len(), 0.2).min(6);
        let sep = a_sep_height(&t, &ctx, &adv, h, false);
        let two = a_two_layers_outcome(&t, &ctx, &adv, TwoLayers { kappa1: 1.0, kappa2: 1.0 }, false);
        for out in [sep, two] {
            prop_assert_eq!(out.transcript.end, t.treasure());
            let k = out.strands.len() as u64;
            let best = out.strands.iter().filter(|s| s.found).map(|s| s.queries).min().unwrap();
            prop_assert!(out.transcript.queries <= k * best);
        }
        let lp = a_loop(&t, &adv);
        prop_assert_eq!(lp.end, t.treasure());
        prop_assert!(lp.queries as usize <= t.len());
    }
}
