//! Leaf rankings, beating-leaf counts and the uniform-choice floor.

use rand::Rng;

use crate::noise::{Advice, AdviceAssignment};
use crate::rng::walk_rng;
use crate::tree::{Topology, Tree};
use crate::{LogWeight, NodeId};

/// For every node `x`, the number of internal nodes whose advice points
/// toward `x`. Leaf advice is left out: it is always correct, so counting
/// it would give away τ.
///
/// Moving from a node `p` to its child `c` changes the count only through
/// the advice of `p` and `c` themselves, so one top-down pass suffices.
pub fn adv_to_counts<A: Advice + ?Sized>(t: &Tree, adv: &A) -> Vec<u64> {
    let internal = |w: NodeId| !t.is_leaf(w);
    let mut cnt = vec![0i64; t.len()];
    let root = t.root();
    cnt[root] = t
        .nodes()
        .filter(|&w| w != root && internal(w) && adv.pointer(w) == t.parent(w))
        .count() as i64;
    for &c in &t.bfs_order()[1..] {
        let p = t.parent(c).unwrap();
        let down = internal(p) && adv.pointer(p) == Some(c);
        let up = internal(c) && adv.pointer(c) == Some(p);
        cnt[c] = cnt[p] + i64::from(down) - i64::from(up);
    }
    cnt.into_iter().map(|c| c as u64).collect()
}

/// Leaves by decreasing number of internal arrows pointing toward them,
/// lowest id first on ties. With the treasure uniform over the leaves this
/// is the order of decreasing posterior probability.
pub fn optimal_bayes_order<A: Advice + ?Sized>(t: &Tree, adv: &A) -> Vec<NodeId> {
    let cnt = adv_to_counts(t, adv);
    let mut leaves: Vec<NodeId> = t.leaves().collect();
    leaves.sort_by_key(|&u| (std::cmp::Reverse(cnt[u]), u));
    leaves
}

/// Leaves with strictly more internal arrows toward them than τ has.
pub fn count_beating_leaves<A: Advice + ?Sized>(t: &Tree, adv: &A) -> u64 {
    let cnt = adv_to_counts(t, adv);
    let tau = t.treasure();
    t.leaves().filter(|&u| u != tau && cnt[u] > cnt[tau]).count() as u64
}

/// Nodes that `a_walk_uniform_theta` queries before τ under every advice,
/// with the advice that achieves exactly this set.
///
/// A candidate's key only grows with arrows toward it, so the least
/// favorable advice has the root pointing at τ's branch and every other
/// node pointing to its parent. Under it, `u` is queried before τ iff every
/// node on the root path of `u` outranks τ; under any other advice those
/// nodes still outrank τ.
pub fn uniform_theta_forced(t: &Tree) -> (Vec<NodeId>, AdviceAssignment) {
    let root = t.root();
    let tau = t.treasure();
    let pointer: Vec<Option<NodeId>> = t
        .nodes()
        .map(|u| match (u == tau, u == root) {
            (true, _) => None,
            (false, true) => t.toward_treasure(u),
            (false, false) => t.parent(u),
        })
        .collect();
    let adv = AdviceAssignment::from_pointers(t, pointer);
    let mut key = vec![LogWeight::zero(); t.len()];
    for &c in &t.bfs_order()[1..] {
        let p = t.parent(c).unwrap();
        let mut k = key[p].clone();
        k.add_ln(t.leaf_count(p), -2);
        k.add_ln(t.leaf_count(c), 2);
        let arrow = match adv.pointer(p) {
            Some(x) if x == c => 1,
            Some(x) if Some(x) == t.parent(p) => -1,
            _ => 0,
        };
        k.add_ln(t.degree(p) as u64, 3 * arrow);
        key[c] = k;
    }
    let outranks = |u: NodeId| key[u] > key[tau] || (key[u] == key[tau] && u < tau);
    let mut forced = vec![false; t.len()];
    let mut out = Vec::new();
    for &u in t.bfs_order() {
        if u == tau {
            continue;
        }
        let above = t.parent(u).map_or(true, |p| forced[p]);
        if above && outranks(u) {
            forced[u] = true;
            out.push(u);
        }
    }
    (out, adv)
}

/// Expected [`count_beating_leaves`] on a complete tree (root with
/// `root_children` children, `branching` below, depth `depth`, τ a leaf at
/// full depth) under uniform random noise `q`.
///
/// Only nodes on the path between a leaf `u` and τ can favor one over the
/// other. Each contributes +1 (toward `u`, probability `q/Δ`), −1 (toward
/// τ, `1 − q + q/Δ`) or 0, so the count is a sum over the depth `j` of the
/// meeting point of `#leaves(j) · P(S_j > 0)`.
pub fn expected_beating_leaves(branching: usize, root_children: usize, depth: usize, q: f64) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    let b = branching as f64;
    let law = |deg: f64| {
        let plus = q / deg;
        [1.0 - q + plus, q * (1.0 - 2.0 / deg), plus]
    };
    let mut total = 0.0;
    for j in 0..depth {
        let (fan, deg) = if j == 0 {
            (root_children as f64, root_children as f64)
        } else {
            (b, b + 1.0)
        };
        let leaves = (fan - 1.0) * b.powi((depth - j - 1) as i32);
        if leaves == 0.0 {
            continue;
        }
        // distribution of the sum, offset so index 0 is the minimum
        let mut dist = vec![1.0];
        let mut push = |l: [f64; 3]| {
            let mut next = vec![0.0; dist.len() + 2];
            for (i, &p) in dist.iter().enumerate() {
                for (k, &w) in l.iter().enumerate() {
                    next[i + k] += p * w;
                }
            }
            dist = next;
        };
        push(law(deg));
        for _ in 0..2 * (depth - 1 - j) {
            push(law(b + 1.0));
        }
        let zero = (dist.len() - 1) / 2;
        let positive: f64 = dist[zero + 1..].iter().sum();
        total += leaves * positive;
    }
    total
}

/// Any strategy probing `k` equally likely places needs `(k+1)/2` probes
/// in expectation.
pub fn uniform_choice_floor(k: u64) -> f64 {
    (k as f64 + 1.0) / 2.0
}

/// Mean and standard error of the probes a fixed order needs to find an
/// item hidden uniformly among `order.len()` places.
pub fn simulate_uniform_scan(order: &[usize], trials: u64, seed: u64) -> (f64, f64) {
    let k = order.len();
    let mut pos = vec![0u64; k];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i as u64 + 1;
    }
    let mut rng = walk_rng(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let c = pos[rng.random_range(0..k)] as f64;
        s += c;
        s2 += c * c;
    }
    let n = trials as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_advice, AdviceAssignment, NoiseModel};
    use crate::rng::trial_key;
    use crate::tree::{build_complete_ary, build_path, path_between};

    /// Direct count: walk every internal node's pointer.
    fn brute_counts(t: &Tree, a: &AdviceAssignment) -> Vec<u64> {
        t.nodes()
            .map(|x| {
                t.nodes()
                    .filter(|&w| w != x && !t.is_leaf(w))
                    .filter(|&w| a.pointer[w].is_some() && a.pointer[w] == Some(path_between(t, w, x).nodes[1]))
                    .count() as u64
            })
            .collect()
    }

    #[test]
    fn counts_match_brute_force() {
        let t = build_complete_ary(3, 3, 3).unwrap();
        for trial in 0..10 {
            let a = sample_advice(&t, &NoiseModel::uniform(0.6), trial_key(4, trial));
            assert_eq!(adv_to_counts(&t, &a), brute_counts(&t, &a));
        }
    }

    #[test]
    fn noiseless_order_and_count() {
        let t = build_complete_ary(2, 4, 4).unwrap();
        let a = AdviceAssignment::correct(&t);
        assert_eq!(optimal_bayes_order(&t, &a)[0], t.treasure());
        assert_eq!(count_beating_leaves(&t, &a), 0);
        let single = build_path(1, 0).unwrap();
        assert_eq!(count_beating_leaves(&single, &AdviceAssignment::correct(&single)), 0);
    }

    #[test]
    fn one_arrow_decides() {
        // root with two leaf children; τ = 2, root points at 1
        let t = Tree::from_parents(vec![None, Some(0), Some(0)], 2).unwrap();
        let a = AdviceAssignment::from_pointers(&t, vec![Some(1), Some(0), None]);
        assert_eq!(optimal_bayes_order(&t, &a), vec![1, 2]);
        assert_eq!(count_beating_leaves(&t, &a), 1);
    }

    #[test]
    fn expectation_matches_sampling() {
        let (b, d, q) = (3, 3, 0.5);
        let t = build_complete_ary(b, d, d).unwrap();
        let exact = expected_beating_leaves(b, b, d, q);
        let m = NoiseModel::uniform(q);
        let n = 20_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| count_beating_leaves(&t, &sample_advice(&t, &m, trial_key(8, i))) as f64)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se, "mean {mean} exact {exact} se {se}");
    }

    #[test]
    fn floor_values() {
        assert_eq!(uniform_choice_floor(1), 1.0);
        assert_eq!(uniform_choice_floor(5), 3.0);
        let (m, se) = simulate_uniform_scan(&[1, 0], 100_000, 3);
        assert!((m - 1.5).abs() <= 3.0 * se);
    }

    #[test]
    fn forced_nodes_match_the_walk() {
        use crate::tree::build_trimmed_ary;
        use crate::walkers::a_walk_uniform_theta;
        for d in 2..=6 {
            let t = build_trimmed_ary(3, d).unwrap();
            let (forced, adv) = uniform_theta_forced(&t);
            let tr = a_walk_uniform_theta(&t, &adv);
            assert_eq!(tr.queries - 1, forced.len() as u64);
            let mut before = tr.visits[..tr.visits.len() - 1].to_vec();
            before.sort_unstable();
            let mut f = forced.clone();
            f.sort_unstable();
            assert_eq!(before, f);
        }
    }
}
