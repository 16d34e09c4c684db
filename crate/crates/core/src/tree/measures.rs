use super::{Topology, Tree};
use crate::{LogWeight, NodeId};

/// Product of the degrees of the proper ancestors of `u`; 1 at the root.
pub fn beta<T: Topology + ?Sized>(t: &T, u: NodeId) -> f64 {
    let mut prod = 1.0;
    let mut cur = u;
    while let Some(p) = t.parent(cur) {
        prod *= t.degree(p) as f64;
        cur = p;
    }
    prod
}

/// `ln β(u)` as an exact log-combination.
pub fn log_beta<T: Topology + ?Sized>(t: &T, u: NodeId) -> LogWeight {
    let mut w = LogWeight::zero();
    let mut cur = u;
    while let Some(p) = t.parent(cur) {
        w.add_ln(t.degree(p) as u64, 1);
        cur = p;
    }
    w
}

/// Probability that a walk from the root, stepping to a uniform child until
/// it reaches a leaf, passes through `u`.
pub fn theta<T: Topology + ?Sized>(t: &T, u: NodeId) -> f64 {
    let mut prob = 1.0;
    let mut cur = u;
    while let Some(p) = t.parent(cur) {
        prob /= t.children(p).len() as f64;
        cur = p;
    }
    prob
}

/// `(Σ_v c^d(v)/β(v), Σ_v d(v)·c^d(v)/β(v))` over all nodes.
pub fn weighted_sums_check(t: &Tree, c: f64) -> (f64, f64) {
    let mut inv_beta = vec![0.0; t.len()];
    let (mut s0, mut s1) = (0.0, 0.0);
    for &u in t.bfs_order() {
        inv_beta[u] = match t.parent(u) {
            None => 1.0,
            Some(p) => inv_beta[p] / t.degree(p) as f64,
        };
        let d = t.depth(u) as f64;
        let term = c.powf(d) * inv_beta[u];
        s0 += term;
        s1 += d * term;
    }
    (s0, s1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_caterpillar, build_complete_ary, build_random};

    #[test]
    fn binary_tree_values() {
        let t = build_complete_ary(2, 2, 2).unwrap();
        assert_eq!(beta(&t, 0), 1.0);
        assert_eq!(beta(&t, 1), 2.0);
        assert_eq!(beta(&t, 3), 6.0);
        assert_eq!(log_beta(&t, 3), LogWeight::ln(6));
        assert_eq!(theta(&t, 0), 1.0);
        assert_eq!(theta(&t, 1), 0.5);
        assert_eq!(theta(&t, 3), 0.25);
    }

    #[test]
    fn theta_sums_to_one_over_leaves() {
        for seed in 0..20 {
            let t = build_random(60, seed, None).unwrap();
            let s: f64 = t.leaves().map(|u| theta(&t, u)).sum();
            assert!((s - 1.0).abs() < 1e-12);
            for u in t.nodes() {
                assert!(1.0 / beta(&t, u) <= theta(&t, u) + 1e-15);
            }
        }
    }

    #[test]
    fn weighted_sums() {
        let t = build_complete_ary(2, 2, 2).unwrap();
        let (s0, _) = weighted_sums_check(&t, 0.5);
        // independent hand summation: root, two children, four grandchildren
        let expect = 1.0 + 2.0 * 0.5 / 2.0 + 4.0 * 0.25 / 6.0;
        assert!((s0 - expect).abs() < 1e-12);
        let (s0, s1) = weighted_sums_check(&t, 1e-9);
        assert!((s0 - 1.0).abs() < 1e-8 && s1 < 1e-8);
        let cat = build_caterpillar(10, 5, 10).unwrap();
        let c = 0.9;
        let (s0, s1) = weighted_sums_check(&cat, c);
        assert!(s0 <= 1.0 / (1.0 - c));
        assert!(s1 <= c / ((1.0 - c) * (1.0 - c)));
    }
}
