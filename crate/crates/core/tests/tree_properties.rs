use proptest::prelude::*;

use nts_core::tree::{
    beta, build_caterpillar, build_complete_ary, build_heap_ary, build_random, build_trimmed_ary, theta,
    weighted_sums_check, CentroidTree, CompleteAry,
};
use nts_core::{Topology, Tree};

fn any_tree() -> impl Strategy<Value = Tree> {
    prop_oneof![
        (1usize..120, any::<u64>()).prop_map(|(n, s)| build_random(n, s, None).unwrap()),
        (2usize..5, 0usize..5).prop_map(|(b, d)| build_complete_ary(b, d, d).unwrap()),
        (1usize..6, 2usize..5, 0usize..6).prop_map(|(r, b, d)| {
            CompleteAry::new(b, d, d / 2).root_children(r).build().unwrap()
        }),
        (1usize..8, 2usize..5).prop_map(|(s, k)| build_caterpillar(s, k, s / 2).unwrap()),
        (2usize..4, 1usize..5).prop_map(|(b, d)| build_trimmed_ary(b, d).unwrap()),
        (1usize..5, 2usize..4, 1usize..200).prop_map(|(r, b, n)| build_heap_ary(r, b, n).unwrap()),
    ]
}

proptest! {
    #[test]
    fn inverse_beta_below_theta(t in any_tree()) {
        for u in t.nodes() {
            let (ib, th) = (1.0 / beta(&t, u), theta(&t, u));
            prop_assert!(ib <= th * (1.0 + 1e-12));
            prop_assert!(th <= 1.0);
        }
    }

    #[test]
    fn text_round_trip(t in any_tree()) {
        prop_assert_eq!(Tree::parse(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn centroid_depth_and_halving(t in any_tree()) {
        let c = CentroidTree::new(&t);
        let bound = (t.len() as f64).log2().ceil() as usize;
        prop_assert!(c.depth() <= bound);
        for s in t.nodes() {
            if let Some(p) = c.parent(s) {
                prop_assert!(c.component_size(s) <= c.component_size(p) / 2);
            }
        }
    }

    #[test]
    fn treasure_path_is_a_path(t in any_tree()) {
        let path = t.treasure_path();
        prop_assert_eq!(path[0], t.root());
        prop_assert_eq!(*path.last().unwrap(), t.treasure());
        prop_assert_eq!(path.len(), t.treasure_depth() + 1);
        for w in path.windows(2) {
            prop_assert_eq!(t.parent(w[1]), Some(w[0]));
        }
    }
}

#[test]
fn weight_sums_on_random_trees() {
    let cs: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).chain([0.95, 0.99]).collect();
    for seed in 0..100 {
        let t = build_random(2 + (seed as usize * 37) % 400, seed, None).unwrap();
        for &c in &cs {
            let (s0, s1) = weighted_sums_check(&t, c);
            assert!(s0 <= 1.0 / (1.0 - c) + 1e-9, "seed {seed} c {c}: {s0}");
            assert!(s1 <= c / (1.0 - c).powi(2) + 1e-9, "seed {seed} c {c}: {s1}");
        }
    }
}
