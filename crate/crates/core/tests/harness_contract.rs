use std::collections::HashSet;

use nts_core::algo::{Algorithm, Metric};
use nts_core::harness::{
    load_config, run, run_with_threads, sweep, trial_costs, write_csv, ExperimentSpec, QSpec, TreeSpec, CSV_HEADER,
};
use nts_core::noise::sample_advice;
use nts_core::oracle::{adv_to_counts, optimal_bayes_order};
use nts_core::tree::build_random;
use nts_core::NoiseModel;

fn walk(trials: u64, seed: u64) -> ExperimentSpec {
    ExperimentSpec::new(TreeSpec::ary(4, 5), Algorithm::Walk)
        .q(QSpec::uniform(0.3))
        .trials(trials)
        .seed(seed)
}

#[test]
fn stderr_is_the_sample_deviation_over_root_n() {
    for trials in [1_000, 10_000, 100_000] {
        let spec = walk(trials, 4);
        let (_, costs) = trial_costs(&spec, None).unwrap();
        let xs: Vec<f64> = costs.iter().map(|c| c.moves.unwrap() as f64).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m = run(&spec).unwrap().moves.unwrap();
        assert_eq!(m.samples, trials);
        assert!((m.mean - mean).abs() < 1e-9 * mean);
        assert!((m.stderr - (var / n).sqrt()).abs() < 1e-9 * m.stderr, "{trials} trials");
    }
}

#[test]
fn stderr_matches_the_spread_of_independent_means() {
    let runs: Vec<_> = (0..40).map(|s| run(&walk(1_000, 100 + s)).unwrap().moves.unwrap()).collect();
    let k = runs.len() as f64;
    let grand = runs.iter().map(|m| m.mean).sum::<f64>() / k;
    let spread = (runs.iter().map(|m| (m.mean - grand).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let claimed = runs.iter().map(|m| m.stderr).sum::<f64>() / k;
    // the sample deviation of 40 means is within about 35% of the truth
    let ratio = spread / claimed;
    assert!((0.65..1.35).contains(&ratio), "spread {spread} vs stderr {claimed}");
}

#[test]
fn rows_are_deterministic() {
    let a = run_with_threads(&walk(2_000, 8), Some(2)).unwrap();
    let b = run_with_threads(&walk(2_000, 8), Some(5)).unwrap();
    assert_eq!(a, b);
    let c = run(&walk(2_000, 9)).unwrap();
    assert_ne!(a.moves, c.moves);
}

#[test]
fn metrics_are_never_mixed() {
    let tree = TreeSpec::ary(3, 4);
    let cases = [
        (Algorithm::Walk, true, true),
        (Algorithm::Sep { eps: 0.2, h: None }, false, true),
        (Algorithm::Loop, false, true),
        (Algorithm::TwoLayers { kappa1: 2.0, kappa2: 2.0 }, false, true),
        (Algorithm::Pf { lambda: 0.8, step_cap: 1_000_000 }, true, true),
    ];
    for (algo, moves, queries) in cases {
        assert_eq!(algo.metrics().contains(&Metric::Moves), moves);
        let spec = ExperimentSpec::new(tree.clone(), algo.clone()).q(QSpec::uniform(0.05)).trials(50);
        let row = run(&spec).unwrap();
        assert_eq!(row.moves.is_some(), moves, "{algo}");
        assert_eq!(row.queries.is_some(), queries, "{algo}");
    }
}

#[test]
fn sweep_gives_one_row_per_value() {
    let values: Vec<String> = ["0", "0.05", "0.1", "0.2", "0.4"].iter().map(|s| s.to_string()).collect();
    let rows = sweep("q", &values, &walk(200, 1)).unwrap();
    assert_eq!(rows.len(), 5);
    for (row, v) in rows.iter().zip(&values) {
        assert_eq!(row.q.parse::<f64>().unwrap(), v.parse::<f64>().unwrap());
    }
    assert_eq!(rows[0].moves.unwrap().stderr, 0.0);

    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    let mut reader = csv::Reader::from_reader(out.as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    assert_eq!(reader.records().count(), 5);
}

#[test]
fn config_files_expand_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.ini");
    std::fs::write(
        &path,
        "trials = 100\nseed = 3\n\n[depth]\ntree = ary:delta=3,d=3\nalgo = a_walk\nq = 0.1\nsweep = tree.d\nvalues = 2; 3; 4\n\n[pf]\ntree = path:n=5,td=4\nalgo = pf:lambda=0.9\n",
    )
    .unwrap();
    let plans = load_config(&path).unwrap();
    assert_eq!(plans.len(), 2);
    let rows: Vec<_> = plans.iter().flat_map(|p| p.run().unwrap()).collect();
    assert_eq!(rows.iter().map(|r| r.depth).collect::<Vec<_>>(), [2, 3, 4, 4]);
    assert!(rows.iter().all(|r| r.trials == 100 && r.seed == 3));
}

#[test]
fn bayes_order_ranks_every_leaf_once() {
    for seed in 0..50 {
        let t = build_random(40, seed, None).unwrap();
        let adv = sample_advice(&t, &NoiseModel::uniform(0.5), seed);
        let order = optimal_bayes_order(&t, &adv);
        let leaves: HashSet<_> = t.leaves().collect();
        assert_eq!(order.len(), leaves.len());
        assert_eq!(order.iter().copied().collect::<HashSet<_>>(), leaves);
        let cnt = adv_to_counts(&t, &adv);
        assert!(order.windows(2).all(|w| cnt[w[0]] >= cnt[w[1]]));
    }
}
