use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nts_core::memoryless::{pf_trace, PfConfig};
use nts_core::noise::{Adversary, NoiseLevel, SampledAdvice};
use nts_core::rng::trial_key;
use nts_core::tree::{build_complete_ary, build_star};
use nts_core::{Advice, AdviceAssignment, NoiseModel, Topology};

const SAMPLES: u64 = 100_000;

/// `count / n` is within three standard errors of `p`.
fn agrees(count: u64, n: u64, p: f64) -> bool {
    let freq = count as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    (freq - p).abs() <= 3.0 * se + 1e-12
}

#[test]
fn random_faults_follow_the_marginal_law() {
    let t = build_complete_ary(3, 3, 3).unwrap();
    let q = 0.3;
    let m = NoiseModel::uniform(q);
    for u in [t.root(), t.children(t.root()).get(1), t.treasure_path()[2]] {
        let deg = t.degree(u);
        let good = t.toward_treasure(u).unwrap();
        let mut counts = vec![0u64; deg];
        let mut faulty = 0u64;
        for i in 0..SAMPLES {
            let (p, f) = SampledAdvice::new(&t, &m, trial_key(11, i)).draw(u).unwrap();
            let k = (0..deg).find(|&k| t.nth_neighbor(u, k) == p).unwrap();
            counts[k] += 1;
            faulty += f as u64;
        }
        assert!(agrees(faulty, SAMPLES, q), "fault rate at {u}");
        for k in 0..deg {
            let v = t.nth_neighbor(u, k);
            let p = if v == good { 1.0 - q + q / deg as f64 } else { q / deg as f64 };
            assert!(agrees(counts[k], SAMPLES, p), "pointer {u} -> {v}: {} of {SAMPLES}", counts[k]);
        }
    }
}

#[test]
fn faults_are_independent_across_nodes() {
    let t = build_complete_ary(2, 4, 4).unwrap();
    let q = 0.4;
    let m = NoiseModel::uniform(q);
    let pairs = [(0, 1), (1, 2), (3, t.len() - 1)];
    for (a, b) in pairs {
        let mut both = 0;
        for i in 0..SAMPLES {
            let s = SampledAdvice::new(&t, &m, trial_key(5, i));
            if s.draw(a).unwrap().1 && s.draw(b).unwrap().1 {
                both += 1;
            }
        }
        assert!(agrees(both, SAMPLES, q * q), "nodes {a} and {b}: {both}");
    }
}

#[test]
fn semi_adversarial_faults_hit_the_target() {
    let t = build_complete_ary(3, 3, 3).unwrap();
    let m = NoiseModel::semi_adversarial(NoiseLevel::Uniform(0.5), Adversary::PointToRoot);
    let mut faults = 0;
    for i in 0..2000 {
        let s = SampledAdvice::new(&t, &m, trial_key(3, i));
        for u in t.nodes() {
            if let Some((p, true)) = s.draw(u) {
                faults += 1;
                assert_eq!(p, Adversary::PointToRoot.target(&t, u));
            }
        }
    }
    assert!(faults > 0);
}

#[test]
fn advice_is_permanent_and_reproducible() {
    let t = build_complete_ary(3, 4, 4).unwrap();
    let m = NoiseModel::uniform(0.7);
    for key in [0, 1, u64::MAX] {
        let a = SampledAdvice::new(&t, &m, key);
        let b = SampledAdvice::new(&t, &m, key);
        let forward: Vec<_> = t.nodes().map(|u| a.pointer(u)).collect();
        let backward: Vec<_> = t.nodes().rev().map(|u| b.pointer(u)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        assert!(t.nodes().all(|u| a.pointer(u) == forward[u]));
    }
    let a = SampledAdvice::new(&t, &m, 1);
    let b = SampledAdvice::new(&t, &m, 2);
    assert!(t.nodes().any(|u| a.pointer(u) != b.pointer(u)));
}

/// Star whose center points at a wrong leaf, so the walk keeps coming back.
fn trap() -> (nts_core::Tree, AdviceAssignment) {
    let t = build_star(5, 5).unwrap();
    let c = t.root();
    let wrong = t.children(c).iter().find(|&v| v != t.treasure()).unwrap();
    let ptr = t.nodes().map(|u| if u == c { Some(wrong) } else if u == t.treasure() { None } else { Some(c) }).collect();
    let adv = AdviceAssignment::from_pointers(&t, ptr);
    (t, adv)
}

/// Next-node counts out of σ on its first visit and on later visits.
fn exits(lambda: f64, runs: u64) -> (Vec<u64>, Vec<u64>, u64, u64) {
    let (t, adv) = trap();
    let c = t.root();
    let deg = t.degree(c);
    let mut first = vec![0u64; deg];
    let mut later = vec![0u64; deg];
    let (mut n_first, mut n_later) = (0, 0);
    let cfg = PfConfig::new(lambda);
    for i in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        let trace = pf_trace(&t, &adv, &cfg, 10_000, &mut rng).unwrap();
        let mut seen = false;
        for w in trace.windows(2).filter(|w| w[0] == c) {
            let k = (0..deg).find(|&k| t.nth_neighbor(c, k) == w[1]).unwrap();
            if seen {
                later[k] += 1;
                n_later += 1;
            } else {
                first[k] += 1;
                n_first += 1;
            }
            seen = true;
        }
    }
    (first, later, n_first, n_later)
}

#[test]
fn pf_forgets_where_it_has_been() {
    let (t, adv) = trap();
    let c = t.root();
    let lambda = 0.5;
    let deg = t.degree(c) as f64;
    let (first, later, n_first, n_later) = exits(lambda, 200_000);
    assert!(n_later > 10_000, "{n_first} {n_later} {first:?} {later:?}");
    for k in 0..t.degree(c) {
        let v = t.nth_neighbor(c, k);
        let p = (1.0 - lambda) / deg + if Some(v) == adv.pointer(c) { lambda } else { 0.0 };
        assert!(agrees(first[k], n_first, p), "first visit to {v}: {first:?} of {n_first}, p {p}");
        assert!(agrees(later[k], n_later, p), "revisit to {v}");
    }
}

#[test]
fn pf_without_listening_is_a_random_walk() {
    let (t, _) = trap();
    let deg = t.degree(t.root());
    let (first, later, n_first, n_later) = exits(0.0, 20_000);
    for k in 0..deg {
        assert!(agrees(first[k] + later[k], n_first + n_later, 1.0 / deg as f64));
    }
}
