//! The acceptance checks, shared by the test suite and the command line.
//!
//! Every check runs at a fixed seed and a fixed trial count, so its verdict
//! is reproducible. Statistical checks compare a Monte-Carlo mean with an
//! exact value or an analytic bound at three standard errors.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algo::{Algorithm, Metric};
use crate::harness::{
    fit_line, pf_hitting_growth, run, run_with_threads, threshold_above, threshold_below, write_csv, ExperimentSpec,
    HarnessError, ModelSpec, QSpec, ThresholdConfig, TreeSpec,
};
use crate::memoryless::DEFAULT_STEP_CAP;
use crate::noise::{star_cap, NoiseLevel, NoiseModel, SampledAdvice, DEFAULT_ENUMERATION_CAP};
use crate::oracle::{
    exact_expected_cost_f64, simulate_uniform_scan, tail_bound_check, uniform_choice_floor, uniform_theta_forced,
    OracleError, TailCase, TailError, TailProfile,
};
use crate::queriers::{is_misleading, BallMode};
use crate::rng::{trial_key, walk_rng};
use crate::tree::{build_trimmed_ary, TreeError, DEFAULT_NODE_BUDGET};

/// Criterion ids in order.
pub const CRITERIA: [&str; 12] = [
    "AC1", "AC2", "AC3", "AC4", "AC5", "AC6", "AC7", "AC8", "AC9", "AC10", "AC11", "AC12",
];

/// Seed shared by every check.
pub const SEED: u64 = 20_240_601;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown criterion '{0}'; expected one of AC1..AC12")]
    Unknown(String),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: &'static str,
    pub passed: bool,
    /// One line of headline numbers.
    pub summary: String,
    /// Per-case lines.
    pub details: Vec<String>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{} {verdict} {}", self.id, self.summary)
    }
}

/// Canonical id for a user-supplied name, case-insensitive.
pub fn criterion_id(name: &str) -> Result<&'static str, VerifyError> {
    CRITERIA
        .iter()
        .find(|c| c.eq_ignore_ascii_case(name.trim()))
        .copied()
        .ok_or_else(|| VerifyError::Unknown(name.to_string()))
}

pub fn run_criterion(name: &str) -> Result<CriterionReport, VerifyError> {
    let id = criterion_id(name)?;
    let (passed, summary, details) = match id {
        "AC1" => oracle_agreement()?,
        "AC2" => noiseless()?,
        "AC3" => below_threshold()?,
        "AC4" => above_threshold()?,
        "AC5" => query_floor(),
        "AC6" => tail_bounds()?,
        "AC7" => pf_linear()?,
        "AC8" => pf_blow_up()?,
        "AC9" => misleading()?,
        "AC10" => separator_scaling()?,
        "AC11" => baselines()?,
        "AC12" => reproducibility()?,
        _ => unreachable!("ids come from CRITERIA"),
    };
    Ok(CriterionReport {
        id,
        passed,
        summary,
        details,
    })
}

pub fn run_all() -> Result<Vec<CriterionReport>, VerifyError> {
    CRITERIA.iter().map(|c| run_criterion(c)).collect()
}

type Outcome = (bool, String, Vec<String>);

fn within(mean: f64, stderr: f64, exact: f64) -> bool {
    (mean - exact).abs() <= 3.0 * stderr + 1e-9
}

/// Small instances for the exact oracle: tree, noise, fault model.
pub const ORACLE_INSTANCES: [(&str, &str, &str); 22] = [
    ("path:n=3,td=2", "0.3", "random"),
    ("path:n=5,td=4", "0.2", "random"),
    ("path:n=6,td=3", "0.4", "random"),
    ("path:n=8,td=7", "0.1", "random"),
    ("path:n=7,td=6", "0.3", "semiadv:child=0"),
    ("star:leaves=4,treasure=1", "0.3", "random"),
    ("star:leaves=6,treasure=3", "0.5", "random"),
    ("star:leaves=3,treasure=2", "0.4", "semiadv:root"),
    ("star:leaves=5,treasure=4", "0.6", "semiadv:child=1"),
    ("complete:b=2,d=2", "0.2", "random"),
    ("complete:b=2,d=2", "0.45", "random"),
    ("complete:b=2,d=2,td=1", "0.3", "random"),
    ("complete:b=3,d=1", "0.3", "random"),
    ("complete:b=2,d=2", "0.3", "semiadv:root"),
    ("complete:b=2,d=3,root=1", "0.25", "random"),
    ("complete:b=2,d=2", "inv-sqrt-degree:0.5", "random"),
    ("random:n=7,seed=1", "0.3", "random"),
    ("random:n=8,seed=2", "0.2", "random"),
    ("random:n=9,seed=3", "inv-degree:0.5", "random"),
    ("random:n=10,seed=4", "0.15", "random"),
    ("caterpillar:spine=3,degree=2,td=3", "0.3", "random"),
    ("trimmed:b=2,d=3", "0.3", "random"),
];

pub const ORACLE_TRIALS: u64 = 100_000;

/// Monte-Carlo means agree with the exact oracle.
fn oracle_agreement() -> Result<Outcome, VerifyError> {
    let algos = [
        (Algorithm::Walk, Metric::Moves),
        (Algorithm::Natural, Metric::Moves),
        (Algorithm::Loop, Metric::Queries),
        (
            Algorithm::Pf {
                lambda: 0.75,
                step_cap: DEFAULT_STEP_CAP,
            },
            Metric::Moves,
        ),
    ];
    let mut details = Vec::new();
    let mut bad = 0;
    let mut total = 0;
    for (tree, q, model) in ORACLE_INSTANCES {
        let tree: TreeSpec = tree.parse().map_err(HarnessError::Invalid)?;
        let q: QSpec = q.parse().map_err(HarnessError::Invalid)?;
        let model: ModelSpec = model.parse().map_err(HarnessError::Invalid)?;
        for (algo, metric) in &algos {
            let spec = ExperimentSpec::new(tree.clone(), algo.clone())
                .q(q.clone())
                .model(model.clone())
                .trials(ORACLE_TRIALS)
                .seed(SEED);
            let inst = tree.build(DEFAULT_NODE_BUDGET)?;
            let t = inst.explicit().expect("small trees are explicit");
            let exact = exact_expected_cost_f64(t, &spec.noise()?, algo, *metric, DEFAULT_ENUMERATION_CAP)?;
            let row = run(&spec)?;
            let m = row.metric(*metric).expect("metric reported");
            let ok = within(m.mean, m.stderr, exact);
            total += 1;
            if !ok {
                bad += 1;
            }
            details.push(format!(
                "{} {} {tree} q={q} {model} {metric}: mc {:.5} ± {:.5}, exact {exact:.5}",
                if ok { "ok" } else { "off" },
                algo.name(),
                m.mean,
                m.stderr
            ));
        }
    }
    let summary = format!(
        "{} instances x {} algorithms: {}/{total} within 3 standard errors of the exact oracle",
        ORACLE_INSTANCES.len(),
        algos.len(),
        total - bad
    );
    Ok((bad == 0, summary, details))
}

/// Without noise the walkers go straight down.
fn noiseless() -> Result<Outcome, VerifyError> {
    let mut details = Vec::new();
    let mut ok = true;
    for delta in 2..=4 {
        for d in 1..=6 {
            let tree = TreeSpec::complete(delta, delta, d);
            let walk = run(&ExperimentSpec::new(tree.clone(), Algorithm::Walk).trials(3))?;
            let pf = Algorithm::Pf {
                lambda: 1.0,
                step_cap: DEFAULT_STEP_CAP,
            };
            let pf = run(&ExperimentSpec::new(tree, pf).trials(3))?;
            let (wm, wq, pm) = (
                walk.moves.unwrap(),
                walk.queries.unwrap(),
                pf.moves.unwrap(),
            );
            let hit = wm.mean == d as f64
                && wm.stderr == 0.0
                && wq.mean == (d + 1) as f64
                && wq.stderr == 0.0
                && pm.mean == d as f64
                && pm.stderr == 0.0;
            ok &= hit;
            details.push(format!(
                "branching {delta} depth {d}: a_walk moves {} queries {}, pf(1) steps {}",
                wm.mean, wq.mean, pm.mean
            ));
        }
    }
    Ok((ok, "a_walk moves = d, queries = d+1 and pf(1) steps = d on 18 trees".into(), details))
}

fn threshold_config() -> ThresholdConfig {
    ThresholdConfig {
        seed: SEED,
        ..ThresholdConfig::default()
    }
}

/// Below the threshold `a_walk` is linear in `d√Δ`.
fn below_threshold() -> Result<Outcome, VerifyError> {
    let cfg = threshold_config();
    let r = threshold_below(&cfg)?;
    let mut details: Vec<String> = r
        .rows
        .iter()
        .map(|row| {
            format!(
                "delta {} depth {}: moves {:.3} ± {:.3}, moves/(d√Δ) {:.4}",
                row.delta, row.depth, row.mean, row.stderr, row.ratio
            )
        })
        .collect();
    details.extend(r.spreads.iter().map(|(d, s)| format!("delta {d}: spread {s:.3}")));
    let worst = r.spreads.iter().map(|s| s.1).fold(0.0, f64::max);
    let summary = format!(
        "largest spread of moves/(d√Δ) across depths {worst:.3} (limit {}), global constant {:.4}",
        cfg.spread, r.constant
    );
    Ok((r.pass, summary, details))
}

/// Above the threshold the beating leaves grow at the predicted rate.
fn above_threshold() -> Result<Outcome, VerifyError> {
    let cfg = threshold_config();
    let r = threshold_above(&cfg)?;
    let details = r
        .fit
        .depths
        .iter()
        .enumerate()
        .map(|(i, d)| {
            format!(
                "depth {d}: mean {:.3} ± {:.3}, exact {:.3}",
                r.fit.means[i], r.fit.stderrs[i], r.exact[i]
            )
        })
        .collect();
    let summary = format!(
        "fitted growth {:.4} (exact {:.4}) against q²(Δ−1)³/Δ² = {:.4} ± {:.0}%; grows at least that fast: {}",
        r.fit.factor(),
        r.exact_factor,
        r.target,
        cfg.growth_tolerance * 100.0,
        r.direction
    );
    Ok((r.pass, summary, details))
}

pub const FLOOR_TRIALS: u64 = 1_000_000;

/// A fixed scan finds a uniformly hidden item after `(k+1)/2` probes.
fn query_floor() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for k in [1usize, 2, 5, 10] {
        let order: Vec<usize> = (0..k).collect();
        let (mean, se) = simulate_uniform_scan(&order, FLOOR_TRIALS, SEED + k as u64);
        let floor = uniform_choice_floor(k as u64);
        let hit = within(mean, se, floor);
        ok &= hit;
        details.push(format!("k {k}: {mean:.5} ± {se:.5}, (k+1)/2 = {floor}"));
    }
    (ok, "uniform scan matches (k+1)/2 for k in {1,2,5,10}".into(), details)
}

pub const TAIL_POINTS: usize = 120;
pub const TAIL_TRIALS: u64 = 20_000;

/// Random grid points for both tail lemmas.
pub fn tail_grid(seed: u64) -> (Vec<TailCase>, Vec<TailCase>) {
    let mut rng = walk_rng(seed);
    let general = (0..TAIL_POINTS)
        .map(|_| {
            let ell = rng.random_range(1..=10);
            let eps = rng.random_range(0.01..0.5);
            // the condition admits only degrees with a positive cap
            let degrees: Vec<usize> = (0..ell)
                .map(|_| loop {
                    let d = rng.random_range(2..=30);
                    if star_cap(d, eps) > 0.0 {
                        break d;
                    }
                })
                .collect();
            let q = degrees
                .iter()
                .map(|&d| rng.random::<f64>() * star_cap(d, eps))
                .collect();
            let m = rng.random_range(0..=8);
            TailCase::General {
                profile: TailProfile { degrees, q },
                eps,
                m,
            }
        })
        .collect();
    let regular = (0..TAIL_POINTS)
        .map(|_| {
            let delta: usize = rng.random_range(4..=64);
            let q = rng.random::<f64>() * 0.999 / (64.0 * (delta as f64).sqrt());
            let ell = rng.random_range(1..=20);
            let h = rng.random_range(0..=ell);
            TailCase::Regular { delta, q, ell, h }
        })
        .collect();
    (general, regular)
}

/// Sampled tails sit below both analytic bounds.
fn tail_bounds() -> Result<Outcome, VerifyError> {
    let (general, regular) = tail_grid(SEED);
    let mut details = Vec::new();
    let mut counts = [0usize; 2];
    let mut informative = [0usize; 2];
    for (k, grid) in [general, regular].iter().enumerate() {
        let label = ["general", "regular"][k];
        for (i, case) in grid.iter().enumerate() {
            let c = tail_bound_check(case, TAIL_TRIALS, SEED + i as u64)?;
            if c.bound < 1.0 {
                informative[k] += 1;
            }
            if c.holds() {
                counts[k] += 1;
            } else {
                details.push(format!("{label} point {i} {case:?}: {c:?}"));
            }
        }
    }
    let summary = format!(
        "general lemma {}/{TAIL_POINTS} points, regular lemma {}/{TAIL_POINTS} points under the bound \
         ({} and {} of them with a bound below 1)",
        counts[0], counts[1], informative[0], informative[1]
    );
    Ok((counts == [TAIL_POINTS; 2], summary, details))
}

pub const PF_TRIALS: u64 = 10_000;

/// Probabilistic following needs fewer than `100d` steps at low noise.
fn pf_linear() -> Result<Outcome, VerifyError> {
    let mut ok = true;
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    for delta in [3, 5] {
        for d in [4, 8] {
            for model in [ModelSpec::Random, ModelSpec::PointToRoot] {
                let algo = Algorithm::Pf {
                    lambda: 0.75,
                    step_cap: DEFAULT_STEP_CAP,
                };
                let spec = ExperimentSpec::new(TreeSpec::ary(delta, d), algo)
                    .q(QSpec::Level(NoiseLevel::InvDegree(0.09)))
                    .model(model.clone())
                    .trials(PF_TRIALS)
                    .seed(SEED);
                let row = run(&spec)?;
                let m = row.moves.unwrap();
                let hit = m.mean < 100.0 * d as f64 && row.censored == 0.0;
                ok &= hit;
                worst = worst.max(m.mean / d as f64);
                details.push(format!(
                    "delta {delta} depth {d} {model}: steps {:.3} ± {:.3} (limit {}), censored {}",
                    m.mean,
                    m.stderr,
                    100 * d,
                    row.censored
                ));
            }
        }
    }
    Ok((ok, format!("largest mean steps / d = {worst:.3} (limit 100)"), details))
}

pub const BLOW_UP_TRIALS: u64 = 200;
pub const BLOW_UP_LAMBDA: f64 = 0.1;
pub const BLOW_UP_CAP: u64 = 10_000_000;

/// Above `10/Δ` the hitting time of τ grows at least twofold per level.
fn pf_blow_up() -> Result<Outcome, VerifyError> {
    let depths: Vec<usize> = (2..=7).collect();
    let fit = pf_hitting_growth(
        &|d| TreeSpec::Apex {
            branching: 10,
            depth: d,
        },
        QSpec::uniform(0.95),
        ModelSpec::Random,
        BLOW_UP_LAMBDA,
        &depths,
        BLOW_UP_TRIALS,
        SEED,
        BLOW_UP_CAP,
    )?;
    let details = depths
        .iter()
        .enumerate()
        .map(|(i, d)| {
            format!(
                "depth {d}: steps {:.1} ± {:.1}, censored {:.3}",
                fit.means[i], fit.stderrs[i], fit.censored[i]
            )
        })
        .collect();
    let censored = fit.censored.iter().copied().fold(0.0, f64::max);
    let summary = format!(
        "slope of ln(steps) per level {:.4} (needs ≥ ln 2 = {:.4}), largest censoring rate {censored:.3}",
        fit.slope,
        2f64.ln()
    );
    Ok((fit.slope >= 2f64.ln(), summary, details))
}

pub const MISLEADING_TRIALS: u64 = 20_000;

/// The root of a regular tree is rarely misleading.
fn misleading() -> Result<Outcome, VerifyError> {
    let eps = 0.1;
    let model = NoiseModel::random(NoiseLevel::StarCap { eps, frac: 1.0 });
    let mut ok = true;
    let mut details = Vec::new();
    for h in [4usize, 8, 12] {
        let inst = TreeSpec::regular(9, h + 2).build(DEFAULT_NODE_BUDGET)?;
        let t = inst.topology();
        let seed = SEED + h as u64;
        let hits: u64 = (0..MISLEADING_TRIALS)
            .into_par_iter()
            .map(|i| {
                let adv = SampledAdvice::new(t, &model, trial_key(seed, i));
                u64::from(is_misleading(t, &adv, t.root(), h, BallMode::Regular))
            })
            .sum();
        let n = MISLEADING_TRIALS as f64;
        let p = hits as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        let bound = 2.0 * (1.0 - eps).powi(h as i32);
        ok &= p <= bound + 3.0 * se;
        details.push(format!("h {h}: P(misleading) {p:.5} ± {se:.5}, bound {bound:.5}"));
    }
    Ok((ok, "P(root is h-misleading) ≤ 2(1−ε)^h for h in {4,8,12}".into(), details))
}

pub const SEP_TRIALS: u64 = 1_000;
pub const SEP_EPS: f64 = 0.005;

fn spread(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::MIN, f64::max);
    let lo = xs.iter().copied().fold(f64::MAX, f64::min);
    hi / lo
}

/// Mean queries of the separator algorithms, normalized by their bounds.
fn separator_scaling() -> Result<Outcome, VerifyError> {
    let mut details = Vec::new();
    let mut sep = Vec::new();
    let delta = 8.0f64;
    for k in 7..=13 {
        let n = 1usize << k;
        let tree = TreeSpec::Heap {
            root_children: 8,
            branching: 7,
            n,
        };
        let algo = Algorithm::Sep { eps: SEP_EPS, h: None };
        let spec = ExperimentSpec::new(tree, algo)
            .q(QSpec::uniform(0.25 / delta.sqrt()))
            .trials(SEP_TRIALS)
            .seed(SEED);
        let m = run(&spec)?.queries.unwrap();
        let ln = (n as f64).ln();
        let r = m.mean / (delta.sqrt() * delta.ln() * ln * ln);
        sep.push(r);
        details.push(format!("a_sep n {n}: queries {:.2} ± {:.2}, ratio {r:.5}", m.mean, m.stderr));
    }
    let mut two = Vec::new();
    let delta = 9.0f64;
    for k in 5..=8 {
        let n = 3usize.pow(k);
        let tree = TreeSpec::Heap {
            root_children: 9,
            branching: 8,
            n,
        };
        let algo = Algorithm::TwoLayers {
            kappa1: crate::queriers::default_kappa(0.1),
            kappa2: crate::queriers::default_kappa(0.1),
        };
        let spec = ExperimentSpec::new(tree, algo)
            .q(QSpec::uniform(0.01 / delta.sqrt()))
            .trials(SEP_TRIALS)
            .seed(SEED);
        let m = run(&spec)?.queries.unwrap();
        let ln = (n as f64).ln();
        let r = m.mean / (delta.sqrt() * ln * ln.ln());
        two.push(r);
        details.push(format!("a_two_layers n {n}: queries {:.2} ± {:.2}, ratio {r:.5}", m.mean, m.stderr));
    }
    let (s1, s2) = (spread(&sep), spread(&two));
    let summary = format!("spread of normalized queries: a_sep {s1:.3}, a_two_layers {s2:.3} (limit 3)");
    Ok((s1 <= 3.0 && s2 <= 3.0, summary, details))
}

pub const NATURAL_TRIALS: u64 = 10_000;

/// The natural and uniform-θ baselines fail on the trimmed tree.
fn baselines() -> Result<Outcome, VerifyError> {
    let (delta, q) = (4usize, 0.3);
    let depths: Vec<usize> = (3..=6).collect();
    let mut details = Vec::new();
    let mut means = Vec::new();
    for &d in &depths {
        let spec = ExperimentSpec::new(
            TreeSpec::Trimmed {
                branching: delta - 1,
                depth: d,
            },
            Algorithm::Natural,
        )
        .q(QSpec::uniform(q))
        .trials(NATURAL_TRIALS)
        .seed(SEED);
        let m = run(&spec)?.queries.unwrap();
        details.push(format!("a_natural depth {d}: queries {:.3} ± {:.3}", m.mean, m.stderr));
        means.push(m.mean);
    }
    let xs: Vec<f64> = depths.iter().map(|&d| d as f64).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let growth = fit_line(&xs, &ys).0.exp();
    let floor = q * (delta - 1) as f64 * (1.0 - 1.0 / delta as f64);
    let natural_ok = growth >= floor;

    let mut theta_ok = true;
    let mut forced_counts = Vec::new();
    for d in [5usize, 8] {
        let t = build_trimmed_ary(delta - 1, d)?;
        let (forced, _) = uniform_theta_forced(&t);
        let need = (delta - 1).pow((2 * d / 5) as u32);
        theta_ok &= forced.len() >= need;
        forced_counts.push((d, forced.len(), need));
        details.push(format!(
            "a_walk_uniform_theta depth {d}: {} nodes queried before τ under every advice, need {need}",
            forced.len()
        ));
    }
    let summary = format!(
        "a_natural growth {growth:.4} per level (needs ≥ {floor:.4}): {}; a_walk_uniform_theta forced queries {}: {}",
        if natural_ok { "ok" } else { "short" },
        forced_counts
            .iter()
            .map(|(d, f, n)| format!("depth {d} {f}/{n}"))
            .collect::<Vec<_>>()
            .join(", "),
        if theta_ok { "ok" } else { "short" },
    );
    Ok((natural_ok && theta_ok, summary, details))
}

/// Experiments rerun with another worker count write identical CSV.
fn reproducibility() -> Result<Outcome, VerifyError> {
    let specs = [
        ExperimentSpec::new(TreeSpec::ary(4, 6), Algorithm::Walk).q(QSpec::uniform(0.2)),
        ExperimentSpec::new(
            TreeSpec::ary(3, 5),
            Algorithm::Pf {
                lambda: 0.75,
                step_cap: DEFAULT_STEP_CAP,
            },
        )
        .q(QSpec::uniform(0.1))
        .model(ModelSpec::PointToRoot),
        ExperimentSpec::new(TreeSpec::regular(4, 4), Algorithm::Sep { eps: 0.1, h: None }).q(QSpec::uniform(0.1)),
        ExperimentSpec::new(TreeSpec::Random { n: 300, seed: 5 }, Algorithm::Loop).q(QSpec::uniform(0.2)),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for spec in specs {
        let spec = spec.trials(2_000).seed(SEED);
        let mut csvs = Vec::new();
        for threads in [1, 3, 8] {
            let row = run_with_threads(&spec, Some(threads))?;
            let mut buf = Vec::new();
            write_csv(&[row], &mut buf)?;
            csvs.push(buf);
        }
        let same = csvs.windows(2).all(|w| w[0] == w[1]);
        ok &= same;
        details.push(format!(
            "{} on {}: {}",
            spec.algo.name(),
            spec.tree,
            if same { "identical" } else { "differs" }
        ));
    }
    Ok((ok, "CSV identical across 1, 3 and 8 workers for 4 experiments".into(), details))
}
