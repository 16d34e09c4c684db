//! Reproducible Monte-Carlo experiments.
//!
//! An [`ExperimentSpec`] names a tree, a noise level, a fault model, an
//! algorithm, a trial count and a root seed. Trial `i` draws its advice and
//! walk randomness from `trial_key(seed, i)` alone, so a [`ResultRow`] is a
//! pure function of the spec whatever the number of worker threads.

mod config;
mod output;
mod spec;
mod threshold;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use config::{load_config, parse_config, ExperimentPlan};
pub use output::{write_csv, write_jsonl, CSV_HEADER};
pub use spec::{Instance, ModelSpec, QSpec, TreeSpec};
pub use threshold::{
    beating_leaves_growth, fit_line, pf_hitting_growth, threshold_above, threshold_below, verify_threshold,
    AboveReport, BelowReport, BelowRow, GrowthFit, ThresholdConfig, ThresholdReport,
};

use crate::algo::{Algorithm, Metric, TrialCost};
use crate::noise::{NoiseError, NoiseModel, SampledAdvice};
use crate::queriers::QueryContext;
use crate::rng::trial_key;
use crate::tree::{TreeError, DEFAULT_NODE_BUDGET};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NTS_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("{0} needs an explicit tree; this one has too many nodes")]
    NeedsExplicitTree(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

/// One experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub tree: TreeSpec,
    pub q: QSpec,
    pub model: ModelSpec,
    pub algo: Algorithm,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentSpec {
    /// Noiseless random model, 1000 trials, seed 0.
    pub fn new(tree: TreeSpec, algo: Algorithm) -> Self {
        ExperimentSpec {
            name: String::new(),
            tree,
            q: QSpec::uniform(0.0),
            model: ModelSpec::Random,
            algo,
            trials: 1000,
            seed: 0,
        }
    }

    pub fn q(mut self, q: QSpec) -> Self {
        self.q = q;
        self
    }

    pub fn model(mut self, m: ModelSpec) -> Self {
        self.model = m;
        self
    }

    pub fn trials(mut self, n: u64) -> Self {
        self.trials = n;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn name(mut self, n: impl Into<String>) -> Self {
        self.name = n.into();
        self
    }

    /// Sets one field by name: `name`, `tree`, `q`, `model`, `algo`,
    /// `trials`, `seed`, `tree.<key>` for a tree parameter, or any
    /// algorithm parameter.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let int = || value.trim().parse::<u64>().map_err(|_| format!("bad integer '{value}' for {key}"));
        match key {
            "name" => self.name = value.to_string(),
            "tree" => self.tree = value.parse()?,
            "q" => self.q = value.parse()?,
            "model" => self.model = value.parse()?,
            "algo" => self.algo = value.parse()?,
            "trials" => self.trials = int()?,
            "seed" => self.seed = int()?,
            k if k.starts_with("tree.") => self.tree = self.tree.with_param(&k[5..], value)?,
            k => {
                self.algo.set(k, value.trim())?;
                self.algo.validate()?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trial count must be at least 1".into());
        }
        self.algo.validate()
    }

    pub fn noise(&self) -> Result<NoiseModel, HarnessError> {
        let level = self.q.level().map_err(HarnessError::Invalid)?;
        self.model.model(level).map_err(HarnessError::Invalid)
    }
}

/// Summary statistics of one metric over the uncensored trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub stderr: f64,
    pub median: f64,
    pub p95: f64,
    pub samples: u64,
}

impl MetricSummary {
    pub fn from_samples(values: &[u64]) -> Option<MetricSummary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let k = sorted.len();
        let median = if k % 2 == 1 {
            sorted[k / 2] as f64
        } else {
            (sorted[k / 2 - 1] as f64 + sorted[k / 2] as f64) / 2.0
        };
        let rank = ((0.95 * k as f64).ceil() as usize).clamp(1, k);
        Some(MetricSummary {
            mean,
            stderr: (var / n).sqrt(),
            median,
            p95: sorted[rank - 1] as f64,
            samples: k as u64,
        })
    }
}

/// The outcome of one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRow {
    pub name: String,
    pub tree: String,
    pub q: String,
    pub model: String,
    pub algo: String,
    pub trials: u64,
    pub seed: u64,
    pub nodes: u64,
    /// Depth of the treasure.
    pub depth: usize,
    pub moves: Option<MetricSummary>,
    pub queries: Option<MetricSummary>,
    /// Fraction of trials that hit the step cap.
    pub censored: f64,
    /// Seconds spent; not part of the CSV and ignored by equality.
    pub wall_time: f64,
}

impl PartialEq for ResultRow {
    fn eq(&self, o: &Self) -> bool {
        let key = |r: &ResultRow| {
            (
                r.name.clone(),
                r.tree.clone(),
                r.q.clone(),
                r.model.clone(),
                r.algo.clone(),
                r.trials,
                r.seed,
                r.nodes,
                r.depth,
            )
        };
        key(self) == key(o)
            && self.moves == o.moves
            && self.queries == o.queries
            && self.censored.to_bits() == o.censored.to_bits()
    }
}

impl ResultRow {
    pub fn metric(&self, m: Metric) -> Option<&MetricSummary> {
        match m {
            Metric::Moves => self.moves.as_ref(),
            Metric::Queries => self.queries.as_ref(),
        }
    }
}

/// A thread pool honoring `threads`, else [`THREADS_ENV`], else rayon's
/// default.
fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let n = threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = n {
        b = b.num_threads(n.max(1));
    }
    b.build().expect("thread pool")
}

/// Per-trial costs in trial order.
pub fn trial_costs(spec: &ExperimentSpec, threads: Option<usize>) -> Result<(Instance, Vec<TrialCost>), HarnessError> {
    spec.validate().map_err(HarnessError::Invalid)?;
    let inst = spec.tree.build(DEFAULT_NODE_BUDGET)?;
    let model = spec.noise()?;
    let t = inst.topology();
    model.validate(t)?;
    let needs_tree = matches!(spec.algo, Algorithm::Sep { .. } | Algorithm::TwoLayers { .. });
    if needs_tree && inst.explicit().is_none() {
        return Err(HarnessError::NeedsExplicitTree(spec.algo.name().into()));
    }
    let ctx = match (&spec.algo, inst.explicit()) {
        (Algorithm::Sep { .. } | Algorithm::TwoLayers { .. }, Some(tree)) => Some(QueryContext::new(tree)),
        _ => None,
    };
    let costs = pool(threads).install(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let key = trial_key(spec.seed, i);
                let adv = SampledAdvice::new(t, &model, key);
                spec.algo.run(t, ctx.as_ref(), &adv, key).expect("explicit tree checked above")
            })
            .collect()
    });
    Ok((inst, costs))
}

/// Runs an experiment with the thread count from [`THREADS_ENV`].
pub fn run(spec: &ExperimentSpec) -> Result<ResultRow, HarnessError> {
    run_with_threads(spec, None)
}

pub fn run_with_threads(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ResultRow, HarnessError> {
    let start = Instant::now();
    let (inst, costs) = trial_costs(spec, threads)?;
    let t = inst.topology();
    let summary = |m: Metric| {
        if !spec.algo.metrics().contains(&m) {
            return None;
        }
        let v: Vec<u64> = costs.iter().filter_map(|c| c.get(m)).collect();
        MetricSummary::from_samples(&v)
    };
    let censored = costs.iter().filter(|c| c.censored).count() as f64 / costs.len() as f64;
    Ok(ResultRow {
        name: spec.name.clone(),
        tree: spec.tree.to_string(),
        q: spec.q.to_string(),
        model: spec.model.to_string(),
        algo: spec.algo.to_string(),
        trials: spec.trials,
        seed: spec.seed,
        nodes: t.node_count(),
        depth: t.treasure_depth(),
        moves: summary(Metric::Moves),
        queries: summary(Metric::Queries),
        censored,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// One row per value of `axis` (any key accepted by
/// [`ExperimentSpec::set`]), in order.
pub fn sweep(axis: &str, values: &[String], base: &ExperimentSpec) -> Result<Vec<ResultRow>, HarnessError> {
    values
        .iter()
        .map(|v| {
            let mut spec = base.clone();
            spec.set(axis, v).map_err(HarnessError::Invalid)?;
            run(&spec)
        })
        .collect()
}
