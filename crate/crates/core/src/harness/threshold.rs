//! Threshold scans and growth fits.

use rayon::prelude::*;

use super::{pool, run_with_threads, ExperimentSpec, HarnessError, ModelSpec, QSpec, TreeSpec};
use crate::algo::Algorithm;
use crate::noise::{sample_advice, NoiseLevel, NoiseModel};
use crate::oracle::{count_beating_leaves, expected_beating_leaves};
use crate::rng::trial_key;
use crate::tree::DEFAULT_NODE_BUDGET;

/// Least-squares line through `(xs, ys)`: `(slope, intercept)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Means per depth and the fitted slope of their logarithm.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub depths: Vec<usize>,
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// Fraction of censored trials per depth.
    pub censored: Vec<f64>,
    /// Slope of `ln mean` against depth, over depths with a finite mean.
    pub slope: f64,
}

impl GrowthFit {
    fn new(depths: Vec<usize>, means: Vec<f64>, stderrs: Vec<f64>, censored: Vec<f64>) -> Self {
        let (xs, ys): (Vec<f64>, Vec<f64>) = depths
            .iter()
            .zip(&means)
            .filter(|(_, m)| m.is_finite() && **m > 0.0)
            .map(|(&d, m)| (d as f64, m.ln()))
            .unzip();
        let slope = if xs.len() >= 2 { fit_line(&xs, &ys).0 } else { f64::NAN };
        GrowthFit {
            depths,
            means,
            stderrs,
            censored,
            slope,
        }
    }

    /// Fitted growth factor per unit depth.
    pub fn factor(&self) -> f64 {
        self.slope.exp()
    }
}

/// Mean number of leaves beating τ on complete trees of degree `delta`
/// under uniform random noise `q`, per depth.
pub fn beating_leaves_growth(
    delta: usize,
    q: f64,
    depths: &[usize],
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<GrowthFit, HarnessError> {
    let model = NoiseModel::uniform(q);
    let mut means = Vec::new();
    let mut stderrs = Vec::new();
    for &d in depths {
        let inst = TreeSpec::ary(delta, d).build(DEFAULT_NODE_BUDGET)?;
        let t = inst
            .explicit()
            .ok_or_else(|| HarnessError::NeedsExplicitTree("count_beating_leaves".into()))?;
        let counts: Vec<f64> = pool(threads).install(|| {
            (0..trials)
                .into_par_iter()
                .map(|i| count_beating_leaves(t, &sample_advice(t, &model, trial_key(seed, i))) as f64)
                .collect()
        });
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        means.push(mean);
        stderrs.push((var / n).sqrt());
    }
    let zeros = vec![0.0; depths.len()];
    Ok(GrowthFit::new(depths.to_vec(), means, stderrs, zeros))
}

/// Mean steps of probabilistic following on the trees `tree_of(D)`, per
/// depth. Means are over trials that reached τ within `step_cap`.
#[allow(clippy::too_many_arguments)]
pub fn pf_hitting_growth(
    tree_of: &dyn Fn(usize) -> TreeSpec,
    q: QSpec,
    model: ModelSpec,
    lambda: f64,
    depths: &[usize],
    trials: u64,
    seed: u64,
    step_cap: u64,
) -> Result<GrowthFit, HarnessError> {
    let mut means = Vec::new();
    let mut stderrs = Vec::new();
    let mut censored = Vec::new();
    for &d in depths {
        let spec = ExperimentSpec::new(tree_of(d), Algorithm::Pf { lambda, step_cap })
            .q(q.clone())
            .model(model.clone())
            .trials(trials)
            .seed(seed);
        let row = run_with_threads(&spec, None)?;
        let m = row.moves;
        means.push(m.map_or(f64::NAN, |m| m.mean));
        stderrs.push(m.map_or(f64::NAN, |m| m.stderr));
        censored.push(row.censored);
    }
    Ok(GrowthFit::new(depths.to_vec(), means, stderrs, censored))
}

/// Grids for [`verify_threshold`].
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdConfig {
    /// Degrees of the below-threshold family.
    pub deltas: Vec<usize>,
    pub depths: Vec<usize>,
    /// Slack of the noise condition; noise is `frac` times its cap.
    pub eps: f64,
    pub frac: f64,
    pub trials: u64,
    pub above_delta: usize,
    pub above_q: f64,
    pub above_depths: Vec<usize>,
    pub above_trials: u64,
    pub seed: u64,
    /// Allowed max/min ratio of `moves / (d√Δ)` across depths.
    pub spread: f64,
    /// Allowed relative error of the fitted growth factor.
    pub growth_tolerance: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            deltas: vec![4, 9, 16],
            depths: (4..=10).collect(),
            eps: 0.1,
            frac: 0.8,
            trials: 10_000,
            above_delta: 10,
            above_q: 0.5,
            above_depths: (2..=6).collect(),
            above_trials: 300,
            seed: 1,
            spread: 2.0,
            growth_tolerance: 0.15,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BelowRow {
    pub delta: usize,
    pub depth: usize,
    pub mean: f64,
    pub stderr: f64,
    /// `mean / (depth · √delta)`
    pub ratio: f64,
}

/// `a_walk` below the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct BelowReport {
    pub rows: Vec<BelowRow>,
    /// `(delta, max ratio / min ratio)` across depths.
    pub spreads: Vec<(usize, f64)>,
    /// Largest ratio over the whole grid.
    pub constant: f64,
    pub pass: bool,
}

/// Leaves beating τ above the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct AboveReport {
    pub fit: GrowthFit,
    /// Exact expected counts per depth.
    pub exact: Vec<f64>,
    /// Growth factor fitted to the exact counts.
    pub exact_factor: f64,
    /// `q²(Δ−1)³/Δ²`
    pub target: f64,
    /// Growth within tolerance of the target.
    pub pass: bool,
    /// Growth above 1 and at least `1 − tolerance` times the target.
    pub direction: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub below: BelowReport,
    pub above: AboveReport,
}

/// Below the threshold, `a_walk`'s moves stay within a constant of `d√Δ`.
pub fn threshold_below(cfg: &ThresholdConfig) -> Result<BelowReport, HarnessError> {
    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for &delta in &cfg.deltas {
        let mut ratios = Vec::new();
        for &d in &cfg.depths {
            let spec = ExperimentSpec::new(TreeSpec::ary(delta, d), Algorithm::Walk)
                .q(QSpec::Level(NoiseLevel::StarCap {
                    eps: cfg.eps,
                    frac: cfg.frac,
                }))
                .trials(cfg.trials)
                .seed(cfg.seed);
            let m = run_with_threads(&spec, None)?.moves.expect("a_walk reports moves");
            let ratio = m.mean / (d as f64 * (delta as f64).sqrt());
            ratios.push(ratio);
            rows.push(BelowRow {
                delta,
                depth: d,
                mean: m.mean,
                stderr: m.stderr,
                ratio,
            });
        }
        let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
        let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
        spreads.push((delta, hi / lo));
    }
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let pass = spreads.iter().all(|&(_, s)| s <= cfg.spread);
    Ok(BelowReport {
        rows,
        spreads,
        constant,
        pass,
    })
}

/// Above the threshold, the number of leaves beating τ grows
/// geometrically with the depth.
pub fn threshold_above(cfg: &ThresholdConfig) -> Result<AboveReport, HarnessError> {
    let (dl, q) = (cfg.above_delta as f64, cfg.above_q);
    let target = q * q * (dl - 1.0).powi(3) / (dl * dl);
    let fit = beating_leaves_growth(cfg.above_delta, q, &cfg.above_depths, cfg.above_trials, cfg.seed, None)?;
    let exact: Vec<f64> = cfg
        .above_depths
        .iter()
        .map(|&d| expected_beating_leaves(cfg.above_delta - 1, cfg.above_delta - 1, d, q))
        .collect();
    let xs: Vec<f64> = cfg.above_depths.iter().map(|&d| d as f64).collect();
    let ys: Vec<f64> = exact.iter().map(|e| e.ln()).collect();
    let exact_factor = fit_line(&xs, &ys).0.exp();
    let g = fit.factor();
    Ok(AboveReport {
        fit,
        exact,
        exact_factor,
        target,
        pass: (g - target).abs() <= cfg.growth_tolerance * target,
        direction: g > 1.0 && g >= (1.0 - cfg.growth_tolerance) * target,
    })
}

/// Both sides of the threshold.
pub fn verify_threshold(cfg: &ThresholdConfig) -> Result<ThresholdReport, HarnessError> {
    Ok(ThresholdReport {
        below: threshold_below(cfg)?,
        above: threshold_above(cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit() {
        let (s, i) = fit_line(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-12 && (i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_ratio() {
        let cfg = ThresholdConfig {
            deltas: vec![4],
            depths: vec![3, 5],
            frac: 0.0,
            trials: 5,
            above_depths: vec![2, 3],
            above_trials: 20,
            ..Default::default()
        };
        let r = verify_threshold(&cfg).unwrap();
        for row in &r.below.rows {
            assert_eq!(row.ratio, 0.5);
        }
        assert!(r.below.pass);
        assert!(r.above.fit.means[1] > r.above.fit.means[0]);
        assert!(r.above.exact[1] > r.above.exact[0]);
    }

    #[test]
    fn pf_growth_at_zero_noise() {
        let g = pf_hitting_growth(
            &|d| TreeSpec::ary(4, d),
            QSpec::uniform(0.0),
            ModelSpec::Random,
            1.0,
            &[1, 2, 4],
            3,
            0,
            100,
        )
        .unwrap();
        assert_eq!(g.means, vec![1.0, 2.0, 4.0]);
        assert_eq!(g.censored, vec![0.0; 3]);
    }
}
