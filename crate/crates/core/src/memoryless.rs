//! Probabilistic following: a memoryless walker that obeys the advice of
//! the node it stands on with probability λ and otherwise steps to a
//! uniform neighbor.

use rand::Rng;
use thiserror::Error;

use crate::noise::Advice;
use crate::rng::walk_rng;
use crate::tree::Topology;
use crate::NodeId;

/// Default safety bound on the number of steps.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PfError {
    #[error("listening probability {0} is outside [0, 1]")]
    BadLambda(f64),
    #[error("no treasure after {0} steps")]
    StepCapExceeded(u64),
    #[error("node {0} has no advice")]
    MissingAdvice(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PfConfig {
    pub lambda: f64,
    pub step_cap: u64,
}

impl PfConfig {
    pub fn new(lambda: f64) -> Self {
        PfConfig {
            lambda,
            step_cap: DEFAULT_STEP_CAP,
        }
    }

    pub fn step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    /// λ must lie in `[0, 1]`. The endpoints are accepted: λ = 1 follows the
    /// advice blindly and λ = 0 is a simple random walk.
    pub fn validate(&self) -> Result<(), PfError> {
        if (0.0..=1.0).contains(&self.lambda) {
            Ok(())
        } else {
            Err(PfError::BadLambda(self.lambda))
        }
    }
}

/// The node after `u`.
fn step<T: Topology + ?Sized, A: Advice + ?Sized, R: Rng>(
    t: &T,
    adv: &A,
    lambda: f64,
    u: NodeId,
    rng: &mut R,
) -> Result<NodeId, PfError> {
    if rng.random::<f64>() < lambda {
        adv.pointer(u).ok_or(PfError::MissingAdvice(u))
    } else {
        Ok(t.nth_neighbor(u, rng.random_range(0..t.degree(u))))
    }
}

/// Walks from σ until it reaches τ and returns the number of steps.
pub fn probabilistic_following<T: Topology + ?Sized, A: Advice + ?Sized, R: Rng>(
    t: &T,
    adv: &A,
    cfg: &PfConfig,
    rng: &mut R,
) -> Result<u64, PfError> {
    cfg.validate()?;
    let tau = t.treasure();
    let mut u = t.root();
    let mut steps = 0;
    while u != tau {
        if steps >= cfg.step_cap {
            return Err(PfError::StepCapExceeded(steps));
        }
        u = step(t, adv, cfg.lambda, u, rng)?;
        steps += 1;
    }
    Ok(steps)
}

/// [`probabilistic_following`] with the walk randomness of trial `key`.
pub fn pf_seeded<T: Topology + ?Sized, A: Advice + ?Sized>(
    t: &T,
    adv: &A,
    cfg: &PfConfig,
    key: u64,
) -> Result<u64, PfError> {
    probabilistic_following(t, adv, cfg, &mut walk_rng(key))
}

/// The visited nodes, σ first, for at most `max_steps` steps.
pub fn pf_trace<T: Topology + ?Sized, A: Advice + ?Sized, R: Rng>(
    t: &T,
    adv: &A,
    cfg: &PfConfig,
    max_steps: u64,
    rng: &mut R,
) -> Result<Vec<NodeId>, PfError> {
    cfg.validate()?;
    let mut u = t.root();
    let mut out = vec![u];
    while u != t.treasure() && (out.len() as u64) <= max_steps {
        u = step(t, adv, cfg.lambda, u, rng)?;
        out.push(u);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_advice, AdviceAssignment, NoiseModel};
    use crate::tree::{build_complete_ary, build_path, build_star};

    #[test]
    fn blind_following_takes_depth_steps() {
        let t = build_complete_ary(3, 5, 5).unwrap();
        let a = AdviceAssignment::correct(&t);
        for key in 0..5 {
            assert_eq!(pf_seeded(&t, &a, &PfConfig::new(1.0), key), Ok(5));
        }
    }

    #[test]
    fn start_at_treasure() {
        let t = build_complete_ary(2, 3, 0).unwrap();
        let a = sample_advice(&t, &NoiseModel::uniform(0.9), 1);
        assert_eq!(pf_seeded(&t, &a, &PfConfig::new(0.3), 7), Ok(0));
    }

    #[test]
    fn cap_and_lambda_errors() {
        let t = build_path(50, 49).unwrap();
        let a = AdviceAssignment::correct(&t);
        let cfg = PfConfig::new(0.0).step_cap(10);
        assert_eq!(pf_seeded(&t, &a, &cfg, 0), Err(PfError::StepCapExceeded(10)));
        assert_eq!(pf_seeded(&t, &a, &PfConfig::new(1.5), 0), Err(PfError::BadLambda(1.5)));
    }

    #[test]
    fn random_walk_neighbors_uniform() {
        // from the center of a star with 4 leaves and τ far away on a leaf
        let t = build_star(4, 4).unwrap();
        let a = AdviceAssignment::correct(&t);
        let cfg = PfConfig::new(0.0);
        let mut rng = walk_rng(99);
        let mut counts = [0u64; 5];
        let trials = 40_000;
        for _ in 0..trials {
            let tr = pf_trace(&t, &a, &cfg, 1, &mut rng).unwrap();
            counts[tr[1]] += 1;
        }
        let p = 0.25;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - trials as f64 * p).abs() <= 3.0 * sd, "{counts:?}");
        }
    }
}
