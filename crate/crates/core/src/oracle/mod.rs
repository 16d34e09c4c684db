//! Ground truth for small instances and the counting behind the lower
//! bounds.

mod lower_bounds;
mod tails;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

pub use lower_bounds::{
    adv_to_counts, count_beating_leaves, expected_beating_leaves, optimal_bayes_order, simulate_uniform_scan,
    uniform_choice_floor, uniform_theta_forced,
};
pub use tails::{
    general_tail_bound, general_tail_exact, regular_tail_bound, regular_tail_exact, tail_bound_check, TailCase,
    TailCheck, TailError, TailProfile,
};

use crate::algo::{Algorithm, Metric};
use crate::noise::{enumerate_advice, rational, Advice, NoiseError, NoiseModel};
use crate::queriers::QueryContext;
use crate::tree::{Topology, Tree};
use crate::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("{algo} does not report {metric}")]
    NoSuchMetric { algo: String, metric: Metric },
    #[error("{0} has an infinite expected cost on some advice of positive probability")]
    Infinite(String),
    #[error("invalid algorithm: {0}")]
    Invalid(String),
}

/// Exact expected cost of `algo` on `t` under `m`, summing over every
/// advice assignment. Memoryless walkers are averaged over their walk
/// randomness exactly, through hitting times.
pub fn exact_expected_cost(
    t: &Tree,
    m: &NoiseModel,
    algo: &Algorithm,
    metric: Metric,
    cap: usize,
) -> Result<BigRational, OracleError> {
    algo.validate().map_err(OracleError::Invalid)?;
    if !algo.metrics().contains(&metric) {
        return Err(OracleError::NoSuchMetric {
            algo: algo.name().into(),
            metric,
        });
    }
    let ctx = QueryContext::new(t);
    let mut total = BigRational::zero();
    for (adv, p) in enumerate_advice(t, m, cap)? {
        let cost = match algo {
            Algorithm::Pf { lambda, .. } => {
                let steps = pf_expected_steps(t, &adv, &rational(*lambda))
                    .ok_or_else(|| OracleError::Infinite(algo.to_string()))?;
                match metric {
                    Metric::Moves => steps,
                    Metric::Queries => steps + BigRational::one(),
                }
            }
            _ => {
                let c = algo.run(t, Some(&ctx), &adv, 0).and_then(|c| c.get(metric)).expect("metric checked above");
                BigRational::from_integer(c.into())
            }
        };
        total += p * cost;
    }
    Ok(total)
}

/// [`exact_expected_cost`] as a float.
pub fn exact_expected_cost_f64(
    t: &Tree,
    m: &NoiseModel,
    algo: &Algorithm,
    metric: Metric,
    cap: usize,
) -> Result<f64, OracleError> {
    Ok(exact_expected_cost(t, m, algo, metric, cap)?.to_f64().unwrap_or(f64::NAN))
}

/// Expected steps of probabilistic following from σ to τ on fixed advice,
/// where each step follows the advice with probability `lambda` and goes
/// to a uniform neighbor otherwise. `None` if τ is not reached almost
/// surely.
///
/// With the tree hung from τ, the expected time from `u` is affine in the
/// time from its parent, `E[u] = A_u + B_u·E[parent]`; the coefficients
/// come from the children bottom-up. For `lambda < 1` every step can go
/// toward τ, so the denominators stay positive.
pub fn pf_expected_steps<A: Advice + ?Sized>(t: &Tree, adv: &A, lambda: &BigRational) -> Option<BigRational> {
    let tau = t.treasure();
    let n = t.len();
    if lambda.is_one() {
        // the walk is deterministic: it either reaches τ within n steps or cycles
        let mut u = t.root();
        for steps in 0..=n {
            if u == tau {
                return Some(BigRational::from_integer(steps.into()));
            }
            u = adv.pointer(u)?;
        }
        return None;
    }
    let mut order = vec![tau];
    let mut up: Vec<Option<NodeId>> = vec![None; n];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for y in t.neighbors(x) {
            if Some(y) != up[x] {
                up[y] = Some(x);
                order.push(y);
            }
        }
        i += 1;
    }
    let one = BigRational::one();
    let mut a = vec![BigRational::zero(); n];
    let mut b = vec![BigRational::zero(); n];
    for &u in order.iter().skip(1).rev() {
        let deg = t.degree(u);
        let wander = (&one - lambda) / BigRational::from_integer(deg.into());
        let ptr = adv.pointer(u);
        let prob = |v: NodeId| {
            if ptr == Some(v) {
                &wander + lambda
            } else {
                wander.clone()
            }
        };
        let mut num = one.clone();
        let mut den = one.clone();
        let p = up[u].unwrap();
        for v in t.neighbors(u) {
            if v != p {
                let pv = prob(v);
                num += &pv * &a[v];
                den -= &pv * &b[v];
            }
        }
        a[u] = num / &den;
        b[u] = prob(p) / den;
    }
    let path = t.treasure_path();
    let mut e = BigRational::zero();
    for &u in path.iter().rev().skip(1) {
        e = &a[u] + &b[u] * e;
    }
    Some(e)
}
