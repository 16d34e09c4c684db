//! One entry point for every search algorithm, used by the experiment
//! harness and the exact oracle alike.

use std::fmt;
use std::str::FromStr;

use crate::memoryless::{pf_seeded, PfConfig, PfError, DEFAULT_STEP_CAP};
use crate::noise::Advice;
use crate::queriers::{a_loop, a_sep_height, a_two_layers_outcome, sep_height, QueryContext, TwoLayers};
use crate::tree::{Topology, Tree};
use crate::walkers::{run_walk, WalkAlgo};

/// A search algorithm with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    Walk,
    Natural,
    UniformTheta,
    /// Separator search; `h` overrides the height derived from `eps`.
    Sep { eps: f64, h: Option<usize> },
    Loop,
    TwoLayers { kappa1: f64, kappa2: f64 },
    Pf { lambda: f64, step_cap: u64 },
}

/// A cost measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Moves,
    Queries,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Moves => "moves",
            Metric::Queries => "queries",
        })
    }
}

/// Cost of one trial. A censored trial hit the step cap and has no cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialCost {
    pub moves: Option<u64>,
    pub queries: Option<u64>,
    pub censored: bool,
}

impl TrialCost {
    pub fn get(&self, m: Metric) -> Option<u64> {
        match m {
            Metric::Moves => self.moves,
            Metric::Queries => self.queries,
        }
    }
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Walk => "a_walk",
            Algorithm::Natural => "a_natural",
            Algorithm::UniformTheta => "a_walk_uniform_theta",
            Algorithm::Sep { .. } => "a_sep",
            Algorithm::Loop => "a_loop",
            Algorithm::TwoLayers { .. } => "a_two_layers",
            Algorithm::Pf { .. } => "pf",
        }
    }

    /// Parses a bare algorithm name with default parameters.
    pub fn from_name(name: &str) -> Option<Algorithm> {
        Some(match name {
            "a_walk" => Algorithm::Walk,
            "a_natural" => Algorithm::Natural,
            "a_walk_uniform_theta" => Algorithm::UniformTheta,
            "a_sep" | "a_query" => Algorithm::Sep { eps: 0.1, h: None },
            "a_loop" => Algorithm::Loop,
            "a_two_layers" => {
                let p = TwoLayers::from_eps(0.1);
                Algorithm::TwoLayers {
                    kappa1: p.kappa1,
                    kappa2: p.kappa2,
                }
            }
            "pf" => Algorithm::Pf {
                lambda: 0.75,
                step_cap: DEFAULT_STEP_CAP,
            },
            _ => return None,
        })
    }

    /// The cost measures this algorithm reports. Only walking and
    /// memoryless algorithms count moves.
    pub fn metrics(&self) -> &'static [Metric] {
        match self {
            Algorithm::Walk | Algorithm::Natural | Algorithm::UniformTheta | Algorithm::Pf { .. } => {
                &[Metric::Moves, Metric::Queries]
            }
            _ => &[Metric::Queries],
        }
    }

    /// Whether the cost is a function of the advice alone.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Algorithm::Pf { .. })
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Algorithm::Sep { eps, h } => {
                if h.is_none() && !(eps > 0.0 && eps < 1.0) {
                    return Err(format!("epsilon {eps} must lie in (0, 1)"));
                }
                if h == Some(0) {
                    return Err("ball height must be at least 1".into());
                }
            }
            Algorithm::TwoLayers { kappa1, kappa2 } => {
                if !(kappa1 > 0.0 && kappa2 > 0.0) {
                    return Err(format!("kappa values {kappa1}, {kappa2} must be positive"));
                }
            }
            Algorithm::Pf { lambda, step_cap } => {
                PfConfig::new(lambda).step_cap(step_cap).validate().map_err(|e| e.to_string())?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Runs one trial. The separator context is built on the fly when a
    /// query algorithm needs it and `ctx` is `None`; `key` seeds the walk randomness of
    /// memoryless algorithms.
    ///
    /// Query algorithms need an explicit tree; on an implicit one they
    /// return `None`.
    pub fn run<T: Topology + ?Sized, A: Advice + ?Sized>(
        &self,
        t: &T,
        ctx: Option<&QueryContext>,
        adv: &A,
        key: u64,
    ) -> Option<TrialCost> {
        let walk = |w| {
            let tr = run_walk(t, adv, w, false);
            TrialCost {
                moves: Some(tr.moves),
                queries: Some(tr.queries),
                censored: false,
            }
        };
        let queries = |q: u64| TrialCost {
            moves: None,
            queries: Some(q),
            censored: false,
        };
        let with_ctx = |f: &dyn Fn(&Tree, &QueryContext) -> u64| {
            let t = t.as_tree()?;
            Some(match ctx {
                Some(c) => f(t, c),
                None => f(t, &QueryContext::new(t)),
            })
        };
        Some(match *self {
            Algorithm::Walk => walk(WalkAlgo::Walk),
            Algorithm::Natural => walk(WalkAlgo::Natural),
            Algorithm::UniformTheta => walk(WalkAlgo::UniformTheta),
            Algorithm::Loop => queries(a_loop(t, adv).queries),
            Algorithm::Sep { eps, h } => {
                let h = h.unwrap_or_else(|| sep_height(t.node_count() as usize, eps));
                queries(with_ctx(&|t, c| a_sep_height(t, c, adv, h, false).transcript.queries)?)
            }
            Algorithm::TwoLayers { kappa1, kappa2 } => {
                let p = TwoLayers { kappa1, kappa2 };
                queries(with_ctx(&|t, c| a_two_layers_outcome(t, c, adv, p, false).transcript.queries)?)
            }
            Algorithm::Pf { lambda, step_cap } => {
                let cfg = PfConfig::new(lambda).step_cap(step_cap);
                match pf_seeded(t, adv, &cfg, key) {
                    Ok(s) => TrialCost {
                        moves: Some(s),
                        queries: Some(s + 1),
                        censored: false,
                    },
                    Err(PfError::StepCapExceeded(_)) => TrialCost {
                        censored: true,
                        ..Default::default()
                    },
                    Err(e) => panic!("invalid run: {e}"),
                }
            }
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Sep { eps, h: None } => write!(f, "a_sep:eps={eps}"),
            Algorithm::Sep { h: Some(h), .. } => write!(f, "a_sep:h={h}"),
            Algorithm::TwoLayers { kappa1, kappa2 } => write!(f, "a_two_layers:kappa1={kappa1},kappa2={kappa2}"),
            Algorithm::Pf { lambda, step_cap } if *step_cap == DEFAULT_STEP_CAP => write!(f, "pf:lambda={lambda}"),
            Algorithm::Pf { lambda, step_cap } => write!(f, "pf:lambda={lambda},cap={step_cap}"),
            a => f.write_str(a.name()),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    /// `name` or `name:key=value,...` with keys `eps`, `h`, `kappa1`,
    /// `kappa2`, `lambda`, `cap`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut a = Algorithm::from_name(name.trim()).ok_or_else(|| format!("unknown algorithm '{name}'"))?;
        for kv in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got '{kv}'"))?;
            a.set(k.trim(), v.trim())?;
        }
        a.validate()?;
        Ok(a)
    }
}

impl Algorithm {
    /// Sets one parameter by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = || value.parse::<f64>().map_err(|_| format!("bad number '{value}' for {key}"));
        let int = || value.parse::<u64>().map_err(|_| format!("bad integer '{value}' for {key}"));
        match (self, key) {
            (Algorithm::Sep { eps, .. }, "eps" | "epsilon") => *eps = num()?,
            (Algorithm::Sep { h, .. }, "h") => *h = Some(int()? as usize),
            (Algorithm::TwoLayers { kappa1, .. }, "kappa1") => *kappa1 = num()?,
            (Algorithm::TwoLayers { kappa2, .. }, "kappa2") => *kappa2 = num()?,
            (Algorithm::TwoLayers { kappa1, kappa2 }, "eps" | "epsilon") => {
                let p = TwoLayers::from_eps(num()?);
                *kappa1 = p.kappa1;
                *kappa2 = p.kappa2;
            }
            (Algorithm::Pf { lambda, .. }, "lambda") => *lambda = num()?,
            (Algorithm::Pf { step_cap, .. }, "cap") => *step_cap = int()?,
            (a, k) => return Err(format!("{} takes no parameter '{k}'", a.name())),
        }
        Ok(())
    }
}
