//! Fault models and advice.
//!
//! Every node `u ≠ τ` is faulty independently with probability `q_u`. A sound
//! node points toward τ. A faulty node points at a uniform neighbor (random
//! model, so it may still be right) or at a neighbor fixed in advance by an
//! oblivious adversary (semi-adversarial model).

mod enumerate;

use rand::Rng;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::rng::node_rng;
use crate::tree::{Topology, Tree};
use crate::NodeId;

pub use enumerate::{enumerate_advice, rational, AdviceEnumeration, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("fault probability {q} at node {node} is outside [0, 1]")]
    BadProbability { node: NodeId, q: f64 },
    #[error("per-node noise has {got} entries for a {want}-node tree")]
    WrongLength { got: usize, want: usize },
    #[error("per-node noise needs an explicit tree")]
    NeedsExplicitTree,
    #[error("adversary map has no entry for node {0}")]
    MissingAdversary(NodeId),
    #[error("adversary map sends node {0} to non-neighbor {1}")]
    NotANeighbor(NodeId, NodeId),
    #[error("{nodes} advice-bearing nodes exceed the enumeration cap of {cap}")]
    CapExceeded { nodes: usize, cap: usize },
    #[error("{0}")]
    Parse(String),
}

/// How `q_u` is assigned.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseLevel {
    Uniform(f64),
    /// `q_u = c / Δ_u`
    InvDegree(f64),
    /// `q_u = c / √Δ_u`
    InvSqrtDegree(f64),
    /// `q_u = frac · star_cap(Δ_u, eps)` for `Δ_u ≥ 2`, 0 otherwise.
    StarCap { eps: f64, frac: f64 },
    PerNode(Vec<f64>),
}

impl NoiseLevel {
    pub fn q<T: Topology + ?Sized>(&self, t: &T, u: NodeId) -> f64 {
        let deg = t.degree(u).max(1) as f64;
        match self {
            NoiseLevel::Uniform(q) => *q,
            NoiseLevel::InvDegree(c) => c / deg,
            NoiseLevel::InvSqrtDegree(c) => c / deg.sqrt(),
            NoiseLevel::StarCap { eps, frac } => {
                if t.degree(u) >= 2 {
                    (frac * star_cap(t.degree(u), *eps)).max(0.0)
                } else {
                    0.0
                }
            }
            NoiseLevel::PerNode(v) => v[u],
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NoiseLevel::Uniform(q) | NoiseLevel::InvDegree(q) | NoiseLevel::InvSqrtDegree(q) => *q == 0.0,
            NoiseLevel::StarCap { frac, .. } => *frac == 0.0,
            NoiseLevel::PerNode(v) => v.iter().all(|&q| q == 0.0),
        }
    }
}

/// Where a faulty node points in the semi-adversarial model.
#[derive(Clone, Debug, PartialEq)]
pub enum Adversary {
    /// Toward σ; at σ itself, the lowest-id child not toward τ.
    PointToRoot,
    /// The k-th child (cyclically); leaves point to their parent.
    FixedChild(usize),
    Map(FxHashMap<NodeId, NodeId>),
}

impl Adversary {
    pub fn target<T: Topology + ?Sized>(&self, t: &T, u: NodeId) -> NodeId {
        match self {
            Adversary::PointToRoot => match t.parent(u) {
                Some(p) => p,
                None => {
                    let good = t.toward_treasure(u);
                    let kids = t.children(u);
                    let pick = kids.iter().find(|&c| Some(c) != good);
                    pick.unwrap_or_else(|| kids.get(0))
                }
            },
            Adversary::FixedChild(k) => {
                let kids = t.children(u);
                if kids.is_empty() {
                    t.parent(u).expect("node with no neighbors carries no advice")
                } else {
                    kids.get(k % kids.len())
                }
            }
            Adversary::Map(m) => m[&u],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FaultMode {
    Random,
    SemiAdversarial(Adversary),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub level: NoiseLevel,
    pub mode: FaultMode,
}

impl NoiseModel {
    pub fn random(level: NoiseLevel) -> Self {
        NoiseModel {
            level,
            mode: FaultMode::Random,
        }
    }

    pub fn uniform(q: f64) -> Self {
        Self::random(NoiseLevel::Uniform(q))
    }

    pub fn semi_adversarial(level: NoiseLevel, adversary: Adversary) -> Self {
        NoiseModel {
            level,
            mode: FaultMode::SemiAdversarial(adversary),
        }
    }

    pub fn q<T: Topology + ?Sized>(&self, t: &T, u: NodeId) -> f64 {
        self.level.q(t, u)
    }

    /// Checks probabilities and the adversary map against a tree. Per-node
    /// data and maps can only be checked on explicit trees.
    pub fn validate<T: Topology + ?Sized>(&self, t: &T) -> Result<(), NoiseError> {
        let explicit = t.as_tree();
        if let NoiseLevel::PerNode(v) = &self.level {
            let tree = explicit.ok_or(NoiseError::NeedsExplicitTree)?;
            if v.len() != tree.len() {
                return Err(NoiseError::WrongLength {
                    got: v.len(),
                    want: tree.len(),
                });
            }
        }
        match explicit {
            Some(tree) => {
                for u in tree.nodes() {
                    let q = self.q(tree, u);
                    if !(0.0..=1.0).contains(&q) {
                        return Err(NoiseError::BadProbability { node: u, q });
                    }
                }
            }
            None => {
                let q = self.q(t, t.root());
                if !(0.0..=1.0).contains(&q) {
                    return Err(NoiseError::BadProbability { node: t.root(), q });
                }
            }
        }
        if let FaultMode::SemiAdversarial(Adversary::Map(m)) = &self.mode {
            let tree = explicit.ok_or(NoiseError::NeedsExplicitTree)?;
            for u in tree.nodes() {
                if u == tree.treasure() || tree.degree(u) == 0 {
                    continue;
                }
                let v = *m.get(&u).ok_or(NoiseError::MissingAdversary(u))?;
                if v >= tree.len() || !tree.is_neighbor(u, v) {
                    return Err(NoiseError::NotANeighbor(u, v));
                }
            }
        }
        Ok(())
    }
}

/// Read access to the advice of a trial.
pub trait Advice {
    /// The neighbor `u` points at; `None` at τ.
    fn pointer(&self, u: NodeId) -> Option<NodeId>;
}

/// Advice drawn on demand from a trial key. Reading a node twice gives the
/// same answer, so the advice is permanent without being stored.
pub struct SampledAdvice<'a, T: Topology + ?Sized> {
    tree: &'a T,
    model: &'a NoiseModel,
    key: u64,
}

impl<'a, T: Topology + ?Sized> SampledAdvice<'a, T> {
    pub fn new(tree: &'a T, model: &'a NoiseModel, key: u64) -> Self {
        SampledAdvice { tree, model, key }
    }

    /// `(pointer, faulty)` at `u`, `None` at τ or an isolated node.
    pub fn draw(&self, u: NodeId) -> Option<(NodeId, bool)> {
        let t = self.tree;
        let correct = t.toward_treasure(u)?;
        let mut rng = node_rng(self.key, u);
        let faulty = rng.random::<f64>() < self.model.q(t, u);
        if !faulty {
            return Some((correct, false));
        }
        let target = match &self.model.mode {
            FaultMode::Random => t.nth_neighbor(u, rng.random_range(0..t.degree(u))),
            FaultMode::SemiAdversarial(adv) => adv.target(t, u),
        };
        Some((target, true))
    }
}

impl<T: Topology + ?Sized> Advice for SampledAdvice<'_, T> {
    fn pointer(&self, u: NodeId) -> Option<NodeId> {
        self.draw(u).map(|(p, _)| p)
    }
}

/// Advice stored for every node of an explicit tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdviceAssignment {
    pub pointer: Vec<Option<NodeId>>,
    pub faulty: Vec<bool>,
}

impl AdviceAssignment {
    /// Every node points toward τ.
    pub fn correct(t: &Tree) -> Self {
        AdviceAssignment {
            pointer: t.nodes().map(|u| t.toward_treasure(u)).collect(),
            faulty: vec![false; t.len()],
        }
    }

    /// Advice from explicit pointers; `faulty` marks pointers that are wrong.
    pub fn from_pointers(t: &Tree, pointer: Vec<Option<NodeId>>) -> Self {
        let faulty = t.nodes().map(|u| pointer[u] != t.toward_treasure(u)).collect();
        AdviceAssignment { pointer, faulty }
    }

    pub fn faulty_count(&self) -> usize {
        self.faulty.iter().filter(|&&f| f).count()
    }
}

impl Advice for AdviceAssignment {
    fn pointer(&self, u: NodeId) -> Option<NodeId> {
        self.pointer[u]
    }
}

impl<A: Advice + ?Sized> Advice for &A {
    fn pointer(&self, u: NodeId) -> Option<NodeId> {
        (**self).pointer(u)
    }
}

/// Materializes the advice of trial `key` on an explicit tree.
pub fn sample_advice(t: &Tree, m: &NoiseModel, key: u64) -> AdviceAssignment {
    let s = SampledAdvice::new(t, m, key);
    let mut out = AdviceAssignment {
        pointer: vec![None; t.len()],
        faulty: vec![false; t.len()],
    };
    for u in t.nodes() {
        if let Some((p, f)) = s.draw(u) {
            out.pointer[u] = Some(p);
            out.faulty[u] = f;
        }
    }
    out
}

/// Largest `q` allowed at a node of degree `deg` for the noise condition
/// with slack `eps`: `(1 − ε − Δ^{-1/4}) / (√Δ + Δ^{1/4})`.
pub fn star_cap(deg: usize, eps: f64) -> f64 {
    let d = deg as f64;
    (1.0 - eps - d.powf(-0.25)) / (d.sqrt() + d.powf(0.25))
}

/// [`star_cap`] for every node of the tree.
pub fn condition_star_max_q(t: &Tree, eps: f64) -> Vec<f64> {
    t.nodes().map(|u| star_cap(t.degree(u), eps)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_key;
    use crate::tree::{build_complete_ary, build_path, build_star};

    #[test]
    fn zero_noise_is_correct() {
        let t = build_complete_ary(3, 3, 3).unwrap();
        let a = sample_advice(&t, &NoiseModel::uniform(0.0), 17);
        assert_eq!(a, AdviceAssignment::correct(&t));
        assert_eq!(a.faulty_count(), 0);
    }

    #[test]
    fn permanence() {
        let t = build_complete_ary(3, 4, 4).unwrap();
        let m = NoiseModel::uniform(0.7);
        let s = SampledAdvice::new(&t, &m, 5);
        for u in t.nodes() {
            assert_eq!(s.pointer(u), s.pointer(u));
            assert_eq!(s.pointer(u), sample_advice(&t, &m, 5).pointer[u]);
        }
    }

    #[test]
    fn star_center_uniform_when_always_faulty() {
        let k = 4;
        let t = build_star(k, 1).unwrap();
        let m = NoiseModel::uniform(1.0);
        let trials = 100_000;
        let mut counts = vec![0u32; k + 1];
        for i in 0..trials {
            let s = SampledAdvice::new(&t, &m, trial_key(11, i));
            counts[s.pointer(0).unwrap()] += 1;
        }
        let p = 1.0 / k as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 / trials as f64 - p).abs() < 3.0 * se, "{counts:?}");
        }
    }

    #[test]
    fn point_to_root_all_path_faulty() {
        // P(every node on [σ, τ⟩ faulty) = q^D
        let (q, d) = (0.6, 3);
        let t = build_complete_ary(3, d, d).unwrap();
        let m = NoiseModel::semi_adversarial(NoiseLevel::Uniform(q), Adversary::PointToRoot);
        let trials = 100_000;
        let path = t.treasure_path()[..d].to_vec();
        let mut hits = 0;
        for i in 0..trials {
            let s = SampledAdvice::new(&t, &m, trial_key(3, i));
            if path.iter().all(|&u| s.draw(u).unwrap().1) {
                hits += 1;
            }
        }
        let p = q.powi(d as i32);
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 3.0 * se);
        // the adversary at σ picks a child off the treasure path
        assert_eq!(m.mode, FaultMode::SemiAdversarial(Adversary::PointToRoot));
        assert_eq!(Adversary::PointToRoot.target(&t, 0), 2);
    }

    #[test]
    fn validation() {
        let t = build_path(3, 2).unwrap();
        assert!(NoiseModel::uniform(1.5).validate(&t).is_err());
        let mut map = FxHashMap::default();
        map.insert(0, 1);
        let m = NoiseModel::semi_adversarial(NoiseLevel::Uniform(0.5), Adversary::Map(map.clone()));
        assert_eq!(m.validate(&t), Err(NoiseError::MissingAdversary(1)));
        map.insert(1, 2);
        let m = NoiseModel::semi_adversarial(NoiseLevel::Uniform(0.5), Adversary::Map(map.clone()));
        assert!(m.validate(&t).is_ok());
        map.insert(1, 1);
        let m = NoiseModel::semi_adversarial(NoiseLevel::Uniform(0.5), Adversary::Map(map));
        assert_eq!(m.validate(&t), Err(NoiseError::NotANeighbor(1, 1)));
    }

    #[test]
    fn star_condition_values() {
        let eps = (1.0 - 2f64.powf(-0.25)) / 2.0;
        assert!(star_cap(2, eps) > 0.0);
        for d in [2, 3, 9, 100] {
            assert!(star_cap(d, 0.999) < 0.0);
        }
        // Δ=16: Δ^{1/4}=2, √Δ=4, so (0.9 − 0.5)/6
        assert!((star_cap(16, 0.1) - 0.4 / 6.0).abs() < 1e-15);
    }
}
