use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use super::{AdviceAssignment, FaultMode, NoiseError, NoiseModel};
use crate::tree::{Topology, Tree};
use crate::NodeId;

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Converts a probability to a rational, recovering short decimals exactly
/// (0.1 becomes 1/10).
pub fn rational(x: f64) -> BigRational {
    match Ratio::<i64>::approximate_float(x) {
        Some(r) if (*r.numer() as f64 / *r.denom() as f64 - x).abs() <= 1e-15 => {
            BigRational::new((*r.numer()).into(), (*r.denom()).into())
        }
        _ => BigRational::from_float(x).expect("finite probability"),
    }
}

/// Every advice assignment with its exact probability, in odometer order
/// (the last advice-bearing node varies fastest).
pub struct AdviceEnumeration {
    base: AdviceAssignment,
    nodes: Vec<NodeId>,
    laws: Vec<Vec<(NodeId, BigRational)>>,
    digits: Vec<usize>,
    done: bool,
}

impl AdviceEnumeration {
    /// Nodes whose pointer is random.
    pub fn advice_nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Number of assignments the stream yields.
    pub fn len(&self) -> usize {
        self.laws.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Iterator for AdviceEnumeration {
    type Item = (AdviceAssignment, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut a = self.base.clone();
        let mut prob = BigRational::one();
        for (i, &u) in self.nodes.iter().enumerate() {
            let (p, ref m) = self.laws[i][self.digits[i]];
            a.pointer[u] = Some(p);
            a.faulty[u] = Some(p) != self.base.pointer[u];
            prob *= m;
        }
        // advance
        let mut i = self.nodes.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.laws[i].len() {
                break;
            }
            self.digits[i] = 0;
        }
        Some((a, prob))
    }
}

/// Per-node pointer law: the distinct pointers with their masses.
fn node_law(t: &Tree, m: &NoiseModel, u: NodeId) -> Vec<(NodeId, BigRational)> {
    let correct = t.toward_treasure(u).expect("τ carries no advice");
    let q = rational(m.q(t, u));
    let p = BigRational::one() - &q;
    let mut law: Vec<(NodeId, BigRational)> = Vec::new();
    let mut add = |v: NodeId, mass: BigRational| {
        if mass.is_zero() {
            return;
        }
        match law.iter_mut().find(|(w, _)| *w == v) {
            Some((_, m)) => *m += mass,
            None => law.push((v, mass)),
        }
    };
    add(correct, p);
    match &m.mode {
        FaultMode::Random => {
            let deg = BigRational::from_integer(t.degree(u).into());
            for v in t.neighbors(u) {
                add(v, &q / &deg);
            }
        }
        FaultMode::SemiAdversarial(adv) => add(adv.target(t, u), q),
    }
    law
}

/// Enumerates all advice assignments of an explicit tree. Nodes whose
/// pointer is certain do not count toward `cap`.
pub fn enumerate_advice(t: &Tree, m: &NoiseModel, cap: usize) -> Result<AdviceEnumeration, NoiseError> {
    m.validate(t)?;
    let mut base = AdviceAssignment::correct(t);
    let mut nodes = Vec::new();
    let mut laws = Vec::new();
    for u in t.nodes() {
        if u == t.treasure() || t.degree(u) == 0 {
            continue;
        }
        let law = node_law(t, m, u);
        if law.len() == 1 {
            base.pointer[u] = Some(law[0].0);
            base.faulty[u] = Some(law[0].0) != t.toward_treasure(u);
        } else {
            nodes.push(u);
            laws.push(law);
        }
    }
    if nodes.len() > cap {
        return Err(NoiseError::CapExceeded { nodes: nodes.len(), cap });
    }
    let digits = vec![0; nodes.len()];
    // the correct pointers are the reference for `faulty`
    let reference = AdviceAssignment::correct(t);
    for &u in &nodes {
        base.pointer[u] = reference.pointer[u];
    }
    Ok(AdviceEnumeration {
        base,
        nodes,
        laws,
        digits,
        done: false,
    })
}
