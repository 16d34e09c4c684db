//! Per-strand query accounting and the round-robin merge.

use rustc_hash::FxHashSet;

use crate::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StrandFlow {
    Ok,
    OutOfBudget,
}

/// One strand's queries. Repeated queries of a node are free; a strand
/// stops once it has spent its budget.
#[derive(Clone, Debug)]
pub(crate) struct Strand {
    treasure: NodeId,
    budget: u64,
    seen: FxHashSet<NodeId>,
    pub order: Vec<NodeId>,
    pub queries: u64,
    pub found: bool,
}

impl Strand {
    pub fn new(treasure: NodeId, budget: u64) -> Self {
        Strand {
            treasure,
            budget,
            seen: FxHashSet::default(),
            order: Vec::new(),
            queries: 0,
            found: false,
        }
    }

    pub fn query(&mut self, x: NodeId) -> StrandFlow {
        if self.seen.contains(&x) {
            return StrandFlow::Ok;
        }
        if self.queries >= self.budget {
            return StrandFlow::OutOfBudget;
        }
        self.seen.insert(x);
        self.order.push(x);
        self.queries += 1;
        if x == self.treasure {
            self.found = true;
        }
        StrandFlow::Ok
    }
}

/// Interleaves strand query sequences one query per strand per round,
/// stopping at the first query of the treasure. Strands that ran out keep
/// being skipped. Returns the merged sequence.
pub(crate) fn round_robin(strands: &[(&[NodeId], bool)], treasure: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    let longest = strands.iter().map(|s| s.0.len()).max().unwrap_or(0);
    for r in 0..longest {
        for &(seq, _) in strands {
            if let Some(&x) = seq.get(r) {
                out.push(x);
                if x == treasure {
                    return out;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_stops_at_first_treasure_query() {
        let a = [5, 6, 7];
        let b = [1, 9];
        let c = [2, 3, 4, 9];
        let m = round_robin(&[(&a, false), (&b, true), (&c, true)], 9);
        assert_eq!(m, vec![5, 1, 2, 6, 9]);
    }

    #[test]
    fn repeats_are_free() {
        let mut s = Strand::new(3, 2);
        assert_eq!(s.query(1), StrandFlow::Ok);
        assert_eq!(s.query(1), StrandFlow::Ok);
        assert_eq!(s.query(2), StrandFlow::Ok);
        assert_eq!(s.query(3), StrandFlow::OutOfBudget);
        assert_eq!(s.queries, 2);
        assert!(!s.found);
    }
}
