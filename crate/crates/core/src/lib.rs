//! Search on trees whose nodes carry permanent, possibly faulty, advice.
//!
//! An agent starts at the root σ of a tree and looks for a treasure τ. Every
//! node other than τ holds a pointer to one of its neighbors; with
//! probability `q_u` that pointer is faulty. The crate provides
//!
//! * [`tree`]: tree topologies (explicit and implicit), generators, and the
//!   structural weights the algorithms use;
//! * [`noise`]: the random and semi-adversarial fault models;
//! * [`walkers`]: move-counting frontier searches;
//! * [`queriers`]: query-counting separator searches;
//! * [`memoryless`]: probabilistic following;
//! * [`oracle`]: exact expectations, lower-bound counts and tail bounds;
//! * [`harness`]: a reproducible, parallel Monte-Carlo experiment engine;
//! * [`verify`]: the acceptance checks shared by the test suite and the CLI.

pub mod algo;
pub mod harness;
pub mod logweight;
pub mod memoryless;
pub mod noise;
pub mod oracle;
pub mod queriers;
pub mod rng;
pub mod tree;
pub mod verify;
pub mod walkers;

/// Dense node identifier.
pub type NodeId = usize;

pub use logweight::LogWeight;
pub use noise::{Advice, AdviceAssignment, FaultMode, NoiseModel};
pub use tree::{CompleteAryTree, Topology, Tree};
pub use walkers::SearchTranscript;
