//! Dynamic configuration model: `k`-edge rewiring, non-backtracking walks on
//! half-edges, the rewired-edge stopping time, exact small-scale oracles and
//! Monte Carlo estimators.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod deferred;
pub mod degrees;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod seeding;
pub mod stats;
pub mod topology;
pub mod walk;

pub use config::{hamming, multigraph_stats, q_probability, sample_configuration, Configuration};
pub use degrees::{DegreeSequence, HalfEdge, RegularityReport, Vertex};
pub use dynamics::{alpha_to_k, evolve, rewire_step, AlphaChoice, RewiringTrace};
pub use error::{Error, Result};
pub use walk::{run_joint, transition_matrix, walk_step, JointChain, JointTrajectory};
