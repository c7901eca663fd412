//! Pareto frontier mapping for the primal deterministic information bottleneck.
//!
//! The search walks hard clusterings of a discrete input alphabet, scoring each
//! by `(-H(Z), I(Z;Y))` in bits and keeping the non-dominated set.

pub mod datasets;
pub mod distributions;
pub mod encoders;
pub mod error;
pub mod mapper;
pub mod oracle;
pub mod pareto_set;
pub mod rng;
pub mod robust;
pub mod scaling_lab;
pub mod symmetric;

pub use distributions::{EmpiricalCounts, JointPMF};
pub use encoders::Encoder;
pub use error::{DibError, Result};
pub use mapper::{pareto_mapper, search, DibObjective, Objective, SearchConfig, SearchStats};
pub use pareto_set::{ParetoPoint, ParetoSet};
pub use robust::{robust_pareto_mapper, RobustConfig, RobustResult};
pub use symmetric::{symmetric_pareto_mapper, TripleJointPMF};
pub use datasets::{group_joint, ingest_bigrams, make_group, GroupTable};
pub use oracle::{brute_force_frontier, enumerate_partitions, precision_recall, FrontierScore};
pub use scaling_lab::CopulaKind;
