//! Energy-aware flow routing for software-defined networks.
//!
//! The crate routes traffic demands over a capacitated switch graph, scores
//! the result with the RESDN ratio (the share of active links whose utility
//! sits inside a configured `[u_min, u_max]` interval) and a handful of
//! companion metrics, and prices the outcome with measured OpenFlow switch
//! power profiles.
//!
//! All rates, bandwidths and utilities are exact rationals ([`Q`]), so
//! equality tests such as "utility is zero" never depend on floating point
//! accumulation order. Values are converted to `f64` only for reporting.

pub mod error;
pub mod fixture;
pub mod harness;
pub mod heuristics;
pub mod ingest;
pub mod metrics;
pub mod net;
pub mod num;
pub mod oracle;
pub mod power;

pub use error::{Error, Result};
pub use heuristics::{Heuristic, HeuristicOutcome};
pub use net::{
    build_topology, compute_utilities, enumerate_paths, prune_idle, DirLink, Flow, LinkId, Path,
    PathBounds, RoutingState, SwitchId, Topology, TopologyDescription, UtilityInterval,
};
pub use num::Q;
