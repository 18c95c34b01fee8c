//! Routing strategies.
//!
//! * [`max_resdn`]: assigns each flow to the admissible path that maximizes
//!   the network RESDN after the assignment.
//! * [`nsp`] / [`nmu`]: start from shortest-path routing and try to empty
//!   under-utilized links by moving their flows to the next shortest detour,
//!   or to the detour through the most utilized link.
//! * [`ordered_greedy`]: sort flows (SPF, SPL, SDF, HDF) and give each one the
//!   path that switches on the least extra equipment.
//! * [`best_combination`]: the ordered variants with and without an NSP / NMU
//!   post-pass, keeping whichever saves the most links.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Flow, Path, PathBounds, RoutingState, Topology, UtilityInterval};
use crate::num::{max_q, Q};

mod best;
mod greedy;
mod maxresdn;
mod reroute;

pub use best::{all_variants, best_combination, VARIANT_ORDER};
pub use greedy::{ordered_greedy, processing_order, Ordering};
pub use maxresdn::{max_resdn, path_max_resdn, PathChoice};
pub use reroute::{nmu, nsp, reroute_pass, shortest_path_routing, RerouteRule};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Flows placed on a path that breaks the strategy's admission rule
    /// (`u_max` for interval-aware strategies, capacity otherwise).
    pub fallback_flows: Vec<usize>,
    /// Under-utilized links examined by a rerouting pass.
    pub candidate_links_processed: usize,
    /// Links a rerouting pass managed to empty and turn off.
    pub links_turned_off: usize,
    /// Network RESDN after each step, over the links carrying traffic.
    pub resdn_trace: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicOutcome {
    pub state: RoutingState,
    /// Topology with idle links and switches turned off.
    pub topology: Topology,
    pub diagnostics: Diagnostics,
    /// Strategy that produced the outcome, e.g. `MaxRESDN` or `SPF+NSP`.
    pub provenance: String,
}

impl HeuristicOutcome {
    pub fn is_fallback_free(&self) -> bool {
        self.diagnostics.fallback_flows.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    MaxResdn,
    Nsp,
    Nmu,
    Spf,
    Spl,
    Sdf,
    Hdf,
    #[serde(rename = "b")]
    Best,
}

impl Heuristic {
    pub const ALL: [Heuristic; 8] = [
        Heuristic::MaxResdn,
        Heuristic::Nsp,
        Heuristic::Nmu,
        Heuristic::Spf,
        Heuristic::Spl,
        Heuristic::Sdf,
        Heuristic::Hdf,
        Heuristic::Best,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Heuristic::MaxResdn => "maxresdn",
            Heuristic::Nsp => "nsp",
            Heuristic::Nmu => "nmu",
            Heuristic::Spf => "spf",
            Heuristic::Spl => "spl",
            Heuristic::Sdf => "sdf",
            Heuristic::Hdf => "hdf",
            Heuristic::Best => "b",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Heuristic::MaxResdn => "MaxRESDN",
            Heuristic::Nsp => "NSP",
            Heuristic::Nmu => "NMU",
            Heuristic::Spf => "SPF",
            Heuristic::Spl => "SPL",
            Heuristic::Sdf => "SDF",
            Heuristic::Hdf => "HDF",
            Heuristic::Best => "B",
        }
    }

    pub fn run(
        self,
        topology: &Topology,
        flows: &[Flow],
        interval: &UtilityInterval,
        bounds: &PathBounds,
    ) -> Result<HeuristicOutcome> {
        match self {
            Heuristic::MaxResdn => max_resdn(topology, flows, interval, bounds),
            Heuristic::Nsp => nsp(topology, flows, None, interval, bounds),
            Heuristic::Nmu => nmu(topology, flows, None, interval, bounds),
            Heuristic::Spf => ordered_greedy(topology, flows, Ordering::Spf, bounds),
            Heuristic::Spl => ordered_greedy(topology, flows, Ordering::Spl, bounds),
            Heuristic::Sdf => ordered_greedy(topology, flows, Ordering::Sdf, bounds),
            Heuristic::Hdf => ordered_greedy(topology, flows, Ordering::Hdf, bounds),
            Heuristic::Best => best_combination(topology, flows, interval, bounds),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Heuristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Heuristic::ALL
            .into_iter()
            .find(|h| h.key() == key)
            .ok_or_else(|| Error::UnknownHeuristic(s.to_string()))
    }
}

/// Parses a comma-separated heuristic list.
pub fn parse_heuristics(list: &str) -> Result<Vec<Heuristic>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

pub(crate) fn check_flows(topology: &Topology, flows: &[Flow]) -> Result<()> {
    let n = topology.num_switches();
    for (i, f) in flows.iter().enumerate() {
        if f.source.index() >= n || f.destination.index() >= n {
            return Err(Error::InvalidFlow(format!(
                "flow #{i} references an unknown switch"
            )));
        }
        if f.source == f.destination || f.rate <= Q::zero() {
            return Err(Error::InvalidFlow(format!("flow #{i} is malformed")));
        }
    }
    Ok(())
}

pub(crate) fn disconnected(topology: &Topology, flow: &Flow) -> Error {
    Error::Disconnected {
        src: topology.name(flow.source).to_string(),
        dst: topology.name(flow.destination).to_string(),
    }
}

/// Largest directed utility along `path` once `rate` is added to it.
pub(crate) fn peak_after(state: &RoutingState, topology: &Topology, path: &Path, rate: Q) -> Q {
    path.hops().iter().fold(Q::zero(), |acc, &h| {
        max_q(acc, state.utility(h) + rate / topology.bandwidth(h))
    })
}

/// Whether `rate` fits on every hop of `path` without exceeding `cap`.
pub(crate) fn fits(
    state: &RoutingState,
    topology: &Topology,
    path: &Path,
    rate: Q,
    cap: Q,
) -> bool {
    path.hops()
        .iter()
        .all(|&h| state.utility(h) + rate / topology.bandwidth(h) <= cap)
}

/// Candidate minimizing the peak post-assignment utility; first wins ties.
pub(crate) fn least_peak<'a>(
    state: &RoutingState,
    topology: &Topology,
    candidates: &'a [Path],
    rate: Q,
) -> &'a Path {
    let mut best = &candidates[0];
    let mut best_peak = peak_after(state, topology, best, rate);
    for p in &candidates[1..] {
        let peak = peak_after(state, topology, p, rate);
        if peak < best_peak {
            best = p;
            best_peak = peak;
        }
    }
    best
}

/// RESDN over the links that carry traffic, i.e. the value the network
/// reports once idle links are switched off.
pub(crate) fn carried_resdn(
    state: &RoutingState,
    topology: &Topology,
    interval: &UtilityInterval,
) -> Q {
    let (mut inside, mut active) = (0i128, 0i128);
    for l in topology.link_ids() {
        if topology.is_link_active(l) && !state.is_link_idle(l) {
            active += 1;
            if interval.contains(&state.link_utility(l)) {
                inside += 1;
            }
        }
    }
    if active == 0 {
        Q::from_integer(1)
    } else {
        Q::new(inside, active)
    }
}
