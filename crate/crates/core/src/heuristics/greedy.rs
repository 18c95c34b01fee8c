use std::fmt;
use std::str::FromStr;

use super::{check_flows, disconnected, fits, least_peak, Diagnostics, HeuristicOutcome};
use crate::error::{Error, Result};
use crate::metrics::{LINK_WEIGHT, SWITCH_WEIGHT};
use crate::net::{enumerate_paths, prune_idle, Flow, Path, PathBounds, RoutingState, Topology};
use crate::num::Q;

/// Flow processing order for [`ordered_greedy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordering {
    /// Shortest path first.
    Spf,
    /// Shortest path last.
    Spl,
    /// Smallest demand first.
    Sdf,
    /// Highest demand first.
    Hdf,
}

impl Ordering {
    pub const ALL: [Ordering; 4] = [Ordering::Spf, Ordering::Spl, Ordering::Sdf, Ordering::Hdf];

    pub fn label(self) -> &'static str {
        match self {
            Ordering::Spf => "SPF",
            Ordering::Spl => "SPL",
            Ordering::Sdf => "SDF",
            Ordering::Hdf => "HDF",
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ordering::ALL
            .into_iter()
            .find(|o| o.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownHeuristic(s.to_string()))
    }
}

/// Indices of `flows` in processing order; equal keys keep input order.
pub fn processing_order(flows: &[Flow], shortest_hops: &[usize], ordering: Ordering) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..flows.len()).collect();
    match ordering {
        Ordering::Spf => idx.sort_by_key(|&i| shortest_hops[i]),
        Ordering::Spl => idx.sort_by_key(|&i| std::cmp::Reverse(shortest_hops[i])),
        Ordering::Sdf => idx.sort_by(|&a, &b| flows[a].rate.cmp(&flows[b].rate)),
        Ordering::Hdf => idx.sort_by(|&a, &b| flows[b].rate.cmp(&flows[a].rate)),
    }
    idx
}

/// Minimum-energy-increase greedy routing.
///
/// Flows are taken in `ordering`; each one gets the capacity-feasible
/// candidate that switches on the least equipment, weighting a newly powered
/// switch 3 and a newly powered link 1. The first flow therefore lands on its
/// shortest path. Ties go to fewer hops, then to smaller node ids. A flow
/// with no feasible candidate takes the least-peak one and is flagged.
pub fn ordered_greedy(
    topology: &Topology,
    flows: &[Flow],
    ordering: Ordering,
    bounds: &PathBounds,
) -> Result<HeuristicOutcome> {
    check_flows(topology, flows)?;
    let candidates = flows
        .iter()
        .map(|f| {
            let c = enumerate_paths(topology, f.source, f.destination, bounds);
            if c.is_empty() {
                Err(disconnected(topology, f))
            } else {
                Ok(c)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let shortest: Vec<usize> = candidates.iter().map(|c| c[0].hop_count()).collect();

    let mut state = RoutingState::new(topology, flows.to_vec());
    let mut switch_on = vec![false; topology.num_switches()];
    let mut link_on = vec![false; topology.num_links()];
    let mut diagnostics = Diagnostics::default();
    let one = Q::from_integer(1);

    for i in processing_order(flows, &shortest, ordering) {
        let rate = flows[i].rate;
        let energy = |p: &Path| {
            let switches = p.nodes().iter().filter(|n| !switch_on[n.index()]).count();
            let links = p.hops().iter().filter(|h| !link_on[h.link.index()]).count();
            SWITCH_WEIGHT as usize * switches + LINK_WEIGHT as usize * links
        };
        let mut best: Option<(&Path, usize)> = None;
        for p in candidates[i]
            .iter()
            .filter(|p| fits(&state, topology, p, rate, one))
        {
            let e = energy(p);
            if best.is_none_or(|(_, b)| e < b) {
                best = Some((p, e));
            }
        }
        let path = match best {
            Some((p, _)) => p.clone(),
            None => {
                diagnostics.fallback_flows.push(i);
                least_peak(&state, topology, &candidates[i], rate).clone()
            }
        };
        for n in path.nodes() {
            switch_on[n.index()] = true;
        }
        for h in path.hops() {
            link_on[h.link.index()] = true;
        }
        state.assign(topology, i, path)?;
    }
    diagnostics.fallback_flows.sort_unstable();
    let pruned = prune_idle(&state, topology);
    Ok(HeuristicOutcome {
        state,
        topology: pruned,
        diagnostics,
        provenance: ordering.label().into(),
    })
}
