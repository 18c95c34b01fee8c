use num_traits::Zero;

use super::{
    carried_resdn, check_flows, disconnected, fits, least_peak, Diagnostics, HeuristicOutcome,
};
use crate::error::Result;
use crate::net::{
    enumerate_paths, prune_idle, Flow, Path, PathBounds, RoutingState, Topology, UtilityInterval,
};
use crate::num::{max_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathChoice {
    pub path: Path,
    /// No candidate kept every hop within `u_max`; `path` is the one with
    /// the lowest resulting peak utility.
    pub fallback: bool,
}

/// Counts of carrying links and of carrying links inside the interval.
fn carried_counts(
    state: &RoutingState,
    topology: &Topology,
    interval: &UtilityInterval,
) -> (i128, i128) {
    let (mut inside, mut active) = (0, 0);
    for l in topology.link_ids() {
        if topology.is_link_active(l) && !state.is_link_idle(l) {
            active += 1;
            if interval.contains(&state.link_utility(l)) {
                inside += 1;
            }
        }
    }
    (inside, active)
}

/// Carried-link RESDN after adding `rate` along `path`, from the current
/// counts and the hops the path touches.
fn tentative_resdn(
    state: &RoutingState,
    topology: &Topology,
    interval: &UtilityInterval,
    (inside, active): (i128, i128),
    path: &Path,
    rate: Q,
) -> Q {
    let (mut inside, mut active) = (inside, active);
    for &h in path.hops() {
        let other = state.utility(h.opposite());
        let before = max_q(state.utility(h), other);
        let after = max_q(state.utility(h) + rate / topology.bandwidth(h), other);
        if before.is_zero() {
            active += 1;
        } else if interval.contains(&before) {
            inside -= 1;
        }
        if interval.contains(&after) {
            inside += 1;
        }
    }
    if active == 0 {
        Q::from_integer(1)
    } else {
        Q::new(inside, active)
    }
}

/// Picks the path for `flow` that maximizes network RESDN.
///
/// Candidates that would push any hop above `u_max` are discarded. Among the
/// rest the highest post-assignment RESDN wins, ties going to fewer hops and
/// then to the lexicographically smaller node sequence. When nothing is
/// admissible the least-peak candidate is returned with `fallback` set.
pub fn path_max_resdn(
    state: &RoutingState,
    topology: &Topology,
    flow: &Flow,
    interval: &UtilityInterval,
    bounds: &PathBounds,
) -> Result<PathChoice> {
    let candidates = enumerate_paths(topology, flow.source, flow.destination, bounds);
    if candidates.is_empty() {
        return Err(disconnected(topology, flow));
    }
    Ok(choose(state, topology, flow.rate, interval, &candidates))
}

fn choose(
    state: &RoutingState,
    topology: &Topology,
    rate: Q,
    interval: &UtilityInterval,
    candidates: &[Path],
) -> PathChoice {
    let counts = carried_counts(state, topology, interval);
    let mut best: Option<(&Path, Q)> = None;
    // Candidates arrive sorted by hops then node ids, so a strict improvement
    // test implements the tie-break.
    for p in candidates {
        if !fits(state, topology, p, rate, interval.u_max()) {
            continue;
        }
        let score = tentative_resdn(state, topology, interval, counts, p, rate);
        if best.as_ref().is_none_or(|(_, s)| score > *s) {
            best = Some((p, score));
        }
    }
    match best {
        Some((p, _)) => PathChoice {
            path: p.clone(),
            fallback: false,
        },
        None => PathChoice {
            path: least_peak(state, topology, candidates, rate).clone(),
            fallback: true,
        },
    }
}

/// Routes flows in input order, each on its RESDN-maximizing path, then turns
/// off idle links and switches.
pub fn max_resdn(
    topology: &Topology,
    flows: &[Flow],
    interval: &UtilityInterval,
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

    let mut state = RoutingState::new(topology, flows.to_vec());
    let mut diagnostics = Diagnostics::default();
    for (i, f) in flows.iter().enumerate() {
        let choice = choose(&state, topology, f.rate, interval, &candidates[i]);
        if choice.fallback {
            diagnostics.fallback_flows.push(i);
        }
        state.assign(topology, i, choice.path)?;
        diagnostics
            .resdn_trace
            .push(carried_resdn(&state, topology, interval));
    }
    let pruned = prune_idle(&state, topology);
    Ok(HeuristicOutcome {
        state,
        topology: pruned,
        diagnostics,
        provenance: "MaxRESDN".into(),
    })
}
