use std::collections::{HashMap, HashSet};

use num_traits::Zero;

use super::{carried_resdn, check_flows, disconnected, Diagnostics, HeuristicOutcome};
use crate::error::Result;
use crate::net::{
    enumerate_paths, enumerate_paths_where, prune_idle, Flow, LinkId, Path, PathBounds,
    RoutingState, SwitchId, Topology, UtilityInterval,
};
use crate::num::{max_q, Q};

/// How a detour around an under-utilized link is picked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RerouteRule {
    /// First admissible detour in (hops, node ids) order.
    NextShortest,
    /// Admissible detour whose busiest link is busiest; fewer hops on ties.
    MaxUtility,
}

impl RerouteRule {
    fn label(self) -> &'static str {
        match self {
            RerouteRule::NextShortest => "NSP",
            RerouteRule::MaxUtility => "NMU",
        }
    }
}

/// Every flow on its first enumerated (shortest, lexicographically smallest)
/// path. Flows crossing a link loaded beyond capacity are reported.
pub fn shortest_path_routing(
    topology: &Topology,
    flows: &[Flow],
    bounds: &PathBounds,
) -> Result<(RoutingState, Vec<usize>)> {
    check_flows(topology, flows)?;
    let mut state = RoutingState::new(topology, flows.to_vec());
    let first_only = PathBounds {
        max_paths: 1,
        ..*bounds
    };
    for (i, f) in flows.iter().enumerate() {
        let p = enumerate_paths(topology, f.source, f.destination, &first_only)
            .into_iter()
            .next()
            .ok_or_else(|| disconnected(topology, f))?;
        state.assign(topology, i, p)?;
    }
    let one = Q::from_integer(1);
    let overloaded: Vec<usize> = (0..flows.len())
        .filter(|&i| {
            state
                .path(i)
                .is_some_and(|p| p.hops().iter().any(|&h| state.utility(h) > one))
        })
        .collect();
    Ok((state, overloaded))
}

/// Next-shortest-path rerouting. Without an `initial` state every flow starts
/// on its shortest path.
pub fn nsp(
    topology: &Topology,
    flows: &[Flow],
    initial: Option<RoutingState>,
    interval: &UtilityInterval,
    bounds: &PathBounds,
) -> Result<HeuristicOutcome> {
    standalone(
        topology,
        flows,
        initial,
        interval,
        bounds,
        RerouteRule::NextShortest,
    )
}

/// Next-maximum-utility rerouting; see [`nsp`].
pub fn nmu(
    topology: &Topology,
    flows: &[Flow],
    initial: Option<RoutingState>,
    interval: &UtilityInterval,
    bounds: &PathBounds,
) -> Result<HeuristicOutcome> {
    standalone(
        topology,
        flows,
        initial,
        interval,
        bounds,
        RerouteRule::MaxUtility,
    )
}

fn standalone(
    topology: &Topology,
    flows: &[Flow],
    initial: Option<RoutingState>,
    interval: &UtilityInterval,
    bounds: &PathBounds,
    rule: RerouteRule,
) -> Result<HeuristicOutcome> {
    let (state, fallback_flows) = match initial {
        Some(s) => {
            check_flows(topology, s.flows())?;
            if !s.is_complete() {
                return Err(crate::Error::InconsistentState(
                    "initial routing leaves flows unassigned".into(),
                ));
            }
            (s, Vec::new())
        }
        None => shortest_path_routing(topology, flows, bounds)?,
    };
    let base = HeuristicOutcome {
        state,
        topology: topology.clone(),
        diagnostics: Diagnostics {
            fallback_flows,
            ..Default::default()
        },
        provenance: String::new(),
    };
    let mut out = reroute_pass(base, interval, bounds, rule)?;
    out.provenance = rule.label().into();
    Ok(out)
}

/// Runs the rerouting loop on top of an existing outcome, only ever using
/// links that are active in it. The provenance gains a `+NSP` / `+NMU`
/// suffix.
pub fn reroute_pass(
    base: HeuristicOutcome,
    interval: &UtilityInterval,
    bounds: &PathBounds,
    rule: RerouteRule,
) -> Result<HeuristicOutcome> {
    let HeuristicOutcome {
        mut state,
        topology: mut topo,
        mut diagnostics,
        provenance,
    } = base;

    let mut candidates: Vec<(Q, LinkId)> = topo
        .link_ids()
        .filter(|&l| topo.is_link_active(l))
        .map(|l| (state.link_utility(l), l))
        .filter(|(u, _)| !u.is_zero() && *u < interval.u_min())
        .collect();
    candidates.sort();
    let excluded: HashSet<LinkId> = candidates.iter().map(|&(_, l)| l).collect();

    for &(_, link) in &candidates {
        diagnostics.candidate_links_processed += 1;
        if !topo.is_link_active(link) || state.is_link_idle(link) {
            continue;
        }
        let (i, j) = (topo.link(link).a, topo.link(link).b);
        let moving = state.flows_on_link(link);
        // Load that leaves the link in each direction.
        let (mut fwd, mut rev) = (Q::zero(), Q::zero());
        for &f in &moving {
            let p = state.path(f).expect("flows_on_link returns assigned flows");
            let hop = p
                .hops()
                .iter()
                .find(|h| h.link == link)
                .expect("flow crosses link");
            if hop.reverse {
                rev += state.flows()[f].rate;
            } else {
                fwd += state.flows()[f].rate;
            }
        }
        let detours = enumerate_paths_where(&topo, i, j, bounds, &|l| {
            topo.is_usable(l) && !excluded.contains(&l)
        });
        let admissible = |p: &Path| {
            p.hops().iter().all(|&h| {
                let w = topo.bandwidth(h);
                state.utility(h) + fwd / w <= interval.u_max()
                    && state.utility(h.opposite()) + rev / w <= interval.u_max()
            })
        };
        let chosen = match rule {
            RerouteRule::NextShortest => detours.iter().find(|p| admissible(p)),
            RerouteRule::MaxUtility => {
                let mut best: Option<(&Path, Q)> = None;
                for p in detours.iter().filter(|p| admissible(p)) {
                    let peak = p
                        .hops()
                        .iter()
                        .fold(Q::zero(), |acc, h| max_q(acc, state.link_utility(h.link)));
                    if best.as_ref().is_none_or(|(_, b)| peak > *b) {
                        best = Some((p, peak));
                    }
                }
                best.map(|(p, _)| p)
            }
        };
        let Some(detour) = chosen else {
            continue;
        };
        let detour = detour.clone();
        for f in moving {
            let old = state.path(f).expect("assigned").clone();
            let rerouted = splice(&topo, &old, link, &detour)?;
            state.assign(&topo, f, rerouted)?;
        }
        if state.is_link_idle(link) {
            topo.set_link_active(link, false);
            diagnostics.links_turned_off += 1;
        }
        diagnostics
            .resdn_trace
            .push(carried_resdn(&state, &topo, interval));
    }

    let pruned = prune_idle(&state, &topo);
    Ok(HeuristicOutcome {
        state,
        topology: pruned,
        diagnostics,
        provenance: if provenance.is_empty() {
            rule.label().into()
        } else {
            format!("{provenance}+{}", rule.label())
        },
    })
}

/// Replaces the hop of `path` over `link` by `detour` (taken in the hop's
/// direction) and erases any loop the splice creates.
fn splice(topology: &Topology, path: &Path, link: LinkId, detour: &Path) -> Result<Path> {
    let mut walk: Vec<SwitchId> = Vec::with_capacity(path.nodes().len() + detour.nodes().len());
    for (k, &n) in path.nodes().iter().enumerate() {
        walk.push(n);
        if let Some(h) = path.hops().get(k) {
            if h.link == link {
                let inner = &detour.nodes()[1..detour.nodes().len() - 1];
                if detour.source() == n {
                    walk.extend(inner.iter().copied());
                } else {
                    walk.extend(inner.iter().rev().copied());
                }
            }
        }
    }
    let mut simple: Vec<SwitchId> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<SwitchId, usize> = HashMap::new();
    for n in walk {
        if let Some(&k) = pos.get(&n) {
            for dropped in simple.drain(k + 1..) {
                pos.remove(&dropped);
            }
        } else {
            pos.insert(n, simple.len());
            simple.push(n);
        }
    }
    Path::new(topology, simple)
}
