//! Ground truth for small instances: a literal checker for the routing
//! integer program's constraints and an exhaustive RESDN maximizer over the
//! same bounded path sets the heuristics draw from.

use std::cmp::Ordering as CmpOrdering;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::{Diagnostics, HeuristicOutcome};
use crate::metrics::resdn;
use crate::net::{
    enumerate_paths, prune_idle, DirLink, Flow, LinkId, Path, PathBounds, RoutingState, SwitchId,
    Topology, UtilityInterval,
};
use crate::num::Q;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Printed next to oracle results.
pub const OPTIMALITY_CAVEAT: &str =
    "optimal over the bounded candidate path sets only, not over every possible routing";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Flow on a directed link never exceeds its bandwidth.
    Capacity,
    /// Transit switches forward what they receive.
    InteriorBalance,
    /// Each flow leaves its source and reaches its destination.
    Delivery,
    /// No flow touches an inactive switch.
    InactiveSwitch,
    /// An active switch carries some flow.
    SwitchActivity,
    /// An active link has both endpoints active.
    LinkSwitch,
    /// No flow is routed over an inactive link.
    InactiveLink,
}

impl Constraint {
    pub const ALL: [Constraint; 7] = [
        Constraint::Capacity,
        Constraint::InteriorBalance,
        Constraint::Delivery,
        Constraint::InactiveSwitch,
        Constraint::SwitchActivity,
        Constraint::LinkSwitch,
        Constraint::InactiveLink,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Capacity {
        link: DirLink,
        load: Q,
        bandwidth: Q,
    },
    InteriorBalance {
        flow: usize,
        switch: SwitchId,
    },
    Delivery {
        flow: usize,
    },
    InactiveSwitch {
        flow: usize,
        switch: SwitchId,
    },
    SwitchActivity {
        switch: SwitchId,
    },
    LinkSwitch {
        link: LinkId,
    },
    InactiveLink {
        flow: usize,
        link: LinkId,
    },
}

impl Violation {
    pub fn constraint(&self) -> Constraint {
        match self {
            Violation::Capacity { .. } => Constraint::Capacity,
            Violation::InteriorBalance { .. } => Constraint::InteriorBalance,
            Violation::Delivery { .. } => Constraint::Delivery,
            Violation::InactiveSwitch { .. } => Constraint::InactiveSwitch,
            Violation::SwitchActivity { .. } => Constraint::SwitchActivity,
            Violation::LinkSwitch { .. } => Constraint::LinkSwitch,
            Violation::InactiveLink { .. } => Constraint::InactiveLink,
        }
    }

    pub fn describe(&self, topology: &Topology) -> String {
        let link_name = |l: LinkId| {
            let l = topology.link(l);
            format!("{}-{}", topology.name(l.a), topology.name(l.b))
        };
        match self {
            Violation::Capacity {
                link,
                load,
                bandwidth,
            } => {
                let (a, b) = topology.endpoints(*link);
                format!(
                    "capacity: {}->{} carries {} Mbps over {} Mbps",
                    topology.name(a),
                    topology.name(b),
                    crate::num::format_decimal(load),
                    crate::num::format_decimal(bandwidth)
                )
            }
            Violation::InteriorBalance { flow, switch } => format!(
                "balance: flow #{flow} unbalanced at {}",
                topology.name(*switch)
            ),
            Violation::Delivery { flow } => format!("delivery: flow #{flow} not delivered"),
            Violation::InactiveSwitch { flow, switch } => format!(
                "inactive switch: flow #{flow} uses {}",
                topology.name(*switch)
            ),
            Violation::SwitchActivity { switch } => format!(
                "switch activity: {} is on without traffic",
                topology.name(*switch)
            ),
            Violation::LinkSwitch { link } => {
                format!(
                    "link-switch: {} is on with an endpoint off",
                    link_name(*link)
                )
            }
            Violation::InactiveLink { flow, link } => {
                format!("inactive link: flow #{flow} uses {}", link_name(*link))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintReport {
    pub violations: Vec<Violation>,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn passes(&self, c: Constraint) -> bool {
        !self.violations.iter().any(|v| v.constraint() == c)
    }

    pub fn of(&self, c: Constraint) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.constraint() == c)
    }
}

/// Checks every constraint of the routing program against `state` on
/// `topology` and lists what fails. Nothing is modified.
pub fn verify_constraints(topology: &Topology, state: &RoutingState) -> ConstraintReport {
    let mut violations = Vec::new();
    let mut load = vec![Q::zero(); topology.num_links() * 2];
    let mut carries = vec![false; topology.num_switches()];

    for (fi, flow) in state.flows().iter().enumerate() {
        let Some(path) = state.path(fi) else {
            violations.push(Violation::Delivery { flow: fi });
            continue;
        };
        let mut out_deg = vec![0i32; topology.num_switches()];
        let mut in_deg = vec![0i32; topology.num_switches()];
        for &h in path.hops() {
            load[h.slot()] += flow.rate;
            let (from, to) = topology.endpoints(h);
            out_deg[from.index()] += 1;
            in_deg[to.index()] += 1;
            carries[from.index()] = true;
            carries[to.index()] = true;
            if !topology.is_link_active(h.link) {
                violations.push(Violation::InactiveLink {
                    flow: fi,
                    link: h.link,
                });
            }
        }
        for s in topology.switches() {
            let (o, i) = (out_deg[s.index()], in_deg[s.index()]);
            if s != flow.source && s != flow.destination && o != i {
                violations.push(Violation::InteriorBalance {
                    flow: fi,
                    switch: s,
                });
            }
            if (o > 0 || i > 0) && !topology.is_switch_active(s) {
                violations.push(Violation::InactiveSwitch {
                    flow: fi,
                    switch: s,
                });
            }
        }
        let src = flow.source.index();
        let dst = flow.destination.index();
        if out_deg[src] - in_deg[src] != 1
            || in_deg[dst] - out_deg[dst] != 1
            || path.source() != flow.source
            || path.destination() != flow.destination
        {
            violations.push(Violation::Delivery { flow: fi });
        }
    }

    for (slot, l) in load.iter().enumerate() {
        let dl = DirLink::from_slot(slot);
        let bandwidth = topology.bandwidth(dl);
        if *l > bandwidth {
            violations.push(Violation::Capacity {
                link: dl,
                load: *l,
                bandwidth,
            });
        }
    }
    for s in topology.switches() {
        if topology.is_switch_active(s) && !carries[s.index()] {
            violations.push(Violation::SwitchActivity { switch: s });
        }
    }
    for id in topology.link_ids() {
        let l = topology.link(id);
        if l.active && !(topology.is_switch_active(l.a) && topology.is_switch_active(l.b)) {
            violations.push(Violation::LinkSwitch { link: id });
        }
    }
    ConstraintReport { violations }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub outcome: HeuristicOutcome,
    pub resdn: Q,
    /// Size of the search space: the product of candidate counts.
    pub combinations: u128,
    /// Combinations actually scored; equals `combinations`.
    pub visited: u128,
    /// Combinations within capacity.
    pub feasible: u128,
}

#[derive(Clone)]
struct Best {
    choice: Vec<usize>,
    resdn: Q,
    hops: usize,
}

struct SearchResult {
    best: Option<Best>,
    visited: u128,
    feasible: u128,
}

/// `a` is strictly better than `b`: higher RESDN, then fewer total hops, then
/// the lexicographically smaller sequence of paths.
fn better(a: &Best, b: &Best, candidates: &[Vec<Path>]) -> bool {
    match a.resdn.cmp(&b.resdn) {
        CmpOrdering::Greater => return true,
        CmpOrdering::Less => return false,
        CmpOrdering::Equal => {}
    }
    match a.hops.cmp(&b.hops) {
        CmpOrdering::Less => return true,
        CmpOrdering::Greater => return false,
        CmpOrdering::Equal => {}
    }
    for (f, (&x, &y)) in a.choice.iter().zip(&b.choice).enumerate() {
        match candidates[f][x].nodes().cmp(candidates[f][y].nodes()) {
            CmpOrdering::Less => return true,
            CmpOrdering::Greater => return false,
            CmpOrdering::Equal => {}
        }
    }
    false
}

fn carried_resdn(state: &RoutingState, topology: &Topology, interval: &UtilityInterval) -> Q {
    let (mut inside, mut active) = (0i128, 0i128);
    for l in topology.link_ids() {
        if !state.is_link_idle(l) {
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

fn within_capacity(state: &RoutingState) -> bool {
    let one = Q::from_integer(1);
    state.utilities().iter().all(|u| *u <= one)
}

/// Odometer over flows `1..` with flow 0 pinned to `first`.
fn search(
    topology: &Topology,
    flows: &[Flow],
    candidates: &[Vec<Path>],
    interval: &UtilityInterval,
    first: usize,
) -> Result<SearchResult> {
    let n = flows.len();
    let mut state = RoutingState::new(topology, flows.to_vec());
    let mut choice = vec![0usize; n];
    choice[0] = first;
    for f in 0..n {
        state.assign(topology, f, candidates[f][choice[f]].clone())?;
    }
    let mut result = SearchResult {
        best: None,
        visited: 0,
        feasible: 0,
    };
    loop {
        result.visited += 1;
        if within_capacity(&state) {
            result.feasible += 1;
            let here = Best {
                choice: choice.clone(),
                resdn: carried_resdn(&state, topology, interval),
                hops: state.total_hops(),
            };
            if result
                .best
                .as_ref()
                .is_none_or(|b| better(&here, b, candidates))
            {
                result.best = Some(here);
            }
        }
        // Advance the odometer, last flow fastest.
        let mut f = n;
        loop {
            if f <= 1 {
                return Ok(result);
            }
            f -= 1;
            choice[f] += 1;
            if choice[f] < candidates[f].len() {
                state.assign(topology, f, candidates[f][choice[f]].clone())?;
                break;
            }
            choice[f] = 0;
            state.assign(topology, f, candidates[f][0].clone())?;
        }
    }
}

/// Exhaustive RESDN maximization over every combination of candidate paths.
///
/// Combinations that overload a link are discarded; the rest are scored after
/// switching off idle links and switches. The search is split across threads
/// by the first flow's path and merged with the same deterministic
/// tie-break, so the result does not depend on scheduling.
pub fn exact_max_resdn(
    topology: &Topology,
    flows: &[Flow],
    interval: &UtilityInterval,
    bounds: &PathBounds,
    budget: u128,
) -> Result<OracleResult> {
    crate::heuristics::check_flows(topology, flows)?;
    let candidates: Vec<Vec<Path>> = flows
        .iter()
        .map(|f| {
            let c = enumerate_paths(topology, f.source, f.destination, bounds);
            if c.is_empty() {
                Err(crate::heuristics::disconnected(topology, f))
            } else {
                Ok(c)
            }
        })
        .collect::<Result<_>>()?;
    let combinations = candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128));
    let combinations = match combinations {
        Some(c) if c <= budget => c,
        Some(c) => {
            return Err(Error::BudgetExceeded {
                combinations: c,
                budget,
            })
        }
        None => {
            return Err(Error::BudgetExceeded {
                combinations: u128::MAX,
                budget,
            })
        }
    };

    if flows.is_empty() {
        let state = RoutingState::new(topology, Vec::new());
        let pruned = prune_idle(&state, topology);
        return Ok(OracleResult {
            resdn: resdn(&state, &pruned, interval),
            outcome: HeuristicOutcome {
                state,
                topology: pruned,
                diagnostics: Diagnostics::default(),
                provenance: "exact".into(),
            },
            combinations: 1,
            visited: 1,
            feasible: 1,
        });
    }

    let parts = (0..candidates[0].len())
        .into_par_iter()
        .map(|first| search(topology, flows, &candidates, interval, first))
        .collect::<Result<Vec<_>>>()?;
    let mut visited = 0u128;
    let mut feasible = 0u128;
    let mut best: Option<Best> = None;
    for part in parts {
        visited += part.visited;
        feasible += part.feasible;
        if let Some(b) = part.best {
            if best.as_ref().is_none_or(|cur| better(&b, cur, &candidates)) {
                best = Some(b);
            }
        }
    }
    let best = best.ok_or(Error::Infeasible { combinations })?;
    let paths = best
        .choice
        .iter()
        .enumerate()
        .map(|(f, &i)| candidates[f][i].clone())
        .collect();
    let state = RoutingState::from_paths(topology, flows.to_vec(), paths)?;
    let pruned = prune_idle(&state, topology);
    let score = resdn(&state, &pruned, interval);
    debug_assert_eq!(score, best.resdn);
    debug_assert!(verify_constraints(&pruned, &state).all_pass());
    Ok(OracleResult {
        outcome: HeuristicOutcome {
            state,
            topology: pruned,
            diagnostics: Diagnostics::default(),
            provenance: "exact".into(),
        },
        resdn: score,
        combinations,
        visited,
        feasible,
    })
}
