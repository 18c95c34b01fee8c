//! RESDN and the companion evaluation metrics.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{LinkId, RoutingState, Topology, UtilityInterval};
use crate::num::Q;

/// Relative weight of switches versus links in traffic proportionality and in
/// the greedy energy delta (M:N = 3:1).
pub const SWITCH_WEIGHT: i128 = 3;
pub const LINK_WEIGHT: i128 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkClassification {
    pub link: LinkId,
    /// Larger of the two directed utilities.
    pub utility: Q,
    pub in_interval: bool,
}

/// Classification of every active link against `interval`.
pub fn classify_links(
    state: &RoutingState,
    topology: &Topology,
    interval: &UtilityInterval,
) -> Vec<LinkClassification> {
    topology
        .link_ids()
        .filter(|&l| topology.is_link_active(l))
        .map(|link| {
            let utility = state.link_utility(link);
            LinkClassification {
                link,
                utility,
                in_interval: interval.contains(&utility),
            }
        })
        .collect()
}

/// Share of active links whose utility lies in `interval`. With no active
/// link at all the ratio is vacuously 1.
pub fn resdn(state: &RoutingState, topology: &Topology, interval: &UtilityInterval) -> Q {
    let classes = classify_links(state, topology, interval);
    if classes.is_empty() {
        return Q::from_integer(1);
    }
    let inside = classes.iter().filter(|c| c.in_interval).count();
    Q::new(inside as i128, classes.len() as i128)
}

/// Percentage of links turned off.
pub fn links_saved(topology: &Topology) -> Result<Q> {
    let total = topology.num_links();
    if total == 0 {
        return Err(Error::EmptyTopology);
    }
    let active = topology.active_link_count();
    Ok((Q::from_integer(1) - Q::new(active as i128, total as i128)) * 100)
}

/// Mean hop count over assigned flows.
pub fn avg_path_length(state: &RoutingState) -> Result<Q> {
    let n = state.assigned_count();
    if n == 0 {
        return Err(Error::NoFlows);
    }
    Ok(Q::new(state.total_hops() as i128, n as i128))
}

/// Traffic volume over the weighted active-component fraction, normalized so
/// a fully powered network scores exactly its traffic volume.
pub fn traffic_proportionality(volume: Q, topology: &Topology, m: Q, n: Q) -> Result<Q> {
    if volume < Q::zero() || volume > Q::from_integer(1) {
        return Err(Error::InvalidVolume(volume));
    }
    if m <= Q::zero() || n <= Q::zero() {
        return Err(Error::Config(format!(
            "weights must be positive, got {m}:{n}"
        )));
    }
    let (switches, links) = (topology.num_switches(), topology.num_links());
    if switches == 0 || links == 0 {
        return Err(Error::EmptyTopology);
    }
    if volume.is_zero() {
        return Ok(Q::zero());
    }
    let power = m * Q::new(topology.active_switch_count() as i128, switches as i128)
        + n * Q::new(topology.active_link_count() as i128, links as i128);
    if power.is_zero() {
        return Err(Error::InconsistentState(
            "positive traffic volume with every switch and link off".into(),
        ));
    }
    Ok(volume / power * (m + n))
}

/// Proportionality with the default 3:1 switch-to-link weighting.
pub fn traffic_proportionality_default(volume: Q, topology: &Topology) -> Result<Q> {
    traffic_proportionality(
        volume,
        topology,
        Q::from_integer(SWITCH_WEIGHT),
        Q::from_integer(LINK_WEIGHT),
    )
}

/// One result row. Column order is the field order and is stable.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub matrix: usize,
    pub heuristic: String,
    pub provenance: String,
    pub volume: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub path_bounds: String,
    pub flows: usize,
    pub fallback_flows: Option<usize>,
    pub resdn: Option<f64>,
    pub links_saved_pct: Option<f64>,
    pub active_links: Option<usize>,
    pub active_switches: Option<usize>,
    pub avg_path_length: Option<f64>,
    pub traffic_proportionality: Option<f64>,
    pub profile: String,
    pub avg_power_active_w: Option<f64>,
    pub avg_power_all_w: Option<f64>,
    pub total_power_w: Option<f64>,
    pub error: String,
}

impl MetricsReport {
    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }
}
