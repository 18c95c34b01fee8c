//! Topology and traffic-matrix file formats, demand binding and scaling to a
//! target traffic volume.
//!
//! Topology files are line oriented:
//!
//! ```text
//! # comment
//! node A
//! node B
//! link A B 100      # bandwidth in Mbps
//! ```
//!
//! Traffic matrices are CSV lines `src,dst,rate_mbps` with an optional header
//! row and `#` comments.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{
    compute_utilities, enumerate_paths, Flow, PathBounds, Topology, TopologyDescription,
};
use crate::num::max_q;
use crate::num::{format_decimal, parse_decimal, Q};

/// Default aggregation window of a demand matrix, in seconds.
pub const DEFAULT_WINDOW_S: i128 = 900;

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

pub fn parse_topology(text: &str) -> Result<TopologyDescription> {
    let mut desc = TopologyDescription::default();
    let mut nodes = std::collections::HashSet::new();
    let mut pairs = std::collections::HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            ["node", id] => {
                if !valid_id(id) {
                    return Err(Error::parse(line, format!("invalid node id `{id}`")));
                }
                if !nodes.insert(id.to_string()) {
                    return Err(Error::DuplicateNode {
                        line,
                        id: id.to_string(),
                    });
                }
                desc.nodes.push(crate::net::NodeDecl {
                    id: id.to_string(),
                    line,
                });
            }
            ["link", a, b, bw] => {
                for id in [a, b] {
                    if !valid_id(id) {
                        return Err(Error::parse(line, format!("invalid node id `{id}`")));
                    }
                }
                if a == b {
                    return Err(Error::SelfLoop {
                        line,
                        id: a.to_string(),
                    });
                }
                let bandwidth = parse_decimal(bw)
                    .ok_or_else(|| Error::parse(line, format!("invalid bandwidth `{bw}`")))?;
                let key = if a < b { (*a, *b) } else { (*b, *a) };
                if !pairs.insert((key.0.to_string(), key.1.to_string())) {
                    return Err(Error::DuplicateLink {
                        line,
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
                desc.links.push(crate::net::LinkDecl {
                    a: a.to_string(),
                    b: b.to_string(),
                    bandwidth,
                    line,
                });
            }
            _ => {
                return Err(Error::parse(
                    line,
                    format!("syntax error: `{}`", raw.trim()),
                ))
            }
        }
    }
    Ok(desc)
}

/// [`parse_topology`] for raw bytes; invalid UTF-8 is reported with the line
/// it occurs on.
pub fn parse_topology_bytes(bytes: &[u8]) -> Result<TopologyDescription> {
    parse_topology(utf8(bytes)?)
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        Error::parse(line, "invalid UTF-8")
    })
}

pub fn write_topology(desc: &TopologyDescription) -> String {
    let mut out = String::new();
    for n in &desc.nodes {
        out.push_str(&format!("node {}\n", n.id));
    }
    for l in &desc.links {
        out.push_str(&format!(
            "link {} {} {}\n",
            l.a,
            l.b,
            format_decimal(&l.bandwidth)
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demand {
    pub source: String,
    pub destination: String,
    /// Mbps.
    pub rate: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficMatrix {
    pub demands: Vec<Demand>,
    /// Aggregation window in seconds.
    pub window_s: Q,
}

impl Default for TrafficMatrix {
    fn default() -> Self {
        TrafficMatrix {
            demands: Vec::new(),
            window_s: Q::from_integer(DEFAULT_WINDOW_S),
        }
    }
}

impl TrafficMatrix {
    pub fn with_window(mut self, window_s: Q) -> Result<Self> {
        if window_s <= Q::zero() {
            return Err(Error::Config(format!(
                "window must be positive, got {window_s}"
            )));
        }
        self.window_s = window_s;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn total_rate(&self) -> Q {
        self.demands.iter().fold(Q::zero(), |acc, d| acc + d.rate)
    }

    /// Resolves switch names against `topology`.
    pub fn bind(&self, topology: &Topology) -> Result<Vec<Flow>> {
        self.demands
            .iter()
            .map(|d| {
                let s = topology.resolve(&d.source)?;
                let t = topology.resolve(&d.destination)?;
                Flow::new(s, t, d.rate).map_err(|_| {
                    Error::InvalidFlow(format!(
                        "demand {}->{} has identical endpoints",
                        d.source, d.destination
                    ))
                })
            })
            .collect()
    }
}

pub fn parse_traffic_matrix(text: &str) -> Result<TrafficMatrix> {
    let mut m = TrafficMatrix::default();
    let mut seen_data = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        let [src, dst, rate] = fields.as_slice() else {
            return Err(Error::parse(
                line,
                format!("expected `src,dst,rate_mbps`, got `{body}`"),
            ));
        };
        let first = !seen_data;
        seen_data = true;
        let Some(rate) = parse_decimal(rate) else {
            if first {
                // header row
                continue;
            }
            return Err(Error::parse(line, format!("invalid rate `{rate}`")));
        };
        for id in [src, dst] {
            if !valid_id(id) {
                return Err(Error::parse(line, format!("invalid node id `{id}`")));
            }
        }
        if rate < Q::zero() {
            return Err(Error::parse(line, "negative rate"));
        }
        if rate.is_zero() {
            continue;
        }
        m.demands.push(Demand {
            source: src.to_string(),
            destination: dst.to_string(),
            rate,
        });
    }
    Ok(m)
}

pub fn parse_traffic_matrix_bytes(bytes: &[u8]) -> Result<TrafficMatrix> {
    parse_traffic_matrix(utf8(bytes)?)
}

pub fn write_traffic_matrix(m: &TrafficMatrix) -> String {
    let mut out = String::from("src,dst,rate_mbps\n");
    for d in &m.demands {
        out.push_str(&format!(
            "{},{},{}\n",
            d.source,
            d.destination,
            format_decimal(&d.rate)
        ));
    }
    out
}

/// Aggregate demand as a fraction of the topology's directed capacity.
pub fn traffic_volume(matrix: &TrafficMatrix, topology: &Topology) -> Q {
    matrix.total_rate() / topology.directed_capacity()
}

/// Multiplies every demand by the single factor that brings the matrix to
/// `target` of the topology's directed capacity.
pub fn scale_to_volume(
    matrix: &TrafficMatrix,
    topology: &Topology,
    target: Q,
) -> Result<TrafficMatrix> {
    if target <= Q::zero() || target > Q::from_integer(1) {
        return Err(Error::InvalidVolume(target));
    }
    let total = matrix.total_rate();
    if matrix.is_empty() || total.is_zero() {
        return Err(Error::NothingToScale);
    }
    if topology.num_links() == 0 {
        return Err(Error::EmptyTopology);
    }
    let factor = target * topology.directed_capacity() / total;
    Ok(scale_by(matrix, factor))
}

/// Directed-link utilities when every demand follows its shortest path
/// (ties broken by switch name).
pub fn shortest_path_utilities(matrix: &TrafficMatrix, topology: &Topology) -> Result<Vec<Q>> {
    let flows = matrix.bind(topology)?;
    let first_only = PathBounds {
        max_hops: None,
        hop_slack: 0,
        max_paths: 1,
    };
    let mut paths = Vec::with_capacity(flows.len());
    for f in &flows {
        let p = enumerate_paths(topology, f.source, f.destination, &first_only)
            .into_iter()
            .next()
            .ok_or_else(|| Error::Disconnected {
                src: topology.name(f.source).to_string(),
                dst: topology.name(f.destination).to_string(),
            })?;
        paths.push(p);
    }
    Ok(compute_utilities(topology, flows.iter().zip(&paths)))
}

/// Highest directed-link utility under shortest-path routing.
pub fn peak_shortest_path_utility(matrix: &TrafficMatrix, topology: &Topology) -> Result<Q> {
    Ok(shortest_path_utilities(matrix, topology)?
        .into_iter()
        .fold(Q::zero(), max_q))
}

/// Share of the directed capacity consumed under shortest-path routing.
pub fn carried_volume(matrix: &TrafficMatrix, topology: &Topology) -> Result<Q> {
    let u = shortest_path_utilities(matrix, topology)?;
    let mut load = Q::zero();
    for (slot, u) in u.iter().enumerate() {
        load += u * topology.bandwidth(crate::net::DirLink::from_slot(slot));
    }
    Ok(load / topology.directed_capacity())
}

fn check_scalable(matrix: &TrafficMatrix, topology: &Topology, target: Q) -> Result<()> {
    if target <= Q::zero() || target > Q::from_integer(1) {
        return Err(Error::InvalidVolume(target));
    }
    if matrix.is_empty() || matrix.total_rate().is_zero() {
        return Err(Error::NothingToScale);
    }
    if topology.num_links() == 0 {
        return Err(Error::EmptyTopology);
    }
    Ok(())
}

/// Multiplies every demand by the single factor that makes shortest-path
/// routing consume `target` of the directed capacity.
pub fn scale_to_carried_volume(
    matrix: &TrafficMatrix,
    topology: &Topology,
    target: Q,
) -> Result<TrafficMatrix> {
    check_scalable(matrix, topology, target)?;
    let carried = carried_volume(matrix, topology)?;
    Ok(scale_by(matrix, target / carried))
}

/// Multiplies every demand by the single factor that makes the busiest link
/// under shortest-path routing run at `target` utility.
pub fn scale_to_peak_utility(
    matrix: &TrafficMatrix,
    topology: &Topology,
    target: Q,
) -> Result<TrafficMatrix> {
    check_scalable(matrix, topology, target)?;
    let peak = peak_shortest_path_utility(matrix, topology)?;
    Ok(scale_by(matrix, target / peak))
}

pub fn scale_by(matrix: &TrafficMatrix, factor: Q) -> TrafficMatrix {
    TrafficMatrix {
        demands: matrix
            .demands
            .iter()
            .map(|d| Demand {
                rate: d.rate * factor,
                ..d.clone()
            })
            .collect(),
        window_s: matrix.window_s,
    }
}
