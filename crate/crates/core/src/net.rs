//! Network model: switches, capacitated bidirectional links, flows, paths and
//! the per-direction utility bookkeeping every other module works from.
//!
//! Switch ids are assigned in lexicographic order of their names and links in
//! lexicographic order of their endpoint pairs, so comparing id sequences is
//! the same as comparing name sequences. All tie-breaks in the crate rely on
//! this.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{max_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwitchId(pub(crate) u32);

impl SwitchId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub(crate) u32);

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One direction of a bidirectional link. The forward direction runs from the
/// lower switch id to the higher one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirLink {
    pub link: LinkId,
    pub reverse: bool,
}

impl DirLink {
    /// Position of this direction in a per-direction vector (`2 * link + dir`).
    pub fn slot(self) -> usize {
        self.link.index() * 2 + usize::from(self.reverse)
    }

    pub fn from_slot(slot: usize) -> Self {
        DirLink {
            link: LinkId((slot / 2) as u32),
            reverse: slot % 2 == 1,
        }
    }

    pub fn opposite(self) -> Self {
        DirLink {
            link: self.link,
            reverse: !self.reverse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub a: SwitchId,
    pub b: SwitchId,
    pub bandwidth: Q,
    pub active: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDecl {
    pub id: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDecl {
    pub a: String,
    pub b: String,
    pub bandwidth: Q,
    pub line: usize,
}

/// Declarative topology as read from a file, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDescription {
    pub nodes: Vec<NodeDecl>,
    pub links: Vec<LinkDecl>,
}

impl TopologyDescription {
    pub fn node(&mut self, id: &str) -> &mut Self {
        let line = self.nodes.len() + self.links.len() + 1;
        self.nodes.push(NodeDecl {
            id: id.to_string(),
            line,
        });
        self
    }

    pub fn link(&mut self, a: &str, b: &str, bandwidth: Q) -> &mut Self {
        let line = self.nodes.len() + self.links.len() + 1;
        self.links.push(LinkDecl {
            a: a.to_string(),
            b: b.to_string(),
            bandwidth,
            line,
        });
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    names: Vec<String>,
    switch_active: Vec<bool>,
    links: Vec<Link>,
    /// Per switch: `(neighbor, link)` sorted by neighbor id.
    adjacency: Vec<Vec<(SwitchId, LinkId)>>,
    by_name: HashMap<String, SwitchId>,
}

/// Validates a description and builds a topology with every switch and link
/// active.
pub fn build_topology(desc: &TopologyDescription) -> Result<Topology> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for n in &desc.nodes {
        if seen.insert(n.id.as_str(), n.line).is_some() {
            return Err(Error::DuplicateNode {
                line: n.line,
                id: n.id.clone(),
            });
        }
    }
    let mut names: Vec<String> = desc.nodes.iter().map(|n| n.id.clone()).collect();
    names.sort();
    let by_name: HashMap<String, SwitchId> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), SwitchId(i as u32)))
        .collect();

    let mut pairs: HashSet<(SwitchId, SwitchId)> = HashSet::new();
    let mut raw = Vec::with_capacity(desc.links.len());
    for l in &desc.links {
        let lookup = |id: &str| {
            by_name
                .get(id)
                .copied()
                .ok_or_else(|| Error::UnknownEndpoint {
                    line: l.line,
                    id: id.to_string(),
                })
        };
        let a = lookup(&l.a)?;
        let b = lookup(&l.b)?;
        if a == b {
            return Err(Error::SelfLoop {
                line: l.line,
                id: l.a.clone(),
            });
        }
        if l.bandwidth <= Q::zero() {
            return Err(Error::NonPositiveBandwidth {
                line: l.line,
                bandwidth: l.bandwidth,
            });
        }
        let key = (a.min(b), a.max(b));
        if !pairs.insert(key) {
            return Err(Error::DuplicateLink {
                line: l.line,
                a: l.a.clone(),
                b: l.b.clone(),
            });
        }
        raw.push((key.0, key.1, l.bandwidth));
    }
    raw.sort_by_key(|&(a, b, _)| (a, b));

    let links: Vec<Link> = raw
        .into_iter()
        .map(|(a, b, bandwidth)| Link {
            a,
            b,
            bandwidth,
            active: true,
        })
        .collect();
    let mut adjacency = vec![Vec::new(); names.len()];
    for (i, l) in links.iter().enumerate() {
        adjacency[l.a.index()].push((l.b, LinkId(i as u32)));
        adjacency[l.b.index()].push((l.a, LinkId(i as u32)));
    }
    for adj in &mut adjacency {
        adj.sort();
    }
    Ok(Topology {
        switch_active: vec![true; names.len()],
        names,
        links,
        adjacency,
        by_name,
    })
}

impl Topology {
    pub fn num_switches(&self) -> usize {
        self.names.len()
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn switches(&self) -> impl Iterator<Item = SwitchId> + '_ {
        (0..self.names.len()).map(|i| SwitchId(i as u32))
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..self.links.len()).map(|i| LinkId(i as u32))
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn name(&self, id: SwitchId) -> &str {
        &self.names[id.index()]
    }

    pub fn switch_id(&self, name: &str) -> Option<SwitchId> {
        self.by_name.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<SwitchId> {
        self.switch_id(name)
            .ok_or_else(|| Error::UnknownSwitch(name.to_string()))
    }

    pub fn is_switch_active(&self, id: SwitchId) -> bool {
        self.switch_active[id.index()]
    }

    pub fn is_link_active(&self, id: LinkId) -> bool {
        self.links[id.index()].active
    }

    pub fn neighbors(&self, id: SwitchId) -> &[(SwitchId, LinkId)] {
        &self.adjacency[id.index()]
    }

    pub fn active_switch_count(&self) -> usize {
        self.switch_active.iter().filter(|&&a| a).count()
    }

    pub fn active_link_count(&self) -> usize {
        self.links.iter().filter(|l| l.active).count()
    }

    pub fn link_between(&self, a: SwitchId, b: SwitchId) -> Option<LinkId> {
        let adj = &self.adjacency[a.index()];
        adj.binary_search_by_key(&b, |&(n, _)| n)
            .ok()
            .map(|i| adj[i].1)
    }

    /// Directed link `from -> to`, if the two switches are adjacent.
    pub fn dir_link(&self, from: SwitchId, to: SwitchId) -> Option<DirLink> {
        self.link_between(from, to).map(|link| DirLink {
            link,
            reverse: from > to,
        })
    }

    /// `(tail, head)` of a directed link.
    pub fn endpoints(&self, dl: DirLink) -> (SwitchId, SwitchId) {
        let l = &self.links[dl.link.index()];
        if dl.reverse {
            (l.b, l.a)
        } else {
            (l.a, l.b)
        }
    }

    pub fn bandwidth(&self, dl: DirLink) -> Q {
        self.links[dl.link.index()].bandwidth
    }

    /// Sum of directed link capacities: every bidirectional link counts twice.
    pub fn directed_capacity(&self) -> Q {
        self.links
            .iter()
            .fold(Q::zero(), |acc, l| acc + l.bandwidth * 2)
    }

    pub fn set_link_active(&mut self, id: LinkId, active: bool) {
        self.links[id.index()].active = active;
    }

    pub fn set_switch_active(&mut self, id: SwitchId, active: bool) {
        self.switch_active[id.index()] = active;
    }

    /// Copy of this topology with every switch and link active again.
    pub fn all_active(&self) -> Topology {
        let mut t = self.clone();
        t.switch_active.iter_mut().for_each(|a| *a = true);
        t.links.iter_mut().for_each(|l| l.active = true);
        t
    }

    /// A link is usable when it and both of its endpoints are active.
    pub fn is_usable(&self, id: LinkId) -> bool {
        let l = &self.links[id.index()];
        l.active && self.switch_active[l.a.index()] && self.switch_active[l.b.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flow {
    pub source: SwitchId,
    pub destination: SwitchId,
    /// Demand in Mbps.
    pub rate: Q,
}

impl Flow {
    pub fn new(source: SwitchId, destination: SwitchId, rate: Q) -> Result<Self> {
        if source == destination {
            return Err(Error::InvalidFlow(
                "source and destination coincide".to_string(),
            ));
        }
        if rate <= Q::zero() {
            return Err(Error::InvalidFlow(format!("non-positive rate {rate}")));
        }
        Ok(Flow {
            source,
            destination,
            rate,
        })
    }
}

/// A simple path with its directed hops resolved against a topology.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    nodes: Vec<SwitchId>,
    hops: Vec<DirLink>,
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Path {
    /// Fewer hops first, then lexicographic on the node sequence.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.hops
            .len()
            .cmp(&other.hops.len())
            .then_with(|| self.nodes.cmp(&other.nodes))
    }
}

impl Path {
    pub fn new(topology: &Topology, nodes: Vec<SwitchId>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least one hop".into()));
        }
        let mut seen = HashSet::with_capacity(nodes.len());
        for &n in &nodes {
            if n.index() >= topology.num_switches() {
                return Err(Error::InvalidPath(format!("unknown switch id {}", n.0)));
            }
            if !seen.insert(n) {
                return Err(Error::InvalidPath(format!(
                    "switch `{}` repeats",
                    topology.name(n)
                )));
            }
        }
        let hops = nodes
            .windows(2)
            .map(|w| {
                topology.dir_link(w[0], w[1]).ok_or_else(|| {
                    Error::InvalidPath(format!(
                        "`{}` and `{}` are not adjacent",
                        topology.name(w[0]),
                        topology.name(w[1])
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Path { nodes, hops })
    }

    pub fn from_names(topology: &Topology, names: &[&str]) -> Result<Self> {
        let nodes = names
            .iter()
            .map(|n| topology.resolve(n))
            .collect::<Result<Vec<_>>>()?;
        Path::new(topology, nodes)
    }

    pub fn nodes(&self) -> &[SwitchId] {
        &self.nodes
    }

    pub fn hops(&self) -> &[DirLink] {
        &self.hops
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    pub fn source(&self) -> SwitchId {
        self.nodes[0]
    }

    pub fn destination(&self) -> SwitchId {
        *self.nodes.last().expect("non-empty path")
    }

    pub fn contains_switch(&self, id: SwitchId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn uses_link(&self, id: LinkId) -> bool {
        self.hops.iter().any(|h| h.link == id)
    }

    pub fn display<'a>(&'a self, topology: &'a Topology) -> PathDisplay<'a> {
        PathDisplay {
            path: self,
            topology,
        }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    topology: &'a Topology,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.path.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            f.write_str(self.topology.name(*n))?;
        }
        Ok(())
    }
}

/// Bounds on simple-path enumeration. The hop limit is `max_hops` when set,
/// otherwise the shortest-path length plus `hop_slack`; at most `max_paths`
/// paths are returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathBounds {
    pub max_hops: Option<usize>,
    pub hop_slack: usize,
    pub max_paths: usize,
}

impl Default for PathBounds {
    fn default() -> Self {
        PathBounds {
            max_hops: None,
            hop_slack: 2,
            max_paths: 50,
        }
    }
}

impl PathBounds {
    pub fn with_max_hops(max_hops: usize) -> Self {
        PathBounds {
            max_hops: Some(max_hops),
            ..Default::default()
        }
    }

    pub fn describe(&self) -> String {
        match self.max_hops {
            Some(h) => format!("hops<={h};k={}", self.max_paths),
            None => format!("hops<=sp+{};k={}", self.hop_slack, self.max_paths),
        }
    }
}

/// Hop distance from every switch to `dst` over links accepted by `usable`.
fn distances_to(
    topology: &Topology,
    dst: SwitchId,
    usable: &dyn Fn(LinkId) -> bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; topology.num_switches()];
    dist[dst.index()] = Some(0);
    let mut queue = VecDeque::from([dst]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u.index()].expect("queued nodes have a distance");
        for &(v, l) in topology.neighbors(u) {
            if dist[v.index()].is_none() && usable(l) {
                dist[v.index()] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// All simple paths from `src` to `dst` over active links and switches, sorted
/// by hop count and then lexicographically, truncated by `bounds`.
///
/// An empty list means the endpoints are not connected within the bounds.
pub fn enumerate_paths(
    topology: &Topology,
    src: SwitchId,
    dst: SwitchId,
    bounds: &PathBounds,
) -> Vec<Path> {
    enumerate_paths_where(topology, src, dst, bounds, &|l| topology.is_usable(l))
}

/// [`enumerate_paths`] restricted to links accepted by `usable`.
pub fn enumerate_paths_where(
    topology: &Topology,
    src: SwitchId,
    dst: SwitchId,
    bounds: &PathBounds,
    usable: &dyn Fn(LinkId) -> bool,
) -> Vec<Path> {
    if src == dst || bounds.max_paths == 0 {
        return Vec::new();
    }
    let dist = distances_to(topology, dst, usable);
    let Some(shortest) = dist[src.index()] else {
        return Vec::new();
    };
    let limit = bounds
        .max_hops
        .unwrap_or(shortest.saturating_add(bounds.hop_slack));

    let mut out = Vec::new();
    let mut on_path = vec![false; topology.num_switches()];
    let mut nodes = vec![src];
    let mut hops = Vec::new();
    on_path[src.index()] = true;
    // Exact-length passes in increasing order; neighbors are visited in id
    // order, so each pass emits its paths lexicographically.
    for len in shortest..=limit {
        walk(
            topology,
            dst,
            len,
            &dist,
            usable,
            &mut on_path,
            &mut nodes,
            &mut hops,
            &mut out,
            bounds.max_paths,
        );
        if out.len() >= bounds.max_paths {
            break;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    topology: &Topology,
    dst: SwitchId,
    len: usize,
    dist: &[Option<usize>],
    usable: &dyn Fn(LinkId) -> bool,
    on_path: &mut [bool],
    nodes: &mut Vec<SwitchId>,
    hops: &mut Vec<DirLink>,
    out: &mut Vec<Path>,
    cap: usize,
) {
    let u = *nodes.last().expect("walk starts at the source");
    if u == dst {
        if hops.len() == len {
            out.push(Path {
                nodes: nodes.clone(),
                hops: hops.clone(),
            });
        }
        return;
    }
    let remaining = len - hops.len();
    for &(v, l) in topology.neighbors(u) {
        if out.len() >= cap {
            return;
        }
        if on_path[v.index()] || !usable(l) {
            continue;
        }
        match dist[v.index()] {
            Some(d) if d < remaining => {}
            _ => continue,
        }
        // The destination ends the walk: only step onto it on the last hop.
        if v == dst && remaining != 1 {
            continue;
        }
        on_path[v.index()] = true;
        nodes.push(v);
        hops.push(DirLink {
            link: l,
            reverse: u > v,
        });
        walk(
            topology, dst, len, dist, usable, on_path, nodes, hops, out, cap,
        );
        hops.pop();
        nodes.pop();
        on_path[v.index()] = false;
    }
}

/// Per-direction utilities of `paths` on `topology` (index with
/// [`DirLink::slot`]). Over-capacity values are returned as they are.
pub fn compute_utilities<'a>(
    topology: &Topology,
    assignment: impl IntoIterator<Item = (&'a Flow, &'a Path)>,
) -> Vec<Q> {
    let mut u = vec![Q::zero(); topology.num_links() * 2];
    for (flow, path) in assignment {
        for &h in path.hops() {
            u[h.slot()] += flow.rate / topology.bandwidth(h);
        }
    }
    u
}

/// Valid `[u_min, u_max]` with `0 <= u_min <= u_max <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(Q, Q)", into = "(Q, Q)")]
pub struct UtilityInterval {
    u_min: Q,
    u_max: Q,
}

impl UtilityInterval {
    pub fn new(u_min: Q, u_max: Q) -> Result<Self> {
        let one = Q::from_integer(1);
        if u_min < Q::zero() || u_min > u_max || u_max > one {
            return Err(Error::InvalidInterval { u_min, u_max });
        }
        Ok(UtilityInterval { u_min, u_max })
    }

    /// From whole percentages, e.g. `(31, 82)`.
    pub fn from_percent(u_min: i128, u_max: i128) -> Result<Self> {
        Self::new(Q::new(u_min, 100), Q::new(u_max, 100))
    }

    pub fn u_min(&self) -> Q {
        self.u_min
    }

    pub fn u_max(&self) -> Q {
        self.u_max
    }

    /// Inclusive at both ends.
    pub fn contains(&self, utility: &Q) -> bool {
        self.u_min <= *utility && *utility <= self.u_max
    }
}

impl TryFrom<(Q, Q)> for UtilityInterval {
    type Error = Error;
    fn try_from((a, b): (Q, Q)) -> Result<Self> {
        UtilityInterval::new(a, b)
    }
}

impl From<UtilityInterval> for (Q, Q) {
    fn from(i: UtilityInterval) -> Self {
        (i.u_min, i.u_max)
    }
}

/// Flow-to-path assignment with cached per-direction utilities.
///
/// Flows are addressed by their position in the flow list; two demands with
/// identical endpoints and rate remain distinct flows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingState {
    flows: Vec<Flow>,
    paths: Vec<Option<Path>>,
    utilities: Vec<Q>,
}

impl RoutingState {
    pub fn new(topology: &Topology, flows: Vec<Flow>) -> Self {
        let n = flows.len();
        RoutingState {
            flows,
            paths: vec![None; n],
            utilities: vec![Q::zero(); topology.num_links() * 2],
        }
    }

    pub fn from_paths(topology: &Topology, flows: Vec<Flow>, paths: Vec<Path>) -> Result<Self> {
        if flows.len() != paths.len() {
            return Err(Error::InconsistentState(format!(
                "{} flows but {} paths",
                flows.len(),
                paths.len()
            )));
        }
        let mut state = RoutingState::new(topology, flows);
        for (i, p) in paths.into_iter().enumerate() {
            state.assign(topology, i, p)?;
        }
        Ok(state)
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn path(&self, flow: usize) -> Option<&Path> {
        self.paths[flow].as_ref()
    }

    /// `(flow, path)` for every assigned flow, in flow order.
    pub fn assignment(&self) -> impl Iterator<Item = (&Flow, &Path)> {
        self.flows
            .iter()
            .zip(&self.paths)
            .filter_map(|(f, p)| p.as_ref().map(|p| (f, p)))
    }

    pub fn is_complete(&self) -> bool {
        self.paths.iter().all(Option::is_some)
    }

    pub fn assigned_count(&self) -> usize {
        self.paths.iter().filter(|p| p.is_some()).count()
    }

    pub fn utilities(&self) -> &[Q] {
        &self.utilities
    }

    pub fn utility(&self, dl: DirLink) -> Q {
        self.utilities[dl.slot()]
    }

    /// Utility of a bidirectional link: the larger of its two directions.
    pub fn link_utility(&self, link: LinkId) -> Q {
        let i = link.index() * 2;
        max_q(self.utilities[i], self.utilities[i + 1])
    }

    pub fn is_link_idle(&self, link: LinkId) -> bool {
        let i = link.index() * 2;
        self.utilities[i].is_zero() && self.utilities[i + 1].is_zero()
    }

    /// Routes `flow` on `path`, replacing any previous path.
    pub fn assign(&mut self, topology: &Topology, flow: usize, path: Path) -> Result<()> {
        let f = self
            .flows
            .get(flow)
            .ok_or_else(|| Error::InconsistentState(format!("no flow #{flow}")))?;
        if path.source() != f.source || path.destination() != f.destination {
            return Err(Error::InvalidPath(format!(
                "path {} does not connect flow #{flow} endpoints",
                path.display(topology)
            )));
        }
        self.unassign(topology, flow);
        let rate = self.flows[flow].rate;
        for &h in path.hops() {
            self.utilities[h.slot()] += rate / topology.bandwidth(h);
        }
        self.paths[flow] = Some(path);
        Ok(())
    }

    pub fn unassign(&mut self, topology: &Topology, flow: usize) -> Option<Path> {
        let old = self.paths[flow].take()?;
        let rate = self.flows[flow].rate;
        for &h in old.hops() {
            self.utilities[h.slot()] -= rate / topology.bandwidth(h);
        }
        Some(old)
    }

    /// Utilities recomputed from scratch; equal to the cached ones.
    pub fn recompute_utilities(&self, topology: &Topology) -> Vec<Q> {
        compute_utilities(topology, self.assignment())
    }

    /// Flows whose path crosses `link` in either direction.
    pub fn flows_on_link(&self, link: LinkId) -> Vec<usize> {
        self.paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.as_ref().is_some_and(|p| p.uses_link(link)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_hops(&self) -> usize {
        self.assignment().map(|(_, p)| p.hop_count()).sum()
    }
}

/// Turns off every link whose two directions carry nothing, then every switch
/// left without an active link. Nothing is ever switched on.
pub fn prune_idle(state: &RoutingState, topology: &Topology) -> Topology {
    let mut out = topology.clone();
    for id in topology.link_ids() {
        if topology.is_link_active(id) && state.is_link_idle(id) {
            out.set_link_active(id, false);
        }
    }
    for s in topology.switches() {
        if out.is_switch_active(s) && !out.neighbors(s).iter().any(|&(_, l)| out.is_link_active(l))
        {
            out.set_switch_active(s, false);
        }
    }
    out
}
