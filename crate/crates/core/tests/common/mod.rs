#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use resdn_core::net::{
    build_topology, enumerate_paths, Flow, Path, PathBounds, RoutingState, Topology,
    TopologyDescription,
};
use resdn_core::{LinkId, UtilityInterval, Q};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn name(i: usize) -> String {
    format!("s{i}")
}

/// Connected graph on `n` switches: a random spanning tree plus extra edges.
pub fn random_topology(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Topology {
    const WIDTHS: [i128; 4] = [10, 20, 50, 100];
    let mut d = TopologyDescription::default();
    for i in 0..n {
        d.node(&name(i));
    }
    let mut edges = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.insert((j, i));
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    for (a, b) in edges {
        let w = WIDTHS[rng.random_range(0..WIDTHS.len())];
        d.link(&name(a), &name(b), Q::from_integer(w));
    }
    build_topology(&d).unwrap()
}

pub fn random_flows(rng: &mut ChaCha8Rng, t: &Topology, k: usize, max_rate: i128) -> Vec<Flow> {
    let n = t.num_switches();
    let ids: Vec<_> = t.switches().collect();
    (0..k)
        .map(|_| {
            let s = rng.random_range(0..n);
            let mut d = rng.random_range(0..n - 1);
            if d >= s {
                d += 1;
            }
            let rate = Q::new(rng.random_range(1..=max_rate * 4), 4);
            Flow::new(ids[s], ids[d], rate).unwrap()
        })
        .collect()
}

pub fn random_interval(rng: &mut ChaCha8Rng) -> UtilityInterval {
    let lo = rng.random_range(0..=90);
    let hi = rng.random_range(lo..=100);
    UtilityInterval::from_percent(lo, hi).unwrap()
}

/// Every flow on a uniformly drawn simple path.
pub fn random_state(rng: &mut ChaCha8Rng, t: &Topology, flows: Vec<Flow>) -> RoutingState {
    let bounds = PathBounds {
        max_hops: Some(t.num_switches()),
        hop_slack: 0,
        max_paths: 10_000,
    };
    let paths: Vec<Path> = flows
        .iter()
        .map(|f| {
            let c = enumerate_paths(t, f.source, f.destination, &bounds);
            c[rng.random_range(0..c.len())].clone()
        })
        .collect();
    RoutingState::from_paths(t, flows, paths).unwrap()
}

/// Per-direction load (Mbps) recounted from the raw path node lists.
/// Index is `(link, forward)` where forward runs from the lower switch id.
pub fn recount_loads(t: &Topology, state: &RoutingState) -> Vec<[Q; 2]> {
    let mut load = vec![[Q::from_integer(0); 2]; t.num_links()];
    for (f, p) in state.assignment() {
        for w in p.nodes().windows(2) {
            let l = t.link_between(w[0], w[1]).unwrap();
            let link = t.link(l);
            let dir = if w[0] == link.a { 0 } else { 1 };
            load[l.index()][dir] += f.rate;
        }
    }
    load
}

/// Link utility (larger direction) recounted independently.
pub fn recount_link_utility(t: &Topology, state: &RoutingState) -> Vec<Q> {
    recount_loads(t, state)
        .iter()
        .zip(t.links())
        .map(|(l, link)| {
            let m = if l[0] > l[1] { l[0] } else { l[1] };
            m / link.bandwidth
        })
        .collect()
}

pub fn links(t: &Topology) -> Vec<LinkId> {
    t.link_ids().collect()
}
