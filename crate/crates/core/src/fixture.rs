//! A GEANT-shaped evaluation fixture: the 22 PoPs and 36 bidirectional
//! links of the European research backbone at 100 Mbps, with synthetic
//! demand matrices drawn from a seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::ingest::{Demand, TrafficMatrix};
use crate::net::TopologyDescription;
use crate::num::Q;

pub const GEANT_NODES: [&str; 22] = [
    "at", "be", "ch", "cz", "de", "es", "fr", "gr", "hr", "hu", "ie", "il", "it", "lu", "nl", "ny",
    "pl", "pt", "se", "si", "sk", "uk",
];

pub const GEANT_LINKS: [(&str, &str); 36] = [
    ("at", "ch"),
    ("at", "de"),
    ("at", "hu"),
    ("at", "si"),
    ("be", "fr"),
    ("be", "nl"),
    ("ch", "fr"),
    ("ch", "it"),
    ("cz", "de"),
    ("cz", "pl"),
    ("cz", "sk"),
    ("de", "fr"),
    ("de", "gr"),
    ("de", "il"),
    ("de", "it"),
    ("de", "lu"),
    ("de", "nl"),
    ("de", "ny"),
    ("de", "se"),
    ("es", "fr"),
    ("es", "it"),
    ("es", "pt"),
    ("fr", "lu"),
    ("fr", "uk"),
    ("gr", "it"),
    ("hr", "hu"),
    ("hr", "si"),
    ("hu", "sk"),
    ("ie", "nl"),
    ("ie", "uk"),
    ("il", "it"),
    ("nl", "uk"),
    ("ny", "uk"),
    ("pl", "se"),
    ("pt", "uk"),
    ("se", "uk"),
];

pub const LINK_BANDWIDTH_MBPS: i128 = 100;
pub const MIN_FLOWS: usize = 82;
pub const MAX_FLOWS: usize = 462;
pub const MEAN_RATE_MBPS: f64 = 7.79;
/// Shape of the log-normal rate distribution.
pub const RATE_SIGMA: f64 = 1.0;

pub fn geant() -> TopologyDescription {
    let mut d = TopologyDescription::default();
    for n in GEANT_NODES {
        d.node(n);
    }
    for (a, b) in GEANT_LINKS {
        d.link(a, b, Q::from_integer(LINK_BANDWIDTH_MBPS));
    }
    d
}

/// One synthetic demand matrix. The flow count is uniform in
/// `[MIN_FLOWS, MAX_FLOWS]` over distinct ordered pairs, and rates are
/// log-normal with mean `MEAN_RATE_MBPS`, rounded to 0.01 Mbps.
pub fn synthetic_matrix(seed: u64) -> TrafficMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(MIN_FLOWS..=MAX_FLOWS);
    let mut pairs: Vec<(usize, usize)> = (0..GEANT_NODES.len())
        .flat_map(|s| {
            (0..GEANT_NODES.len())
                .filter(move |&t| t != s)
                .map(move |t| (s, t))
        })
        .collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(n);
    pairs.sort_unstable();
    let mu = MEAN_RATE_MBPS.ln() - RATE_SIGMA * RATE_SIGMA / 2.0;
    let dist = LogNormal::new(mu, RATE_SIGMA).expect("valid log-normal parameters");
    let demands = pairs
        .into_iter()
        .map(|(s, t)| {
            let hundredths = (dist.sample(&mut rng) * 100.0).round().max(1.0) as i128;
            Demand {
                source: GEANT_NODES[s].to_string(),
                destination: GEANT_NODES[t].to_string(),
                rate: Q::new(hundredths, 100),
            }
        })
        .collect();
    TrafficMatrix {
        demands,
        ..TrafficMatrix::default()
    }
}

/// `count` matrices, the i-th drawn from `seed + i`.
pub fn synthetic_matrices(seed: u64, count: usize) -> Vec<TrafficMatrix> {
    (0..count as u64)
        .map(|i| synthetic_matrix(seed.wrapping_add(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::build_topology;
    use crate::num::to_f64;

    #[test]
    fn geant_shape() {
        let t = build_topology(&geant()).unwrap();
        assert_eq!(t.num_switches(), 22);
        assert_eq!(t.num_links(), 36);
        let root = t.resolve("at").unwrap();
        let mut seen = [false; 22];
        let mut stack = vec![root];
        while let Some(s) = stack.pop() {
            if !std::mem::replace(&mut seen[s.index()], true) {
                stack.extend(t.neighbors(s).iter().map(|&(n, _)| n));
            }
        }
        assert!(seen.iter().all(|&s| s), "fixture must be connected");
    }

    #[test]
    fn matrix_statistics() {
        let ms = synthetic_matrices(7, 40);
        let mut total = 0.0;
        let mut count = 0usize;
        for m in &ms {
            assert!((MIN_FLOWS..=MAX_FLOWS).contains(&m.len()));
            let mut pairs: Vec<_> = m
                .demands
                .iter()
                .map(|d| (&d.source, &d.destination))
                .collect();
            pairs.dedup();
            assert_eq!(pairs.len(), m.len());
            for d in &m.demands {
                assert_ne!(d.source, d.destination);
                assert_eq!((d.rate * Q::from_integer(100)).fract(), Q::from_integer(0));
                total += to_f64(&d.rate);
                count += 1;
            }
        }
        let mean = total / count as f64;
        assert!((mean - MEAN_RATE_MBPS).abs() < 0.5, "mean rate {mean}");
    }

    #[test]
    fn seeded() {
        assert_eq!(synthetic_matrix(3), synthetic_matrix(3));
        assert_ne!(synthetic_matrix(3), synthetic_matrix(4));
    }
}
