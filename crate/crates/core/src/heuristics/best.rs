use super::{ordered_greedy, reroute_pass, HeuristicOutcome, Ordering, RerouteRule};
use crate::error::Result;
use crate::metrics::{links_saved, resdn};
use crate::net::{Flow, PathBounds, Topology, UtilityInterval};

/// Order in which composite variants are tried; earlier entries win ties.
pub const VARIANT_ORDER: [&str; 12] = [
    "SPF", "SPF+NSP", "SPF+NMU", "SPL", "SPL+NSP", "SPL+NMU", "SDF", "SDF+NSP", "SDF+NMU", "HDF",
    "HDF+NSP", "HDF+NMU",
];

/// Every ordered variant alone and followed by an NSP and an NMU pass, in
/// [`VARIANT_ORDER`].
pub fn all_variants(
    topology: &Topology,
    flows: &[Flow],
    interval: &UtilityInterval,
    bounds: &PathBounds,
) -> Result<Vec<HeuristicOutcome>> {
    let mut out = Vec::with_capacity(12);
    for ordering in Ordering::ALL {
        let base = ordered_greedy(topology, flows, ordering, bounds)?;
        let with_nsp = reroute_pass(base.clone(), interval, bounds, RerouteRule::NextShortest)?;
        let with_nmu = reroute_pass(base.clone(), interval, bounds, RerouteRule::MaxUtility)?;
        out.extend([base, with_nsp, with_nmu]);
    }
    Ok(out)
}

/// The variant saving the most links; higher RESDN, then [`VARIANT_ORDER`],
/// break ties. The winner's provenance names the combination.
pub fn best_combination(
    topology: &Topology,
    flows: &[Flow],
    interval: &UtilityInterval,
    bounds: &PathBounds,
) -> Result<HeuristicOutcome> {
    let mut best: Option<(HeuristicOutcome, _, _)> = None;
    for o in all_variants(topology, flows, interval, bounds)? {
        let saved = links_saved(&o.topology)?;
        let score = resdn(&o.state, &o.topology, interval);
        let better = match &best {
            None => true,
            Some((_, s, r)) => saved > *s || (saved == *s && score > *r),
        };
        if better {
            best = Some((o, saved, score));
        }
    }
    Ok(best.expect("twelve variants").0)
}
