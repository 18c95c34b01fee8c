//! Experiment driver: heuristic × volume grids, interval sweeps, and the
//! CSV/JSON artifacts they produce.

mod config;
mod output;
mod sweep;

pub use config::{interval_table, ExperimentConfig, VolumeBasis, VolumeInterval};
pub use output::{emit_outputs, write_results_csv, write_series_csv, Outputs};
pub use sweep::{find_peak_params, spearman, sweep_umax, sweep_umin, Peak, Series, SeriesPoint};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heuristics::Heuristic;
use crate::ingest::{
    scale_to_carried_volume, scale_to_peak_utility, scale_to_volume, TrafficMatrix,
};
use crate::metrics::{
    avg_path_length, links_saved, resdn, traffic_proportionality_default, MetricsReport,
};
use crate::net::{Flow, Topology, UtilityInterval};
use crate::num::{to_f64, Q};
use crate::power::{network_power_report, SwitchPowerProfile};

/// Everything a run needs once files are read.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub topology: Topology,
    pub matrices: Vec<TrafficMatrix>,
    pub profile: SwitchPowerProfile,
}

/// Scales `matrix` to `volume` and binds it to `topology`.
pub fn scaled_flows(
    matrix: &TrafficMatrix,
    topology: &Topology,
    volume: Q,
    basis: VolumeBasis,
) -> Result<(Vec<Flow>, Q)> {
    let scaled = match basis {
        VolumeBasis::Capacity => scale_to_volume(matrix, topology, volume)?,
        VolumeBasis::Carried => scale_to_carried_volume(matrix, topology, volume)?,
        VolumeBasis::Peak => scale_to_peak_utility(matrix, topology, volume)?,
    };
    Ok((scaled.bind(topology)?, scaled.window_s))
}

struct Cell {
    matrix: usize,
    heuristic: Heuristic,
    volume: f64,
}

fn error_row(
    config: &ExperimentConfig,
    cell: &Cell,
    interval: Option<&UtilityInterval>,
    e: &Error,
) -> MetricsReport {
    MetricsReport {
        matrix: cell.matrix,
        heuristic: cell.heuristic.key().to_string(),
        volume: cell.volume,
        u_min: interval.map_or(f64::NAN, |i| to_f64(&i.u_min())),
        u_max: interval.map_or(f64::NAN, |i| to_f64(&i.u_max())),
        path_bounds: config.bounds.describe(),
        profile: config.profile.clone(),
        error: e.to_string(),
        ..MetricsReport::default()
    }
}

fn run_cell(config: &ExperimentConfig, inputs: &Inputs, cell: &Cell) -> MetricsReport {
    let interval = match config.interval_for(cell.volume) {
        Ok(i) => i,
        Err(e) => return error_row(config, cell, None, &e),
    };
    evaluate(config, inputs, cell, &interval)
        .unwrap_or_else(|e| error_row(config, cell, Some(&interval), &e))
}

fn evaluate(
    config: &ExperimentConfig,
    inputs: &Inputs,
    cell: &Cell,
    interval: &UtilityInterval,
) -> Result<MetricsReport> {
    let volume = config::volume_q(cell.volume)?;
    let topo = &inputs.topology;
    let (flows, window) = scaled_flows(
        &inputs.matrices[cell.matrix],
        topo,
        volume,
        config.volume_basis,
    )?;
    let window = match config.window_s {
        Some(w) => config::volume_like(w, "window_s")?,
        None => window,
    };
    let outcome = cell.heuristic.run(topo, &flows, interval, &config.bounds)?;
    let pruned = &outcome.topology;
    let power = network_power_report(pruned, &outcome.state, &inputs.profile, window)?;
    let apl = if flows.is_empty() {
        None
    } else {
        Some(to_f64(&avg_path_length(&outcome.state)?))
    };
    Ok(MetricsReport {
        matrix: cell.matrix,
        heuristic: cell.heuristic.key().to_string(),
        provenance: outcome.provenance.clone(),
        volume: cell.volume,
        u_min: to_f64(&interval.u_min()),
        u_max: to_f64(&interval.u_max()),
        path_bounds: config.bounds.describe(),
        flows: flows.len(),
        fallback_flows: Some(outcome.diagnostics.fallback_flows.len()),
        resdn: Some(to_f64(&resdn(&outcome.state, pruned, interval))),
        links_saved_pct: Some(to_f64(&links_saved(pruned)?)),
        active_links: Some(pruned.active_link_count()),
        active_switches: Some(pruned.active_switch_count()),
        avg_path_length: apl,
        traffic_proportionality: Some(to_f64(&traffic_proportionality_default(volume, pruned)?)),
        profile: inputs.profile.name.clone(),
        avg_power_active_w: Some(to_f64(&power.avg_active)),
        avg_power_all_w: Some(to_f64(&power.avg_all)),
        total_power_w: Some(to_f64(&power.total)),
        error: String::new(),
    })
}

/// Runs every (matrix, heuristic, volume) cell of the configured grid.
///
/// Cells run in parallel; rows come back ordered by matrix, then heuristic
/// as listed, then volume as listed. A failing cell yields a row whose
/// `error` column says why; the rest of the grid is unaffected.
pub fn run_experiment(config: &ExperimentConfig, inputs: &Inputs) -> Result<Vec<MetricsReport>> {
    if config.heuristics.is_empty() || config.volumes.is_empty() || inputs.matrices.is_empty() {
        return Err(Error::NothingToRun);
    }
    let mut cells = Vec::new();
    for matrix in 0..inputs.matrices.len() {
        for &heuristic in &config.heuristics {
            for &volume in &config.volumes {
                cells.push(Cell {
                    matrix,
                    heuristic,
                    volume,
                });
            }
        }
    }
    Ok(cells
        .par_iter()
        .map(|c| run_cell(config, inputs, c))
        .collect())
}

/// Mean of `links_saved` over all matrices for one heuristic run.
pub(crate) fn mean_links_saved(
    inputs: &Inputs,
    heuristic: Heuristic,
    volume: Q,
    interval: &UtilityInterval,
    config: &ExperimentConfig,
) -> Result<Q> {
    let mut sum = Q::zero();
    for m in &inputs.matrices {
        let (flows, _) = scaled_flows(m, &inputs.topology, volume, config.volume_basis)?;
        let out = heuristic.run(&inputs.topology, &flows, interval, &config.bounds)?;
        sum += links_saved(&out.topology)?;
    }
    Ok(sum / Q::from_integer(inputs.matrices.len().max(1) as i128))
}
