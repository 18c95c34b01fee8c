use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{interval_from, volume_q};
use super::{mean_links_saved, ExperimentConfig, Inputs};
use crate::error::{Error, Result};
use crate::num::{to_f64, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub links_saved_pct: f64,
}

/// Links saved as one interval bound moves and the other stays fixed.
/// Grid points that fail (for instance u_min above u_max) are listed in
/// `invalid` instead of `points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    /// `u_min` or `u_max`: the swept bound.
    pub parameter: String,
    pub fixed: f64,
    pub volume: f64,
    pub heuristic: String,
    pub points: Vec<SeriesPoint>,
    pub invalid: Vec<(f64, String)>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if let Some(g) = grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::Config(format!("grid value {g} outside [0, 1]")));
    }
    Ok(())
}

fn sweep_exact(
    config: &ExperimentConfig,
    inputs: &Inputs,
    volume: Q,
    points: &[(f64, f64)],
) -> Vec<Result<Q>> {
    points
        .par_iter()
        .map(|&(lo, hi)| {
            let interval = interval_from(lo, hi)?;
            mean_links_saved(inputs, config.sweep_heuristic, volume, &interval, config)
        })
        .collect()
}

fn sweep(
    config: &ExperimentConfig,
    inputs: &Inputs,
    volume: f64,
    fixed: f64,
    grid: &[f64],
    vary_min: bool,
) -> Result<Series> {
    check_grid(grid)?;
    let v = volume_q(volume)?;
    let pairs: Vec<(f64, f64)> = grid
        .iter()
        .map(|&g| if vary_min { (g, fixed) } else { (fixed, g) })
        .collect();
    let results = sweep_exact(config, inputs, v, &pairs);
    let parameter = if vary_min { "u_min" } else { "u_max" };
    let mut series = Series {
        name: format!(
            "{}_v{}",
            parameter.replace('_', ""),
            (volume * 100.0).round()
        ),
        parameter: parameter.into(),
        fixed,
        volume,
        heuristic: config.sweep_heuristic.key().into(),
        points: Vec::new(),
        invalid: Vec::new(),
    };
    for (&x, r) in grid.iter().zip(results) {
        match r {
            Ok(saved) => series.points.push(SeriesPoint {
                x,
                links_saved_pct: to_f64(&saved),
            }),
            Err(e) => series.invalid.push((x, e.to_string())),
        }
    }
    Ok(series)
}

/// Mean links saved by the sweep heuristic at `volume` for each u_min in
/// `grid`, with u_max fixed.
pub fn sweep_umin(
    config: &ExperimentConfig,
    inputs: &Inputs,
    volume: f64,
    fixed_umax: f64,
    grid: &[f64],
) -> Result<Series> {
    sweep(config, inputs, volume, fixed_umax, grid, true)
}

/// As [`sweep_umin`] with the roles of the bounds swapped.
pub fn sweep_umax(
    config: &ExperimentConfig,
    inputs: &Inputs,
    volume: f64,
    fixed_umin: f64,
    grid: &[f64],
) -> Result<Series> {
    sweep(config, inputs, volume, fixed_umin, grid, false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub volume: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub links_saved_pct: f64,
    /// No grid point saved any link; the pair is the smallest tried.
    pub flat: bool,
}

/// First grid point with the strictly greatest value.
fn argmax(grid: &[f64], values: &[Result<Q>]) -> Option<(f64, Q)> {
    let mut best: Option<(f64, Q)> = None;
    for (&x, v) in grid.iter().zip(values) {
        if let Ok(v) = v {
            if best.as_ref().is_none_or(|(_, b)| v > b) {
                best = Some((x, *v));
            }
        }
    }
    best
}

/// One round of coordinate ascent per volume: scan u_min at the fixed
/// `peak_umax`, keep the best, then scan u_max at that u_min. Ties go to the
/// smaller parameter.
pub fn find_peak_params(
    config: &ExperimentConfig,
    inputs: &Inputs,
    volumes: &[f64],
) -> Result<Vec<Peak>> {
    check_grid(&config.umin_grid)?;
    check_grid(&config.umax_grid)?;
    let mut umin_grid = config.umin_grid.clone();
    let mut umax_grid = config.umax_grid.clone();
    umin_grid.sort_by(f64::total_cmp);
    umax_grid.sort_by(f64::total_cmp);
    volumes
        .par_iter()
        .map(|&volume| {
            let v = volume_q(volume)?;
            let first: Vec<_> = umin_grid.iter().map(|&g| (g, config.peak_umax)).collect();
            let r1 = sweep_exact(config, inputs, v, &first);
            let (u_min, _) = argmax(&umin_grid, &r1).ok_or_else(|| first_error(r1))?;
            let second: Vec<_> = umax_grid.iter().map(|&g| (u_min, g)).collect();
            let r2 = sweep_exact(config, inputs, v, &second);
            let (u_max, saved) = argmax(&umax_grid, &r2).ok_or_else(|| first_error(r2))?;
            Ok(Peak {
                volume,
                u_min,
                u_max,
                links_saved_pct: to_f64(&saved),
                flat: saved.is_zero(),
            })
        })
        .collect()
}

fn first_error(results: Vec<Result<Q>>) -> Error {
    results
        .into_iter()
        .find_map(|r| r.err())
        .unwrap_or_else(|| Error::Config("empty grid".into()))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
