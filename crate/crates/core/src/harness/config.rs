use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Inputs;
use crate::error::{Error, Result};
use crate::fixture;
use crate::heuristics::Heuristic;
use crate::ingest::{parse_topology, parse_traffic_matrix};
use crate::net::{build_topology, PathBounds, UtilityInterval};
use crate::num::{from_f64, Q};
use crate::power::{parse_profiles, SwitchPowerProfile};

/// The default interval schedule: traffic volume percent, u_min percent,
/// u_max percent.
const INTERVAL_TABLE: [(i128, i128, i128); 8] = [
    (20, 31, 82),
    (30, 28, 85),
    (40, 30, 90),
    (50, 25, 90),
    (60, 20, 92),
    (70, 19, 95),
    (80, 15, 95),
    (90, 12, 95),
];

/// The default schedule as `(volume, interval)` pairs.
pub fn interval_table() -> Vec<(Q, UtilityInterval)> {
    INTERVAL_TABLE
        .iter()
        .map(|&(v, lo, hi)| {
            let i = UtilityInterval::from_percent(lo, hi).expect("table entries are valid");
            (Q::new(v, 100), i)
        })
        .collect()
}

/// What a traffic volume is a fraction of.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeBasis {
    /// Total demand over the summed directed link capacity.
    Capacity,
    /// Capacity consumed under shortest-path routing over total capacity.
    #[default]
    Carried,
    /// Busiest link's utility under shortest-path routing.
    Peak,
}

impl std::str::FromStr for VolumeBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "capacity" => Ok(VolumeBasis::Capacity),
            "carried" => Ok(VolumeBasis::Carried),
            "peak" => Ok(VolumeBasis::Peak),
            _ => Err(Error::Config(format!(
                "unknown volume basis '{s}' (capacity, carried or peak)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeInterval {
    pub volume: f64,
    pub u_min: f64,
    pub u_max: f64,
}

/// A declarative experiment. Loadable from TOML; every field has a default.
///
/// Without `topology` the built-in GEANT fixture is used; without `traffic`
/// `synthetic` matrices are generated from `seed`. `schedule` is `"table"`
/// or a fixed `"u_min,u_max"` pair; `interval` entries, when present,
/// replace it with an explicit per-volume schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: Option<PathBuf>,
    pub traffic: Vec<PathBuf>,
    pub synthetic: usize,
    pub volumes: Vec<f64>,
    pub volume_basis: VolumeBasis,
    pub schedule: String,
    pub interval: Vec<VolumeInterval>,
    pub heuristics: Vec<Heuristic>,
    pub profile: String,
    pub profiles_file: Option<PathBuf>,
    pub bounds: PathBounds,
    pub seed: u64,
    /// Overrides the matrices' aggregation window (seconds).
    pub window_s: Option<f64>,
    pub out: PathBuf,
    /// Heuristic driven by the sweeps and the peak search.
    pub sweep_heuristic: Heuristic,
    pub umin_grid: Vec<f64>,
    pub umax_grid: Vec<f64>,
    /// u_max held fixed while the peak search scans u_min.
    pub peak_umax: f64,
}

fn grid(from: i32, to: i32, step: i32) -> Vec<f64> {
    (from..=to)
        .step_by(step as usize)
        .map(|p| f64::from(p) / 100.0)
        .collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            topology: None,
            traffic: Vec::new(),
            synthetic: 1,
            volumes: grid(20, 90, 10),
            volume_basis: VolumeBasis::default(),
            schedule: "table".into(),
            interval: Vec::new(),
            heuristics: Heuristic::ALL.to_vec(),
            profile: "nec".into(),
            profiles_file: None,
            bounds: PathBounds::default(),
            seed: 1,
            window_s: None,
            out: PathBuf::from("results"),
            sweep_heuristic: Heuristic::MaxResdn,
            umin_grid: grid(5, 90, 5),
            umax_grid: grid(40, 100, 5),
            peak_umax: 0.95,
        }
    }
}

pub(crate) fn volume_q(v: f64) -> Result<Q> {
    let q = from_f64(v).ok_or_else(|| Error::Config(format!("volume {v} is not a number")))?;
    if q <= Q::zero() || q > Q::one() {
        return Err(Error::InvalidVolume(q));
    }
    Ok(q)
}

pub(crate) fn volume_like(v: f64, what: &str) -> Result<Q> {
    match from_f64(v) {
        Some(q) if q > Q::zero() => Ok(q),
        _ => Err(Error::Config(format!("{what} must be positive, got {v}"))),
    }
}

pub(crate) fn interval_from(u_min: f64, u_max: f64) -> Result<UtilityInterval> {
    let lo = from_f64(u_min).ok_or_else(|| Error::Config(format!("bad u_min {u_min}")))?;
    let hi = from_f64(u_max).ok_or_else(|| Error::Config(format!("bad u_max {u_max}")))?;
    UtilityInterval::new(lo, hi)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl ExperimentConfig {
    /// Reads a TOML config. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut c: ExperimentConfig = toml::from_str(&read(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = c.topology.as_mut() {
            rebase(p);
        }
        if let Some(p) = c.profiles_file.as_mut() {
            rebase(p);
        }
        c.traffic.iter_mut().for_each(rebase);
        rebase(&mut c.out);
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Utility interval for `volume` under the configured schedule.
    pub fn interval_for(&self, volume: f64) -> Result<UtilityInterval> {
        let v = volume_q(volume)?;
        if !self.interval.is_empty() {
            for e in &self.interval {
                if volume_q(e.volume)? == v {
                    return interval_from(e.u_min, e.u_max);
                }
            }
            return Err(Error::Config(format!(
                "schedule has no entry for volume {volume}"
            )));
        }
        let s = self.schedule.trim();
        if s.eq_ignore_ascii_case("table") {
            return interval_table()
                .into_iter()
                .find(|(tv, _)| *tv == v)
                .map(|(_, i)| i)
                .ok_or_else(|| {
                    Error::Config(format!("schedule has no entry for volume {volume}"))
                });
        }
        let (lo, hi) = s.split_once(',').ok_or_else(|| {
            Error::Config(format!(
                "schedule must be 'table' or 'u_min,u_max', got '{s}'"
            ))
        })?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad schedule value '{t}'")))
        };
        interval_from(parse(lo)?, parse(hi)?)
    }

    /// Checks volumes, schedule coverage and grids.
    pub fn validate(&self) -> Result<()> {
        for &v in &self.volumes {
            self.interval_for(v)?;
        }
        for &u in self
            .umin_grid
            .iter()
            .chain(&self.umax_grid)
            .chain([&self.peak_umax])
        {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::Config(format!("grid value {u} outside [0, 1]")));
            }
        }
        if self.synthetic == 0 && self.traffic.is_empty() {
            return Err(Error::NothingToRun);
        }
        Ok(())
    }

    pub fn load_profile(&self) -> Result<SwitchPowerProfile> {
        match &self.profiles_file {
            Some(p) => {
                let all = parse_profiles(&read(p)?)?;
                all.into_iter()
                    .find(|x| x.name.eq_ignore_ascii_case(&self.profile))
                    .ok_or_else(|| Error::UnknownProfile(self.profile.clone()))
            }
            None => SwitchPowerProfile::by_name(&self.profile),
        }
    }

    /// Reads the topology, traffic and power profile.
    pub fn load_inputs(&self) -> Result<Inputs> {
        let desc = match &self.topology {
            Some(p) => parse_topology(&read(p)?)?,
            None => fixture::geant(),
        };
        let topology = build_topology(&desc)?;
        let matrices = if self.traffic.is_empty() {
            fixture::synthetic_matrices(self.seed, self.synthetic)
        } else {
            self.traffic
                .iter()
                .map(|p| parse_traffic_matrix(&read(p)?))
                .collect::<Result<_>>()?
        };
        Ok(Inputs {
            topology,
            matrices,
            profile: self.load_profile()?,
        })
    }
}
