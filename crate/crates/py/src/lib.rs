//! Python bindings: topologies, traffic matrices, the routing heuristics, the
//! exact oracle, metrics, the power model and the experiment grid.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use resdn_core::harness::{
    run_experiment as run_grid, scaled_flows, write_results_csv, ExperimentConfig, VolumeBasis,
};
use resdn_core::heuristics::parse_heuristics;
use resdn_core::ingest::{parse_topology, parse_traffic_matrix, write_traffic_matrix};
use resdn_core::metrics::{self, avg_path_length, links_saved, traffic_proportionality_default};
use resdn_core::num::{from_f64, to_f64};
use resdn_core::oracle::{exact_max_resdn as exact, verify_constraints};
use resdn_core::power::{
    network_power_report, switch_power as power_of, ControlRates, PortLoadVector,
    SwitchPowerProfile,
};
use resdn_core::{
    build_topology, fixture, Error, Flow, Heuristic, HeuristicOutcome, PathBounds, UtilityInterval,
    Q,
};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn q(v: f64, what: &str) -> PyResult<Q> {
    from_f64(v).ok_or_else(|| PyValueError::new_err(format!("{what} is not a finite number: {v}")))
}

#[pyclass(name = "Topology", frozen, from_py_object)]
#[derive(Clone)]
struct PyTopology(resdn_core::Topology);

#[pymethods]
impl PyTopology {
    /// Parses `node` / `link a b mbps` lines.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let d = parse_topology(text).map_err(err)?;
        Ok(PyTopology(build_topology(&d).map_err(err)?))
    }

    /// The built-in 22-switch, 36-link GEANT-shaped fixture.
    #[staticmethod]
    fn geant() -> PyResult<Self> {
        Ok(PyTopology(build_topology(&fixture::geant()).map_err(err)?))
    }

    #[getter]
    fn num_switches(&self) -> usize {
        self.0.num_switches()
    }

    #[getter]
    fn num_links(&self) -> usize {
        self.0.num_links()
    }

    #[getter]
    fn switches(&self) -> Vec<String> {
        self.0
            .switches()
            .map(|s| self.0.name(s).to_string())
            .collect()
    }

    #[getter]
    fn links(&self) -> Vec<(String, String, f64)> {
        self.0
            .links()
            .iter()
            .map(|l| {
                (
                    self.0.name(l.a).to_string(),
                    self.0.name(l.b).to_string(),
                    to_f64(&l.bandwidth),
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Topology({} switches, {} links)",
            self.0.num_switches(),
            self.0.num_links()
        )
    }
}

#[pyclass(name = "TrafficMatrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyTrafficMatrix(resdn_core::ingest::TrafficMatrix);

#[pymethods]
impl PyTrafficMatrix {
    /// Parses `src,dst,rate_mbps` lines.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyTrafficMatrix(parse_traffic_matrix(text).map_err(err)?))
    }

    /// A synthetic matrix for the GEANT fixture, reproducible from `seed`.
    #[staticmethod]
    fn synthetic(seed: u64) -> Self {
        PyTrafficMatrix(fixture::synthetic_matrix(seed))
    }

    #[getter]
    fn demands(&self) -> Vec<(String, String, f64)> {
        self.0
            .demands
            .iter()
            .map(|d| (d.source.clone(), d.destination.clone(), to_f64(&d.rate)))
            .collect()
    }

    fn to_csv(&self) -> String {
        write_traffic_matrix(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!("TrafficMatrix({} demands)", self.0.len())
    }
}

/// A routed and pruned network.
#[pyclass(name = "Outcome", frozen)]
struct PyOutcome {
    outcome: HeuristicOutcome,
    interval: UtilityInterval,
    window_s: Q,
    #[pyo3(get)]
    combinations: Option<u128>,
}

#[pymethods]
impl PyOutcome {
    #[getter]
    fn provenance(&self) -> &str {
        &self.outcome.provenance
    }

    #[getter]
    fn resdn(&self) -> f64 {
        to_f64(&metrics::resdn(
            &self.outcome.state,
            &self.outcome.topology,
            &self.interval,
        ))
    }

    /// RESDN as an exact fraction, e.g. `"7/9"`.
    #[getter]
    fn resdn_exact(&self) -> String {
        metrics::resdn(&self.outcome.state, &self.outcome.topology, &self.interval).to_string()
    }

    #[getter]
    fn links_saved_pct(&self) -> PyResult<f64> {
        Ok(to_f64(&links_saved(&self.outcome.topology).map_err(err)?))
    }

    #[getter]
    fn active_links(&self) -> usize {
        self.outcome.topology.active_link_count()
    }

    #[getter]
    fn active_switches(&self) -> usize {
        self.outcome.topology.active_switch_count()
    }

    #[getter]
    fn avg_path_length(&self) -> Option<f64> {
        avg_path_length(&self.outcome.state)
            .ok()
            .map(|v| to_f64(&v))
    }

    /// One `"A-B-C"` string per flow, in input order.
    #[getter]
    fn paths(&self) -> Vec<String> {
        let t = &self.outcome.topology;
        self.outcome
            .state
            .assignment()
            .map(|(_, p)| p.display(t).to_string())
            .collect()
    }

    #[getter]
    fn fallback_flows(&self) -> Vec<usize> {
        self.outcome.diagnostics.fallback_flows.clone()
    }

    fn traffic_proportionality(&self, volume: f64) -> PyResult<f64> {
        let v = q(volume, "volume")?;
        Ok(to_f64(
            &traffic_proportionality_default(v, &self.outcome.topology).map_err(err)?,
        ))
    }

    /// Constraint violations, empty for a consistent state.
    fn violations(&self) -> Vec<String> {
        let t = &self.outcome.topology;
        verify_constraints(t, &self.outcome.state)
            .violations
            .iter()
            .map(|v| v.describe(t))
            .collect()
    }

    /// Network power in watts: `total`, `avg_active` and `avg_all`.
    #[pyo3(signature = (profile = "nec"))]
    fn power(&self, profile: &str) -> PyResult<BTreeMap<&'static str, f64>> {
        let p = SwitchPowerProfile::by_name(profile).map_err(err)?;
        let r = network_power_report(
            &self.outcome.topology,
            &self.outcome.state,
            &p,
            self.window_s,
        )
        .map_err(err)?;
        Ok(BTreeMap::from([
            ("total", to_f64(&r.total)),
            ("avg_active", to_f64(&r.avg_active)),
            ("avg_all", to_f64(&r.avg_all)),
        ]))
    }

    fn __repr__(&self) -> String {
        format!(
            "Outcome({}, resdn={:.4})",
            self.outcome.provenance,
            self.resdn()
        )
    }
}

struct Problem {
    flows: Vec<Flow>,
    window_s: Q,
    interval: UtilityInterval,
}

fn problem(
    topology: &PyTopology,
    matrix: &PyTrafficMatrix,
    volume: Option<f64>,
    u_min: f64,
    u_max: f64,
    basis: &str,
) -> PyResult<Problem> {
    let interval = UtilityInterval::new(q(u_min, "u_min")?, q(u_max, "u_max")?).map_err(err)?;
    let (flows, window_s) = match volume {
        Some(v) => {
            let basis: VolumeBasis = basis.parse().map_err(err)?;
            scaled_flows(&matrix.0, &topology.0, q(v, "volume")?, basis).map_err(err)?
        }
        None => (matrix.0.bind(&topology.0).map_err(err)?, matrix.0.window_s),
    };
    Ok(Problem {
        flows,
        window_s,
        interval,
    })
}

fn bounds(max_hops: Option<usize>, hop_slack: usize, max_paths: usize) -> PathBounds {
    PathBounds {
        max_hops,
        hop_slack,
        max_paths,
    }
}

fn heuristic(name: &str) -> PyResult<Heuristic> {
    match parse_heuristics(name).map_err(err)?.as_slice() {
        [h] => Ok(*h),
        _ => Err(PyValueError::new_err(format!(
            "expected one heuristic name, got '{name}'"
        ))),
    }
}

/// Heuristic keys accepted by `route`.
#[pyfunction]
fn heuristics() -> Vec<&'static str> {
    Heuristic::ALL.iter().map(|h| h.key()).collect()
}

/// Routes `matrix` with one heuristic. Without `volume` the demands are used
/// as given; otherwise they are rescaled to that traffic volume.
#[pyfunction]
#[pyo3(signature = (topology, matrix, heuristic_name = "maxresdn", volume = None, u_min = 0.3, u_max = 0.9, basis = "carried", max_hops = None, hop_slack = 2, max_paths = 50))]
#[allow(clippy::too_many_arguments)]
fn route(
    topology: &PyTopology,
    matrix: &PyTrafficMatrix,
    heuristic_name: &str,
    volume: Option<f64>,
    u_min: f64,
    u_max: f64,
    basis: &str,
    max_hops: Option<usize>,
    hop_slack: usize,
    max_paths: usize,
) -> PyResult<PyOutcome> {
    let h = heuristic(heuristic_name)?;
    let p = problem(topology, matrix, volume, u_min, u_max, basis)?;
    let outcome = h
        .run(
            &topology.0,
            &p.flows,
            &p.interval,
            &bounds(max_hops, hop_slack, max_paths),
        )
        .map_err(err)?;
    Ok(PyOutcome {
        outcome,
        interval: p.interval,
        window_s: p.window_s,
        combinations: None,
    })
}

/// Exhaustive RESDN optimum over the bounded candidate paths.
#[pyfunction]
#[pyo3(signature = (topology, matrix, volume = None, u_min = 0.3, u_max = 0.9, basis = "carried", max_hops = Some(4), hop_slack = 2, max_paths = 50, budget = 1_000_000))]
#[allow(clippy::too_many_arguments)]
fn exact_max_resdn(
    topology: &PyTopology,
    matrix: &PyTrafficMatrix,
    volume: Option<f64>,
    u_min: f64,
    u_max: f64,
    basis: &str,
    max_hops: Option<usize>,
    hop_slack: usize,
    max_paths: usize,
    budget: u128,
) -> PyResult<PyOutcome> {
    let p = problem(topology, matrix, volume, u_min, u_max, basis)?;
    let r = exact(
        &topology.0,
        &p.flows,
        &p.interval,
        &bounds(max_hops, hop_slack, max_paths),
        budget,
    )
    .map_err(err)?;
    Ok(PyOutcome {
        outcome: r.outcome,
        interval: p.interval,
        window_s: p.window_s,
        combinations: Some(r.combinations),
    })
}

/// Watts drawn by one switch with the given per-port loads (fractions of
/// line rate) and control message rates (per second).
#[pyfunction]
#[pyo3(signature = (profile, port_loads, packet_in = 0.0, flow_mod = 0.0))]
fn switch_power(
    profile: &str,
    port_loads: Vec<f64>,
    packet_in: f64,
    flow_mod: f64,
) -> PyResult<f64> {
    let p = SwitchPowerProfile::by_name(profile).map_err(err)?;
    let loads = port_loads
        .into_iter()
        .map(|v| q(v, "port load"))
        .collect::<PyResult<Vec<_>>>()?;
    let loads = PortLoadVector::new(loads).map_err(err)?;
    let rates =
        ControlRates::new(q(packet_in, "packet_in")?, q(flow_mod, "flow_mod")?).map_err(err)?;
    Ok(to_f64(&power_of(&p, &loads, &rates)))
}

/// Runs the experiment grid and returns `results.csv` as text. `config` is a
/// TOML file; the keyword arguments override it.
#[pyfunction]
#[pyo3(signature = (config = None, synthetic = None, volumes = None, heuristics = None, seed = None))]
fn run_experiment(
    config: Option<PathBuf>,
    synthetic: Option<usize>,
    volumes: Option<Vec<f64>>,
    heuristics: Option<Vec<String>>,
    seed: Option<u64>,
) -> PyResult<String> {
    let mut c = match config {
        Some(p) => ExperimentConfig::load(&p).map_err(err)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = synthetic {
        c.synthetic = n;
    }
    if let Some(v) = volumes {
        c.volumes = v;
    }
    if let Some(h) = heuristics {
        c.heuristics = h.iter().map(|n| heuristic(n)).collect::<PyResult<_>>()?;
    }
    if let Some(s) = seed {
        c.seed = s;
    }
    c.validate().map_err(err)?;
    let inputs = c.load_inputs().map_err(err)?;
    let rows = run_grid(&c, &inputs).map_err(err)?;
    let bytes = write_results_csv(&rows).map_err(err)?;
    String::from_utf8(bytes).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn resdn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTopology>()?;
    m.add_class::<PyTrafficMatrix>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(heuristics, m)?)?;
    m.add_function(wrap_pyfunction!(route, m)?)?;
    m.add_function(wrap_pyfunction!(exact_max_resdn, m)?)?;
    m.add_function(wrap_pyfunction!(switch_power, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
