use std::fs;
use std::path::Path;

use resdn_core::harness::{
    emit_outputs, find_peak_params, run_experiment, scaled_flows, sweep_umin, ExperimentConfig,
    Outputs,
};
use resdn_core::metrics::{links_saved, resdn};
use resdn_core::num::{percent, to_f64};
use resdn_core::Heuristic;

const TOPO: &str = "\
node A
node B
node C
node D
node E
link A B 100
link B C 100
link C D 100
link D E 100
link E A 100
link A C 50
link B D 50
";

fn setup(dir: &Path) -> ExperimentConfig {
    fs::write(dir.join("ring.topo"), TOPO).unwrap();
    fs::write(dir.join("m0.csv"), "A,C,10\nB,E,4\nD,A,6\nC,E,2.5\n").unwrap();
    fs::write(dir.join("m1.csv"), "A,B,3\nE,C,8\nD,B,5\n").unwrap();
    fs::write(
        dir.join("exp.toml"),
        r#"
topology = "ring.topo"
traffic = ["m0.csv", "m1.csv"]
volumes = [0.2, 0.5, 0.9]
heuristics = ["maxresdn", "nsp", "spf", "b"]
profile = "zodiac"
out = "out"
umin_grid = [0.1, 0.3, 0.5]
umax_grid = [0.6, 0.9]

[bounds]
hop_slack = 2
max_paths = 20
"#,
    )
    .unwrap();
    ExperimentConfig::load(&dir.join("exp.toml")).unwrap()
}

#[test]
fn grid_run_writes_consistent_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    config.validate().unwrap();
    let inputs = config.load_inputs().unwrap();
    let rows = run_experiment(&config, &inputs).unwrap();
    assert_eq!(rows.len(), 2 * 4 * 3);
    assert!(rows.iter().all(|r| !r.is_error()), "{rows:?}");

    let r = rows
        .iter()
        .find(|r| r.matrix == 1 && r.heuristic == "spf" && r.volume == 0.5)
        .unwrap();
    let interval = config.interval_for(0.5).unwrap();
    let (flows, _) = scaled_flows(
        &inputs.matrices[1],
        &inputs.topology,
        percent(50),
        config.volume_basis,
    )
    .unwrap();
    let out = Heuristic::Spf
        .run(&inputs.topology, &flows, &interval, &config.bounds)
        .unwrap();
    assert_eq!(
        r.resdn,
        Some(to_f64(&resdn(&out.state, &out.topology, &interval)))
    );
    assert_eq!(
        r.links_saved_pct,
        Some(to_f64(&links_saved(&out.topology).unwrap()))
    );
    assert_eq!(r.active_links, Some(out.topology.active_link_count()));
    assert_eq!((r.u_min, r.u_max), (0.25, 0.9));
    assert_eq!(r.profile, inputs.profile.name);

    let files = emit_outputs(
        &Outputs {
            rows,
            ..Outputs::default()
        },
        &config,
        &config.out,
    )
    .unwrap();
    let names: Vec<_> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_str().unwrap())
        .collect();
    assert_eq!(names, ["results.csv", "manifest.json"]);
    let csv = fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 25);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["rows"], 24);
    assert_eq!(manifest["error_rows"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let inputs = config.load_inputs().unwrap();
    let run = |sub: &str| {
        let rows = run_experiment(&config, &inputs).unwrap();
        let series = vec![sweep_umin(&config, &inputs, 0.5, 0.9, &[0.1, 0.2, 0.3]).unwrap()];
        let out = dir.path().join(sub);
        emit_outputs(
            &Outputs {
                rows,
                series,
                peaks: vec![],
            },
            &config,
            &out,
        )
        .unwrap();
        (
            fs::read(out.join("results.csv")).unwrap(),
            fs::read(out.join("series_umin_v50.csv")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn sweeps_keep_invalid_points_aside() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let inputs = config.load_inputs().unwrap();
    let s = sweep_umin(&config, &inputs, 0.5, 0.6, &[0.2, 0.4, 0.7, 0.9]).unwrap();
    assert_eq!(s.points.len(), 2);
    assert_eq!(
        s.invalid.iter().map(|(x, _)| *x).collect::<Vec<_>>(),
        [0.7, 0.9]
    );
    assert!(s
        .points
        .iter()
        .all(|p| (0.0..=100.0).contains(&p.links_saved_pct)));

    let out = dir.path().join("sw");
    emit_outputs(
        &Outputs {
            series: vec![s],
            ..Outputs::default()
        },
        &config,
        &out,
    )
    .unwrap();
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"invalid_points\""));
    assert_eq!(
        fs::read_to_string(out.join("series_umin_v50.csv"))
            .unwrap()
            .lines()
            .count(),
        3
    );
}

#[test]
fn peaks_on_a_single_volume() {
    let dir = tempfile::tempdir().unwrap();
    let config = setup(dir.path());
    let inputs = config.load_inputs().unwrap();
    let peaks = find_peak_params(&config, &inputs, &[0.3]).unwrap();
    assert_eq!(peaks.len(), 1);
    let p = &peaks[0];
    assert!(config.umin_grid.contains(&p.u_min) && config.umax_grid.contains(&p.u_max));
    let best_umin = sweep_umin(&config, &inputs, 0.3, config.peak_umax, &config.umin_grid).unwrap();
    let top = best_umin
        .points
        .iter()
        .map(|q| q.links_saved_pct)
        .fold(f64::MIN, f64::max);
    assert!(p.links_saved_pct >= top - 1e-9);
}
