use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use resdn_core::harness::scaled_flows;
use resdn_core::harness::{
    emit_outputs, find_peak_params, run_experiment, sweep_umax, sweep_umin, ExperimentConfig,
    Outputs, VolumeBasis,
};
use resdn_core::heuristics::{parse_heuristics, Heuristic};
use resdn_core::ingest::{write_topology, write_traffic_matrix};
use resdn_core::metrics::resdn;
use resdn_core::num::{format_decimal, from_f64};
use resdn_core::oracle::{exact_max_resdn, verify_constraints, OPTIMALITY_CAVEAT};
use resdn_core::{fixture, Error, PathBounds, Result};

#[derive(Parser)]
#[command(
    name = "resdn",
    version,
    about = "Energy-aware SDN routing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every heuristic at every traffic volume.
    Run(Common),
    /// Links saved as u_min varies with u_max fixed.
    SweepUmin {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.95)]
        fixed_umax: f64,
        /// Comma-separated u_min values.
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        grid: String,
    },
    /// Links saved as u_max varies with u_min fixed.
    SweepUmax {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.3)]
        fixed_umin: f64,
        /// Comma-separated u_max values.
        #[arg(long, default_value = "0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
        grid: String,
    },
    /// Per-volume interval that maximizes links saved.
    Peaks(Common),
    /// Exhaustive optimum for one small instance, compared with the heuristics.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u128,
    },
    /// Write the GEANT-shaped topology and synthetic matrices to files.
    Fixture {
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    topology: Option<PathBuf>,
    /// Traffic matrix CSV files, comma-separated.
    #[arg(long, value_delimiter = ',')]
    traffic: Vec<PathBuf>,
    /// Number of synthetic matrices when no traffic file is given.
    #[arg(long)]
    synthetic: Option<usize>,
    /// Comma-separated volumes in (0, 1].
    #[arg(long)]
    volumes: Option<String>,
    /// `carried` (default), `peak` or `capacity`.
    #[arg(long)]
    volume_basis: Option<VolumeBasis>,
    #[arg(long)]
    heuristics: Option<String>,
    /// nec, ovs, zodiac or a name from --profiles-file.
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    profiles_file: Option<PathBuf>,
    /// `table` or `u_min,u_max`.
    #[arg(long = "umin-umax")]
    umin_umax: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_hops: Option<usize>,
    #[arg(long)]
    hop_slack: Option<usize>,
    #[arg(long)]
    max_paths: Option<usize>,
    #[arg(long)]
    sweep_heuristic: Option<Heuristic>,
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("not a number: '{t}'")))
        })
        .collect()
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = &self.topology {
            c.topology = Some(t.clone());
        }
        if !self.traffic.is_empty() {
            c.traffic = self.traffic.clone();
        }
        if let Some(n) = self.synthetic {
            c.synthetic = n;
        }
        if let Some(v) = &self.volumes {
            c.volumes = parse_list(v)?;
        }
        if let Some(b) = self.volume_basis {
            c.volume_basis = b;
        }
        if let Some(h) = &self.heuristics {
            c.heuristics = parse_heuristics(h)?;
        }
        if let Some(p) = &self.profile {
            c.profile = p.clone();
        }
        if let Some(p) = &self.profiles_file {
            c.profiles_file = Some(p.clone());
        }
        if let Some(s) = &self.umin_umax {
            c.schedule = s.clone();
            c.interval.clear();
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        if self.max_hops.is_some() {
            c.bounds.max_hops = self.max_hops;
        }
        if let Some(s) = self.hop_slack {
            c.bounds.hop_slack = s;
        }
        if let Some(k) = self.max_paths {
            c.bounds.max_paths = k;
        }
        if let Some(h) = self.sweep_heuristic {
            c.sweep_heuristic = h;
        }
        Ok(c)
    }
}

fn finish(out: &Outputs, config: &ExperimentConfig) -> Result<()> {
    for p in emit_outputs(out, config, &config.out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Run(common) => {
            let config = common.config()?;
            config.validate()?;
            let inputs = config.load_inputs()?;
            let rows = run_experiment(&config, &inputs)?;
            let failed = rows.iter().filter(|r| r.is_error()).count();
            for r in rows.iter().filter(|r| r.is_error()) {
                eprintln!(
                    "matrix {} {} @ {}: {}",
                    r.matrix, r.heuristic, r.volume, r.error
                );
            }
            println!("{} rows, {} failed", rows.len(), failed);
            finish(
                &Outputs {
                    rows,
                    ..Outputs::default()
                },
                &config,
            )
        }
        Command::SweepUmin {
            common,
            fixed_umax,
            grid,
        } => {
            let config = common.config()?;
            let inputs = config.load_inputs()?;
            let grid = parse_list(&grid)?;
            let series = config
                .volumes
                .iter()
                .map(|&v| sweep_umin(&config, &inputs, v, fixed_umax, &grid))
                .collect::<Result<Vec<_>>>()?;
            finish(
                &Outputs {
                    series,
                    ..Outputs::default()
                },
                &config,
            )
        }
        Command::SweepUmax {
            common,
            fixed_umin,
            grid,
        } => {
            let config = common.config()?;
            let inputs = config.load_inputs()?;
            let grid = parse_list(&grid)?;
            let series = config
                .volumes
                .iter()
                .map(|&v| sweep_umax(&config, &inputs, v, fixed_umin, &grid))
                .collect::<Result<Vec<_>>>()?;
            finish(
                &Outputs {
                    series,
                    ..Outputs::default()
                },
                &config,
            )
        }
        Command::Peaks(common) => {
            let config = common.config()?;
            let inputs = config.load_inputs()?;
            let peaks = find_peak_params(&config, &inputs, &config.volumes)?;
            println!("volume,u_min,u_max,links_saved_pct,flat");
            for p in &peaks {
                println!(
                    "{},{},{},{:.4},{}",
                    p.volume, p.u_min, p.u_max, p.links_saved_pct, p.flat
                );
            }
            finish(
                &Outputs {
                    peaks,
                    ..Outputs::default()
                },
                &config,
            )
        }
        Command::Oracle { common, budget } => oracle(&common.config()?, budget),
        Command::Fixture { out, seed, count } => {
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            let topo = out.join("geant.topo");
            fs::write(&topo, write_topology(&fixture::geant())).map_err(|e| Error::io(&topo, e))?;
            println!("wrote {}", topo.display());
            for (i, m) in fixture::synthetic_matrices(seed, count).iter().enumerate() {
                let p = out.join(format!("geant_traffic_{i}.csv"));
                fs::write(&p, write_traffic_matrix(m)).map_err(|e| Error::io(&p, e))?;
                println!("wrote {} ({} demands)", p.display(), m.len());
            }
            Ok(())
        }
    }
}

fn oracle(config: &ExperimentConfig, budget: u128) -> Result<()> {
    let inputs = config.load_inputs()?;
    let bounds = PathBounds {
        max_hops: config.bounds.max_hops.or(Some(4)),
        ..config.bounds
    };
    let volume = *config.volumes.first().ok_or(Error::NothingToRun)?;
    let interval = config.interval_for(volume)?;
    let target = from_f64(volume).ok_or_else(|| Error::Config(format!("bad volume {volume}")))?;
    let matrix = inputs.matrices.first().ok_or(Error::NothingToRun)?;
    let (flows, _) = scaled_flows(matrix, &inputs.topology, target, config.volume_basis)?;
    let exact = exact_max_resdn(&inputs.topology, &flows, &interval, &bounds, budget)?;
    println!(
        "exact RESDN {} over {} combinations ({} within capacity)",
        format_decimal(&exact.resdn),
        exact.combinations,
        exact.feasible
    );
    println!("note: {OPTIMALITY_CAVEAT}");
    for &h in &config.heuristics {
        match h.run(&inputs.topology, &flows, &interval, &bounds) {
            Ok(out) => {
                let report = verify_constraints(&out.topology, &out.state);
                println!(
                    "{:<10} RESDN {:<12} violations {}{}",
                    h.label(),
                    format_decimal(&resdn(&out.state, &out.topology, &interval)),
                    report.violations.len(),
                    if out.is_fallback_free() {
                        ""
                    } else {
                        " (fallback)"
                    }
                );
                for v in &report.violations {
                    println!("    {}", v.describe(&out.topology));
                }
            }
            Err(e) => println!("{:<10} error: {e}", h.label()),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
