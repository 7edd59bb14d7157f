//! The `beamnet` binary: argument parsing and dispatch.
//!
//! Each subcommand fixes an experiment kind; flags override the optional
//! config file field by field (see the `config` module for the layering
//! rules).  On success the process prints a short summary and exits 0; on
//! failure it prints one machine-readable JSON line to standard error and
//! exits nonzero.
//!
//! The `BEAMNET_WORKERS` environment variable caps the simulation worker
//! count; when unset, one worker runs per available processor.  Results are
//! byte-identical either way.

#![forbid(unsafe_code)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use beamnet_cli::config::{load_raw, resolve, Axis, ExperimentKind, Overrides, RawConfig};
use beamnet_cli::error::{Error, Result};
use beamnet_cli::experiment::{run_experiment, summary_lines};

/// Connection probability, ergodic rate, and mean degree of random networks
/// of directional antennas: closed forms cross-checked against simulation.
#[derive(Debug, Parser)]
#[command(name = "beamnet", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Angular gain average vs directivity, one curve per path-loss
    /// exponent (analytic only).
    WpCurve(JobArgs),
    /// Connection probability vs link distance, one curve per directivity.
    /// Requires --orientation (aligned beams: 180deg).
    ConnectionVsDistance(JobArgs),
    /// Connection probability vs transmitter orientation, one curve per
    /// lobe count.
    ConnectionVsOrientation(JobArgs),
    /// Ergodic rate vs link distance, one curve per directivity.
    RateVsDistance(JobArgs),
    /// Ergodic rate vs transmitter orientation, one curve per lobe count.
    RateVsOrientation(JobArgs),
    /// Mean node degree vs transmitter density, one curve per directivity.
    DegreeVsDensity(JobArgs),
    /// Free-form sweep over any axes; requires --metric.
    Sweep(JobArgs),
    /// Run an experiment entirely described by a config file.
    Run(JobArgs),
}

impl Command {
    /// The experiment kind a subcommand fixes; `Run` takes it from the file.
    fn kind(&self) -> Option<ExperimentKind> {
        match self {
            Command::WpCurve(_) => Some(ExperimentKind::WpCurve),
            Command::ConnectionVsDistance(_) => Some(ExperimentKind::ConnectionVsDistance),
            Command::ConnectionVsOrientation(_) => {
                Some(ExperimentKind::ConnectionVsOrientation)
            }
            Command::RateVsDistance(_) => Some(ExperimentKind::RateVsDistance),
            Command::RateVsOrientation(_) => Some(ExperimentKind::RateVsOrientation),
            Command::DegreeVsDensity(_) => Some(ExperimentKind::DegreeVsDensity),
            Command::Sweep(_) => Some(ExperimentKind::Sweep),
            Command::Run(_) => None,
        }
    }

    fn args(&self) -> &JobArgs {
        match self {
            Command::WpCurve(args)
            | Command::ConnectionVsDistance(args)
            | Command::ConnectionVsOrientation(args)
            | Command::RateVsDistance(args)
            | Command::RateVsOrientation(args)
            | Command::DegreeVsDensity(args)
            | Command::Sweep(args)
            | Command::Run(args) => args,
        }
    }
}

/// Flags shared by every subcommand.  Angles are radians unless suffixed
/// with `deg`; grids are a scalar, a comma list, or start:stop:step.
#[derive(Debug, Args)]
struct JobArgs {
    /// Config file providing any of these settings (flags win).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// CSV output path; a metadata sidecar is written next to it.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Master RNG seed (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per grid point (default 30000).
    #[arg(long)]
    trials: Option<u64>,
    /// Sampling disk radius (default 8).
    #[arg(long)]
    radius: Option<f64>,
    /// Skip the analytic route.
    #[arg(long)]
    no_analytic: bool,
    /// Skip the Monte Carlo route.
    #[arg(long)]
    no_monte_carlo: bool,
    /// Flag analytic/simulation gaps beyond this many standard errors
    /// (default 4).
    #[arg(long, value_name = "K")]
    agreement_factor: Option<f64>,
    /// Metric for the sweep kind: connection, rate, degree, or
    /// gain-average.
    #[arg(long, value_name = "NAME")]
    metric: Option<String>,

    /// Transmit power.
    #[arg(long)]
    power: Option<f64>,
    /// Noise power.
    #[arg(long)]
    noise: Option<f64>,
    /// SINR decoding threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Interference coupling factor in [0, 1].
    #[arg(long)]
    orthogonality: Option<f64>,
    /// Path-loss exponent (> 2).
    #[arg(long)]
    pathloss_exponent: Option<f64>,
    /// Path-loss offset (>= 0).
    #[arg(long)]
    pathloss_offset: Option<f64>,
    /// Transmitter density.
    #[arg(long)]
    density: Option<f64>,
    /// Directivity of both patterns, in [0, 1].
    #[arg(long)]
    directivity: Option<f64>,
    /// Lobe count of both patterns (>= 1).
    #[arg(long)]
    lobes: Option<u32>,
    /// Tagged link distance.
    #[arg(long)]
    distance: Option<f64>,
    /// Tagged transmitter angular position (angle).
    #[arg(long, value_name = "ANGLE")]
    position_angle: Option<String>,
    /// Tagged transmitter orientation (angle).
    #[arg(long, value_name = "ANGLE")]
    orientation: Option<String>,

    /// Grid of path-loss exponents.
    #[arg(long, value_name = "GRID")]
    exponent_grid: Option<String>,
    /// Grid of directivities.
    #[arg(long, value_name = "GRID")]
    directivity_grid: Option<String>,
    /// Grid of lobe counts.
    #[arg(long, value_name = "GRID")]
    lobes_grid: Option<String>,
    /// Grid of link distances.
    #[arg(long, value_name = "GRID")]
    distance_grid: Option<String>,
    /// Grid of transmitter orientations (angles).
    #[arg(long, value_name = "GRID")]
    orientation_grid: Option<String>,
    /// Grid of angular positions (angles).
    #[arg(long, value_name = "GRID")]
    position_angle_grid: Option<String>,
    /// Grid of transmitter densities.
    #[arg(long, value_name = "GRID")]
    density_grid: Option<String>,
    /// Extra sweep axis as NAME=GRID; repeatable.
    #[arg(long, value_name = "NAME=GRID")]
    axis: Vec<String>,
}

impl JobArgs {
    /// Converts the parsed flags into config-layer overrides.
    fn to_overrides(&self) -> Result<Overrides> {
        let mut grids: Vec<(Axis, String)> = Vec::new();
        let named = [
            (Axis::PathlossExponent, &self.exponent_grid),
            (Axis::Directivity, &self.directivity_grid),
            (Axis::Lobes, &self.lobes_grid),
            (Axis::Distance, &self.distance_grid),
            (Axis::Orientation, &self.orientation_grid),
            (Axis::PositionAngle, &self.position_angle_grid),
            (Axis::Density, &self.density_grid),
        ];
        for (axis, grid) in named {
            if let Some(text) = grid {
                grids.push((axis, text.clone()));
            }
        }
        for entry in &self.axis {
            let (name, grid) = entry.split_once('=').ok_or_else(|| {
                Error::config(format!("--axis `{entry}` must look like NAME=GRID"))
            })?;
            let axis = Axis::from_name(name.trim())?;
            if grids.iter().any(|(existing, _)| *existing == axis) {
                return Err(Error::config(format!(
                    "the `{}` grid is given twice",
                    axis.name()
                )));
            }
            grids.push((axis, grid.to_string()));
        }
        Ok(Overrides {
            output: self.output.clone(),
            seed: self.seed,
            trials: self.trials,
            radius: self.radius,
            skip_analytic: self.no_analytic,
            skip_monte_carlo: self.no_monte_carlo,
            agreement_factor: self.agreement_factor,
            metric: self.metric.clone(),
            power: self.power,
            noise: self.noise,
            threshold: self.threshold,
            orthogonality: self.orthogonality,
            pathloss_exponent: self.pathloss_exponent,
            pathloss_offset: self.pathloss_offset,
            density: self.density,
            directivity: self.directivity,
            lobes: self.lobes,
            distance: self.distance,
            position_angle: self.position_angle.clone(),
            orientation: self.orientation.clone(),
            grids,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            let wrapped = Error::config(format!("argument error: {}", err.kind()));
            eprintln!("{}", wrapped.machine_line());
            return ExitCode::from(2);
        }
    };
    match try_main(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.machine_line());
            ExitCode::FAILURE
        }
    }
}

fn try_main(cli: &Cli) -> Result<()> {
    configure_workers()?;
    let args = cli.command.args();
    let raw = match &args.config {
        Some(path) => load_raw(path)?,
        None => RawConfig::default(),
    };
    let spec = resolve(cli.command.kind(), raw, &args.to_overrides()?)?;
    let outcome = run_experiment(&spec)?;
    for line in summary_lines(&outcome) {
        println!("{line}");
    }
    Ok(())
}

/// Builds the global worker pool from `BEAMNET_WORKERS` when set; otherwise
/// leaves the default of one worker per available processor.
fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var("BEAMNET_WORKERS") else {
        return Ok(());
    };
    let workers: usize = value.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        Error::config(format!(
            "BEAMNET_WORKERS must be a positive integer, got `{value}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|err| Error::config(format!("cannot size the worker pool: {err}")))
}
