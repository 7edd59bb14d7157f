//! Experiment specification: the config-file format, command-line
//! overrides, and the validated [`ExperimentSpec`] both compile into.
//!
//! A specification arrives in up to three layers, later layers overriding
//! earlier ones field by field:
//!
//! 1. built-in defaults (the canonical parameter set plus a per-recipe grid
//!    and pattern choice);
//! 2. an optional TOML config file (unknown keys are a hard error);
//! 3. command-line flags.
//!
//! Angles are radians everywhere; a scalar may instead be written with an
//! explicit `deg` suffix (`"90deg"`), which is accepted only where an angle
//! is expected.  Grids are written either as a single scalar, an inclusive
//! `start:stop:step` range, or a comma-separated / TOML-array list.
//!
//! A resolved spec serializes back to the same TOML dialect via
//! [`serialize_spec`]; re-parsing that text reproduces the spec exactly,
//! which is how every run's metadata sidecar stays usable as a config file.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use beamnet::model::{AntennaPattern, LinkGeometry, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which experiment a run performs.  The first six are fixed recipes whose
/// sweep grids have figure-ready defaults; `Sweep` exposes the same engine
/// with caller-chosen axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Angular gain average versus directivity, one curve per path-loss
    /// exponent.  Analytic only: this quantity has no sampling route.
    WpCurve,
    /// Connection probability versus link distance, one curve per
    /// directivity.  The transmitter orientation has no safe default and
    /// must be given explicitly (aligned beams are `180deg`).
    ConnectionVsDistance,
    /// Connection probability versus transmitter orientation at a fixed
    /// distance, one curve per lobe count.
    ConnectionVsOrientation,
    /// Ergodic rate versus link distance, one curve per directivity.
    RateVsDistance,
    /// Ergodic rate versus transmitter orientation, one curve per lobe
    /// count.
    RateVsOrientation,
    /// Mean node degree versus transmitter density, one curve per
    /// directivity.
    DegreeVsDensity,
    /// Free-form sweep over any combination of axes; requires `metric`.
    Sweep,
}

impl ExperimentKind {
    /// All kinds, in documentation order.
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::WpCurve,
        ExperimentKind::ConnectionVsDistance,
        ExperimentKind::ConnectionVsOrientation,
        ExperimentKind::RateVsDistance,
        ExperimentKind::RateVsOrientation,
        ExperimentKind::DegreeVsDensity,
        ExperimentKind::Sweep,
    ];

    /// The kebab-case name used in config files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::WpCurve => "wp-curve",
            ExperimentKind::ConnectionVsDistance => "connection-vs-distance",
            ExperimentKind::ConnectionVsOrientation => "connection-vs-orientation",
            ExperimentKind::RateVsDistance => "rate-vs-distance",
            ExperimentKind::RateVsOrientation => "rate-vs-orientation",
            ExperimentKind::DegreeVsDensity => "degree-vs-density",
            ExperimentKind::Sweep => "sweep",
        }
    }

    /// Parses a kind name.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|kind| kind.name() == name)
    }

    /// The metric a recipe evaluates; `None` for the free-form sweep, whose
    /// metric is chosen by the caller.
    fn fixed_metric(self) -> Option<MetricKind> {
        match self {
            ExperimentKind::WpCurve => Some(MetricKind::GainAverage),
            ExperimentKind::ConnectionVsDistance | ExperimentKind::ConnectionVsOrientation => {
                Some(MetricKind::Connection)
            }
            ExperimentKind::RateVsDistance | ExperimentKind::RateVsOrientation => {
                Some(MetricKind::Rate)
            }
            ExperimentKind::DegreeVsDensity => Some(MetricKind::Degree),
            ExperimentKind::Sweep => None,
        }
    }
}

/// The quantity evaluated at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// The angular average of the gain pattern raised to `2/eta`; the
    /// single number through which interferer directivity enters every
    /// closed form.  Analytic only.
    GainAverage,
    /// Probability that the tagged link's SINR reaches the threshold.
    Connection,
    /// Ergodic rate of the tagged link in nats.
    Rate,
    /// Mean number of decodable transmitters at a typical receiver.
    Degree,
}

impl MetricKind {
    /// All metrics, in documentation order.
    pub const ALL: [MetricKind; 4] = [
        MetricKind::GainAverage,
        MetricKind::Connection,
        MetricKind::Rate,
        MetricKind::Degree,
    ];

    /// The kebab-case name used in config files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::GainAverage => "gain-average",
            MetricKind::Connection => "connection",
            MetricKind::Rate => "rate",
            MetricKind::Degree => "degree",
        }
    }

    /// Parses a metric name.
    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|metric| metric.name() == name)
    }

    /// Whether the metric depends on the tagged link's geometry (as opposed
    /// to averaging over all links or depending on the pattern alone).
    fn uses_tagged_link(self) -> bool {
        matches!(self, MetricKind::Connection | MetricKind::Rate)
    }
}

/// A sweepable parameter.  The variant order is the canonical nesting order
/// of sweep output: earlier axes vary slowest, later axes fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Axis {
    /// Path-loss exponent.
    PathlossExponent,
    /// Interference coupling factor.
    Orthogonality,
    /// SINR decoding threshold.
    Threshold,
    /// Transmit power.
    Power,
    /// Noise power.
    Noise,
    /// Path-loss offset.
    PathlossOffset,
    /// Transmitter density.
    Density,
    /// Directivity of both the transmit and receive patterns.
    Directivity,
    /// Lobe count of both patterns (positive integers).
    Lobes,
    /// Angular position of the tagged transmitter (radians).
    PositionAngle,
    /// Orientation of the tagged transmitter's antenna (radians).
    Orientation,
    /// Distance of the tagged link.
    Distance,
}

impl Axis {
    /// All axes in canonical order.
    pub const ALL: [Axis; 12] = [
        Axis::PathlossExponent,
        Axis::Orthogonality,
        Axis::Threshold,
        Axis::Power,
        Axis::Noise,
        Axis::PathlossOffset,
        Axis::Density,
        Axis::Directivity,
        Axis::Lobes,
        Axis::PositionAngle,
        Axis::Orientation,
        Axis::Distance,
    ];

    /// The snake_case name used as config key and CSV column header.
    pub fn name(self) -> &'static str {
        match self {
            Axis::PathlossExponent => "pathloss_exponent",
            Axis::Orthogonality => "orthogonality",
            Axis::Threshold => "threshold",
            Axis::Power => "power",
            Axis::Noise => "noise",
            Axis::PathlossOffset => "pathloss_offset",
            Axis::Density => "density",
            Axis::Directivity => "directivity",
            Axis::Lobes => "lobes",
            Axis::PositionAngle => "position_angle",
            Axis::Orientation => "orientation",
            Axis::Distance => "distance",
        }
    }

    /// Parses an axis name, or reports the valid choices.
    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|axis| axis.name() == name)
            .ok_or_else(|| {
                let choices: Vec<&str> = Self::ALL.iter().map(|axis| axis.name()).collect();
                Error::config(format!(
                    "unknown sweep axis `{name}`; choose one of: {}",
                    choices.join(", ")
                ))
            })
    }

    /// Whether values on this axis are angles (so `deg` suffixes apply).
    pub fn is_angle(self) -> bool {
        matches!(self, Axis::PositionAngle | Axis::Orientation)
    }

    /// Whether values on this axis must be positive integers.
    pub fn is_integer_valued(self) -> bool {
        matches!(self, Axis::Lobes)
    }
}

/// One sweep dimension: an axis together with its grid of values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    /// The parameter being swept.
    pub axis: Axis,
    /// Grid values, in row order (angles already converted to radians).
    pub values: Vec<f64>,
}

/// The model inputs a single grid point is evaluated at: system parameters,
/// both patterns, and the tagged link.  Sweep axes are applied on top of
/// this base, one copy per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// System parameters shared by all nodes.
    pub params: SystemParams,
    /// Pattern transmitted by every node.
    pub tx_pattern: AntennaPattern,
    /// Pattern of the receiving antenna.
    pub rx_pattern: AntennaPattern,
    /// Geometry of the tagged link.
    pub link: LinkGeometry,
}

impl Scenario {
    /// Overwrites the field selected by `axis` with `value`.  `Directivity`
    /// and `Lobes` apply to both patterns; per-pattern asymmetry is
    /// configured through the fixed `tx_pattern`/`rx_pattern` sections
    /// instead of a sweep.
    pub fn apply(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::PathlossExponent => self.params.pathloss_exponent = value,
            Axis::Orthogonality => self.params.orthogonality = value,
            Axis::Threshold => self.params.threshold = value,
            Axis::Power => self.params.power = value,
            Axis::Noise => self.params.noise = value,
            Axis::PathlossOffset => self.params.pathloss_offset = value,
            Axis::Density => self.params.density = value,
            Axis::Directivity => {
                self.tx_pattern.directivity = value;
                self.rx_pattern.directivity = value;
            }
            Axis::Lobes => {
                let lobes = value.round() as u32;
                self.tx_pattern.lobes = lobes;
                self.rx_pattern.lobes = lobes;
            }
            Axis::PositionAngle => self.link.angular_position = value,
            Axis::Orientation => self.link.orientation = value,
            Axis::Distance => self.link.distance = value,
        }
    }

    /// Validates every component against the model invariants.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.tx_pattern.validate()?;
        self.rx_pattern.validate()?;
        self.link.validate()?;
        Ok(())
    }
}

/// A fully resolved, validated experiment: what to compute, where, on which
/// grid, and with which simulation budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Which recipe or sweep this is.
    pub kind: ExperimentKind,
    /// The metric evaluated at every grid point.
    pub metric: MetricKind,
    /// Path of the CSV artifact; a metadata sidecar is written next to it.
    pub output: PathBuf,
    /// Whether to evaluate the analytic route.
    pub include_analytic: bool,
    /// Whether to run the Monte Carlo route.
    pub include_monte_carlo: bool,
    /// Analytic/simulation agreement is flagged when the absolute gap
    /// exceeds this multiple of the standard error (plus a fixed 1e-6
    /// floor absorbing rounding at near-deterministic points).
    pub agreement_factor: f64,
    /// Trials per grid point for the Monte Carlo route.
    pub trials: u64,
    /// Master seed; grid row `i` simulates with seed `seed + i`, and each
    /// row's trials use independent, merge-order-fixed streams, so output
    /// is byte-identical across reruns and worker counts.
    pub seed: u64,
    /// Radius of the sampling disk standing in for the infinite plane.
    pub disk_radius: f64,
    /// Base model inputs that sweep axes are applied on top of.
    pub scenario: Scenario,
    /// Sweep dimensions; the last axis varies fastest.  Recipes list their
    /// curve-family axis first and the x-axis last; free-form sweeps are in
    /// canonical [`Axis`] order.
    pub axes: Vec<SweepAxis>,
}

impl ExperimentSpec {
    /// Number of grid points (rows) the experiment produces.
    pub fn row_count(&self) -> usize {
        self.axes.iter().map(|axis| axis.values.len()).product()
    }

    /// Checks the cross-field invariants not already enforced during
    /// resolution; called again by the runner as a final gate.
    pub fn validate(&self) -> Result<()> {
        if !self.include_analytic && !self.include_monte_carlo {
            return Err(Error::config(
                "at least one of include_analytic / include_monte_carlo must be true",
            ));
        }
        if self.metric == MetricKind::GainAverage && self.include_monte_carlo {
            return Err(Error::config(
                "the gain average has no simulation route; disable Monte Carlo for it",
            ));
        }
        if !(self.agreement_factor > 0.0) || !self.agreement_factor.is_finite() {
            return Err(Error::config(
                "agreement_factor must be a positive finite number",
            ));
        }
        if self.include_monte_carlo {
            if self.trials == 0 {
                return Err(Error::config("trials must be at least 1"));
            }
            if !(self.disk_radius > 0.0) || !self.disk_radius.is_finite() {
                return Err(Error::config("disk_radius must be a positive finite number"));
            }
        }
        self.scenario.validate()?;
        if self.axes.is_empty() {
            return Err(Error::config("the sweep needs at least one axis"));
        }
        for (index, sweep) in self.axes.iter().enumerate() {
            if self.axes[..index].iter().any(|other| other.axis == sweep.axis) {
                return Err(Error::config(format!(
                    "axis `{}` is listed twice",
                    sweep.axis.name()
                )));
            }
        }
        for sweep in &self.axes {
            validate_axis_values(sweep.axis, &sweep.values, &self.scenario)?;
        }
        if self.row_count() > 1_000_000 {
            return Err(Error::config(
                "the sweep grid exceeds 1,000,000 rows; shrink the axes",
            ));
        }
        if self.include_monte_carlo && self.metric.uses_tagged_link() {
            let max_distance = self
                .axes
                .iter()
                .find(|sweep| sweep.axis == Axis::Distance)
                .map(|sweep| sweep.values.iter().cloned().fold(0.0, f64::max))
                .unwrap_or(self.scenario.link.distance);
            if max_distance >= self.disk_radius {
                return Err(Error::config(format!(
                    "link distance {max_distance} reaches the simulation disk radius \
                     {}; enlarge --radius",
                    self.disk_radius
                )));
            }
        }
        Ok(())
    }
}

/// Checks one axis' grid: non-empty, finite, integer-valued where required,
/// and acceptable to the model when applied to the base scenario.
fn validate_axis_values(axis: Axis, values: &[f64], base: &Scenario) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(format!(
            "the grid for `{}` is empty",
            axis.name()
        )));
    }
    for &value in values {
        if !value.is_finite() {
            return Err(Error::config(format!(
                "the grid for `{}` contains a non-finite value",
                axis.name()
            )));
        }
        if axis.is_integer_valued() && ((value - value.round()).abs() > 1e-9 || value < 1.0) {
            return Err(Error::config(format!(
                "the grid for `{}` must contain positive integers, got {value}",
                axis.name()
            )));
        }
        let mut probe = *base;
        probe.apply(axis, value);
        probe.validate()?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar and grid syntax
// ---------------------------------------------------------------------------

/// Parses one scalar token: a plain number (radians for angles) or, when
/// `angle_ok`, a number with a `deg` suffix converted to radians.
pub fn parse_scalar(token: &str, angle_ok: bool) -> Result<f64> {
    let trimmed = token.trim();
    let (body, degrees) = match trimmed.strip_suffix("deg") {
        Some(body) => (body.trim_end(), true),
        None => (trimmed, false),
    };
    if degrees && !angle_ok {
        return Err(Error::config(format!(
            "`{trimmed}`: the deg suffix only applies to angle parameters"
        )));
    }
    let value: f64 = body.parse().map_err(|_| {
        Error::config(format!("cannot parse `{trimmed}` as a number"))
    })?;
    if !value.is_finite() {
        return Err(Error::config(format!("`{trimmed}` is not finite")));
    }
    Ok(if degrees { value.to_radians() } else { value })
}

/// Parses grid text: `start:stop:step` (inclusive range), a comma-separated
/// list, or a single scalar.  Each scalar follows [`parse_scalar`] rules.
pub fn parse_grid_text(text: &str, angle_ok: bool) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.contains(':') {
        let parts: Vec<&str> = trimmed.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::config(format!(
                "`{trimmed}`: a range needs exactly start:stop:step"
            )));
        }
        let start = parse_scalar(parts[0], angle_ok)?;
        let stop = parse_scalar(parts[1], angle_ok)?;
        let step = parse_scalar(parts[2], angle_ok)?;
        if !(step > 0.0) {
            return Err(Error::config(format!(
                "`{trimmed}`: the range step must be positive"
            )));
        }
        if stop < start {
            return Err(Error::config(format!(
                "`{trimmed}`: the range stop lies below its start"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(Error::config(format!(
                "`{trimmed}`: the range expands to {count} points"
            )));
        }
        return Ok((0..count).map(|k| start + k as f64 * step).collect());
    }
    if trimmed.contains(',') {
        return trimmed
            .split(',')
            .map(|token| parse_scalar(token, angle_ok))
            .collect();
    }
    Ok(vec![parse_scalar(trimmed, angle_ok)?])
}

/// Parses a grid written as a TOML value: a number, a piece of grid text,
/// or an array of numbers and `deg` strings.
fn parse_grid_value(value: &toml::Value, angle_ok: bool) -> Result<Vec<f64>> {
    match value {
        toml::Value::Integer(n) => Ok(vec![*n as f64]),
        toml::Value::Float(x) => Ok(vec![*x]),
        toml::Value::String(text) => parse_grid_text(text, angle_ok),
        toml::Value::Array(items) => items
            .iter()
            .map(|item| match item {
                toml::Value::Integer(n) => Ok(*n as f64),
                toml::Value::Float(x) => Ok(*x),
                toml::Value::String(text) => parse_scalar(text, angle_ok),
                other => Err(Error::config(format!(
                    "unsupported grid entry `{other}`"
                ))),
            })
            .collect(),
        other => Err(Error::config(format!(
            "unsupported grid value `{other}`; use a number, a string, or an array"
        ))),
    }
}

/// Parses an angle written as a TOML value: a number in radians or a string
/// with an optional `deg` suffix.
fn parse_angle_value(value: &toml::Value, field: &str) -> Result<f64> {
    match value {
        toml::Value::Integer(n) => Ok(*n as f64),
        toml::Value::Float(x) => Ok(*x),
        toml::Value::String(text) => parse_scalar(text, true),
        other => Err(Error::config(format!(
            "`{field}` must be a number in radians or a string like \"90deg\", got `{other}`"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Raw config file shape
// ---------------------------------------------------------------------------

/// The config file as written: every field optional, unknown keys rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Experiment kind name; required unless a subcommand supplies it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// CSV output path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Metric name; required for (and only meaningful to) the sweep kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    /// Evaluate the analytic route (default true).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_analytic: Option<bool>,
    /// Run the Monte Carlo route (default true except for the gain average,
    /// which has none).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_monte_carlo: Option<bool>,
    /// Agreement allowance in standard errors (default 4).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_factor: Option<f64>,
    /// System parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<RawParams>,
    /// Simulation budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<RawSimulation>,
    /// Transmit pattern of every node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_pattern: Option<RawPattern>,
    /// Receive pattern at the origin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_pattern: Option<RawPattern>,
    /// Tagged link geometry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<RawLink>,
    /// Sweep grids keyed by axis name.  For recipes these override the
    /// recipe's own grids; for the sweep kind they define the axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<toml::value::Table>,
}

/// `[params]` section; every field defaults to the canonical value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    /// Transmit power (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    /// Noise power (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// SINR threshold (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Interference coupling factor (default 0.3).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonality: Option<f64>,
    /// Path-loss exponent (default 4).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pathloss_exponent: Option<f64>,
    /// Path-loss offset (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pathloss_offset: Option<f64>,
    /// Transmitter density (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
}

/// `[simulation]` section.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimulation {
    /// Trials per grid point (default 30000).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Master seed (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Sampling disk radius (default 8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disk_radius: Option<f64>,
}

/// `[tx_pattern]` / `[rx_pattern]` sections.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPattern {
    /// Directivity factor in [0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directivity: Option<f64>,
    /// Lobe count (>= 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lobes: Option<u32>,
}

/// `[link]` section; angles accept radians or `deg` strings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLink {
    /// Link distance (default 0.4).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    /// Angular position of the transmitter (default 0).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position_angle: Option<toml::Value>,
    /// Orientation of the transmitter's antenna (default 180deg except for
    /// connection-vs-distance, where it is required).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<toml::Value>,
}

/// Reads and deserializes a config file without resolving it.
pub fn load_raw(path: &Path) -> Result<RawConfig> {
    let text = fs::read_to_string(path)
        .map_err(|err| Error::io(format!("cannot read config {}", path.display()), err))?;
    toml::from_str(&text).map_err(|err| {
        Error::config(format!("{}: {err}", path.display()))
    })
}

/// Parses a config file into a validated spec with all defaults filled in.
/// The file must carry its own `kind` and `output`.
pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    resolve(None, load_raw(path)?, &Overrides::default())
}

// ---------------------------------------------------------------------------
// Command-line overrides
// ---------------------------------------------------------------------------

/// Field-by-field command-line overrides, applied after the config file.
/// `None` / empty means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// CSV output path.
    pub output: Option<PathBuf>,
    /// Master seed.
    pub seed: Option<u64>,
    /// Trials per grid point.
    pub trials: Option<u64>,
    /// Sampling disk radius.
    pub radius: Option<f64>,
    /// Disable the analytic route.
    pub skip_analytic: bool,
    /// Disable the Monte Carlo route.
    pub skip_monte_carlo: bool,
    /// Agreement allowance in standard errors.
    pub agreement_factor: Option<f64>,
    /// Metric name (sweep only).
    pub metric: Option<String>,
    /// Transmit power.
    pub power: Option<f64>,
    /// Noise power.
    pub noise: Option<f64>,
    /// SINR threshold.
    pub threshold: Option<f64>,
    /// Interference coupling factor.
    pub orthogonality: Option<f64>,
    /// Path-loss exponent.
    pub pathloss_exponent: Option<f64>,
    /// Path-loss offset.
    pub pathloss_offset: Option<f64>,
    /// Transmitter density.
    pub density: Option<f64>,
    /// Directivity of both patterns.
    pub directivity: Option<f64>,
    /// Lobe count of both patterns.
    pub lobes: Option<u32>,
    /// Tagged link distance.
    pub distance: Option<f64>,
    /// Tagged transmitter angular position (angle syntax).
    pub position_angle: Option<String>,
    /// Tagged transmitter orientation (angle syntax).
    pub orientation: Option<String>,
    /// Grid overrides as (axis, grid text) pairs.
    pub grids: Vec<(Axis, String)>,
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

/// The default grids a recipe ships with, in canonical axis order.
fn default_axes(kind: ExperimentKind) -> Vec<SweepAxis> {
    let orientation_circle: Vec<f64> = (0..64).map(|k| k as f64 * PI / 32.0).collect();
    match kind {
        ExperimentKind::WpCurve => vec![
            SweepAxis {
                axis: Axis::PathlossExponent,
                values: vec![2.5, 3.0, 4.0, 6.0],
            },
            SweepAxis {
                axis: Axis::Directivity,
                values: (0..=50).map(|k| k as f64 * 0.02).collect(),
            },
        ],
        ExperimentKind::ConnectionVsDistance | ExperimentKind::RateVsDistance => vec![
            SweepAxis {
                axis: Axis::Directivity,
                values: vec![0.0, 0.5, 1.0],
            },
            SweepAxis {
                axis: Axis::Distance,
                values: (1..=50).map(|k| k as f64 * 0.02).collect(),
            },
        ],
        ExperimentKind::ConnectionVsOrientation | ExperimentKind::RateVsOrientation => vec![
            SweepAxis {
                axis: Axis::Lobes,
                values: vec![1.0, 2.0, 3.0, 4.0],
            },
            SweepAxis {
                axis: Axis::Orientation,
                values: orientation_circle,
            },
        ],
        ExperimentKind::DegreeVsDensity => vec![
            SweepAxis {
                axis: Axis::Directivity,
                values: vec![0.0, 1.0],
            },
            SweepAxis {
                axis: Axis::Density,
                values: (1..=20).map(|k| k as f64 * 0.25).collect(),
            },
        ],
        ExperimentKind::Sweep => Vec::new(),
    }
}

/// Merges defaults, config file, and command-line overrides into a
/// validated spec.  `kind` comes from the subcommand when given; the `run`
/// subcommand passes `None` and takes it from the file.
pub fn resolve(
    kind: Option<ExperimentKind>,
    raw: RawConfig,
    overrides: &Overrides,
) -> Result<ExperimentSpec> {
    let kind = match (kind, raw.kind.as_deref()) {
        (Some(kind), _) => kind,
        (None, Some(name)) => ExperimentKind::from_name(name).ok_or_else(|| {
            let choices: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
            Error::config(format!(
                "unknown kind `{name}`; choose one of: {}",
                choices.join(", ")
            ))
        })?,
        (None, None) => {
            return Err(Error::config(
                "the config file must set `kind` when no subcommand chooses it",
            ))
        }
    };

    let metric = resolve_metric(kind, &raw, overrides)?;

    // Base scenario: canonical defaults, adjusted per recipe.  The two
    // orientation recipes sweep the beam of a fully directional pattern, so
    // an isotropic default would make them vacuous.
    let mut scenario = Scenario {
        params: SystemParams::default(),
        tx_pattern: AntennaPattern::isotropic(),
        rx_pattern: AntennaPattern::isotropic(),
        link: LinkGeometry {
            distance: 0.4,
            angular_position: 0.0,
            orientation: PI,
        },
    };
    if matches!(
        kind,
        ExperimentKind::ConnectionVsOrientation | ExperimentKind::RateVsOrientation
    ) {
        scenario.tx_pattern = AntennaPattern::single_lobe(1.0);
        scenario.rx_pattern = AntennaPattern::single_lobe(1.0);
    }

    apply_raw_scenario(&mut scenario, &raw)?;
    apply_override_scenario(&mut scenario, overrides)?;

    let axes = resolve_axes(kind, metric, &raw, overrides)?;

    // The aligned-vs-misaligned distinction is the whole point of the
    // distance recipe for connection probability, and the published
    // misaligned case does not pin a value; make the caller choose.
    let orientation_given = overrides.orientation.is_some()
        || raw.link.as_ref().is_some_and(|link| link.orientation.is_some())
        || axes.iter().any(|sweep| sweep.axis == Axis::Orientation);
    if kind == ExperimentKind::ConnectionVsDistance && !orientation_given {
        return Err(Error::config(
            "connection-vs-distance needs an explicit transmitter orientation \
             (--orientation, in radians or e.g. `180deg`; aligned beams are 180deg)",
        ));
    }

    let simulation = raw.simulation.unwrap_or_default();
    let include_analytic = if overrides.skip_analytic {
        false
    } else {
        raw.include_analytic.unwrap_or(true)
    };
    let include_monte_carlo = if overrides.skip_monte_carlo {
        false
    } else {
        raw.include_monte_carlo
            .unwrap_or(metric != MetricKind::GainAverage)
    };
    let output = overrides
        .output
        .clone()
        .or(raw.output)
        .ok_or_else(|| Error::config("an output path is required (--output or `output`)"))?;

    let spec = ExperimentSpec {
        kind,
        metric,
        output,
        include_analytic,
        include_monte_carlo,
        agreement_factor: overrides
            .agreement_factor
            .or(raw.agreement_factor)
            .unwrap_or(4.0),
        trials: overrides.trials.or(simulation.trials).unwrap_or(30_000),
        seed: overrides.seed.or(simulation.seed).unwrap_or(0),
        disk_radius: overrides.radius.or(simulation.disk_radius).unwrap_or(8.0),
        scenario,
        axes,
    };
    spec.validate()?;
    Ok(spec)
}

/// Determines the metric: fixed by the recipe, chosen by flag or key for
/// the sweep kind, and cross-checked when both sources name one.
fn resolve_metric(
    kind: ExperimentKind,
    raw: &RawConfig,
    overrides: &Overrides,
) -> Result<MetricKind> {
    let named = overrides.metric.as_deref().or(raw.metric.as_deref());
    let parsed = named
        .map(|name| {
            MetricKind::from_name(name).ok_or_else(|| {
                let choices: Vec<&str> = MetricKind::ALL.iter().map(|m| m.name()).collect();
                Error::config(format!(
                    "unknown metric `{name}`; choose one of: {}",
                    choices.join(", ")
                ))
            })
        })
        .transpose()?;
    match (kind.fixed_metric(), parsed) {
        (Some(fixed), None) => Ok(fixed),
        (Some(fixed), Some(given)) if fixed == given => Ok(fixed),
        (Some(fixed), Some(given)) => Err(Error::config(format!(
            "kind `{}` always evaluates the {} metric, not `{}`",
            kind.name(),
            fixed.name(),
            given.name()
        ))),
        (None, Some(given)) => Ok(given),
        (None, None) => Err(Error::config(
            "the sweep kind needs a metric (--metric or `metric`)",
        )),
    }
}

/// Applies the config file's scenario sections onto the defaults.
fn apply_raw_scenario(scenario: &mut Scenario, raw: &RawConfig) -> Result<()> {
    if let Some(params) = &raw.params {
        let p = &mut scenario.params;
        if let Some(v) = params.power {
            p.power = v;
        }
        if let Some(v) = params.noise {
            p.noise = v;
        }
        if let Some(v) = params.threshold {
            p.threshold = v;
        }
        if let Some(v) = params.orthogonality {
            p.orthogonality = v;
        }
        if let Some(v) = params.pathloss_exponent {
            p.pathloss_exponent = v;
        }
        if let Some(v) = params.pathloss_offset {
            p.pathloss_offset = v;
        }
        if let Some(v) = params.density {
            p.density = v;
        }
    }
    if let Some(pattern) = &raw.tx_pattern {
        if let Some(v) = pattern.directivity {
            scenario.tx_pattern.directivity = v;
        }
        if let Some(v) = pattern.lobes {
            scenario.tx_pattern.lobes = v;
        }
    }
    if let Some(pattern) = &raw.rx_pattern {
        if let Some(v) = pattern.directivity {
            scenario.rx_pattern.directivity = v;
        }
        if let Some(v) = pattern.lobes {
            scenario.rx_pattern.lobes = v;
        }
    }
    if let Some(link) = &raw.link {
        if let Some(v) = link.distance {
            scenario.link.distance = v;
        }
        if let Some(v) = &link.position_angle {
            scenario.link.angular_position = parse_angle_value(v, "position_angle")?;
        }
        if let Some(v) = &link.orientation {
            scenario.link.orientation = parse_angle_value(v, "orientation")?;
        }
    }
    Ok(())
}

/// Applies the command-line scenario overrides on top of everything else.
fn apply_override_scenario(scenario: &mut Scenario, overrides: &Overrides) -> Result<()> {
    let p = &mut scenario.params;
    if let Some(v) = overrides.power {
        p.power = v;
    }
    if let Some(v) = overrides.noise {
        p.noise = v;
    }
    if let Some(v) = overrides.threshold {
        p.threshold = v;
    }
    if let Some(v) = overrides.orthogonality {
        p.orthogonality = v;
    }
    if let Some(v) = overrides.pathloss_exponent {
        p.pathloss_exponent = v;
    }
    if let Some(v) = overrides.pathloss_offset {
        p.pathloss_offset = v;
    }
    if let Some(v) = overrides.density {
        p.density = v;
    }
    if let Some(v) = overrides.directivity {
        scenario.tx_pattern.directivity = v;
        scenario.rx_pattern.directivity = v;
    }
    if let Some(v) = overrides.lobes {
        scenario.tx_pattern.lobes = v;
        scenario.rx_pattern.lobes = v;
    }
    if let Some(v) = overrides.distance {
        scenario.link.distance = v;
    }
    if let Some(text) = &overrides.position_angle {
        scenario.link.angular_position = parse_scalar(text, true)?;
    }
    if let Some(text) = &overrides.orientation {
        scenario.link.orientation = parse_scalar(text, true)?;
    }
    Ok(())
}

/// Builds the final axis list: recipe defaults, overridden per axis by the
/// config file's `[sweep]` table and then by grid flags.  Recipes only
/// accept overrides for their own axes; the sweep kind accepts any axis the
/// metric supports.
fn resolve_axes(
    kind: ExperimentKind,
    metric: MetricKind,
    raw: &RawConfig,
    overrides: &Overrides,
) -> Result<Vec<SweepAxis>> {
    let mut axes = default_axes(kind);

    let mut requested: Vec<(Axis, Vec<f64>)> = Vec::new();
    if let Some(table) = &raw.sweep {
        for (key, value) in table {
            let axis = Axis::from_name(key)?;
            requested.push((axis, parse_grid_value(value, axis.is_angle())?));
        }
    }
    for (axis, text) in &overrides.grids {
        let values = parse_grid_text(text, axis.is_angle())?;
        if let Some(slot) = requested.iter_mut().find(|(a, _)| a == axis) {
            slot.1 = values;
        } else {
            requested.push((*axis, values));
        }
    }

    for (axis, values) in requested {
        check_axis_applies(kind, metric, axis)?;
        if let Some(slot) = axes.iter_mut().find(|sweep| sweep.axis == axis) {
            slot.values = values;
        } else {
            axes.push(SweepAxis { axis, values });
        }
    }
    if kind == ExperimentKind::Sweep {
        axes.sort_by_key(|sweep| sweep.axis);
    }
    Ok(axes)
}

/// Rejects axes a kind or metric cannot honor, with a pointer at the
/// alternative.
fn check_axis_applies(kind: ExperimentKind, metric: MetricKind, axis: Axis) -> Result<()> {
    if kind != ExperimentKind::Sweep {
        let allowed = default_axes(kind);
        if !allowed.iter().any(|sweep| sweep.axis == axis) {
            return Err(Error::config(format!(
                "axis `{}` is not part of the {} recipe; use `kind = \"sweep\"` for \
                 free-form grids",
                axis.name(),
                kind.name()
            )));
        }
        return Ok(());
    }
    match metric {
        MetricKind::GainAverage => {
            if !matches!(axis, Axis::PathlossExponent | Axis::Directivity) {
                return Err(Error::config(format!(
                    "the gain average depends only on pathloss_exponent and directivity; \
                     axis `{}` does not apply",
                    axis.name()
                )));
            }
        }
        MetricKind::Degree => {
            if matches!(axis, Axis::PositionAngle | Axis::Orientation | Axis::Distance) {
                return Err(Error::config(format!(
                    "the mean degree averages over every link; axis `{}` does not apply",
                    axis.name()
                )));
            }
        }
        MetricKind::Connection | MetricKind::Rate => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Renders a resolved spec as config-file TOML.  Parsing the result with
/// [`parse_config`] reproduces the spec exactly; the experiment runner
/// writes this text (plus a comment footer) as the metadata sidecar.
pub fn serialize_spec(spec: &ExperimentSpec) -> String {
    let mut sweep = toml::value::Table::new();
    for axis in &spec.axes {
        let values = axis
            .values
            .iter()
            .map(|&v| {
                if axis.axis.is_integer_valued() {
                    toml::Value::Integer(v as i64)
                } else {
                    toml::Value::Float(v)
                }
            })
            .collect();
        sweep.insert(axis.axis.name().to_string(), toml::Value::Array(values));
    }
    let raw = RawConfig {
        kind: Some(spec.kind.name().to_string()),
        output: Some(spec.output.clone()),
        metric: Some(spec.metric.name().to_string()),
        include_analytic: Some(spec.include_analytic),
        include_monte_carlo: Some(spec.include_monte_carlo),
        agreement_factor: Some(spec.agreement_factor),
        params: Some(RawParams {
            power: Some(spec.scenario.params.power),
            noise: Some(spec.scenario.params.noise),
            threshold: Some(spec.scenario.params.threshold),
            orthogonality: Some(spec.scenario.params.orthogonality),
            pathloss_exponent: Some(spec.scenario.params.pathloss_exponent),
            pathloss_offset: Some(spec.scenario.params.pathloss_offset),
            density: Some(spec.scenario.params.density),
        }),
        simulation: Some(RawSimulation {
            trials: Some(spec.trials),
            seed: Some(spec.seed),
            disk_radius: Some(spec.disk_radius),
        }),
        tx_pattern: Some(RawPattern {
            directivity: Some(spec.scenario.tx_pattern.directivity),
            lobes: Some(spec.scenario.tx_pattern.lobes),
        }),
        rx_pattern: Some(RawPattern {
            directivity: Some(spec.scenario.rx_pattern.directivity),
            lobes: Some(spec.scenario.rx_pattern.lobes),
        }),
        link: Some(RawLink {
            distance: Some(spec.scenario.link.distance),
            position_angle: Some(toml::Value::Float(spec.scenario.link.angular_position)),
            orientation: Some(toml::Value::Float(spec.scenario.link.orientation)),
        }),
        sweep: Some(sweep),
    };
    toml::to_string_pretty(&raw).expect("a resolved spec always serializes")
}
