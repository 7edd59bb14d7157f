//! Experiment execution: expands the sweep grid, evaluates the analytic
//! and Monte Carlo routes at every point, and writes the CSV artifact plus
//! a metadata sidecar.
//!
//! The CSV carries one header line and one row per grid point: the swept
//! parameter values in axis order, then `analytic`, then `mc_estimate`,
//! `mc_std_error` (and `mc_success_fraction` for the degree metric), then
//! `trials` — each column present only when its route ran.  Values are
//! written in shortest round-trip decimal form, so a fixed spec (seed
//! included) reproduces the file byte for byte.
//!
//! The sidecar at `<output>.meta.toml` is the resolved spec serialized back
//! to config TOML — feeding it to `run --config` repeats the run — followed
//! by a comment footer summarizing the analytic/simulation agreement.
//! Rows where the two routes differ by more than `agreement_factor`
//! standard errors (plus a 1e-6 floor for near-deterministic points) are
//! listed there and echoed by the binary, but do not fail the run: with a
//! sound model they are the statistical tail, and burying them would hide
//! a broken one.

use std::fs;
use std::path::PathBuf;

use beamnet::analytic::{
    connection_probability, data_rate, gain_integral, mean_degree_closed_form,
    mean_degree_numeric,
};
use beamnet::{
    estimate_connection_probability, estimate_data_rate, estimate_mean_degree_detailed,
    EstimateWithError, QuadratureSpec, SimulationConfig,
};

use crate::config::{ExperimentSpec, MetricKind, Scenario};
use crate::error::{Error, Result};

/// Absolute slack added to every agreement allowance, absorbing rounding
/// at points where the estimator variance collapses to zero.
const AGREEMENT_FLOOR: f64 = 1e-6;

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// Swept parameter values, in the spec's axis order.
    pub coordinates: Vec<f64>,
    /// Analytic value, when that route ran.
    pub analytic: Option<f64>,
    /// Monte Carlo estimate, when that route ran.
    pub simulated: Option<EstimateWithError>,
    /// Auxiliary connected-fraction estimate (degree metric only).
    pub success_fraction: Option<f64>,
}

/// A row where the analytic and simulated routes disagree beyond the
/// configured allowance.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementViolation {
    /// Zero-based row index into [`RunOutcome::rows`].
    pub row: usize,
    /// Absolute gap between the routes.
    pub deviation: f64,
    /// Allowance the gap exceeded.
    pub allowance: f64,
}

/// Everything a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// CSV column names, in order.
    pub columns: Vec<String>,
    /// One entry per grid point, in CSV row order.
    pub rows: Vec<ResultRow>,
    /// Number of rows where both routes ran and were compared.
    pub compared_rows: usize,
    /// Rows exceeding the agreement allowance.
    pub violations: Vec<AgreementViolation>,
    /// Where the CSV was written.
    pub csv_path: PathBuf,
    /// Where the metadata sidecar was written.
    pub metadata_path: PathBuf,
}

/// Runs the experiment: evaluates every grid point, writes the CSV and its
/// metadata sidecar, and returns the table in memory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome> {
    spec.validate()?;
    let columns = column_names(spec);
    let quadrature = QuadratureSpec::default();

    let mut rows = Vec::with_capacity(spec.row_count());
    for (index, scenario) in GridPoints::new(spec).enumerate() {
        let analytic = if spec.include_analytic {
            Some(analytic_value(spec.metric, &scenario.values, &quadrature)?)
        } else {
            None
        };
        let (simulated, success_fraction) = if spec.include_monte_carlo {
            let (estimate, fraction) = simulate(spec, &scenario.values, index as u64)?;
            (Some(estimate), fraction)
        } else {
            (None, None)
        };
        rows.push(ResultRow {
            coordinates: scenario.coordinates,
            analytic,
            simulated,
            success_fraction,
        });
    }

    let (compared_rows, violations) = check_agreement(spec, &rows);

    let csv_path = spec.output.clone();
    let metadata_path = metadata_path_for(&csv_path);
    fs::write(&csv_path, render_csv(spec, &columns, &rows)?)
        .map_err(|err| Error::io(format!("cannot write {}", csv_path.display()), err))?;
    let metadata = render_metadata(spec, &columns, &rows, compared_rows, &violations);
    fs::write(&metadata_path, metadata)
        .map_err(|err| Error::io(format!("cannot write {}", metadata_path.display()), err))?;

    Ok(RunOutcome {
        columns,
        rows,
        compared_rows,
        violations,
        csv_path,
        metadata_path,
    })
}

/// Sidecar path: the CSV path with `.meta.toml` appended.
pub fn metadata_path_for(csv_path: &std::path::Path) -> PathBuf {
    let mut name = csv_path.as_os_str().to_os_string();
    name.push(".meta.toml");
    PathBuf::from(name)
}

/// Human-oriented summary lines for standard output.
pub fn summary_lines(outcome: &RunOutcome) -> Vec<String> {
    let mut lines = vec![format!(
        "wrote {} rows to {} (metadata: {})",
        outcome.rows.len(),
        outcome.csv_path.display(),
        outcome.metadata_path.display()
    )];
    if outcome.compared_rows > 0 {
        lines.push(format!(
            "analytic/simulation agreement: {} of {} rows within the allowance",
            outcome.compared_rows - outcome.violations.len(),
            outcome.compared_rows
        ));
        for violation in outcome.violations.iter().take(20) {
            lines.push(format!(
                "  disagreement at row {}: gap {:.6} exceeds allowance {:.6}",
                violation.row, violation.deviation, violation.allowance
            ));
        }
        if outcome.violations.len() > 20 {
            lines.push(format!(
                "  ... and {} more (see the metadata footer)",
                outcome.violations.len() - 20
            ));
        }
    }
    lines
}

// ---------------------------------------------------------------------------
// Grid expansion
// ---------------------------------------------------------------------------

/// A grid point: the applied scenario plus the raw coordinates that produced
/// it.
struct GridPoint {
    coordinates: Vec<f64>,
    values: Scenario,
}

/// Row-major iterator over the sweep grid (last axis fastest).
struct GridPoints<'a> {
    spec: &'a ExperimentSpec,
    indices: Vec<usize>,
    exhausted: bool,
}

impl<'a> GridPoints<'a> {
    fn new(spec: &'a ExperimentSpec) -> Self {
        GridPoints {
            spec,
            indices: vec![0; spec.axes.len()],
            exhausted: spec.axes.iter().any(|axis| axis.values.is_empty()),
        }
    }
}

impl Iterator for GridPoints<'_> {
    type Item = GridPoint;

    fn next(&mut self) -> Option<GridPoint> {
        if self.exhausted {
            return None;
        }
        let mut scenario = self.spec.scenario;
        let mut coordinates = Vec::with_capacity(self.indices.len());
        for (slot, sweep) in self.indices.iter().zip(&self.spec.axes) {
            let value = sweep.values[*slot];
            coordinates.push(value);
            scenario.apply(sweep.axis, value);
        }
        // Advance the odometer, last axis fastest.
        self.exhausted = true;
        for (slot, sweep) in self.indices.iter_mut().zip(&self.spec.axes).rev() {
            *slot += 1;
            if *slot < sweep.values.len() {
                self.exhausted = false;
                break;
            }
            *slot = 0;
        }
        Some(GridPoint {
            coordinates,
            values: scenario,
        })
    }
}

// ---------------------------------------------------------------------------
// Metric evaluation
// ---------------------------------------------------------------------------

/// Evaluates the analytic route for one grid point.
fn analytic_value(
    metric: MetricKind,
    scenario: &Scenario,
    quadrature: &QuadratureSpec,
) -> Result<f64> {
    let value = match metric {
        MetricKind::GainAverage => gain_integral(
            scenario.params.pathloss_exponent,
            scenario.tx_pattern.directivity,
        )?,
        MetricKind::Connection => connection_probability(
            &scenario.params,
            &scenario.link,
            &scenario.tx_pattern,
            &scenario.rx_pattern,
        )?,
        MetricKind::Rate => data_rate(
            &scenario.params,
            &scenario.link,
            &scenario.tx_pattern,
            &scenario.rx_pattern,
            quadrature,
        )?,
        MetricKind::Degree => analytic_degree(scenario, quadrature)?,
    };
    Ok(value)
}

/// Analytic mean degree: the exact closed form where it applies (symmetric
/// patterns, fourth-power path law, no offset, interference present),
/// otherwise the quadrature route.
fn analytic_degree(scenario: &Scenario, quadrature: &QuadratureSpec) -> Result<f64> {
    let symmetric = scenario.tx_pattern.directivity == scenario.rx_pattern.directivity;
    if symmetric {
        match mean_degree_closed_form(&scenario.params, scenario.tx_pattern.directivity) {
            Ok(value) => return Ok(value),
            Err(beamnet::Error::Domain { .. }) => {}
            Err(err) => return Err(err.into()),
        }
    }
    mean_degree_numeric(
        &scenario.params,
        &scenario.tx_pattern,
        &scenario.rx_pattern,
        quadrature,
    )
    .map_err(Into::into)
}

/// Runs the Monte Carlo route for one grid point.  Row `i` simulates with
/// seed `spec.seed + i`, so rows are independent and the whole table is
/// reproducible from the master seed.
fn simulate(
    spec: &ExperimentSpec,
    scenario: &Scenario,
    row: u64,
) -> Result<(EstimateWithError, Option<f64>)> {
    let config = SimulationConfig {
        disk_radius: spec.disk_radius,
        trials: spec.trials,
        rng_seed: spec.seed.wrapping_add(row),
        params: scenario.params,
        tx_pattern: scenario.tx_pattern,
        rx_pattern: scenario.rx_pattern,
    };
    match spec.metric {
        MetricKind::Connection => {
            let estimate = estimate_connection_probability(&config, &scenario.link)?;
            Ok((estimate, None))
        }
        MetricKind::Rate => {
            let estimate = estimate_data_rate(&config, &scenario.link)?;
            Ok((estimate, None))
        }
        MetricKind::Degree => {
            let detailed = estimate_mean_degree_detailed(&config)?;
            Ok((detailed.degree, Some(detailed.connected_fraction.estimate)))
        }
        MetricKind::GainAverage => Err(Error::config(
            "the gain average has no simulation route",
        )),
    }
}

/// Flags rows where the two routes disagree beyond the allowance.
fn check_agreement(
    spec: &ExperimentSpec,
    rows: &[ResultRow],
) -> (usize, Vec<AgreementViolation>) {
    let mut compared = 0;
    let mut violations = Vec::new();
    for (index, row) in rows.iter().enumerate() {
        let (Some(analytic), Some(simulated)) = (row.analytic, &row.simulated) else {
            continue;
        };
        compared += 1;
        let deviation = (analytic - simulated.estimate).abs();
        let allowance = spec.agreement_factor * simulated.std_error + AGREEMENT_FLOOR;
        if deviation > allowance {
            violations.push(AgreementViolation {
                row: index,
                deviation,
                allowance,
            });
        }
    }
    (compared, violations)
}

// ---------------------------------------------------------------------------
// Artifact rendering
// ---------------------------------------------------------------------------

/// CSV column names for a spec, in emission order.
pub fn column_names(spec: &ExperimentSpec) -> Vec<String> {
    let mut columns: Vec<String> = spec
        .axes
        .iter()
        .map(|sweep| sweep.axis.name().to_string())
        .collect();
    if spec.include_analytic {
        columns.push("analytic".to_string());
    }
    if spec.include_monte_carlo {
        columns.push("mc_estimate".to_string());
        columns.push("mc_std_error".to_string());
        if spec.metric == MetricKind::Degree {
            columns.push("mc_success_fraction".to_string());
        }
        columns.push("trials".to_string());
    }
    columns
}

/// Shortest round-trip decimal rendering, shared by every numeric column.
fn format_number(value: f64) -> String {
    format!("{value}")
}

/// Renders the full CSV as bytes.
fn render_csv(spec: &ExperimentSpec, columns: &[String], rows: &[ResultRow]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_error = |err: csv::Error| Error::config(format!("cannot render CSV: {err}"));
    writer.write_record(columns).map_err(io_error)?;
    for row in rows {
        let mut record: Vec<String> = Vec::with_capacity(columns.len());
        for (sweep, &value) in spec.axes.iter().zip(&row.coordinates) {
            if sweep.axis.is_integer_valued() {
                record.push(format!("{}", value as i64));
            } else {
                record.push(format_number(value));
            }
        }
        if let Some(analytic) = row.analytic {
            record.push(format_number(analytic));
        }
        if let Some(simulated) = &row.simulated {
            record.push(format_number(simulated.estimate));
            record.push(format_number(simulated.std_error));
            if spec.metric == MetricKind::Degree {
                let fraction = row.success_fraction.unwrap_or(0.0);
                record.push(format_number(fraction));
            }
            record.push(format!("{}", simulated.trials_used));
        }
        writer.write_record(&record).map_err(io_error)?;
    }
    writer
        .into_inner()
        .map_err(|err| Error::config(format!("cannot render CSV: {err}")))
}

/// Renders the metadata sidecar: the spec as re-runnable config TOML plus a
/// comment footer with the agreement summary.
fn render_metadata(
    spec: &ExperimentSpec,
    columns: &[String],
    rows: &[ResultRow],
    compared_rows: usize,
    violations: &[AgreementViolation],
) -> String {
    let mut text = String::from(
        "# Metadata sidecar: the lines below are the resolved experiment\n\
         # specification; `beamnet run --config <this file>` repeats the run.\n",
    );
    text.push_str(&crate::config::serialize_spec(spec));
    text.push_str("\n# ---- run summary ----\n");
    text.push_str(&format!("# rows: {}\n", rows.len()));
    text.push_str(&format!("# columns: {}\n", columns.join(", ")));
    if compared_rows > 0 {
        text.push_str(&format!(
            "# agreement: |analytic - mc_estimate| <= {} * mc_std_error + {:e} \
             held at {} of {} rows\n",
            spec.agreement_factor,
            AGREEMENT_FLOOR,
            compared_rows - violations.len(),
            compared_rows
        ));
        for violation in violations {
            let row = &rows[violation.row];
            let coordinates: Vec<String> = spec
                .axes
                .iter()
                .zip(&row.coordinates)
                .map(|(sweep, value)| format!("{}={}", sweep.axis.name(), value))
                .collect();
            text.push_str(&format!(
                "# disagreement at row {} ({}): analytic {} vs estimate {} \
                 (std error {}), gap {:.6e} > allowance {:.6e}\n",
                violation.row,
                coordinates.join(", "),
                format_number(row.analytic.unwrap_or(f64::NAN)),
                format_number(row.simulated.as_ref().map_or(f64::NAN, |s| s.estimate)),
                format_number(row.simulated.as_ref().map_or(f64::NAN, |s| s.std_error)),
                violation.deviation,
                violation.allowance
            ));
        }
    } else {
        text.push_str("# agreement: not checked (a single route ran)\n");
    }
    text
}
