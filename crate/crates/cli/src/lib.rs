//! Library half of the `beamnet` command-line tool: experiment
//! specifications, config parsing, and the sweep runner.
//!
//! The binary in `main.rs` is a thin argument-parsing shell over this
//! crate; everything it does — resolving a spec from defaults, config file,
//! and overrides, then running it and writing the CSV plus metadata
//! sidecar — is available programmatically:
//!
//! ```no_run
//! use beamnet_cli::config::{parse_config, ExperimentSpec};
//! use beamnet_cli::experiment::run_experiment;
//!
//! let spec: ExperimentSpec = parse_config("experiment.toml".as_ref()).unwrap();
//! let outcome = run_experiment(&spec).unwrap();
//! println!("{} rows", outcome.rows.len());
//! ```

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod config;
pub mod error;
pub mod experiment;

pub use config::{parse_config, ExperimentKind, ExperimentSpec, MetricKind};
pub use error::{Error, Result};
pub use experiment::{run_experiment, RunOutcome};
