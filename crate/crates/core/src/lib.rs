//! Connection probability, ergodic rate, and mean degree of wireless ad hoc
//! networks whose nodes carry randomly oriented directional antennas.
//!
//! The model: transmitters form a planar Poisson field of the given
//! density; each radiates a normalized pattern `1 + d cos(n theta)` in a
//! uniformly random direction; path loss is `1/(x^eta + eps)`; every link
//! fades independently with a unit-mean exponential power gain (Rayleigh
//! amplitude); a receiver decodes when the signal-to-interference-plus-noise
//! ratio clears a threshold, with interference discounted by an
//! orthogonality factor.
//!
//! Every statistic is available by two independent routes:
//!
//! * [`analytic`] — exact closed forms where they exist (zero path-loss
//!   offset, and exponent 4 for the degree), adaptive quadrature elsewhere;
//! * [`montecarlo`] — seeded, reproducible sampling of network realizations
//!   on a disk, with standard errors.
//!
//! The two layers validate each other, and the supporting numeric kernels
//! (Gauss hypergeometric, scaled complementary error function, gamma,
//! adaptive Gauss–Kronrod quadrature) live in [`specfun`].
//!
//! # Example
//!
//! ```
//! use beamnet::analytic::connection_probability;
//! use beamnet::model::{AntennaPattern, LinkGeometry, SystemParams};
//!
//! // A transmitter at distance 0.4 on the receiver boresight, aimed back
//! // at the receiver, both ends using a single-lobe pattern with d = 0.5.
//! let link = LinkGeometry {
//!     distance: 0.4,
//!     angular_position: 0.0,
//!     orientation: std::f64::consts::PI,
//! };
//! let pattern = AntennaPattern::single_lobe(0.5);
//! let h = connection_probability(
//!     &SystemParams::default(),
//!     &link,
//!     &pattern,
//!     &pattern,
//! )
//! .unwrap();
//! assert!((h - 0.748142).abs() < 1e-5);
//! ```

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod analytic;
mod error;
pub mod model;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{
    path_loss, sinr, AntennaPattern, Interferer, LinkGeometry, NetworkRealization, SystemParams,
};
pub use montecarlo::{
    estimate_connection_probability, estimate_data_rate, estimate_mean_degree,
    estimate_mean_degree_detailed, DegreeEstimate, EstimateWithError, SimulationConfig,
};
pub use specfun::QuadratureSpec;
