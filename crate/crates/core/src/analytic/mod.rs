//! Closed-form and quadrature-based network statistics.
//!
//! Everything here evaluates expectations over the network ensemble —
//! interferer positions, orientations, and fadings — without sampling it:
//! the Monte Carlo estimators in [`crate::montecarlo`] target exactly these
//! quantities, and the two layers validate each other.

mod degree;
mod gain_integral;
mod outage;

pub use degree::{mean_degree_closed_form, mean_degree_numeric, DegreeClosedFormInputs};
pub use gain_integral::{gain_integral, gain_integral_taylor};
pub use outage::{connection_probability, data_rate, laplace_exponent, LaplaceArgument};
