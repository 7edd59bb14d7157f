//! Mean number of transmitters whose signal the typical receiver can decode.
//!
//! The degree is the connection probability integrated against the
//! transmitter intensity over the whole plane and over the uniform
//! orientation of each transmitter:
//!
//! ```text
//! mu = (rho / 2pi) * integral over orientation, arrival angle, radius of
//!      t * H(t, theta, phi) dt dtheta dphi
//! ```
//!
//! At `eta = 4` with zero path-loss offset the radial integral is Gaussian
//! and collapses to a closed form in the scaled complementary error
//! function; [`mean_degree_numeric`] keeps the triple quadrature as the
//! general-exponent route and as an independent check of the collapse.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{AntennaPattern, SystemParams};
use crate::specfun::{erfcx, integrate_1d, integrate_2d, QuadratureSpec};

use super::gain_integral::gain_integral;
use super::outage::reject_degenerate_channel;

/// E-folds of decay demanded of the radial integrand before truncation.
const TAIL_EFOLDS: f64 = 45.0;

/// Reduced argument of the closed-form mean degree.
///
/// The angular dependence of the radial Gaussian integral cancels between
/// its two coefficients, leaving the single scalar
///
/// ```text
/// z = sqrt(gamma P / N) * W^2 * rho / 16
/// ```
///
/// (`W` the circular gain average of the shared pattern shape) that carries
/// every parameter except the threshold and orthogonality prefactor. Valid
/// only where the radial integral is Gaussian: path-loss exponent 4, zero
/// offset, positive orthogonality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeClosedFormInputs {
    /// Reduced argument (>= 0; infinite in the zero-noise limit).
    pub z: f64,
}

impl DegreeClosedFormInputs {
    /// Computes the reduced argument for a network whose transmitters and
    /// receivers all share one pattern shape of the given directivity.
    ///
    /// # Errors
    ///
    /// Domain errors when the closed form does not apply: path-loss
    /// exponent not equal to 4, nonzero path-loss offset, or zero
    /// orthogonality. Invalid directivity propagates from the gain average.
    pub fn from_params(params: &SystemParams, directivity: f64) -> Result<Self> {
        params.validate()?;
        if params.pathloss_exponent != 4.0 {
            return Err(Error::Domain {
                what: format!(
                    "mean-degree closed form requires path-loss exponent 4, got {}",
                    params.pathloss_exponent
                ),
            });
        }
        if params.pathloss_offset != 0.0 {
            return Err(Error::Domain {
                what: "mean-degree closed form requires zero path-loss offset".to_string(),
            });
        }
        if params.orthogonality == 0.0 {
            return Err(Error::Domain {
                what: "mean-degree closed form requires positive orthogonality".to_string(),
            });
        }
        let averaged_gain = gain_integral(4.0, directivity)?;
        let z = (params.orthogonality * params.power / params.noise).sqrt()
            * averaged_gain
            * averaged_gain
            * params.density
            / 16.0;
        Ok(DegreeClosedFormInputs { z })
    }
}

/// Closed-form mean degree at path-loss exponent 4 and zero offset:
///
/// ```text
/// mu = 2 / sqrt(pi q gamma) * z * erfcx(z)
/// ```
///
/// Strictly increasing in density and approaching `2 / (pi sqrt(q gamma))`
/// as the density (or the reduced argument by any route, including the
/// zero-noise limit) grows without bound.
///
/// # Errors
///
/// Domain errors for parameters outside the closed form's validity
/// (see [`DegreeClosedFormInputs::from_params`]) and for a zero threshold,
/// where the degree diverges.
pub fn mean_degree_closed_form(params: &SystemParams, directivity: f64) -> Result<f64> {
    let inputs = DegreeClosedFormInputs::from_params(params, directivity)?;
    if params.threshold == 0.0 {
        return Err(Error::Domain {
            what: "mean degree diverges for a zero detection threshold".to_string(),
        });
    }
    let prefactor = 2.0 / (PI * params.threshold * params.orthogonality).sqrt();
    if !inputs.z.is_finite() {
        // Zero-noise limit: z * erfcx(z) -> 1/sqrt(pi).
        return Ok(prefactor / PI.sqrt());
    }
    Ok(prefactor * inputs.z * erfcx(inputs.z))
}

/// Mean degree by direct triple quadrature of the connection probability,
/// valid for any path-loss exponent above 2 (zero offset).
///
/// The radial factor for a fixed angle pair is
/// `t * exp(-a t^eta - c t^2)` with `a` the noise coefficient and `c` the
/// interference coefficient; it is integrated to the radius where the
/// surviving factor has decayed by [`TAIL_EFOLDS`] e-folds, then averaged
/// over both angles by iterated quadrature.
///
/// # Errors
///
/// Domain errors for a nonzero offset, a zero threshold (degree diverges),
/// and the degenerate zero-noise zero-orthogonality channel. Quadrature
/// failures propagate.
pub fn mean_degree_numeric(
    params: &SystemParams,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    quad: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    tx_pattern.validate()?;
    rx_pattern.validate()?;
    quad.validate()?;
    reject_degenerate_channel(params)?;
    if params.pathloss_offset != 0.0 {
        return Err(Error::Domain {
            what: "numeric mean degree requires zero path-loss offset".to_string(),
        });
    }
    if params.threshold == 0.0 {
        return Err(Error::Domain {
            what: "mean degree diverges for a zero detection threshold".to_string(),
        });
    }
    if params.density == 0.0 {
        return Ok(0.0);
    }
    let eta = params.pathloss_exponent;
    let interference_scale = params.density
        * gain_integral(eta, tx_pattern.directivity)?
        * gain_integral(eta, rx_pattern.directivity)?
        / (2.0 * eta * (2.0 * PI / eta).sin());
    let noise_scale = params.threshold * params.noise / params.power;
    let gamma_times_q = params.threshold * params.orthogonality;

    let inner_spec = quad.tightened(100.0);
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let (value, _) = integrate_2d(
        |theta, phi| {
            let gain_product = tx_pattern.gain(theta + PI - phi) * rx_pattern.gain(theta);
            if gain_product <= 0.0 {
                // Null-aligned direction pair: nothing decodable there.
                return 0.0;
            }
            let noise_coefficient = noise_scale / gain_product;
            let interference_coefficient =
                interference_scale * (gamma_times_q / gain_product).powf(2.0 / eta);
            let mut radius_cap = f64::INFINITY;
            if noise_coefficient > 0.0 {
                radius_cap = (TAIL_EFOLDS / noise_coefficient).powf(1.0 / eta);
            }
            if interference_coefficient > 0.0 {
                radius_cap = radius_cap.min((TAIL_EFOLDS / interference_coefficient).sqrt());
            }
            let radial = integrate_1d(
                |t| {
                    t * (-noise_coefficient * t.powf(eta)
                        - interference_coefficient * t * t)
                        .exp()
                },
                0.0,
                radius_cap,
                &inner_spec,
            );
            match radial {
                Ok((radial_value, _)) => radial_value,
                Err(error) => {
                    let mut slot = inner_failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(error);
                    }
                    0.0
                }
            }
        },
        (0.0, 2.0 * PI),
        (0.0, 2.0 * PI),
        quad,
    )?;
    if let Some(error) = inner_failure.into_inner() {
        return Err(error);
    }
    Ok(params.density / (2.0 * PI) * value)
}
