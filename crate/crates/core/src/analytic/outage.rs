//! Connection probability and ergodic data rate of a single link embedded
//! in the random interference field.
//!
//! Both quantities average over the Rayleigh fading of the link itself and
//! over every source of interference randomness: interferer positions
//! (Poisson in the plane), orientations (uniform), and fadings
//! (exponential). The averaging over the interference collapses into the
//! Laplace transform of the aggregate interference power, whose exponent is
//! what [`laplace_exponent`] computes.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{path_loss, AntennaPattern, LinkGeometry, SystemParams};
use crate::specfun::{integrate_1d, integrate_2d, QuadratureSpec};

use super::gain_integral::gain_integral;

/// Number of e-folds of decay required of the rate integrand before the
/// semi-infinite integral is truncated; `exp(-45)` is far below any
/// quadrature tolerance the crate accepts.
const TAIL_EFOLDS: f64 = 45.0;

/// Argument of the interference Laplace transform: the composite variable
/// `s = q gamma (t^eta + eps) / (G Gbar)` combining the threshold, the
/// orthogonality factor, and the tagged link's attenuation and gains.
///
/// The `gamma = 0` case never reaches the transform (the interference term
/// drops out entirely), so `s` is strictly positive wherever the transform
/// matters; `s = 0` is still accepted and maps to a zero exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceArgument {
    /// Transform argument (finite, >= 0).
    pub s: f64,
}

impl LaplaceArgument {
    /// Checks the argument is finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::invalid("s", "must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Rejects the parameter combination `noise = 0` and `orthogonality = 0`,
/// under which the model is meaningless: connection is certain at every
/// distance and the mean degree diverges.
pub(crate) fn reject_degenerate_channel(params: &SystemParams) -> Result<()> {
    if params.noise == 0.0 && params.orthogonality == 0.0 {
        return Err(Error::Domain {
            what: "noise and orthogonality are both zero: every link connects with \
                   probability 1 and network statistics diverge"
                .to_string(),
        });
    }
    Ok(())
}

/// Exponent `I(s)` of the interference Laplace transform, normalized so the
/// transform itself is `exp(-(density / 2pi) * I(s))`.
///
/// With zero path-loss offset the two-angle average collapses to the exact
/// closed form
///
/// ```text
/// I(s) = pi s^(2/eta) W_tx W_rx / (eta sin(2pi/eta))
/// ```
///
/// where `W` is [`gain_integral`] of the respective pattern. With a positive
/// offset no closed form exists and the two-dimensional angular average
///
/// ```text
/// I(s) = integral over (theta, phi) of
///        pi sigma (eps + sigma)^(2/eta - 1) / (eta sin(2pi/eta)),
/// sigma = s * tx_gain(theta + pi - phi) * rx_gain(theta)
/// ```
///
/// is evaluated by iterated adaptive quadrature at default tolerances.
pub fn laplace_exponent(
    params: &SystemParams,
    s: LaplaceArgument,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
) -> Result<f64> {
    params.validate()?;
    tx_pattern.validate()?;
    rx_pattern.validate()?;
    s.validate()?;
    if s.s == 0.0 {
        return Ok(0.0);
    }
    if params.pathloss_offset == 0.0 {
        let eta = params.pathloss_exponent;
        let averaged_gains = gain_integral(eta, tx_pattern.directivity)?
            * gain_integral(eta, rx_pattern.directivity)?;
        return Ok(radial_prefactor(eta) * s.s.powf(2.0 / eta) * averaged_gains);
    }
    laplace_exponent_quadrature(
        params,
        s.s,
        tx_pattern,
        rx_pattern,
        &QuadratureSpec::default(),
    )
}

/// Common factor `pi / (eta sin(2pi/eta))` of the radial interference
/// integral; finite for every `eta > 2`.
#[inline]
fn radial_prefactor(eta: f64) -> f64 {
    PI / (eta * (2.0 * PI / eta).sin())
}

/// Two-dimensional angular average behind [`laplace_exponent`] for a
/// positive path-loss offset. Also valid at offset zero, where it reproduces
/// the closed form and serves as its independent cross-check.
fn laplace_exponent_quadrature(
    params: &SystemParams,
    s: f64,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let eta = params.pathloss_exponent;
    let offset = params.pathloss_offset;
    let prefactor = radial_prefactor(eta);
    let shape = 2.0 / eta - 1.0;
    let (value, _) = integrate_2d(
        |theta, phi| {
            let sigma = s * tx_pattern.gain(theta + PI - phi) * rx_pattern.gain(theta);
            if sigma <= 0.0 {
                // Null-aligned direction pair: no interference contribution,
                // and (offset + 0)^(shape) must not be evaluated at offset 0.
                0.0
            } else {
                prefactor * sigma * (offset + sigma).powf(shape)
            }
        },
        (0.0, 2.0 * PI),
        (0.0, 2.0 * PI),
        quad,
    )?;
    Ok(value)
}

/// Probability that the link's SINR reaches the detection threshold,
/// averaged over fading, interferer placement, orientations, and interferer
/// fadings.
///
/// The Rayleigh assumption turns the tail probability into a product of a
/// noise factor and the interference Laplace transform:
///
/// ```text
/// H = exp(-q N (t^eta + eps) / (P G Gbar)) * exp(-(rho/2pi) I(s)),
/// s = q gamma (t^eta + eps) / (G Gbar)
/// ```
///
/// with `G` the transmit gain at the departure angle and `Gbar` the receive
/// gain at the arrival angle. Zero-offset parameters evaluate entirely in
/// closed form; a positive offset computes `I` by quadrature at default
/// tolerances.
///
/// Two geometric degeneracies resolve by their limits instead of erroring:
/// zero distance with zero offset yields probability 1 (unbounded received
/// power), and a null-aligned gain product yields probability 0.
pub fn connection_probability(
    params: &SystemParams,
    link: &LinkGeometry,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
) -> Result<f64> {
    params.validate()?;
    link.validate()?;
    tx_pattern.validate()?;
    rx_pattern.validate()?;
    reject_degenerate_channel(params)?;
    if link.distance == 0.0 && params.pathloss_offset == 0.0 {
        return Ok(1.0);
    }
    let gain_product =
        tx_pattern.gain(link.departure_angle()) * rx_pattern.gain(link.angular_position);
    if gain_product <= 0.0 {
        return Ok(0.0);
    }
    let attenuation = 1.0 / path_loss(params, link.distance)?;
    let noise_exponent =
        params.threshold * params.noise * attenuation / (params.power * gain_product);
    let s = LaplaceArgument {
        s: params.threshold * params.orthogonality * attenuation / gain_product,
    };
    let interference_exponent =
        params.density / (2.0 * PI) * laplace_exponent(params, s, tx_pattern, rx_pattern)?;
    Ok((-noise_exponent - interference_exponent).exp())
}

/// Ergodic rate `E[ln(1 + SINR)]` of the link, in nats per channel use.
///
/// Writing the expectation as the integral of the tail probability and
/// substituting `qhat = e^x - 1` gives
///
/// ```text
/// v = integral over x in [0, inf) of
///     exp(-qhat N (t^eta + eps)/(P G Gbar)) * exp(-(rho/2pi) I(qhat B)),
/// B = gamma (t^eta + eps) / (G Gbar)
/// ```
///
/// Truncation replaces the semi-infinite domain by `[0, X]` with `X` grown
/// adaptively until the integrand falls below one percent of the absolute
/// tolerance; the integrand decays at least double-exponentially in `x`, so
/// the truncated tail is negligible against the quadrature target.
///
/// # Errors
///
/// A singular-input error when the rate diverges: zero distance with zero
/// offset (unbounded SINR). A domain error for the meaningless zero-noise,
/// zero-orthogonality channel. Quadrature failures propagate.
pub fn data_rate(
    params: &SystemParams,
    link: &LinkGeometry,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
    quad: &QuadratureSpec,
) -> Result<f64> {
    params.validate()?;
    link.validate()?;
    tx_pattern.validate()?;
    rx_pattern.validate()?;
    quad.validate()?;
    reject_degenerate_channel(params)?;
    if link.distance == 0.0 && params.pathloss_offset == 0.0 {
        return Err(Error::SingularInput {
            what: "ergodic rate at zero distance with zero path-loss offset".to_string(),
        });
    }
    let gain_product =
        tx_pattern.gain(link.departure_angle()) * rx_pattern.gain(link.angular_position);
    if gain_product <= 0.0 {
        return Ok(0.0);
    }
    let eta = params.pathloss_exponent;
    let attenuation = 1.0 / path_loss(params, link.distance)?;
    // Coefficients per unit qhat of the noise exponent and of the Laplace
    // transform argument.
    let noise_coefficient = params.noise * attenuation / (params.power * gain_product);
    let laplace_coefficient = params.orthogonality * attenuation / gain_product;
    // Zero-offset interference exponent is interference_scale * qhat^(2/eta);
    // with a positive offset the same expression is its large-qhat asymptote
    // and still provides the truncation scale.
    let averaged_gains = gain_integral(eta, tx_pattern.directivity)?
        * gain_integral(eta, rx_pattern.directivity)?;
    let interference_scale = params.density / (2.0 * PI)
        * radial_prefactor(eta)
        * averaged_gains
        * laplace_coefficient.powf(2.0 / eta);
    if noise_coefficient == 0.0 && interference_scale == 0.0 {
        // Reachable with zero noise and zero density: the SINR is unbounded
        // in every realization and the expectation does not exist.
        return Err(Error::SingularInput {
            what: "ergodic rate diverges: the integrand has no decay channel \
                   (zero noise and no interferer population)"
                .to_string(),
        });
    }

    let offset = params.pathloss_offset;
    let inner_spec = quad.tightened(10.0);
    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |x: f64| -> f64 {
        let qhat = x.exp_m1();
        let interference_exponent = if offset == 0.0 {
            interference_scale * qhat.powf(2.0 / eta)
        } else {
            match laplace_exponent_quadrature(
                params,
                qhat * laplace_coefficient,
                tx_pattern,
                rx_pattern,
                &inner_spec,
            ) {
                Ok(exponent) => params.density / (2.0 * PI) * exponent,
                Err(error) => {
                    let mut slot = inner_failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(error);
                    }
                    return 0.0;
                }
            }
        };
        (-noise_coefficient * qhat - interference_exponent).exp()
    };

    // Analytic first guess for the truncation point from whichever decay
    // channel exists, refined by doubling until the integrand itself is
    // negligible (the offset > 0 exponent can undershoot its asymptote).
    let mut upper = 1.0f64;
    if noise_coefficient > 0.0 {
        upper = upper.max((TAIL_EFOLDS / noise_coefficient).ln_1p());
    }
    if interference_scale > 0.0 {
        let qhat_scale = (TAIL_EFOLDS / interference_scale).powf(eta / 2.0);
        if qhat_scale.is_finite() {
            upper = if noise_coefficient > 0.0 {
                upper.min(qhat_scale.ln_1p())
            } else {
                qhat_scale.ln_1p()
            };
        }
    }
    let negligible = 0.01 * quad.abs_tol;
    let mut doublings = 0;
    while integrand(upper) > negligible && doublings < 64 {
        upper *= 2.0;
        doublings += 1;
    }

    let (value, _) = integrate_1d(integrand, 0.0, upper, quad)?;
    if let Some(error) = inner_failure.into_inner() {
        return Err(error);
    }
    Ok(value)
}
