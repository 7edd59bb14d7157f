//! Physical parameters, antenna/link geometry, and exact SINR evaluation.
//!
//! The model describes a planar network in which transmitters form a Poisson
//! point process of intensity `density`; every node radiates with the same
//! power through an anisotropic antenna whose gain depends on direction, and
//! signals decay with distance according to a power law.  A receiver sits at
//! the origin with its antenna boresight along the positive x-axis; every
//! other angle in the crate is measured against that reference frame.

use crate::error::{Error, Result};

/// Scalar physical parameters shared by every node in the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Common transmit power P (> 0).
    pub power: f64,
    /// Long-time average noise power N (>= 0).
    pub noise: f64,
    /// SINR decoding threshold q (> 0): a link is considered connected when
    /// its SINR is at least `threshold`.
    pub threshold: f64,
    /// Interference coupling factor gamma in [0, 1]: the fraction of every
    /// interferer's received power that leaks into the desired channel.
    /// Zero models perfectly orthogonal channels (an interference-free
    /// system); one models full-overlap transmissions.
    pub orthogonality: f64,
    /// Path-loss exponent eta (> 2): received power decays like
    /// `1/(x^eta + epsilon)`.  Values of 2 or below make the aggregate
    /// interference of an infinite network diverge, so they are rejected.
    pub pathloss_exponent: f64,
    /// Path-loss offset epsilon (>= 0).  Zero selects the singular law
    /// `1/x^eta` used by all closed forms; positive values bound the
    /// received power at zero distance.
    pub pathloss_offset: f64,
    /// Transmitter density rho (>= 0), in nodes per unit area.
    pub density: f64,
}

impl Default for SystemParams {
    /// The canonical parameter set used by the shipped experiment recipes:
    /// unit power, noise, threshold, and density; orthogonality 0.3; a
    /// fourth-power path law with no offset.
    fn default() -> Self {
        SystemParams {
            power: 1.0,
            noise: 1.0,
            threshold: 1.0,
            orthogonality: 0.3,
            pathloss_exponent: 4.0,
            pathloss_offset: 0.0,
            density: 1.0,
        }
    }
}

impl SystemParams {
    /// Checks every invariant, returning an error naming the first violated
    /// field.
    pub fn validate(&self) -> Result<()> {
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::invalid("power", "must be a positive finite number"));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::invalid("noise", "must be finite and non-negative"));
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return Err(Error::invalid(
                "threshold",
                "must be a positive finite number",
            ));
        }
        if !(0.0..=1.0).contains(&self.orthogonality) {
            return Err(Error::invalid("orthogonality", "must lie in [0, 1]"));
        }
        if !(self.pathloss_exponent > 2.0) || !self.pathloss_exponent.is_finite() {
            return Err(Error::invalid(
                "pathloss_exponent",
                "must exceed 2 for the interference integrals to converge",
            ));
        }
        if !(self.pathloss_offset >= 0.0) || !self.pathloss_offset.is_finite() {
            return Err(Error::invalid(
                "pathloss_offset",
                "must be finite and non-negative",
            ));
        }
        if !(self.density >= 0.0) || !self.density.is_finite() {
            return Err(Error::invalid("density", "must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Shape of a node's radiation pattern.
///
/// The gain in a direction `theta` (radians, measured from the antenna's
/// boresight) is `1 + directivity * cos(lobes * theta)`.  The pattern
/// integrates to `2 pi` over a full turn for every parameter choice, so
/// directivity redistributes power toward the lobes without amplifying the
/// total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Directivity factor d in [0, 1]: 0 is isotropic, 1 concentrates all
    /// the pattern's variation into lobes with perfect nulls between them.
    pub directivity: f64,
    /// Number of radiation lobes n (>= 1).
    pub lobes: u32,
}

impl AntennaPattern {
    /// An isotropic pattern (unit gain in every direction).
    pub const fn isotropic() -> Self {
        AntennaPattern {
            directivity: 0.0,
            lobes: 1,
        }
    }

    /// A pattern with the given directivity and a single lobe.
    pub const fn single_lobe(directivity: f64) -> Self {
        AntennaPattern {
            directivity,
            lobes: 1,
        }
    }

    /// Checks the pattern invariants.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.directivity) {
            return Err(Error::invalid("directivity", "must lie in [0, 1]"));
        }
        if self.lobes < 1 {
            return Err(Error::invalid("lobes", "must be at least 1"));
        }
        Ok(())
    }

    /// Antenna gain in the direction `angle` radians from boresight.
    ///
    /// Total over all angles: periodic with period `2 pi`, accepts any real
    /// angle (no range reduction is required), and returns a value in
    /// `[1 - directivity, 1 + directivity]`.  The result is clamped at zero
    /// to absorb the last-ulp negatives that floating-point cosine can
    /// produce at the pattern nulls when `directivity == 1`.
    #[inline]
    pub fn gain(&self, angle: f64) -> f64 {
        (1.0 + self.directivity * (self.lobes as f64 * angle).cos()).max(0.0)
    }
}

/// Position and orientation of a transmitter relative to the origin receiver.
///
/// The transmitter sits at polar coordinates (`distance`,
/// `angular_position`) and points its antenna in the absolute direction
/// `orientation`, both angles measured from the receiver's boresight (the
/// positive x-axis).  With this convention the receiver's gain toward the
/// transmitter is evaluated at `angular_position`, and the transmitter's
/// gain toward the receiver at `angular_position + pi - orientation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Distance t from the receiver (>= 0).
    pub distance: f64,
    /// Angle theta of the transmitter as seen from the receiver (radians).
    pub angular_position: f64,
    /// Absolute direction phi the transmitter's antenna points (radians).
    pub orientation: f64,
}

impl LinkGeometry {
    /// Checks the geometry invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.distance >= 0.0) || !self.distance.is_finite() {
            return Err(Error::invalid(
                "distance",
                "must be finite and non-negative",
            ));
        }
        if !self.angular_position.is_finite() {
            return Err(Error::invalid("angular_position", "must be finite"));
        }
        if !self.orientation.is_finite() {
            return Err(Error::invalid("orientation", "must be finite"));
        }
        Ok(())
    }

    /// Angle at which the transmitter's own pattern is evaluated when
    /// radiating toward the origin receiver.
    #[inline]
    pub fn departure_angle(&self) -> f64 {
        self.angular_position + std::f64::consts::PI - self.orientation
    }
}

/// One interfering transmitter of a sampled network: its link geometry plus
/// the channel fading drawn for the slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    /// Geometry of the interferer relative to the origin receiver.
    pub link: LinkGeometry,
    /// Squared fading amplitude |h|^2 (> 0), exponential with unit mean.
    pub fading: f64,
}

/// One sampled instance of the network: the tagged link under study plus
/// every interferer alive in the same slot.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    /// Geometry of the link whose SINR is being evaluated.
    pub tagged_link: LinkGeometry,
    /// Fading |h|^2 of the tagged link (> 0).
    pub tagged_fading: f64,
    /// Every interfering transmitter in the slot.
    pub interferers: Vec<Interferer>,
}

/// Received-power attenuation at distance `x`: `1 / (x^eta + epsilon)`.
///
/// Strictly decreasing in `x`.  Fails with a singular-input error when
/// `x == 0` and the offset is zero, because an unbounded received power
/// would propagate NaNs through every estimator downstream.
#[inline]
pub fn path_loss(params: &SystemParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid("distance", "must be non-negative"));
    }
    if x == 0.0 && params.pathloss_offset == 0.0 {
        return Err(Error::SingularInput {
            what: "path loss at zero distance with zero path-loss offset".into(),
        });
    }
    let eta = params.pathloss_exponent;
    // x^4 is by far the most common exponent; square twice instead of powf.
    let xe = if eta == 4.0 {
        let x2 = x * x;
        x2 * x2
    } else {
        x.powf(eta)
    };
    Ok(1.0 / (xe + params.pathloss_offset))
}

/// Received power of one transmitter at the origin receiver: transmit power
/// times fading, path loss, and the gains of both antenna patterns under the
/// shared angle convention.
#[inline]
pub(crate) fn received_power(
    params: &SystemParams,
    link: &LinkGeometry,
    fading: f64,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
) -> Result<f64> {
    let tx_gain = tx_pattern.gain(link.departure_angle());
    let rx_gain = rx_pattern.gain(link.angular_position);
    Ok(params.power * fading * path_loss(params, link.distance)? * tx_gain * rx_gain)
}

/// Exact SINR of the tagged link in one network realization.
///
/// The interference term sums the received powers of every interferer (each
/// weighted by both antenna patterns and its own fading) and couples into
/// the link through the orthogonality factor:
///
/// ```text
/// SINR = P |h|^2 g(t) G Gbar / (N + gamma * sum_k P |h_k|^2 g(t_k) G_k Gbar_k)
/// ```
///
/// With no interferers the result reduces to the SNR and is independent of
/// the orthogonality factor.  When both the noise power and the interference
/// contribution are zero the SINR is unbounded and `f64::INFINITY` is
/// returned (the limit of the expression).
pub fn sinr(
    realization: &NetworkRealization,
    params: &SystemParams,
    tx_pattern: &AntennaPattern,
    rx_pattern: &AntennaPattern,
) -> Result<f64> {
    let signal = received_power(
        params,
        &realization.tagged_link,
        realization.tagged_fading,
        tx_pattern,
        rx_pattern,
    )?;
    let mut interference = 0.0;
    for interferer in &realization.interferers {
        interference += received_power(
            params,
            &interferer.link,
            interferer.fading,
            tx_pattern,
            rx_pattern,
        )?;
    }
    Ok(signal / (params.noise + params.orthogonality * interference))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_close(value: f64, reference: f64, tol: f64) {
        assert!(
            (value - reference).abs() <= tol,
            "value {value} differs from reference {reference} by more than {tol}"
        );
    }

    #[test]
    fn default_params_match_the_canonical_recipe_set() {
        let p = SystemParams::default();
        assert_eq!(p.power, 1.0);
        assert_eq!(p.noise, 1.0);
        assert_eq!(p.threshold, 1.0);
        assert_eq!(p.orthogonality, 0.3);
        assert_eq!(p.pathloss_exponent, 4.0);
        assert_eq!(p.pathloss_offset, 0.0);
        assert_eq!(p.density, 1.0);
        p.validate().unwrap();
    }

    #[test]
    fn params_validation_names_the_offending_field() {
        let mut p = SystemParams::default();
        p.pathloss_exponent = 2.0;
        match p.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "pathloss_exponent"),
            other => panic!("expected InvalidParam, got {other:?}"),
        }
        let mut p = SystemParams::default();
        p.orthogonality = 1.5;
        match p.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "orthogonality"),
            other => panic!("expected InvalidParam, got {other:?}"),
        }
    }

    #[test]
    fn isotropic_gain_is_one_everywhere() {
        let pattern = AntennaPattern {
            directivity: 0.0,
            lobes: 3,
        };
        assert_eq!(pattern.gain(1.234), 1.0);
        assert_eq!(pattern.gain(-27.0), 1.0);
    }

    #[test]
    fn full_directivity_boresight_and_null() {
        let pattern = AntennaPattern::single_lobe(1.0);
        assert_eq!(pattern.gain(0.0), 2.0);
        // The null sits at pi; cosine rounding may leave a last-ulp residue,
        // and the clamp guarantees the result is never negative.
        let null = pattern.gain(PI);
        assert!(null >= 0.0 && null < 1e-15);
    }

    #[test]
    fn gain_is_periodic_to_machine_precision() {
        let pattern = AntennaPattern {
            directivity: 0.7,
            lobes: 4,
        };
        for k in 0..8 {
            let theta = -2.0 + 0.97 * k as f64;
            assert_close(
                pattern.gain(theta),
                pattern.gain(theta + 2.0 * PI),
                1e-12,
            );
        }
    }

    #[test]
    fn gain_has_exactly_n_maxima_per_turn() {
        for lobes in 1..=4u32 {
            let pattern = AntennaPattern {
                directivity: 0.8,
                lobes,
            };
            let samples = 4096;
            let mut maxima = 0;
            for i in 0..samples {
                let theta = 2.0 * PI * i as f64 / samples as f64;
                let prev = pattern.gain(theta - 2.0 * PI / samples as f64);
                let here = pattern.gain(theta);
                let next = pattern.gain(theta + 2.0 * PI / samples as f64);
                if here > prev && here > next {
                    maxima += 1;
                }
            }
            assert_eq!(maxima, lobes, "lobes = {lobes}");
        }
    }

    #[test]
    fn path_loss_trivial_points() {
        let mut params = SystemParams::default();
        assert_eq!(path_loss(&params, 1.0).unwrap(), 1.0);
        params.pathloss_offset = 1.0;
        assert_eq!(path_loss(&params, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn path_loss_quartic_value_and_consistency_with_powf() {
        let params = SystemParams::default();
        // 1 / 0.4^4 by direct arithmetic.
        assert_close(path_loss(&params, 0.4).unwrap(), 39.0625, 1e-12);
        let mut general = params;
        general.pathloss_exponent = 4.0 + 1e-300; // forces the powf branch
        for x in [0.3, 0.9, 2.4, 7.7] {
            assert_close(
                path_loss(&params, x).unwrap(),
                path_loss(&general, x).unwrap(),
                1e-15,
            );
        }
    }

    #[test]
    fn path_loss_is_singular_at_origin_without_offset() {
        let params = SystemParams::default();
        assert!(matches!(
            path_loss(&params, 0.0),
            Err(Error::SingularInput { .. })
        ));
    }

    fn snr_only_realization() -> NetworkRealization {
        NetworkRealization {
            tagged_link: LinkGeometry {
                distance: 1.0,
                angular_position: 0.0,
                orientation: PI,
            },
            tagged_fading: 1.0,
            interferers: Vec::new(),
        }
    }

    #[test]
    fn sinr_without_interferers_is_the_snr() {
        let params = SystemParams::default();
        let iso = AntennaPattern::isotropic();
        let value = sinr(&snr_only_realization(), &params, &iso, &iso).unwrap();
        assert_close(value, 1.0, 1e-15);
    }

    #[test]
    fn sinr_with_zero_orthogonality_ignores_interferers() {
        let mut params = SystemParams::default();
        params.orthogonality = 0.0;
        let iso = AntennaPattern::isotropic();
        let mut realization = snr_only_realization();
        realization.interferers.push(Interferer {
            link: LinkGeometry {
                distance: 0.3,
                angular_position: 1.0,
                orientation: 2.0,
            },
            fading: 5.0,
        });
        let value = sinr(&realization, &params, &iso, &iso).unwrap();
        assert_close(value, 1.0, 1e-15);
    }

    #[test]
    fn sinr_single_interferer_hand_value() {
        // One interferer at distance 1, position angle 0, orientation pi,
        // unit fading, isotropic patterns, full coupling: SINR = 1/(1+1).
        let mut params = SystemParams::default();
        params.orthogonality = 1.0;
        let iso = AntennaPattern::isotropic();
        let mut realization = snr_only_realization();
        realization.interferers.push(Interferer {
            link: LinkGeometry {
                distance: 1.0,
                angular_position: 0.0,
                orientation: PI,
            },
            fading: 1.0,
        });
        let value = sinr(&realization, &params, &iso, &iso).unwrap();
        assert_close(value, 0.5, 1e-15);
    }

    #[test]
    fn sinr_is_monotone_in_coupling_and_fading() {
        let iso = AntennaPattern::isotropic();
        let mut realization = snr_only_realization();
        realization.interferers.push(Interferer {
            link: LinkGeometry {
                distance: 0.8,
                angular_position: 2.0,
                orientation: 0.5,
            },
            fading: 1.7,
        });
        let mut params = SystemParams::default();
        params.orthogonality = 0.2;
        let low = sinr(&realization, &params, &iso, &iso).unwrap();
        params.orthogonality = 0.9;
        let high = sinr(&realization, &params, &iso, &iso).unwrap();
        assert!(high < low);

        let mut brighter = realization.clone();
        brighter.tagged_fading = 2.0;
        assert!(sinr(&brighter, &params, &iso, &iso).unwrap() > high);

        let mut noisier = realization.clone();
        noisier.interferers[0].fading = 3.4;
        assert!(sinr(&noisier, &params, &iso, &iso).unwrap() < high);
    }

    #[test]
    fn sinr_rejects_interferer_at_origin_without_offset() {
        let params = SystemParams::default();
        let iso = AntennaPattern::isotropic();
        let mut realization = snr_only_realization();
        realization.interferers.push(Interferer {
            link: LinkGeometry {
                distance: 0.0,
                angular_position: 0.0,
                orientation: 0.0,
            },
            fading: 1.0,
        });
        assert!(matches!(
            sinr(&realization, &params, &iso, &iso),
            Err(Error::SingularInput { .. })
        ));
    }
}
