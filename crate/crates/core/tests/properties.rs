//! Structural invariants of the public API, checked over randomized inputs.
//!
//! These complement the unit tests' pinned reference values: instead of
//! asking whether a result is the right number, they ask whether families
//! of results relate to each other the way the model demands (bounds,
//! monotonicity, symmetry, scaling).

use beamnet::analytic::{
    connection_probability, data_rate, gain_integral, laplace_exponent, LaplaceArgument,
};
use beamnet::model::{AntennaPattern, LinkGeometry, SystemParams};
use beamnet::{sinr, Interferer, NetworkRealization, QuadratureSpec};

use proptest::prelude::*;

use std::f64::consts::PI;

fn default_params() -> SystemParams {
    SystemParams::default()
}

prop_compose! {
    fn arbitrary_pattern()(directivity in 0.0..=1.0f64, lobes in 1u32..=4) -> AntennaPattern {
        AntennaPattern { directivity, lobes }
    }
}

prop_compose! {
    fn arbitrary_link()(
        distance in 0.01..4.0f64,
        angular_position in 0.0..(2.0 * PI),
        orientation in 0.0..(2.0 * PI),
    ) -> LinkGeometry {
        LinkGeometry { distance, angular_position, orientation }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn connection_probability_is_a_probability(
        link in arbitrary_link(),
        tx in arbitrary_pattern(),
        rx in arbitrary_pattern(),
        threshold in 0.0..4.0f64,
        density in 0.0..4.0f64,
    ) {
        let mut params = default_params();
        params.threshold = threshold;
        params.density = density;
        let value = connection_probability(&params, &link, &tx, &rx).unwrap();
        prop_assert!((0.0..=1.0).contains(&value), "H = {value}");
    }

    #[test]
    fn connection_probability_never_increases_with_distance(
        tx in arbitrary_pattern(),
        rx in arbitrary_pattern(),
        near in 0.05..2.0f64,
        stretch in 1.0..3.0f64,
    ) {
        let link_at = |distance: f64| LinkGeometry {
            distance,
            angular_position: 0.3,
            orientation: PI + 0.3,
        };
        let params = default_params();
        let closer = connection_probability(&params, &link_at(near), &tx, &rx).unwrap();
        let farther =
            connection_probability(&params, &link_at(near * stretch), &tx, &rx).unwrap();
        prop_assert!(farther <= closer, "H({}) = {closer} < H({}) = {farther}",
            near, near * stretch);
    }

    #[test]
    fn gain_average_stays_in_its_bracket(
        directivity in 0.0..=1.0f64,
        pathloss_exponent in 2.2..40.0f64,
    ) {
        let value = gain_integral(pathloss_exponent, directivity).unwrap();
        prop_assert!(value <= 2.0 * PI + 1e-12);
        prop_assert!(value > 5.0, "average {value} implausibly small");
        if directivity > 0.01 {
            prop_assert!(value < 2.0 * PI);
        }
    }

    #[test]
    fn laplace_exponent_scales_as_a_power_law(
        s in 0.01..10.0f64,
        tx in arbitrary_pattern(),
        rx in arbitrary_pattern(),
        pathloss_exponent in 2.2..8.0f64,
    ) {
        // Zero-offset closed form: I(4s) = 4^(2/eta) I(s) exactly.
        let mut params = default_params();
        params.pathloss_exponent = pathloss_exponent;
        let base = laplace_exponent(&params, LaplaceArgument { s }, &tx, &rx).unwrap();
        let scaled =
            laplace_exponent(&params, LaplaceArgument { s: 4.0 * s }, &tx, &rx).unwrap();
        let expected = 4.0f64.powf(2.0 / pathloss_exponent) * base;
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn pattern_gain_is_periodic_and_bounded(
        pattern in arbitrary_pattern(),
        angle in -20.0..20.0f64,
    ) {
        let gain = pattern.gain(angle);
        prop_assert!((0.0..=2.0).contains(&gain));
        let shifted = pattern.gain(angle + 2.0 * PI);
        prop_assert!((gain - shifted).abs() < 1e-9);
    }

    #[test]
    fn extra_interferers_never_raise_the_sinr(
        link in arbitrary_link(),
        tx in arbitrary_pattern(),
        rx in arbitrary_pattern(),
        interferer in arbitrary_link(),
        fading in 0.01..5.0f64,
    ) {
        let params = default_params();
        let quiet = NetworkRealization {
            tagged_link: link,
            tagged_fading: 1.0,
            interferers: vec![],
        };
        let mut crowded = quiet.clone();
        crowded.interferers.push(Interferer { link: interferer, fading });
        let quiet_sinr = sinr(&quiet, &params, &tx, &rx).unwrap();
        let crowded_sinr = sinr(&crowded, &params, &tx, &rx).unwrap();
        prop_assert!(crowded_sinr <= quiet_sinr);
    }
}

#[test]
fn rate_never_increases_with_distance_or_density() {
    let params = default_params();
    let pattern = AntennaPattern::single_lobe(0.5);
    let quad = QuadratureSpec::default();
    let link_at = |distance: f64| LinkGeometry {
        distance,
        angular_position: 0.0,
        orientation: PI,
    };
    let mut previous = f64::INFINITY;
    for distance in [0.2, 0.5, 1.0, 2.0] {
        let value = data_rate(&params, &link_at(distance), &pattern, &pattern, &quad).unwrap();
        assert!(value > 0.0 && value < previous, "t={distance}: {value}");
        previous = value;
    }
    let mut denser = params;
    denser.density = 5.0;
    let sparse = data_rate(&params, &link_at(0.5), &pattern, &pattern, &quad).unwrap();
    let crowded = data_rate(&denser, &link_at(0.5), &pattern, &pattern, &quad).unwrap();
    assert!(crowded < sparse);
}

#[test]
fn connection_probability_rises_strictly_with_interferer_directivity() {
    // The tagged transmitter departs at the pattern's unit crossing (a
    // quarter lobe off boresight), so its own gain is exactly 1 for every
    // directivity and only the interference statistics vary: higher
    // population directivity must strictly raise the connection
    // probability.
    let rx = AntennaPattern::isotropic();
    for lobes in [1u32, 2, 3] {
        let link = LinkGeometry {
            distance: 0.7,
            angular_position: 0.0,
            orientation: PI - PI / (2.0 * f64::from(lobes)),
        };
        let mut previous = 0.0;
        for directivity in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let tx = AntennaPattern { directivity, lobes };
            let value =
                connection_probability(&default_params(), &link, &tx, &rx).unwrap();
            assert!(
                value > previous,
                "lobes={lobes} d={directivity}: {value} <= {previous}"
            );
            previous = value;
        }
    }
}

#[test]
fn null_aligned_geometry_is_the_only_zero() {
    // At full directivity the single-lobe pattern has one exact null; a
    // link seen through it carries nothing, any other link carries
    // something.
    let pattern = AntennaPattern::single_lobe(1.0);
    let params = default_params();
    let nulled = LinkGeometry {
        distance: 0.5,
        angular_position: PI, // receive null points at the transmitter
        orientation: 0.0,
    };
    assert_eq!(
        connection_probability(&params, &nulled, &pattern, &pattern).unwrap(),
        0.0
    );
    let regular = LinkGeometry {
        distance: 0.5,
        angular_position: 2.5,
        orientation: 2.5 + PI,
    };
    let value = connection_probability(&params, &regular, &pattern, &pattern).unwrap();
    assert!(value > 0.0);
}
